"""Topology file loading and device templates.

Networks are declared as JSON: a channel grid, a node list and an edge list.
Nodes are declared by kind plus a few template parameters (port count,
insertion loss, port roles, per-port channel maps) and the pass-through loss
tensor is generated from the template, so fixture files never spell out raw
m x m x |T| arrays.

Schema sketch::

    { "channels": {"grid": [30,31,32,33,35,36,37,38], "center": 34},
      "nodes": [
        {"id": 0, "name": "S",  "kind": "source", "ports": 5,
         "insertion_loss_db": 4.0, "wss_channels_all_ports": [30, ...]},
        {"id": 1, "name": "F1", "kind": "wss", "ports": 5,
         "insertion_loss_db": 4.0},
        {"id": 2, "name": "F2", "kind": "os", "ports": 4,
         "insertion_loss_db": 0.5, "in_ports": [1, 4], "out_ports": [2, 3]},
        {"id": 3, "name": "F3", "kind": "aos", "ports": 4,
         "insertion_loss_db": 1.0},
        {"id": 4, "name": "D1", "kind": "dwdm", "ports": 5,
         "insertion_loss_db": 1.5,
         "port_channels": {"2": [32], "3": [33], "4": [35], "5": [36]}},
        {"id": 5, "name": "Alice", "kind": "user", "internal_loss_db": 2.0}],
      "edges": [
        {"from": [0, 1], "to": [1, 1], "loss_db": 2.9}] }

Edges are treated as bidirectional fibers (both directed links are added)
unless the record carries ``"directed": true``.  A source node's
``wss_channels_all_ports`` / ``port_channels`` entries are informational:
emission structure is expressed by which fibers hang off which source port.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .channels import ChannelGrid
from .network import (
    KIND_AOS,
    KIND_BS,
    KIND_DWDM,
    KIND_OS,
    KIND_SOURCE,
    KIND_USER,
    KIND_WSS,
    Graph,
    Node,
    SupportVector,
    UNREACHABLE,
)

DEFAULT_SWITCH_SIDES = ((1, 4), (2, 3))


def _blank(ports: int, slots: int) -> np.ndarray:
    return np.full((ports, ports, slots), UNREACHABLE)


def build_source(node_id: int, name: str, ports: int = 1) -> Node:
    """A photon source; never traversed, so its tensor is all-unreachable."""
    return Node(node_id, name, SupportVector(KIND_SOURCE), _blank(ports, 1))


def build_user(node_id: int, name: str, internal_loss_db: float = 2.0) -> Node:
    return Node(
        node_id,
        name,
        SupportVector(KIND_USER),
        _blank(1, 1),
        internal_loss_db=internal_loss_db,
    )


def _switch_tensor(
    ports: int, loss_db: float, in_ports: tuple[int, ...], out_ports: tuple[int, ...]
) -> np.ndarray:
    t = _blank(ports, 1)
    for a in in_ports:
        for b in out_ports:
            t[a - 1, b - 1, 0] = loss_db
            t[b - 1, a - 1, 0] = loss_db
    return t


def build_switch(
    node_id: int,
    name: str,
    kind: str,
    ports: int,
    insertion_loss_db: float,
    in_ports: tuple[int, ...] | None = None,
    out_ports: tuple[int, ...] | None = None,
) -> Node:
    """An OS or AOS: all wavelengths pass between the two port sides."""
    if kind not in (KIND_OS, KIND_AOS):
        raise ValueError(f"build_switch cannot build kind {kind!r}")
    if in_ports is None or out_ports is None:
        if ports != 4:
            raise ValueError("in_ports/out_ports required for non 2x2 switches")
        in_ports, out_ports = DEFAULT_SWITCH_SIDES
    tensor = _switch_tensor(ports, insertion_loss_db, tuple(in_ports), tuple(out_ports))
    return Node(node_id, name, SupportVector(kind), tensor)


def build_splitter(
    node_id: int,
    name: str,
    ports: int,
    in_ports: tuple[int, ...],
    out_ports: tuple[int, ...],
    split_loss_db: float | Mapping[int, float],
) -> Node:
    """A beam splitter: every input reaches every output, per-output loss."""
    t = _blank(ports, 1)
    for a in in_ports:
        for b in out_ports:
            loss = (
                split_loss_db
                if isinstance(split_loss_db, (int, float))
                else split_loss_db[b]
            )
            t[a - 1, b - 1, 0] = loss
            t[b - 1, a - 1, 0] = loss
    return Node(node_id, name, SupportVector(KIND_BS), t)


def build_wss(
    node_id: int,
    name: str,
    ports: int,
    insertion_loss_db: float,
    channels: tuple[int, ...],
    common_port: int = 1,
) -> Node:
    """A wavelength-selective switch: any channel between the common port and
    any leaf port."""
    t = _blank(ports, len(channels))
    for k in range(1, ports + 1):
        if k == common_port:
            continue
        t[common_port - 1, k - 1, :] = insertion_loss_db
        t[k - 1, common_port - 1, :] = insertion_loss_db
    return Node(node_id, name, SupportVector(KIND_WSS, tuple(channels)), t)


def build_dwdm(
    node_id: int,
    name: str,
    ports: int,
    insertion_loss_db: float,
    port_channels: Mapping[int, tuple[int, ...]],
    common_port: int = 1,
) -> Node:
    """A DWDM mux/demux: each leaf port passes a fixed channel set."""
    channels = tuple(sorted({ch for chs in port_channels.values() for ch in chs}))
    t = _blank(ports, len(channels))
    for port, chs in port_channels.items():
        if port == common_port:
            raise ValueError("common port cannot carry a leaf channel set")
        for ch in chs:
            slot = channels.index(ch)
            t[common_port - 1, port - 1, slot] = insertion_loss_db
            t[port - 1, common_port - 1, slot] = insertion_loss_db
    return Node(node_id, name, SupportVector(KIND_DWDM, channels), t)


def _build_node(spec: Mapping[str, Any], grid: ChannelGrid) -> Node:
    kind = spec["kind"]
    node_id = int(spec["id"])
    name = str(spec.get("name", f"n{node_id}"))
    if kind == KIND_SOURCE:
        emission = spec.get("wss_channels_all_ports") or [
            ch for chs in spec.get("port_channels", {}).values() for ch in chs
        ]
        for ch in emission:
            if ch not in grid:
                raise ValueError(f"source lists channel {ch} outside the grid")
        return build_source(node_id, name, int(spec.get("ports", 1)))
    if kind == KIND_USER:
        return build_user(node_id, name, float(spec.get("internal_loss_db", 2.0)))
    if kind in (KIND_OS, KIND_AOS):
        in_ports = tuple(spec["in_ports"]) if "in_ports" in spec else None
        out_ports = tuple(spec["out_ports"]) if "out_ports" in spec else None
        return build_switch(
            node_id,
            name,
            kind,
            int(spec["ports"]),
            float(spec["insertion_loss_db"]),
            in_ports,
            out_ports,
        )
    if kind == KIND_BS:
        split = spec["split_loss_db"]
        if isinstance(split, Mapping):
            split = {int(k): float(v) for k, v in split.items()}
        return build_splitter(
            node_id,
            name,
            int(spec["ports"]),
            tuple(spec["in_ports"]),
            tuple(spec["out_ports"]),
            split,
        )
    if kind == KIND_WSS:
        channels = tuple(spec.get("channels", grid.channels))
        return build_wss(
            node_id,
            name,
            int(spec["ports"]),
            float(spec["insertion_loss_db"]),
            channels,
            int(spec.get("common_port", 1)),
        )
    if kind == KIND_DWDM:
        port_channels = {
            int(port): tuple(chs) for port, chs in spec["port_channels"].items()
        }
        return build_dwdm(
            node_id,
            name,
            int(spec["ports"]),
            float(spec["insertion_loss_db"]),
            port_channels,
            int(spec.get("common_port", 1)),
        )
    raise ValueError(f"unknown node kind {kind!r}")


def load_topology(source: Mapping[str, Any] | str | Path) -> Graph:
    """Build a Graph from a topology mapping, JSON string or file path."""
    if isinstance(source, (str, Path)):
        path = Path(source)
        if path.exists():
            data = json.loads(path.read_text())
        else:
            data = json.loads(str(source))
    else:
        data = source

    chan = data.get("channels", {})
    grid = ChannelGrid(
        channels=tuple(chan.get("grid", (30, 31, 32, 33, 35, 36, 37, 38))),
        center=int(chan.get("center", 34)),
    )
    g = Graph(grid)
    for spec in data["nodes"]:
        g.add_node(_build_node(spec, grid))
    if g.source_id is None:
        raise ValueError("topology has no source node")
    for rec in data.get("edges", []):
        (i, a), (j, b) = rec["from"], rec["to"]
        loss = rec["loss_db"]
        if loss == "inf":
            raise ValueError("edges must have finite loss")
        g.add_edge(int(i), int(a), int(j), int(b), float(loss))
        if not rec.get("directed", False):
            g.add_edge(int(j), int(b), int(i), int(a), float(loss))
    return g
