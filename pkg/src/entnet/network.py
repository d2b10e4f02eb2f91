"""Port-level network model.

A network is a directed multigraph whose nodes are optical devices and whose
edges are fiber links between specific device ports.  Each node carries a
pass-through loss tensor ``w[j, k, l]`` giving the dB attenuation from input
port ``j`` to output port ``k`` on channel slot ``l``, plus a lock record that
pins ports (time-division devices) or individual (port, channel) cells
(wavelength-division devices) to the paths that currently use them.

Ports are 1-based throughout the public API; tensor rows/columns are the
port number minus one.  ``UNREACHABLE`` (float infinity) marks port pairs a
device cannot connect.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channels import ChannelGrid, DEFAULT_GRID
from .errors import ConflictError, NotFoundError, StateError

UNREACHABLE = float("inf")

# Device kinds.  TDM devices route all wavelengths over one port pairing at a
# time; WDM devices route per channel; broadcast devices split to all outputs.
KIND_SOURCE = "source"
KIND_USER = "user"
KIND_BS = "bs"
KIND_OS = "os"
KIND_AOS = "aos"
KIND_WSS = "wss"
KIND_DWDM = "dwdm"

TDM_KINDS = frozenset({KIND_OS, KIND_AOS})
WDM_KINDS = frozenset({KIND_WSS, KIND_DWDM})
ALL_KINDS = frozenset(
    {KIND_SOURCE, KIND_USER, KIND_BS, KIND_OS, KIND_AOS, KIND_WSS, KIND_DWDM}
)


@dataclass(frozen=True)
class SupportVector:
    """Channel support of a device.

    ``channels`` is the ordered slot-to-channel map for WDM devices and None
    for everything else, where a single slot stands for "all wavelengths".
    """

    kind: str
    channels: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if self.kind not in ALL_KINDS:
            raise ValueError(f"unknown device kind {self.kind!r}")
        if self.kind in WDM_KINDS and not self.channels:
            raise ValueError(f"{self.kind} node needs an explicit channel list")
        if self.kind not in WDM_KINDS and self.channels is not None:
            raise ValueError(f"{self.kind} node must not list channels")

    @property
    def slot_count(self) -> int:
        return len(self.channels) if self.channels else 1


@dataclass
class Node:
    """One device: identity, loss tensor and live lock state."""

    id: int
    name: str
    support: SupportVector
    tensor: np.ndarray  # shape (ports, ports, slots), dB losses
    internal_loss_db: float = 0.0  # user terminals only; not part of path loss
    # TDM locks: port -> (peer_port, user_count)
    tdm_locks: dict[int, tuple[int, int]] = field(default_factory=dict)
    # WDM locks: (port, channel) -> peer_port
    wdm_locks: dict[tuple[int, int], int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        expected = (self.ports, self.ports, self.support.slot_count)
        if self.tensor.shape != expected:
            raise ValueError(
                f"node {self.id}: tensor shape {self.tensor.shape} != {expected}"
            )

    @property
    def kind(self) -> str:
        return self.support.kind

    @property
    def ports(self) -> int:
        return self.tensor.shape[0] if self.tensor.ndim == 3 else 0

    def check_port(self, port: int) -> None:
        if not 1 <= port <= self.ports:
            raise NotFoundError(f"node {self.id} has no port {port}")

    def slot_of(self, ch: int) -> int:
        """Channel slot index for ``ch``; TDM-style devices use the single slot."""
        if self.support.channels is None:
            return 0
        try:
            return self.support.channels.index(ch)
        except ValueError:
            raise ValueError(f"node {self.id} does not support channel {ch}") from None

    def supports_channel(self, ch: int) -> bool:
        return self.support.channels is None or ch in self.support.channels


@dataclass(frozen=True)
class Edge:
    """Directed fiber link from (from_node, from_port) to (to_node, to_port)."""

    from_node: int
    from_port: int
    to_node: int
    to_port: int
    loss_db: float

    def __post_init__(self) -> None:
        if not (np.isfinite(self.loss_db) and self.loss_db >= 0):
            raise ValueError("edge loss must be finite and non-negative")


class Graph:
    """Nodes plus directed port-to-port edges, with exactly one source node."""

    def __init__(self, grid: ChannelGrid = DEFAULT_GRID) -> None:
        self.grid = grid
        self.nodes: dict[int, Node] = {}
        self._edges: dict[tuple[int, int, int, int], float] = {}
        self._out_groups: dict[int, dict[tuple[int, int], list[tuple[int, float]]]] | None = None
        self.source_id: int | None = None

    def add_node(self, node: Node) -> None:
        if node.id in self.nodes:
            raise ValueError(f"duplicate node id {node.id}")
        if node.kind == KIND_SOURCE:
            if self.source_id is not None:
                raise ValueError("graph already has a source node")
            self.source_id = node.id
        if node.support.channels is not None:
            for ch in node.support.channels:
                if ch not in self.grid:
                    raise ValueError(
                        f"node {node.id} supports channel {ch} outside the grid"
                    )
        self.nodes[node.id] = node

    def add_edge(
        self, from_node: int, from_port: int, to_node: int, to_port: int, loss_db: float
    ) -> None:
        """Add one directed link; parallel duplicates keep the lowest loss."""
        a, b = self.node(from_node), self.node(to_node)
        a.check_port(from_port)
        b.check_port(to_port)
        key = (from_node, from_port, to_node, to_port)
        prev = self._edges.get(key)
        if prev is None or loss_db < prev:
            self._edges[key] = float(loss_db)
        self._out_groups = None

    def node(self, node_id: int) -> Node:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise NotFoundError(f"unknown node id {node_id}") from None

    def node_by_name(self, name: str) -> Node:
        for node in self.nodes.values():
            if node.name == name:
                return node
        raise NotFoundError(f"unknown node name {name!r}")

    def user_ids(self) -> list[int]:
        return sorted(n.id for n in self.nodes.values() if n.kind == KIND_USER)

    def edges(self) -> list[Edge]:
        return [
            Edge(i, a, j, b, loss)
            for (i, a, j, b), loss in sorted(self._edges.items())
        ]

    def edge_loss(self, from_node: int, from_port: int, to_node: int, to_port: int) -> float:
        return self._edges.get((from_node, from_port, to_node, to_port), UNREACHABLE)

    def out_groups(self, node_id: int) -> dict[tuple[int, int], list[tuple[int, float]]]:
        """Edges leaving ``node_id`` grouped by destination (node, port).

        Each group is a list of (from_port, loss) sorted by from_port.
        """
        if self._out_groups is None:
            groups: dict[int, dict[tuple[int, int], list[tuple[int, float]]]] = {
                nid: {} for nid in self.nodes
            }
            for (i, a, j, b), loss in sorted(self._edges.items()):
                groups[i].setdefault((j, b), []).append((a, loss))
            self._out_groups = groups
        return self._out_groups.get(node_id, {})


def edge_loss_matrix(g: Graph, i: int, j: int) -> np.ndarray:
    """The m_i x m_j matrix of direct link losses from node i to node j.

    Entry (a-1, b-1) is the loss of the edge from port a of i to port b of j,
    or UNREACHABLE when no such link exists.
    """
    ni, nj = g.node(i), g.node(j)
    mat = np.full((ni.ports, nj.ports), UNREACHABLE)
    for (fi, fp, ti, tp), loss in g._edges.items():
        if fi == i and ti == j:
            mat[fp - 1, tp - 1] = loss
    return mat


def effective_slice(node: Node, in_port: int) -> np.ndarray:
    """Loss matrix seen by light entering ``in_port``, honoring locks.

    Unlocked ports expose the raw tensor slice.  A TDM port locked to peer g
    exposes only row g (the pinned pairing stays usable; everything else is
    blanked).  A WDM channel lock on (in_port, ch) blanks ch on every row
    except the locked peer's, so the channel stays visible only toward the
    port it is already routed to.
    """
    node.check_port(in_port)
    raw = node.tensor[in_port - 1, :, :]
    if node.kind in TDM_KINDS:
        locked = node.tdm_locks.get(in_port)
        if locked is not None:
            peer, _count = locked
            out = np.full_like(raw, UNREACHABLE)
            out[peer - 1, :] = raw[peer - 1, :]
            return out
        return raw.copy()
    if node.kind in WDM_KINDS:
        out = raw.copy()
        for (port, ch), peer in node.wdm_locks.items():
            if port != in_port:
                continue
            slot = node.slot_of(ch)
            col = out[:, slot].copy()
            out[:, slot] = UNREACHABLE
            out[peer - 1, slot] = col[peer - 1]
        return out
    return raw.copy()


# ---------------------------------------------------------------------------
# Path encodings
#
# A path is a flat integer tuple alternating node id and port id, starting at
# the source: (n0, p0, n1, p1, n1, p1', n2, p2, ...).  Every consecutive
# 4-tuple (ni, a, nj, b) with an odd offset is a fiber hop; a repeated node id
# (nj, b, nj, b') is an internal traversal from input port b to output b'.
# ---------------------------------------------------------------------------

PathEncoding = tuple[int, ...]


def path_edges(path: PathEncoding) -> list[tuple[int, int, int, int]]:
    """The fiber hops of a path as (from_node, from_port, to_node, to_port)."""
    if len(path) % 4 != 0:
        raise ValueError(f"malformed path encoding {path!r}")
    return [tuple(path[k : k + 4]) for k in range(0, len(path), 4)]


def path_traversals(path: PathEncoding) -> list[tuple[int, int, int]]:
    """Internal device crossings of a path as (node, in_port, out_port)."""
    hops = path_edges(path)
    out: list[tuple[int, int, int]] = []
    for prev, nxt in zip(hops, hops[1:]):
        if prev[2] != nxt[0]:
            raise ValueError(f"discontinuous path encoding {path!r}")
        out.append((prev[2], prev[3], nxt[1]))
    return out


def path_node_sequence(path: PathEncoding) -> list[int]:
    """Node ids along the path, consecutive duplicates collapsed."""
    seq: list[int] = []
    for k in range(0, len(path), 2):
        nid = path[k]
        if not seq or seq[-1] != nid:
            seq.append(nid)
    return seq


def validate_path(g: Graph, path: PathEncoding) -> None:
    """Check that every hop exists in g and every traversal uses valid ports."""
    if not path:
        return
    for i, a, j, b in path_edges(path):
        if (i, a, j, b) not in g._edges:
            raise ValueError(f"path hop ({i},{a})->({j},{b}) is not an edge")
    for nid, a, b in path_traversals(path):
        node = g.node(nid)
        node.check_port(a)
        node.check_port(b)


# ---------------------------------------------------------------------------
# Lock / unlock operations
# ---------------------------------------------------------------------------


def _tdm_traversals(g: Graph, path: PathEncoding) -> list[tuple[Node, int, int]]:
    out = []
    for nid, a, b in path_traversals(path):
        node = g.node(nid)
        if node.kind in TDM_KINDS:
            out.append((node, a, b))
    return out


def _wdm_traversals(g: Graph, path: PathEncoding) -> list[tuple[Node, int, int]]:
    out = []
    for nid, a, b in path_traversals(path):
        node = g.node(nid)
        if node.kind in WDM_KINDS:
            out.append((node, a, b))
    return out


def lock_ports(g: Graph, path: PathEncoding) -> None:
    """Pin the TDM port pairings a path crosses; re-entrant via user counts.

    Raises ConflictError (before mutating anything) if any crossed port is
    already pinned to a different peer.
    """
    validate_path(g, path)
    plan = _tdm_traversals(g, path)
    for node, a, b in plan:
        for port, peer in ((a, b), (b, a)):
            held = node.tdm_locks.get(port)
            if held is not None and held[0] != peer:
                raise ConflictError(
                    f"node {node.id} port {port} is locked to port {held[0]}, "
                    f"cannot lock to port {peer}"
                )
    for node, a, b in plan:
        count = node.tdm_locks.get(a, (b, 0))[1] + 1
        node.tdm_locks[a] = (b, count)
        node.tdm_locks[b] = (a, count)


def unlock_ports(g: Graph, path: PathEncoding) -> None:
    """Inverse of lock_ports; the pin clears when its user count reaches zero."""
    validate_path(g, path)
    plan = _tdm_traversals(g, path)
    for node, a, b in plan:
        held = node.tdm_locks.get(a)
        if held is None or held[0] != b:
            raise StateError(
                f"node {node.id} ports {a}<->{b} are not locked as a pair"
            )
    for node, a, b in plan:
        count = node.tdm_locks[a][1] - 1
        if count == 0:
            del node.tdm_locks[a]
            del node.tdm_locks[b]
        else:
            node.tdm_locks[a] = (b, count)
            node.tdm_locks[b] = (a, count)


def lock_channels(g: Graph, path: PathEncoding, chs: list[int]) -> None:
    """Pin channels on every WDM device a path crosses, symmetrically.

    Re-locking a (port, channel) to the same peer is a no-op; locking it to a
    different peer raises ConflictError.  Unsupported channels raise
    ValueError.  The check pass runs before any mutation.
    """
    validate_path(g, path)
    plan = _wdm_traversals(g, path)
    for node, a, b in plan:
        for ch in chs:
            if not node.supports_channel(ch):
                raise ValueError(
                    f"node {node.id} does not support channel {ch}"
                )
            for port, peer in ((a, b), (b, a)):
                held = node.wdm_locks.get((port, ch))
                if held is not None and held != peer:
                    raise ConflictError(
                        f"node {node.id} port {port} channel {ch} locked to "
                        f"port {held}, cannot lock to port {peer}"
                    )
    for node, a, b in plan:
        for ch in chs:
            node.wdm_locks[(a, ch)] = b
            node.wdm_locks[(b, ch)] = a


def unlock_channels(g: Graph, path: PathEncoding, chs: list[int]) -> None:
    """Inverse of lock_channels."""
    validate_path(g, path)
    plan = _wdm_traversals(g, path)
    for node, a, b in plan:
        for ch in chs:
            if node.wdm_locks.get((a, ch)) != b or node.wdm_locks.get((b, ch)) != a:
                raise StateError(
                    f"node {node.id} ports {a}<->{b} channel {ch} is not locked"
                )
    for node, a, b in plan:
        for ch in chs:
            del node.wdm_locks[(a, ch)]
            del node.wdm_locks[(b, ch)]
