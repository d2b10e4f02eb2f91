"""Lowest-loss path search over port-level loss tensors.

A Dijkstra-style relaxation where the search state lives on (node, port)
pairs rather than nodes.  Expanding a popped port slices the device's loss
tensor (so TDM port pins and per-channel locks shape what is reachable),
adds the outgoing fiber losses, and relaxes each neighbouring port with the
cheapest (output port, channel) combination.  The winning row of that
combination also determines which wavelength channels the finished path can
and cannot carry.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NoPathError, NotFoundError
from .network import (
    Graph,
    PathEncoding,
    UNREACHABLE,
    effective_slice,
    path_edges,
    path_traversals,
)


@dataclass(frozen=True)
class PathRecord:
    """A finished source-to-node path with its loss and channel partition.

    ``available`` holds the channels the final relaxation found open;
    ``occupied`` the channels that were visible but blocked (unsupported by
    the deciding device row or pinned by a lock).  The two sets are disjoint.
    """

    path: PathEncoding
    loss: float
    available: frozenset[int]
    occupied: frozenset[int]

    @property
    def target(self) -> int:
        return self.path[-2] if self.path else -1


@dataclass
class SearchState:
    """Mutable per-(node, port) relaxation state."""

    loss: dict[tuple[int, int], float] = field(default_factory=dict)
    path: dict[tuple[int, int], PathEncoding] = field(default_factory=dict)
    available: dict[tuple[int, int], frozenset[int]] = field(default_factory=dict)
    occupied: dict[tuple[int, int], frozenset[int]] = field(default_factory=dict)
    visited: set[tuple[int, int]] = field(default_factory=set)


def initial(g: Graph, s: int) -> SearchState:
    """Seed the search with the source's direct links.

    Every source port is marked visited; each port wired straight to the
    source starts with that link's loss and a one-hop path.  Ports reached
    without crossing any device default to the full channel grid.
    """
    if s != g.source_id:
        raise NotFoundError(f"node {s} is not the source node")
    state = SearchState()
    src = g.node(s)
    for port in range(1, src.ports + 1):
        state.visited.add((s, port))
    full = frozenset(g.grid.channels)
    for (r, beta), cands in g.out_groups(s).items():
        for _from_port, loss in cands:
            key = (r, beta)
            if loss < state.loss.get(key, UNREACHABLE):
                state.loss[key] = loss
                state.path[key] = (s, _from_port, r, beta)
                state.available[key] = full
                state.occupied[key] = frozenset()
    return state


def cheapest_unvisited(state: SearchState) -> tuple[int, int] | None:
    """The unvisited (node, port) with the smallest accumulated loss.

    Ties break toward the lowest node id, then the lowest port.  Returns
    None when every reachable port has been visited (search exhausted).
    """
    best_key: tuple[int, int] | None = None
    best_loss = UNREACHABLE
    for key in sorted(state.loss):
        if key in state.visited:
            continue
        loss = state.loss[key]
        if loss < best_loss:
            best_loss, best_key = loss, key
    return best_key


def _partition(g: Graph, node, row: np.ndarray) -> tuple[frozenset[int], frozenset[int]]:
    """Map a device row's finite/blocked slots to channel sets."""
    finite = np.isfinite(row)
    if node.support.channels is None:
        if finite[0]:
            return frozenset(g.grid.channels), frozenset()
        return frozenset(), frozenset(g.grid.channels)
    avail = frozenset(ch for slot, ch in enumerate(node.support.channels) if finite[slot])
    occ = frozenset(node.support.channels) - avail
    return avail, occ


def path_search(g: Graph, s: int, target: int) -> PathRecord:
    """Find the lowest-loss path from the source to any port of ``target``.

    Honors the graph's current lock state.  Raises NoPathError when the
    search exhausts without reaching the target, NotFoundError for unknown
    ids, ValueError when target is the source itself.
    """
    g.node(target)
    if target == s:
        raise ValueError("target must differ from the source")
    state = initial(g, s)
    while True:
        pick = cheapest_unvisited(state)
        if pick is None:
            raise NoPathError(f"no path from source {s} to node {target}")
        q, alpha = pick
        state.visited.add(pick)
        if q == target:
            return PathRecord(
                path=state.path[pick],
                loss=state.loss[pick],
                available=state.available[pick],
                occupied=state.occupied[pick],
            )
        node = g.node(q)
        X = effective_slice(node, alpha)
        row_min = X.min(axis=1)
        base = state.loss[pick]
        for (r, beta), cands in g.out_groups(q).items():
            best = UNREACHABLE
            best_row = -1
            for from_port, edge_loss in cands:
                v = row_min[from_port - 1] + edge_loss
                if v < best:
                    best, best_row = v, from_port
            if best == UNREACHABLE:
                continue
            key = (r, beta)
            new_loss = base + best
            if new_loss < state.loss.get(key, UNREACHABLE):
                state.loss[key] = new_loss
                state.path[key] = state.path[pick] + (q, best_row, r, beta)
                avail, occ = _partition(g, node, X[best_row - 1, :])
                state.available[key] = avail
                state.occupied[key] = occ


def recompute_loss(g: Graph, path: PathEncoding, ch: int) -> float:
    """Independent loss check: direct summation of a path on one channel.

    Sums fiber losses plus each crossed device's effective (lock-aware) loss
    on ``ch``.  Returns UNREACHABLE when any device on the path cannot carry
    the channel through the ports the path uses.  An empty path costs 0.
    """
    if not path:
        return 0.0
    if ch not in g.grid:
        raise ValueError(f"channel {ch} is outside the grid")
    total = 0.0
    for i, a, j, b in path_edges(path):
        loss = g.edge_loss(i, a, j, b)
        if loss == UNREACHABLE:
            raise ValueError(f"path hop ({i},{a})->({j},{b}) is not an edge")
        total += loss
    for nid, a, b in path_traversals(path):
        node = g.node(nid)
        if not node.supports_channel(ch):
            return UNREACHABLE
        X = effective_slice(node, a)
        step = X[b - 1, node.slot_of(ch)]
        if step == UNREACHABLE:
            return UNREACHABLE
        total += step
    return total
