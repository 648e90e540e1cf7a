"""Edge weights, shortest paths, and the reset-disambiguation traversal.

An edge's weight is its base length plus half the summed risk premium
c(x)/(1-p(x)) of every still-ambiguous obstacle disk meeting it; an edge
meeting a known-true disk is impassable (+inf). The traversing agent follows
the current minimum-weight path, pauses in front of any edge that meets an
ambiguous disk, pays to disambiguate the nearest such disk, and replans from
where it stands. The traversed route is a walk: vertices may repeat.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from heapq import heappop, heappush
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .geometry import GeometricGraph, entry_parameter, index_edge_disks
from .pointproc import Window
from .sensor import Knowledge, Obstacle, Status

INF = math.inf

# knowledge codes used in the hot loop
_AMBIGUOUS = 0
_KNOWN_TRUE = 1
_KNOWN_FALSE = 2

_KNOW_CODE = {
    Knowledge.AMBIGUOUS: _AMBIGUOUS,
    Knowledge.KNOWN_TRUE: _KNOWN_TRUE,
    Knowledge.KNOWN_FALSE: _KNOWN_FALSE,
}


class InfeasibleSceneError(Exception):
    """Target unreachable under current knowledge, or scene invariants broken."""


@dataclass(frozen=True)
class Scene:
    """Immutable traversal instance: graph, marked obstacles, endpoints.

    Construction indexes disk-edge incidence onto the graph and checks the
    basic invariants (distinct endpoints on the graph, both strictly outside
    every obstacle disk, obstacles marked).
    """

    graph: GeometricGraph
    obstacles: Tuple[Obstacle, ...]
    s: int
    t: int
    window: Optional[Window] = None
    insertion_window: Optional[Window] = None
    seed_info: Tuple = ()

    def __post_init__(self) -> None:
        g = self.graph
        n = g.n_vertices
        if not (0 <= self.s < n and 0 <= self.t < n):
            raise InfeasibleSceneError(f"endpoints ({self.s}, {self.t}) off the graph")
        if self.s == self.t:
            raise InfeasibleSceneError("source equals target")
        for k, o in enumerate(self.obstacles):
            if o.id != k:
                raise ValueError(f"obstacle at position {k} has id {o.id}")
            if o.p is None:
                raise ValueError(f"obstacle {k} has no sensor mark")
            for name, vid in (("source", self.s), ("target", self.t)):
                if o.disk.contains(g.points[vid]):
                    raise InfeasibleSceneError(
                        f"{name} vertex {vid} lies inside obstacle {k}"
                    )
        index_edge_disks(g, [o.disk for o in self.obstacles])


@dataclass(frozen=True)
class DisambiguationEvent:
    at_vertex: int
    obstacle_id: int
    revealed: Status
    cost_paid: float
    event_index: int


@dataclass(frozen=True)
class TraversalResult:
    """Walk, distance, disambiguation events, and total cost C.

    ``actions`` is the interleaved log: ("move", u, v, edge_id) and
    ("disambiguate", vertex, obstacle_id, revealed "T"/"F") tuples in
    occurrence order, so the exact knowledge state at every step can be
    replayed.
    """

    walk: Tuple[int, ...]
    distance: float
    events: Tuple[DisambiguationEvent, ...]
    total_cost: float
    n_dis: int
    actions: Tuple[Tuple, ...] = field(default=(), repr=False)


# ---------- weights ----------


def edge_weight(graph: GeometricGraph, edge_id: int, obstacles: Sequence[Obstacle]) -> float:
    """Weight of one edge under the obstacles' current knowledge states."""
    if graph.edge_disks is None:
        raise ValueError("call index_edge_disks before edge_weight")
    risk = 0.0
    for did in graph.edge_disks[edge_id]:
        o = obstacles[did]
        if o.knowledge is Knowledge.KNOWN_TRUE:
            return INF
        if o.knowledge is Knowledge.AMBIGUOUS:
            risk += o.c / (1.0 - o.p)
    return graph.edges[edge_id][2] + 0.5 * risk


def path_weight(
    graph: GeometricGraph, path: Sequence[int], obstacles: Sequence[Obstacle]
) -> float:
    """Sum of edge weights along a vertex sequence."""
    total = 0.0
    for a, b in zip(path, path[1:]):
        try:
            eid = graph.edge_index(a, b)
        except KeyError:
            raise ValueError(f"vertices {a} and {b} are not adjacent") from None
        total += edge_weight(graph, eid, obstacles)
    return total


class _WeightEngine:
    """Vectorized edge-weight recomputation keyed by a knowledge code array."""

    def __init__(self, graph: GeometricGraph, obstacles: Sequence[Obstacle]):
        incidence = graph.edge_disks
        assert incidence is not None
        pairs = [(e, d) for e, ids in enumerate(incidence) for d in ids]
        if pairs:
            self.inc_edge = np.array([e for e, _ in pairs], dtype=np.int64)
            self.inc_disk = np.array([d for _, d in pairs], dtype=np.int64)
        else:
            self.inc_edge = np.zeros(0, dtype=np.int64)
            self.inc_disk = np.zeros(0, dtype=np.int64)
        self.contrib = np.array([o.c / (1.0 - o.p) for o in obstacles])
        self.base = graph.base_lengths()
        self.n_edges = graph.n_edges

    def weights(self, know: np.ndarray) -> np.ndarray:
        codes = know[self.inc_disk]
        amb = codes == _AMBIGUOUS
        risk = np.bincount(
            self.inc_edge[amb],
            weights=self.contrib[self.inc_disk[amb]],
            minlength=self.n_edges,
        )
        w = self.base + 0.5 * risk
        blocked = np.bincount(self.inc_edge[codes == _KNOWN_TRUE], minlength=self.n_edges)
        w[blocked > 0] = INF
        return w


# ---------- shortest paths ----------


def shortest_path(
    graph: GeometricGraph,
    weights: Union[Sequence[float], np.ndarray, Callable[[int], float]],
    src: int,
    goal: Optional[int] = None,
) -> Tuple[List[float], List[int]]:
    """Dijkstra from ``src``: (distance, predecessor) arrays.

    Weights may be a per-edge sequence or a callable on edge ids; +inf marks
    an impassable edge. Ties are resolved deterministically: vertices leave
    the queue in (distance, id) order and the predecessor of a vertex is the
    smallest-id neighbour attaining its final distance. With ``goal`` given,
    the search may stop once the goal is finalized (its distance and the
    predecessor chain back to ``src`` are final; other entries may be
    tentative).
    """
    ne = graph.n_edges
    if callable(weights):
        weights = np.array([float(weights(e)) for e in range(ne)])
    elif not isinstance(weights, np.ndarray):
        weights = np.asarray(weights, dtype=np.float64)
    if weights.shape != (ne,):
        raise ValueError(f"expected {ne} weights, got shape {weights.shape}")
    if np.isnan(weights).any():
        raise ValueError("edge weights must not be NaN")
    finite = weights[np.isfinite(weights)]
    if finite.size and float(finite.min()) < 0.0:
        raise ValueError(f"edge weights must be >= 0, got {float(finite.min())}")
    w = weights.tolist()
    n = graph.n_vertices
    if not 0 <= src < n:
        raise ValueError(f"source {src} off the graph")
    dist: List[float] = [INF] * n
    pred: List[int] = [-1] * n
    done = bytearray(n)
    indptr = graph._adj_indptr
    nbrs = graph._adj_vertex
    eids = graph._adj_edge
    dist[src] = 0.0
    heap: List[Tuple[float, int]] = [(0.0, src)]
    pop = heappop
    push = heappush
    while heap:
        du, u = pop(heap)
        if done[u]:
            continue
        done[u] = 1
        if u == goal:
            break
        for k in range(indptr[u], indptr[u + 1]):
            v = nbrs[k]
            if done[v]:
                continue
            wk = w[eids[k]]
            if wk == INF:
                continue
            nd = du + wk
            dv = dist[v]
            if nd < dv:
                dist[v] = nd
                pred[v] = u
                push(heap, (nd, v))
            elif nd == dv and u < pred[v]:
                pred[v] = u
    return dist, pred


def extract_path(pred: Sequence[int], src: int, dst: int) -> List[int]:
    """Vertex sequence src..dst from a predecessor array; [] if unreached."""
    if dst != src and pred[dst] < 0:
        return []
    out = [dst]
    v = dst
    while v != src:
        v = pred[v]
        out.append(v)
    out.reverse()
    return out


# ---------- reset-disambiguation traversal ----------


def rd_traverse(scene: Scene) -> TraversalResult:
    """Walk from scene.s to scene.t, disambiguating ahead of risky edges.

    Loop: recompute weights under current knowledge, take the minimum-weight
    path from the current vertex, follow it over edges free of ambiguous
    disks. In front of the first risky edge, stop (its length is not paid),
    disambiguate the ambiguous disk with the smallest entry parameter along
    that edge (ties to the smaller obstacle id), pay its cost, then replan
    from the same vertex. Terminates at the target or raises
    InfeasibleSceneError if the target is cut off under current knowledge.
    """
    graph = scene.graph
    obstacles = scene.obstacles
    incidence = graph.edge_disks
    engine = _WeightEngine(graph, obstacles)
    know = np.array([_KNOW_CODE[o.knowledge] for o in obstacles], dtype=np.int8)
    points = graph.points
    edges = graph.edges
    cur = scene.s
    walk = [cur]
    traveled = 0.0
    events: List[DisambiguationEvent] = []
    actions: List[Tuple] = []
    while cur != scene.t:
        dist, pred = shortest_path(graph, engine.weights(know), cur, goal=scene.t)
        if dist[scene.t] == INF:
            raise InfeasibleSceneError(
                f"target {scene.t} unreachable from {cur} "
                f"after {len(events)} disambiguations"
            )
        path = extract_path(pred, cur, scene.t)
        for a, b in zip(path, path[1:]):
            eid = graph.edge_index(a, b)
            ambiguous = [did for did in incidence[eid] if know[did] == _AMBIGUOUS]
            if ambiguous:
                pa, pb = points[a], points[b]
                target = min(
                    ambiguous,
                    key=lambda did: (entry_parameter(pa, pb, obstacles[did].disk), did),
                )
                ob = obstacles[target]
                know[target] = _KNOWN_TRUE if ob.status is Status.TRUE else _KNOWN_FALSE
                events.append(
                    DisambiguationEvent(
                        at_vertex=a,
                        obstacle_id=target,
                        revealed=ob.status,
                        cost_paid=ob.c,
                        event_index=len(events),
                    )
                )
                actions.append(("disambiguate", a, target, ob.status.value))
                break  # replan from 'a' (== cur)
            walk.append(b)
            traveled += edges[eid][2]
            actions.append(("move", a, b, eid))
            cur = b
    total = traveled + sum(e.cost_paid for e in events)
    return TraversalResult(
        walk=tuple(walk),
        distance=traveled,
        events=tuple(events),
        total_cost=total,
        n_dis=len(events),
        actions=tuple(actions),
    )
