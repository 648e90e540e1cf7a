"""Planar primitives, 8-adjacency lattices, and segment-disk incidence.

Everything downstream (samplers, weights, traversal) works on the types in
this module. All comparisons against disk radii are done on squared
distances with the inequality cross-multiplied, so there is no epsilon
anywhere and results are bit-reproducible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class Point2:
    """A point in the plane (grid units)."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite coordinates ({self.x}, {self.y})")


@dataclass(frozen=True)
class Disk:
    """A closed disk: center plus strictly positive radius."""

    center: Point2
    radius: float

    def __post_init__(self) -> None:
        if not (self.radius > 0.0 and math.isfinite(self.radius)):
            raise ValueError(f"disk radius must be > 0, got {self.radius}")

    def contains(self, p: Point2) -> bool:
        dx = p.x - self.center.x
        dy = p.y - self.center.y
        return dx * dx + dy * dy <= self.radius * self.radius


class GeometricGraph:
    """Undirected graph with planar vertex coordinates and positive edge lengths.

    Vertices are integer ids 0..n-1 indexing ``points``. Edges are stored
    once as (u, v, length) with u < v. ``edge_disks`` is filled in by
    :func:`index_edge_disks` and holds, per edge, the sorted ids of the disks
    whose closed area meets the edge segment.
    """

    __slots__ = (
        "points",
        "edges",
        "edge_disks",
        "_adj_indptr",
        "_adj_vertex",
        "_adj_edge",
        "_edge_id",
        "_seg_arrays",
    )

    def __init__(self, points: Sequence[Point2], edges: Iterable[Tuple[int, int, float]]):
        self.points: List[Point2] = list(points)
        n = len(self.points)
        cleaned: List[Tuple[int, int, float]] = []
        seen = set()
        for u, v, length in edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) references missing vertex")
            if not (length > 0.0 and math.isfinite(length)):
                raise ValueError(f"edge ({u},{v}) has non-positive length {length}")
            if u > v:
                u, v = v, u
            if (u, v) in seen:
                raise ValueError(f"duplicate edge ({u},{v})")
            seen.add((u, v))
            cleaned.append((u, v, float(length)))
        self.edges: List[Tuple[int, int, float]] = cleaned
        self.edge_disks: Optional[List[List[int]]] = None
        self._edge_id = {(u, v): k for k, (u, v, _) in enumerate(cleaned)}
        self._build_adjacency()
        self._seg_arrays = None  # built lazily for vectorized incidence

    # ---------- structure ----------

    def _build_adjacency(self) -> None:
        n = len(self.points)
        deg = [0] * n
        for u, v, _ in self.edges:
            deg[u] += 1
            deg[v] += 1
        indptr = [0] * (n + 1)
        for i in range(n):
            indptr[i + 1] = indptr[i] + deg[i]
        vert = [0] * (2 * len(self.edges))
        eidx = [0] * (2 * len(self.edges))
        cursor = indptr[:-1].copy()
        for k, (u, v, _) in enumerate(self.edges):
            vert[cursor[u]] = v
            eidx[cursor[u]] = k
            cursor[u] += 1
            vert[cursor[v]] = u
            eidx[cursor[v]] = k
            cursor[v] += 1
        # plain lists: fastest scalar access inside the Dijkstra loop
        self._adj_indptr = indptr
        self._adj_vertex = vert
        self._adj_edge = eidx

    @property
    def n_vertices(self) -> int:
        return len(self.points)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return self._adj_indptr[v + 1] - self._adj_indptr[v]

    def edge_index(self, u: int, v: int) -> int:
        """Id of the edge joining u and v; KeyError if absent."""
        return self._edge_id[(u, v) if u < v else (v, u)]

    def base_lengths(self) -> np.ndarray:
        return np.array([length for _, _, length in self.edges], dtype=np.float64)

    def bare_copy(self) -> "GeometricGraph":
        """Same topology and coordinates, fresh (empty) incidence slot.

        Structure lists are shared; they are never mutated after construction.
        """
        g = object.__new__(GeometricGraph)
        g.points = self.points
        g.edges = self.edges
        g.edge_disks = None
        g._edge_id = self._edge_id
        g._adj_indptr = self._adj_indptr
        g._adj_vertex = self._adj_vertex
        g._adj_edge = self._adj_edge
        g._seg_arrays = self._seg_arrays
        return g

    def segment_arrays(self):
        """Per-edge endpoint arrays (ax, ay, bx, by), cached."""
        if self._seg_arrays is None:
            pts = self.points
            ax = np.array([pts[u].x for u, _, _ in self.edges])
            ay = np.array([pts[u].y for u, _, _ in self.edges])
            bx = np.array([pts[v].x for _, v, _ in self.edges])
            by = np.array([pts[v].y for _, v, _ in self.edges])
            self._seg_arrays = (ax, ay, bx, by)
        return self._seg_arrays


def lattice_vertex(width: int, i: int, j: int) -> int:
    """Vertex id of integer point (i, j) on a lattice built by build_lattice."""
    return j * width + i


def build_lattice(width: int, height: int) -> GeometricGraph:
    """8-adjacency integer lattice: unit axis edges plus both cell diagonals.

    Vertex ids are row-major: (i, j) -> j*width + i with 0 <= i < width,
    0 <= j < height. Corner vertices have degree 3, edge vertices 5,
    interior vertices 8.
    """
    if width < 2 or height < 2:
        raise ValueError(f"lattice dimensions must be >= 2, got {width}x{height}")
    points = [Point2(float(i), float(j)) for j in range(height) for i in range(width)]
    edges: List[Tuple[int, int, float]] = []
    for j in range(height):
        base = j * width
        for i in range(width):
            v = base + i
            if i + 1 < width:
                edges.append((v, v + 1, 1.0))
            if j + 1 < height:
                edges.append((v, v + width, 1.0))
                if i + 1 < width:
                    edges.append((v, v + width + 1, SQRT2))  # down-right diagonal
                if i > 0:
                    edges.append((v, v + width - 1, SQRT2))  # down-left diagonal
    return GeometricGraph(points, edges)


# ---------- segment / disk predicates ----------


def _check_segment(a: Point2, b: Point2) -> None:
    if a.x == b.x and a.y == b.y:
        raise ValueError(f"degenerate segment at ({a.x}, {a.y})")


def segment_disk_intersects(a: Point2, b: Point2, d: Disk) -> bool:
    """True iff the closed disk meets the closed segment [a, b].

    Minimum squared distance from the segment to the center is compared to
    the squared radius. The interior case is cross-multiplied by |b-a|^2 so
    no division occurs.
    """
    _check_segment(a, b)
    abx = b.x - a.x
    aby = b.y - a.y
    acx = d.center.x - a.x
    acy = d.center.y - a.y
    ab2 = abx * abx + aby * aby
    tnum = acx * abx + acy * aby
    r2 = d.radius * d.radius
    if tnum <= 0.0:  # nearest point is a
        return acx * acx + acy * acy <= r2
    if tnum >= ab2:  # nearest point is b
        bcx = d.center.x - b.x
        bcy = d.center.y - b.y
        return bcx * bcx + bcy * bcy <= r2
    # nearest point interior: dist^2 * ab2 = |ac|^2*ab2 - tnum^2
    return (acx * acx + acy * acy) * ab2 - tnum * tnum <= r2 * ab2


def entry_parameter(a: Point2, b: Point2, d: Disk) -> Optional[float]:
    """Smallest t in [0,1] with a + t*(b-a) inside the closed disk, or None.

    Guaranteed to return a value exactly when segment_disk_intersects is
    true for the same inputs: the same predicate gates the computation, and
    tangency-rounding in the quadratic falls back to the clamped foot of the
    perpendicular.
    """
    if not segment_disk_intersects(a, b, d):
        return None
    acx = d.center.x - a.x
    acy = d.center.y - a.y
    r2 = d.radius * d.radius
    c0 = acx * acx + acy * acy - r2
    if c0 <= 0.0:  # a already inside
        return 0.0
    abx = b.x - a.x
    aby = b.y - a.y
    ab2 = abx * abx + aby * aby
    tnum = acx * abx + acy * aby
    disc = tnum * tnum - ab2 * c0
    if disc > 0.0:
        t = (tnum - math.sqrt(disc)) / ab2
    else:
        # tangent contact (or rounding ate the discriminant): entry at the
        # projection of the center onto the segment
        t = tnum / ab2
    if t < 0.0:
        t = 0.0
    elif t > 1.0:
        t = 1.0
    return t


def index_edge_disks(graph: GeometricGraph, disks: Sequence[Disk]) -> List[List[int]]:
    """Per-edge sorted lists of disk ids intersecting the edge segment.

    Vectorized over edges per disk; the arithmetic mirrors
    segment_disk_intersects term for term, so the incidence is bitwise
    consistent with the scalar predicate. The result is also stored on
    ``graph.edge_disks``.
    """
    ne = graph.n_edges
    incidence: List[List[int]] = [[] for _ in range(ne)]
    if disks:
        ax, ay, bx, by = graph.segment_arrays()
        abx = bx - ax
        aby = by - ay
        ab2 = abx * abx + aby * aby
        for did, disk in enumerate(disks):
            cx, cy, r = disk.center.x, disk.center.y, disk.radius
            acx = cx - ax
            acy = cy - ay
            tnum = acx * abx + acy * aby
            r2 = r * r
            at_a = acx * acx + acy * acy <= r2
            bcx = cx - bx
            bcy = cy - by
            at_b = bcx * bcx + bcy * bcy <= r2
            interior = (acx * acx + acy * acy) * ab2 - tnum * tnum <= r2 * ab2
            hit = np.where(tnum <= 0.0, at_a, np.where(tnum >= ab2, at_b, interior))
            for eid in np.flatnonzero(hit):
                incidence[eid].append(did)
    graph.edge_disks = incidence
    return incidence
