"""Empirical checks of the stochastic-ordering results on fixed-path weights.

The comparisons here hold the traversed path fixed and look at the planning
weight W = L + 0.5 * sum_x k_x * c/(1-p_x), where k_x counts the path edges
the obstacle disk meets. Scenes are coupled: within one replication every
compared scenario shares the same obstacle centers (bitwise) and the same
mark-source stream, and truth labels are nested prefixes of one permutation,
mirroring the partition arguments the theory uses.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .geometry import GeometricGraph, lattice_vertex
from .montecarlo import (
    DEFAULT_COST,
    DEFAULT_GRID,
    DEFAULT_INSERTION,
    DEFAULT_RADIUS,
    Placement,
    UniformPlacement,
    _lattice,
    placement_key,
    stream_index,
)
from .pointproc import RngStream, Window
from .sensor import SensorModel, beta_cdf, beta_variates


@dataclass(frozen=True)
class Ecdf:
    """Empirical CDF: F(t) = (#values <= t) / n."""

    values: np.ndarray  # sorted ascending
    n: int

    @classmethod
    def from_samples(cls, samples) -> "Ecdf":
        arr = np.sort(np.asarray(samples, dtype=np.float64))
        if arr.size == 0:
            raise ValueError("empty sample")
        return cls(values=arr, n=arr.size)

    def evaluate(self, ts) -> np.ndarray:
        return np.searchsorted(self.values, ts, side="right") / self.n


@dataclass(frozen=True)
class OrderingReport:
    label_x: str
    label_y: str
    dominance_holds: bool
    max_violation: float
    n_x: int
    n_y: int
    mean_x: float
    mean_y: float
    median_x: float
    median_y: float
    tol: float


def dominates_st(
    x_samples,
    y_samples,
    tol: float = 0.0,
    label_x: str = "X",
    label_y: str = "Y",
) -> OrderingReport:
    """Test X <=_st Y on samples: F_X(t) >= F_Y(t) - tol over the merged support.

    max_violation is max_t (F_Y(t) - F_X(t)); dominance holds iff it is <= tol.
    """
    if tol < 0:
        raise ValueError("tol must be >= 0")
    fx = Ecdf.from_samples(x_samples)
    fy = Ecdf.from_samples(y_samples)
    grid = np.concatenate([fx.values, fy.values])
    grid.sort(kind="mergesort")
    violation = float(np.max(fy.evaluate(grid) - fx.evaluate(grid)))
    return OrderingReport(
        label_x=label_x,
        label_y=label_y,
        dominance_holds=violation <= tol,
        max_violation=violation,
        n_x=fx.n,
        n_y=fy.n,
        mean_x=float(fx.values.mean()),
        mean_y=float(fy.values.mean()),
        median_x=float(np.median(fx.values)),
        median_y=float(np.median(fy.values)),
        tol=tol,
    )


# ---------- fixed-path weight machinery ----------


def default_column_path(
    grid: Tuple[int, int] = DEFAULT_GRID,
    x: int = 50,
    y_from: int = 100,
    y_to: int = 1,
) -> List[int]:
    """The straight source-to-target column used by the ordering experiments."""
    w, _ = grid
    step = -1 if y_to < y_from else 1
    return [lattice_vertex(w, x, y) for y in range(y_from, y_to + step, step)]


class _FixedPath:
    """Precomputed segment arrays and incidence counting for one path."""

    def __init__(self, graph: GeometricGraph, path: Sequence[int]):
        if len(path) < 2:
            raise ValueError("path needs at least two vertices")
        pts = graph.points
        lengths = []
        for u, v in zip(path, path[1:]):
            lengths.append(graph.edges[graph.edge_index(u, v)][2])
        self.length = float(sum(lengths))
        self.ax = np.array([pts[u].x for u in path[:-1]])[:, None]
        self.ay = np.array([pts[u].y for u in path[:-1]])[:, None]
        bx = np.array([pts[v].x for v in path[1:]])[:, None]
        by = np.array([pts[v].y for v in path[1:]])[:, None]
        self.abx = bx - self.ax
        self.aby = by - self.ay
        self.ab2 = self.abx * self.abx + self.aby * self.aby
        self.bx = bx
        self.by = by
        self.key = f"{len(path)}:{path[0]}-{path[-1]}"

    def edge_hits(self, px: np.ndarray, py: np.ndarray, r: float) -> np.ndarray:
        """Per obstacle, how many path edges its closed disk of radius r meets.

        Same expressions as geometry.segment_disk_intersects, broadcast over
        (edges, obstacles).
        """
        acx = px[None, :] - self.ax
        acy = py[None, :] - self.ay
        tnum = acx * self.abx + acy * self.aby
        r2 = r * r
        at_a = acx * acx + acy * acy <= r2
        bcx = px[None, :] - self.bx
        bcy = py[None, :] - self.by
        at_b = bcx * bcx + bcy * bcy <= r2
        interior = (acx * acx + acy * acy) * self.ab2 - tnum * tnum <= r2 * self.ab2
        hit = np.where(tnum <= 0.0, at_a, np.where(tnum >= self.ab2, at_b, interior))
        return hit.sum(axis=0)


def _coupled_rep(
    fixed: _FixedPath,
    n_o: int,
    placement: Placement,
    variants: Sequence[Tuple[str, int, SensorModel]],
    insertion: Window,
    cost: float,
    radius: float,
    master_seed: int,
    cell: str,
    rep: int,
):
    """One replication: shared placement and permutation, per-variant marks.

    ``variants`` holds (label, n_true, sensor model). Returns the obstacle
    center arrays, the permutation, and {label: (true_id_set, marks, W)}.
    """
    place_stream = RngStream(master_seed, stream_index(cell, rep, "placement"))
    status_stream = RngStream(master_seed, stream_index(cell, rep, "status"))
    marks_key = stream_index(cell, rep, "marks")
    pts = placement.sample(n_o, insertion, place_stream)
    px = np.array([p.x for p in pts])
    py = np.array([p.y for p in pts])
    hits = fixed.edge_hits(px, py, radius)
    perm = status_stream.generator().permutation(n_o)
    out = {}
    for label, n_true, sensor in variants:
        true_mask = np.zeros(n_o, dtype=bool)
        true_mask[perm[:n_true]] = True
        a_arr = np.where(true_mask, sensor.b, sensor.a)
        b_arr = np.where(true_mask, sensor.a, sensor.b)
        gen = RngStream(master_seed, marks_key).generator()
        marks = beta_variates(a_arr, b_arr, gen)
        w = fixed.length + 0.5 * float(np.sum(hits * (cost / (1.0 - marks))))
        out[label] = (frozenset(int(i) for i in perm[:n_true]), marks, w)
    return px, py, perm, out


def _run_variants(
    n_o: int,
    placement: Placement,
    variants: Sequence[Tuple[str, int, SensorModel]],
    reps: int,
    path: Optional[Sequence[int]],
    *,
    grid: Tuple[int, int] = DEFAULT_GRID,
    insertion: Window = DEFAULT_INSERTION,
    cost: float = DEFAULT_COST,
    radius: float = DEFAULT_RADIUS,
    master_seed: int = 0,
    tag: str = "ordering",
) -> Dict[str, np.ndarray]:
    if reps < 1:
        raise ValueError("reps must be >= 1")
    graph = _lattice(grid)
    if path is None:
        path = default_column_path(grid)
    fixed = _FixedPath(graph, path)
    labels = [v[0] for v in variants]
    cell = (
        f"{tag}/n={n_o}/{placement_key(placement)}/r={radius}/c={cost}"
        f"/path={fixed.key}"
    )
    samples: Dict[str, List[float]] = {lab: [] for lab in labels}
    for rep in range(reps):
        _, _, _, out = _coupled_rep(
            fixed, n_o, placement, variants, insertion, cost, radius,
            master_seed, cell, rep,
        )
        for lab in labels:
            samples[lab].append(out[lab][2])
    return {lab: np.array(vals) for lab, vals in samples.items()}


# ---------- the ordering experiments ----------


def coupled_composition_samples(
    n_o: int,
    placement: Placement = UniformPlacement(),
    sensor: SensorModel = SensorModel(2.0, 6.0),
    reps: int = 10_000,
    path: Optional[Sequence[int]] = None,
    **kwargs,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Coupled fixed-path weights for all-false / half-true / all-true fields.

    Per replication one placement and one mark-source stream are drawn; the
    three scenarios relabel the same points (marks redrawn per status from
    the correct Beta). Returns (W_false, W_mixed, W_true).
    """
    variants = [
        ("falseonly", 0, sensor),
        ("mixed", n_o // 2, sensor),
        ("trueonly", n_o, sensor),
    ]
    out = _run_variants(n_o, placement, variants, reps, path, tag="coupled", **kwargs)
    return out["falseonly"], out["mixed"], out["trueonly"]


def true_count_for_ratio(rho: float, n_o: int) -> int:
    """n_T = round(rho * n_o / (1 + rho)); rho=inf means all true."""
    if rho != rho or rho < 0:
        raise ValueError(f"ratio must be >= 0, got {rho}")
    if math.isinf(rho):
        return n_o
    n_t = round(rho * n_o / (1.0 + rho))
    if not 0 <= n_t <= n_o:
        raise ValueError(f"ratio {rho} not realizable with n_o={n_o}")
    return n_t


def ratio_sweep_samples(
    n_o: int,
    ratios: Sequence[float],
    placement: Placement = UniformPlacement(),
    sensor: SensorModel = SensorModel(2.0, 6.0),
    reps: int = 10_000,
    path: Optional[Sequence[int]] = None,
    **kwargs,
) -> Dict[float, np.ndarray]:
    """Coupled fixed-path weights across true:false ratios.

    Truth labels are prefixes of one shared permutation, so the true set for
    a smaller ratio is nested inside the true set for a larger one.
    """
    if not ratios:
        raise ValueError("need at least one ratio")
    variants = [(f"rho={rho}", true_count_for_ratio(rho, n_o), sensor) for rho in ratios]
    # same "coupled" tag as the composition triple: rho=0 reproduces the
    # all-false samples bitwise, rho=inf the all-true ones
    out = _run_variants(n_o, placement, variants, reps, path, tag="coupled", **kwargs)
    return {rho: out[f"rho={rho}"] for rho in ratios}


def sensor_fidelity_samples(
    sharp: SensorModel,
    blunt: SensorModel,
    composition: str,
    n_o: int,
    placement: Placement = UniformPlacement(),
    reps: int = 10_000,
    path: Optional[Sequence[int]] = None,
    **kwargs,
) -> Tuple[np.ndarray, np.ndarray]:
    """Coupled fixed-path weights under two sensor models.

    ``sharp`` must have a < a' and b > b' relative to ``blunt`` (more
    concentrated marks). ``composition`` is "falseonly" or "trueonly".
    Returns (W_sharp, W_blunt). Note the direction that is provable differs
    by composition: sharp <=_st blunt on all-false fields, blunt <=_st sharp
    on all-true fields (sharper sensors mark true obstacles closer to 1,
    inflating the fixed-path risk premium).
    """
    if not (sharp.a <= blunt.a and sharp.b >= blunt.b):
        raise ValueError(
            f"expected a <= a' and b >= b', got ({sharp.a},{sharp.b}) vs "
            f"({blunt.a},{blunt.b})"
        )
    if composition not in ("falseonly", "trueonly"):
        raise ValueError(f"composition must be falseonly|trueonly, got {composition}")
    n_true = n_o if composition == "trueonly" else 0
    variants = [("sharp", n_true, sharp), ("blunt", n_true, blunt)]
    out = _run_variants(
        n_o, placement, variants, reps, path, tag=f"fidelity-{composition}", **kwargs
    )
    return out["sharp"], out["blunt"]


def lemma1_mc_check(
    pairs: Sequence[Tuple[Tuple[float, float], Tuple[float, float]]],
    reps: int = 10_000,
    tol: float = 0.02,
    master_seed: int = 0,
) -> OrderingReport:
    """Sums of independent Beta variates preserve component-wise dominance.

    ``pairs`` lists the summands: ((a_i, b_i), (a'_i, b'_i)) with
    Beta(a_i, b_i) <=_st Beta(a'_i, b'_i), verified analytically on a CDF
    grid before sampling.
    """
    if not pairs:
        raise ValueError("need at least one summand pair")
    grid = np.linspace(0.0, 1.0, 201)
    for (a1, b1), (a2, b2) in pairs:
        worst = max(
            beta_cdf(a2, b2, float(x)) - beta_cdf(a1, b1, float(x)) for x in grid
        )
        if worst > 1e-9:
            raise ValueError(
                f"Beta({a1},{b1}) is not <=_st Beta({a2},{b2}) "
                f"(CDF violation {worst:.2e})"
            )
    sum_x = np.zeros(reps)
    sum_y = np.zeros(reps)
    for i, ((a1, b1), (a2, b2)) in enumerate(pairs):
        # both sides of summand i share one stream (common random numbers):
        # marginals are exact, identical pairs tie exactly, variance drops
        key = stream_index("lemma1", i, "summand")
        sum_x += beta_variates(a1, b1, RngStream(master_seed, key).generator(), size=reps)
        sum_y += beta_variates(a2, b2, RngStream(master_seed, key).generator(), size=reps)
    return dominates_st(sum_x, sum_y, tol, label_x="sum_lower", label_y="sum_upper")


# ---------- variability report (not asserted) ----------


@dataclass(frozen=True)
class VariabilityRow:
    label: str
    count: int
    mean: float
    variance: float
    minimum: float
    maximum: float
    value_range: float


@dataclass(frozen=True)
class VariabilityReport:
    rows: Tuple[VariabilityRow, ...]
    #: estimated P(W_A <= W_B), paired by replication index, per ordered pair
    prob_le: Tuple[Tuple[str, str, float], ...]


def variability_experiment(
    placements: Sequence[Tuple[str, Placement]],
    n_o: int,
    sensor: SensorModel = SensorModel(2.0, 6.0),
    reps: int = 200,
    path: Optional[Sequence[int]] = None,
    composition: str = "falseonly",
    **kwargs,
) -> VariabilityReport:
    """Range/variance of fixed-path weights per placement, plus pairwise
    P(W_A <= W_B) estimates. Reported, never asserted: these are empirical
    observations, not theorems."""
    n_true = n_o if composition == "trueonly" else 0
    per_label: Dict[str, np.ndarray] = {}
    for label, placement in placements:
        out = _run_variants(
            n_o,
            placement,
            [(label, n_true, sensor)],
            reps,
            path,
            tag=f"variability-{composition}",
            **kwargs,
        )
        per_label[label] = out[label]
    rows = []
    for label, vals in per_label.items():
        rows.append(
            VariabilityRow(
                label=label,
                count=vals.size,
                mean=float(vals.mean()),
                variance=float(vals.var()),
                minimum=float(vals.min()),
                maximum=float(vals.max()),
                value_range=float(vals.max() - vals.min()),
            )
        )
    probs = []
    labels = list(per_label)
    for i, la in enumerate(labels):
        for lb in labels[i + 1 :]:
            probs.append(
                (la, lb, float(np.mean(per_label[la] <= per_label[lb])))
            )
    return VariabilityReport(rows=tuple(rows), prob_le=tuple(probs))
