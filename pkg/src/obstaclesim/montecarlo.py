"""Deterministic Monte Carlo harness over placements, compositions, sensors.

Every replication is a pure function of (config cell, replication index,
master seed): placement, status labels, and sensor marks each draw from their
own derived sub-stream, so scenes can be coupled across configurations that
share some of the stages. Records come back in canonical (config, rep) order
no matter how many workers ran them.
"""
from __future__ import annotations

import hashlib
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .geometry import Disk, GeometricGraph, build_lattice, lattice_vertex
from .pointproc import (
    MaternParams,
    Point2,
    RngStream,
    StraussParams,
    Window,
    sample_matern,
    sample_strauss,
    sample_uniform,
)
from .sensor import Knowledge, Obstacle, SensorModel, Status, assign_marks
from .traversal import Scene, TraversalResult, rd_traverse

DEFAULT_GRID = (101, 101)
DEFAULT_SOURCE = (50, 100)
DEFAULT_TARGET = (50, 1)
DEFAULT_INSERTION = Window(10.0, 90.0, 10.0, 90.0)
DEFAULT_RADIUS = 4.5
DEFAULT_COST = 5.0


def stream_index(*parts) -> int:
    """Stable 64-bit sub-stream index from string-able parts (SHA-256)."""
    text = "|".join(str(p) for p in parts)
    return int.from_bytes(hashlib.sha256(text.encode("utf-8")).digest()[:8], "big")


# ---------- placements ----------


@dataclass(frozen=True)
class UniformPlacement:
    kind = "uniform"

    def sample(self, n: int, w: Window, rng: RngStream) -> List[Point2]:
        return sample_uniform(n, w, rng)


@dataclass(frozen=True)
class StraussPlacement:
    gamma: float
    d: float
    burn_in: int = 500
    kind = "strauss"

    def sample(self, n: int, w: Window, rng: RngStream) -> List[Point2]:
        if n == 0:
            return []
        return sample_strauss(
            StraussParams(n=n, d=self.d, gamma=self.gamma, burn_in_sweeps=self.burn_in),
            w,
            rng,
        )


@dataclass(frozen=True)
class MaternPlacement:
    kappa: int
    r0: float
    kind = "matern"

    def sample(self, n: int, w: Window, rng: RngStream) -> List[Point2]:
        if n == 0:
            return []
        return sample_matern(MaternParams(kappa=self.kappa, r0=self.r0, n=n), w, rng)


Placement = Union[UniformPlacement, StraussPlacement, MaternPlacement]


# ---------- compositions ----------


@dataclass(frozen=True)
class FalseOnly:
    n_F: int
    kind = "falseonly"

    @property
    def n_T(self) -> int:
        return 0

    @property
    def total(self) -> int:
        return self.n_F


@dataclass(frozen=True)
class TrueOnly:
    n_T: int
    kind = "trueonly"

    @property
    def n_F(self) -> int:
        return 0

    @property
    def total(self) -> int:
        return self.n_T


@dataclass(frozen=True)
class Mixed:
    n_T: int
    n_F: int
    kind = "mixed"

    @property
    def total(self) -> int:
        return self.n_T + self.n_F


Composition = Union[FalseOnly, TrueOnly, Mixed]


# ---------- config ----------


def _fmt(v) -> str:
    if isinstance(v, tuple):
        return "|".join(str(x) for x in v)
    return str(v)


def placement_key(p: Placement) -> str:
    if isinstance(p, StraussPlacement):
        return f"strauss:g={p.gamma},d={p.d},burn={p.burn_in}"
    if isinstance(p, MaternPlacement):
        return f"matern:k={p.kappa},r0={p.r0}"
    return "uniform"


def cell_key_for(
    placement: Placement,
    comp_kind: str,
    n_T: int,
    n_F: int,
    radius,
    cost,
    sensor: SensorModel,
    grid: Tuple[int, int],
    source: Tuple[int, int],
    target: Tuple[int, int],
    insertion: Window,
) -> str:
    """Canonical cell id shared by configs and ad-hoc scene builds.

    Excludes reps and master_seed so extending a sweep or re-seeding does
    not silently re-key existing replications.
    """
    return ";".join(
        [
            f"placement={placement_key(placement)}",
            f"comp={comp_kind}:nT={n_T},nF={n_F}",
            f"r={_fmt(radius)}",
            f"c={_fmt(cost)}",
            f"beta={sensor.a},{sensor.b}",
            f"grid={grid[0]}x{grid[1]}",
            f"s={source[0]},{source[1]}",
            f"t={target[0]},{target[1]}",
            f"ins={insertion.xmin},{insertion.xmax},"
            f"{insertion.ymin},{insertion.ymax}",
        ]
    )


@dataclass(frozen=True)
class ExperimentConfig:
    """One parameter cell: placement, composition, sensor, scene shape, reps."""

    placement: Placement
    composition: Composition
    sensor: SensorModel = SensorModel(2.0, 6.0)
    cost: Union[float, Tuple[float, ...]] = DEFAULT_COST
    radius: Union[float, Tuple[float, ...]] = DEFAULT_RADIUS
    grid: Tuple[int, int] = DEFAULT_GRID
    source: Tuple[int, int] = DEFAULT_SOURCE
    target: Tuple[int, int] = DEFAULT_TARGET
    insertion: Window = DEFAULT_INSERTION
    reps: int = 100
    master_seed: int = 0

    def __post_init__(self) -> None:
        if self.composition.total <= 0:
            raise ValueError("composition counts must be > 0")
        if any(c < 0 for c in (self.composition.n_T, self.composition.n_F)):
            raise ValueError("composition counts must be >= 0")
        if self.reps < 1:
            raise ValueError("reps must be >= 1")
        _radius_cost_classes(self.radius, self.cost)  # validate pairing early

    def cell_key(self) -> str:
        return cell_key_for(
            self.placement,
            self.composition.kind,
            self.composition.n_T,
            self.composition.n_F,
            self.radius,
            self.cost,
            self.sensor,
            self.grid,
            self.source,
            self.target,
            self.insertion,
        )


@dataclass(frozen=True)
class SweepRecord:
    """One Monte Carlo replication, flattened for CSV emission."""

    placement: str
    gamma: Optional[float]
    d: Optional[float]
    kappa: Optional[int]
    r0: Optional[float]
    composition: str
    n_T: int
    n_F: int
    rep: int
    seed: int
    C: float
    n_dis: int
    walk_length: float
    wall_time: float = field(default=0.0, compare=False)


@dataclass(frozen=True)
class SummaryRow:
    cell: Tuple
    group_by: Tuple[str, ...]
    mean_C: float
    var_C: float
    min_C: float
    max_C: float
    range_C: float
    mean_n_dis: float
    count: int


class SweepCellError(RuntimeError):
    """A replication failed; carries the cell identity for reporting."""

    def __init__(self, cell_key: str, rep: int, cause: Exception):
        super().__init__(f"cell [{cell_key}] rep {rep} failed: {cause}")
        self.cell_key = cell_key
        self.rep = rep
        self.cause = cause


# ---------- scene construction ----------

_LATTICE_CACHE: Dict[Tuple[int, int], GeometricGraph] = {}


def _lattice(grid: Tuple[int, int]) -> GeometricGraph:
    g = _LATTICE_CACHE.get(grid)
    if g is None:
        g = build_lattice(*grid)
        _LATTICE_CACHE[grid] = g
    return g.bare_copy()


def _radius_cost_classes(
    radius: Union[float, Tuple[float, ...]], cost: Union[float, Tuple[float, ...]]
) -> Optional[Tuple[Tuple[float, float], ...]]:
    """Paired (radius, cost) classes, or None when both are scalars."""
    r_tup = isinstance(radius, tuple)
    c_tup = isinstance(cost, tuple)
    if not r_tup and not c_tup:
        return None
    radii = radius if r_tup else (radius,)
    costs = cost if c_tup else (cost,)
    if r_tup and c_tup and len(radii) != len(costs):
        raise ValueError(
            f"radius classes ({len(radii)}) and cost classes ({len(costs)}) differ"
        )
    k = max(len(radii), len(costs))
    radii = radii * k if len(radii) == 1 else radii
    costs = costs * k if len(costs) == 1 else costs
    return tuple(zip(radii, costs))


def build_scene(
    placement: Placement,
    n_T: int,
    n_F: int,
    sensor: SensorModel,
    *,
    cost: Union[float, Tuple[float, ...]] = DEFAULT_COST,
    radius: Union[float, Tuple[float, ...]] = DEFAULT_RADIUS,
    grid: Tuple[int, int] = DEFAULT_GRID,
    source: Tuple[int, int] = DEFAULT_SOURCE,
    target: Tuple[int, int] = DEFAULT_TARGET,
    insertion: Window = DEFAULT_INSERTION,
    master_seed: int = 0,
    cell_key: str = "adhoc",
    rep: int = 0,
) -> Scene:
    """Assemble one scene from derived placement/status/marks streams.

    Stage streams are keyed by hash(cell_key, rep, stage). The status stream
    always draws the truth-label permutation first (even when the composition
    makes it moot) and then, if radius/cost classes are configured, one class
    index per obstacle; this keeps stream consumption identical across
    compositions so scenes with different labels stay coupled.
    """
    n = n_T + n_F
    w, h = grid
    place_stream = RngStream(master_seed, stream_index(cell_key, rep, "placement"))
    status_stream = RngStream(master_seed, stream_index(cell_key, rep, "status"))
    marks_stream = RngStream(master_seed, stream_index(cell_key, rep, "marks"))
    points = placement.sample(n, insertion, place_stream)
    gen_status = status_stream.generator()
    perm = gen_status.permutation(n)
    true_ids = set(int(i) for i in perm[:n_T])
    classes = _radius_cost_classes(radius, cost)
    if classes is not None:
        class_idx = gen_status.integers(0, len(classes), size=n)
        radii = [classes[i][0] for i in class_idx]
        costs = [classes[i][1] for i in class_idx]
    else:
        radii = [float(radius)] * n
        costs = [float(cost)] * n
    obstacles = [
        Obstacle(
            id=i,
            disk=Disk(points[i], radii[i]),
            status=Status.TRUE if i in true_ids else Status.FALSE,
            p=None,
            c=costs[i],
            knowledge=Knowledge.AMBIGUOUS,
        )
        for i in range(n)
    ]
    obstacles = assign_marks(obstacles, sensor, marks_stream)
    graph = _lattice(grid)
    return Scene(
        graph=graph,
        obstacles=tuple(obstacles),
        s=lattice_vertex(w, *source),
        t=lattice_vertex(w, *target),
        window=Window(0.0, float(w - 1), 0.0, float(h - 1)),
        insertion_window=insertion,
        seed_info=(master_seed, cell_key, rep),
    )


# ---------- replication and sweep ----------


def run_replication(config: ExperimentConfig, rep_index: int) -> SweepRecord:
    """Build the scene for (config, rep_index), traverse it, emit one record."""
    cell = config.cell_key()
    t0 = time.perf_counter()
    scene = build_scene(
        config.placement,
        config.composition.n_T,
        config.composition.n_F,
        config.sensor,
        cost=config.cost,
        radius=config.radius,
        grid=config.grid,
        source=config.source,
        target=config.target,
        insertion=config.insertion,
        master_seed=config.master_seed,
        cell_key=cell,
        rep=rep_index,
    )
    result = rd_traverse(scene)
    elapsed = time.perf_counter() - t0
    p = config.placement
    return SweepRecord(
        placement=p.kind,
        gamma=p.gamma if isinstance(p, StraussPlacement) else None,
        d=p.d if isinstance(p, StraussPlacement) else None,
        kappa=p.kappa if isinstance(p, MaternPlacement) else None,
        r0=p.r0 if isinstance(p, MaternPlacement) else None,
        composition=config.composition.kind,
        n_T=config.composition.n_T,
        n_F=config.composition.n_F,
        rep=rep_index,
        seed=stream_index(cell, rep_index, "placement"),
        C=result.total_cost,
        n_dis=result.n_dis,
        walk_length=result.distance,
        wall_time=elapsed,
    )


def _sweep_task(args: Tuple[ExperimentConfig, int]) -> SweepRecord:
    config, rep = args
    try:
        return run_replication(config, rep)
    except Exception as exc:  # surfaced with its cell by run_sweep
        raise SweepCellError(config.cell_key(), rep, exc) from exc


def run_sweep(
    configs: Sequence[ExperimentConfig],
    jobs: int = 1,
    progress: Optional[Callable[[int, int], None]] = None,
) -> List[SweepRecord]:
    """All (config, rep) replications in canonical order.

    ``jobs`` > 1 fans the pure replication tasks over worker processes; the
    gathered records are identical to a serial run, order included.
    """
    if not configs:
        raise ValueError("run_sweep needs at least one config")
    tasks = [(cfg, rep) for cfg in configs for rep in range(cfg.reps)]
    total = len(tasks)
    records: List[SweepRecord] = []
    if jobs <= 1:
        for i, task in enumerate(tasks):
            records.append(_sweep_task(task))
            if progress is not None:
                progress(i + 1, total)
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunk = max(1, total // (jobs * 4))
            for i, rec in enumerate(pool.map(_sweep_task, tasks, chunksize=chunk)):
                records.append(rec)
                if progress is not None:
                    progress(i + 1, total)
    return records


def summarize(
    records: Sequence[SweepRecord], group_by: Sequence[str]
) -> List[SummaryRow]:
    """Per-cell mean/variance/min/max/range of C and mean disambiguation count.

    Variance is the population variance (a single-record cell reports 0).
    """
    if not records:
        raise ValueError("summarize needs at least one record")
    names = tuple(group_by)
    groups: Dict[Tuple, List[SweepRecord]] = {}
    for r in records:
        key = tuple(getattr(r, name) for name in names)
        groups.setdefault(key, []).append(r)

    def _order(key: Tuple):
        return tuple((v is None, v) for v in key)

    rows: List[SummaryRow] = []
    for key in sorted(groups, key=_order):
        cs = np.array([r.C for r in groups[key]])
        rows.append(
            SummaryRow(
                cell=key,
                group_by=names,
                mean_C=float(cs.mean()),
                var_C=float(cs.var()),
                min_C=float(cs.min()),
                max_C=float(cs.max()),
                range_C=float(cs.max() - cs.min()),
                mean_n_dis=float(np.mean([r.n_dis for r in groups[key]])),
                count=len(cs),
            )
        )
    return rows


def pearson_corr(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Sample Pearson correlation; zero variance is an error."""
    if len(xs) != len(ys):
        raise ValueError("length mismatch")
    if len(xs) < 2:
        raise ValueError("need at least two points")
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    vx = x - x.mean()
    vy = y - y.mean()
    sxx = float(vx @ vx)
    syy = float(vy @ vy)
    if sxx == 0.0 or syy == 0.0:
        raise ValueError("undefined correlation: zero variance input")
    return float((vx @ vy) / np.sqrt(sxx * syy))
