"""Obstacle-center samplers: uniform, conditional Strauss, Matern cluster.

All samplers are pure functions of (params, window, RngStream): the same
inputs give the same point list, element order included.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from .geometry import Point2

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngStream:
    """A named, reproducible randomness source.

    Distinct (master_seed, stream_index) pairs give statistically independent
    streams. Realized as numpy Philox keyed through SeedSequence, which is
    stable across platforms and processes.
    """

    master_seed: int
    stream_index: int = 0

    def __post_init__(self) -> None:
        if self.stream_index < 0:
            raise ValueError("stream_index must be >= 0")

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(
            entropy=self.master_seed & _MASK64, spawn_key=(self.stream_index,)
        )
        return np.random.Generator(np.random.Philox(seq))


@dataclass(frozen=True)
class Window:
    """Axis-aligned rectangle (closed)."""

    xmin: float
    xmax: float
    ymin: float
    ymax: float

    def __post_init__(self) -> None:
        if not (self.xmin < self.xmax and self.ymin < self.ymax):
            raise ValueError(f"empty window {self}")

    @property
    def diagonal(self) -> float:
        return math.hypot(self.xmax - self.xmin, self.ymax - self.ymin)

    def contains(self, x: float, y: float) -> bool:
        return self.xmin <= x <= self.xmax and self.ymin <= y <= self.ymax

    def clamp(self, x: float, y: float):
        return (min(max(x, self.xmin), self.xmax), min(max(y, self.ymin), self.ymax))


@dataclass(frozen=True)
class StraussParams:
    n: int
    d: float
    gamma: float
    burn_in_sweeps: int = 500

    def __post_init__(self) -> None:
        if self.n <= 0:
            raise ValueError("n must be > 0")
        if not self.d > 0:
            raise ValueError("d must be > 0")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("gamma must be in [0, 1]")
        if self.burn_in_sweeps < 0:
            raise ValueError("burn_in_sweeps must be >= 0")


@dataclass(frozen=True)
class MaternParams:
    kappa: int
    r0: float
    n: int

    def __post_init__(self) -> None:
        if self.kappa <= 0:
            raise ValueError("kappa must be > 0")
        if not self.r0 > 0:
            raise ValueError("r0 must be > 0")
        if self.n <= 0:
            raise ValueError("n must be > 0")
        if self.kappa > self.n:
            raise ValueError("kappa must be <= n")


def sample_uniform(n: int, w: Window, rng: RngStream) -> List[Point2]:
    """n i.i.d. uniform points on the window."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return []
    gen = rng.generator()
    xs = gen.uniform(w.xmin, w.xmax, n)
    ys = gen.uniform(w.ymin, w.ymax, n)
    return [Point2(float(x), float(y)) for x, y in zip(xs, ys)]


def count_close_pairs(points: Sequence[Point2], d: float) -> int:
    """Unordered pairs at Euclidean distance strictly below d."""
    if not d > 0:
        raise ValueError("d must be > 0")
    n = len(points)
    if n < 2:
        return 0
    xs = np.array([p.x for p in points])
    ys = np.array([p.y for p in points])
    dx = xs[:, None] - xs[None, :]
    dy = ys[:, None] - ys[None, :]
    close = dx * dx + dy * dy < d * d
    # full matrix counts each pair twice and the zero diagonal n times
    return int((np.count_nonzero(close) - n) // 2)


def sample_strauss(
    p: StraussParams,
    w: Window,
    rng: RngStream,
    trace: Optional[dict] = None,
) -> List[Point2]:
    """Fixed-n Strauss configuration via single-site Metropolis.

    Start from n uniform points; every sweep proposes relocating each point
    (in index order) to a fresh uniform location, accepting with probability
    min(1, gamma**delta) where delta is the change in the close-pair count.
    gamma=1 accepts everything (uniform); gamma=0 accepts only moves that do
    not increase the pair count, drifting toward (and for feasible n
    reaching) a hard-core packing, but never rejecting the configuration as
    a whole.

    ``trace``, when given, is filled with "initial_pairs", "final_pairs",
    and "proposals": one (sweep, index, delta, u, accepted) tuple per
    proposal, so the accept rule can be audited against recomputed counts.
    """
    gen = rng.generator()
    n = p.n
    px = gen.uniform(w.xmin, w.xmax, n)
    py = gen.uniform(w.ymin, w.ymax, n)
    d2 = p.d * p.d
    gamma = p.gamma
    if trace is not None:
        trace["initial_pairs"] = count_close_pairs(
            [Point2(float(x), float(y)) for x, y in zip(px, py)], p.d
        )
        trace["proposals"] = []
    for sweep in range(p.burn_in_sweeps):
        # proposals pre-drawn per sweep: consumption is history-independent
        cx = gen.uniform(w.xmin, w.xmax, n)
        cy = gen.uniform(w.ymin, w.ymax, n)
        us = gen.random(n)
        for i in range(n):
            ox, oy = px[i], py[i]
            ddx = px - ox
            ddy = py - oy
            old_d2 = ddx * ddx + ddy * ddy
            old_d2[i] = np.inf
            ddx = px - cx[i]
            ddy = py - cy[i]
            new_d2 = ddx * ddx + ddy * ddy
            new_d2[i] = np.inf
            delta = int(np.count_nonzero(new_d2 < d2)) - int(
                np.count_nonzero(old_d2 < d2)
            )
            if delta <= 0:
                accepted = True
            else:
                accepted = us[i] < gamma**delta
            if accepted:
                px[i] = cx[i]
                py[i] = cy[i]
            if trace is not None:
                trace["proposals"].append((sweep, i, delta, float(us[i]), accepted))
    points = [Point2(float(x), float(y)) for x, y in zip(px, py)]
    if trace is not None:
        trace["final_pairs"] = count_close_pairs(points, p.d)
    return points


_MATERN_MAX_TRIES = 1000


def sample_matern(
    p: MaternParams,
    w: Window,
    rng: RngStream,
    trace: Optional[dict] = None,
) -> List[Point2]:
    """Matern cluster sample with exactly n offspring.

    kappa parent locations are uniform on the window; each of the n offspring
    picks a parent uniformly at random (per-parent counts are then
    Multinomial(n, 1/kappa)) and lands uniformly on the disk of radius r0
    around it, rejection-sampled against the window with a retry cap, after
    which the candidate is clamped coordinate-wise. Parents are discarded.
    """
    gen = rng.generator()
    par_x = gen.uniform(w.xmin, w.xmax, p.kappa)
    par_y = gen.uniform(w.ymin, w.ymax, p.kappa)
    assignment = gen.integers(0, p.kappa, size=p.n)
    out: List[Point2] = []
    for j in range(p.n):
        cx = par_x[assignment[j]]
        cy = par_y[assignment[j]]
        x = y = math.nan
        for _ in range(_MATERN_MAX_TRIES):
            rad = p.r0 * math.sqrt(gen.random())
            theta = 2.0 * math.pi * gen.random()
            x = cx + rad * math.cos(theta)
            y = cy + rad * math.sin(theta)
            if w.contains(x, y):
                break
        else:
            x, y = w.clamp(x, y)
        out.append(Point2(float(x), float(y)))
    if trace is not None:
        trace["parents"] = [Point2(float(x), float(y)) for x, y in zip(par_x, par_y)]
        trace["assignment"] = [int(a) for a in assignment]
    return out
