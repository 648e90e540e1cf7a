"""Command-line front end: simulate, sweep, ordering, network.

Configuration is a sectioned key=value file (UTF-8, ``#`` comments). Unknown
sections or keys are hard errors so typos never silently fall back to
defaults. All CSV output uses dot-decimal formatting and ``\\n`` line ends,
and is byte-identical for a given (config, seed) regardless of --jobs.

Exit codes: 0 success, 2 config error, 3 infeasible scene, 4 I/O error.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import math
import os
import sys
from typing import Dict, List, Optional, Sequence, Tuple

from .geometry import Disk, GeometricGraph, Point2
from .montecarlo import (
    DEFAULT_COST,
    DEFAULT_GRID,
    DEFAULT_INSERTION,
    DEFAULT_RADIUS,
    DEFAULT_SOURCE,
    DEFAULT_TARGET,
    ExperimentConfig,
    FalseOnly,
    MaternPlacement,
    Mixed,
    StraussPlacement,
    SweepCellError,
    TrueOnly,
    UniformPlacement,
    build_scene,
    cell_key_for,
    run_sweep,
    stream_index,
    summarize,
)
from .ordering import (
    coupled_composition_samples,
    dominates_st,
    ratio_sweep_samples,
    sensor_fidelity_samples,
)
from .pointproc import RngStream, Window
from .sensor import (
    Knowledge,
    Obstacle,
    SensorModel,
    Status,
    assign_marks,
    beta_cdf,
)
from .traversal import InfeasibleSceneError, Scene, TraversalResult, rd_traverse


class ConfigError(Exception):
    """Malformed or contradictory run configuration."""


# ---------- value parsers ----------


def _as_int(text: str, key: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"{key}: expected integer, got {text!r}") from None


def _as_float(text: str, key: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise ConfigError(f"{key}: expected number, got {text!r}") from None
    if not math.isfinite(v):
        raise ConfigError(f"{key}: value must be finite, got {text!r}")
    return v


def _as_grid(text: str, key: str) -> Tuple[int, int]:
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise ConfigError(f"{key}: expected WxH like 101x101, got {text!r}")
    return _as_int(parts[0], key), _as_int(parts[1], key)


def _as_int_pair(text: str, key: str) -> Tuple[int, int]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2:
        raise ConfigError(f"{key}: expected two comma-separated values, got {text!r}")
    return _as_int(parts[0], key), _as_int(parts[1], key)


def _as_float_pair(text: str, key: str) -> Tuple[float, float]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2:
        raise ConfigError(f"{key}: expected two comma-separated values, got {text!r}")
    return _as_float(parts[0], key), _as_float(parts[1], key)


def _as_float_list(text: str, key: str) -> Tuple[float, ...]:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise ConfigError(f"{key}: empty value")
    return tuple(_as_float(p, key) for p in parts)


def _as_int_list(text: str, key: str) -> Tuple[int, ...]:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise ConfigError(f"{key}: empty value")
    return tuple(_as_int(p, key) for p in parts)


def _as_window(text: str, key: str) -> Window:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 4:
        raise ConfigError(f"{key}: expected xmin,xmax,ymin,ymax, got {text!r}")
    vals = [_as_float(p, key) for p in parts]
    try:
        return Window(*vals)
    except ValueError as exc:
        raise ConfigError(f"{key}: {exc}") from None


def _as_str(text: str, key: str) -> str:
    return text.strip()


# schema: section -> key -> parser
_SCHEMA = {
    "scene": {
        "grid": _as_grid,
        "source": _as_int_pair,
        "target": _as_int_pair,
        "radius": _as_float_list,
        "cost": _as_float_list,
        "beta": _as_float_pair,
        "insertion": _as_window,
    },
    "placement": {
        "kind": _as_str,
        "gamma": _as_float_list,
        "d": _as_float_list,
        "burn_in": _as_int,
        "kappa": _as_int_list,
        "r0": _as_float_list,
    },
    "composition": {
        "kind": _as_str,
        "n_false": _as_int_list,
        "n_true": _as_int_list,
        "n_total": _as_int_list,
        "frac_true": _as_float_list,
    },
    "run": {
        "reps": _as_int,
        "seed": _as_int,
        "jobs": _as_int,
    },
    "ordering": {
        "n_obstacles": _as_int,
        "reps": _as_int,
        "tol": _as_float,
        "ratios": _as_float_list,
        "blunt_beta": _as_float_pair,
    },
    "network": {
        "source": _as_int,
        "target": _as_int,
        "obstacles": _as_str,
    },
}

_DEFAULTS = {
    "scene": {
        "grid": DEFAULT_GRID,
        "source": DEFAULT_SOURCE,
        "target": DEFAULT_TARGET,
        "radius": (DEFAULT_RADIUS,),
        "cost": (DEFAULT_COST,),
        "beta": (2.0, 6.0),
        "insertion": DEFAULT_INSERTION,
    },
    "placement": {
        "kind": "uniform",
        "gamma": (0.0,),
        "d": (7.0,),
        "burn_in": 500,
        "kappa": (8,),
        "r0": (2.5,),
    },
    "composition": {
        "kind": "falseonly",
        "n_false": (40,),
        "n_true": (40,),
        "n_total": (80,),
        "frac_true": (0.5,),
    },
    "run": {"reps": 100, "seed": 0, "jobs": 1},
    "ordering": {
        "n_obstacles": 40,
        "reps": 10_000,
        "tol": 0.02,
        "ratios": None,
        "blunt_beta": None,
    },
    "network": {"source": None, "target": None, "obstacles": None},
}


class RunConfig:
    """Parsed config: resolved values plus the set of explicitly-given keys."""

    def __init__(self, values: Dict[str, Dict], explicit: set, base_dir: str):
        self.values = values
        self.explicit = explicit  # {(section, key)}
        self.base_dir = base_dir  # for resolving relative file references

    def get(self, section: str, key: str):
        return self.values[section][key]

    def given(self, section: str, key: str) -> bool:
        return (section, key) in self.explicit


def load_config(path: Optional[str]) -> RunConfig:
    """Parse and validate a config file; None means all defaults."""
    values = {sec: dict(defaults) for sec, defaults in _DEFAULTS.items()}
    explicit: set = set()
    base_dir = "."
    if path is not None:
        parser = configparser.ConfigParser(
            interpolation=None,
            delimiters=("=",),
            comment_prefixes=("#",),
            inline_comment_prefixes=("#",),
        )
        parser.optionxform = str  # keep key case; schema is lowercase-only
        try:
            with open(path, "r", encoding="utf-8") as fh:
                parser.read_file(fh, source=path)
        except configparser.Error as exc:
            raise ConfigError(f"{path}: {exc}") from None
        base_dir = os.path.dirname(os.path.abspath(path))
        for section in parser.sections():
            if section not in _SCHEMA:
                raise ConfigError(
                    f"{path}: unknown section [{section}] "
                    f"(known: {', '.join(sorted(_SCHEMA))})"
                )
            for key, raw in parser.items(section):
                if key not in _SCHEMA[section]:
                    raise ConfigError(
                        f"{path}: unknown key {key!r} in [{section}] "
                        f"(known: {', '.join(sorted(_SCHEMA[section]))})"
                    )
                values[section][key] = _SCHEMA[section][key](raw, f"[{section}] {key}")
                explicit.add((section, key))
    cfg = RunConfig(values, explicit, base_dir)
    _validate(cfg)
    return cfg


_PLACEMENT_PARAM_KEYS = {
    "uniform": set(),
    "strauss": {"gamma", "d", "burn_in"},
    "matern": {"kappa", "r0"},
}
_COMPOSITION_PARAM_KEYS = {
    "falseonly": {"n_false"},
    "trueonly": {"n_true"},
    "mixed": {"n_true", "n_false", "n_total", "frac_true"},
}


def _validate(cfg: RunConfig) -> None:
    pkind = cfg.get("placement", "kind")
    if pkind not in _PLACEMENT_PARAM_KEYS:
        raise ConfigError(f"[placement] kind must be uniform|strauss|matern, got {pkind!r}")
    for key in _SCHEMA["placement"]:
        if key != "kind" and cfg.given("placement", key):
            if key not in _PLACEMENT_PARAM_KEYS[pkind]:
                raise ConfigError(
                    f"[placement] {key} does not apply to kind={pkind}"
                )
    ckind = cfg.get("composition", "kind")
    if ckind not in _COMPOSITION_PARAM_KEYS:
        raise ConfigError(
            f"[composition] kind must be falseonly|trueonly|mixed, got {ckind!r}"
        )
    for key in _SCHEMA["composition"]:
        if key != "kind" and cfg.given("composition", key):
            if key not in _COMPOSITION_PARAM_KEYS[ckind]:
                raise ConfigError(
                    f"[composition] {key} does not apply to kind={ckind}"
                )
    if ckind == "mixed":
        by_frac = cfg.given("composition", "n_total") or cfg.given(
            "composition", "frac_true"
        )
        by_count = cfg.given("composition", "n_true") or cfg.given(
            "composition", "n_false"
        )
        if by_frac and by_count:
            raise ConfigError(
                "[composition] mixed takes either n_total+frac_true or "
                "n_true+n_false, not both"
            )
    a, b = cfg.get("scene", "beta")
    if not (a > 0 and b > 0):
        raise ConfigError(f"[scene] beta shapes must be > 0, got {a},{b}")
    radius = cfg.get("scene", "radius")
    cost = cfg.get("scene", "cost")
    if len(radius) > 1 and len(cost) > 1 and len(radius) != len(cost):
        raise ConfigError(
            f"[scene] radius classes ({len(radius)}) and cost classes "
            f"({len(cost)}) differ in length"
        )
    if any(r <= 0 for r in radius):
        raise ConfigError("[scene] radius values must be > 0")
    if any(c <= 0 for c in cost):
        raise ConfigError("[scene] cost values must be > 0")
    if cfg.get("run", "reps") < 1:
        raise ConfigError("[run] reps must be >= 1")
    if cfg.get("run", "jobs") < 1:
        raise ConfigError("[run] jobs must be >= 1")


def _scene_kwargs(cfg: RunConfig) -> Dict:
    radius = cfg.get("scene", "radius")
    cost = cfg.get("scene", "cost")
    return {
        "grid": cfg.get("scene", "grid"),
        "source": cfg.get("scene", "source"),
        "target": cfg.get("scene", "target"),
        "radius": radius if len(radius) > 1 else radius[0],
        "cost": cost if len(cost) > 1 else cost[0],
        "insertion": cfg.get("scene", "insertion"),
    }


def _placements(cfg: RunConfig) -> List:
    kind = cfg.get("placement", "kind")
    if kind == "uniform":
        return [UniformPlacement()]
    if kind == "strauss":
        burn = cfg.get("placement", "burn_in")
        return [
            StraussPlacement(gamma=g, d=d, burn_in=burn)
            for g in cfg.get("placement", "gamma")
            for d in cfg.get("placement", "d")
        ]
    return [
        MaternPlacement(kappa=k, r0=r)
        for k in cfg.get("placement", "kappa")
        for r in cfg.get("placement", "r0")
    ]


def _compositions(cfg: RunConfig) -> List:
    kind = cfg.get("composition", "kind")
    if kind == "falseonly":
        return [FalseOnly(n_F=n) for n in cfg.get("composition", "n_false")]
    if kind == "trueonly":
        return [TrueOnly(n_T=n) for n in cfg.get("composition", "n_true")]
    if cfg.given("composition", "n_true") or cfg.given("composition", "n_false"):
        return [
            Mixed(n_T=t, n_F=f)
            for t in cfg.get("composition", "n_true")
            for f in cfg.get("composition", "n_false")
        ]
    comps = []
    for total in cfg.get("composition", "n_total"):
        for frac in cfg.get("composition", "frac_true"):
            if not 0.0 <= frac <= 1.0:
                raise ConfigError(f"[composition] frac_true {frac} outside [0, 1]")
            n_t = round(frac * total)
            comps.append(Mixed(n_T=n_t, n_F=total - n_t))
    return comps


def _expand_cells(cfg: RunConfig, seed: int, reps: int) -> List[ExperimentConfig]:
    kw = _scene_kwargs(cfg)
    sensor = SensorModel(*cfg.get("scene", "beta"))
    cells = []
    for p in _placements(cfg):
        for comp in _compositions(cfg):
            try:
                cells.append(
                    ExperimentConfig(
                        placement=p,
                        composition=comp,
                        sensor=sensor,
                        cost=kw["cost"],
                        radius=kw["radius"],
                        grid=kw["grid"],
                        source=kw["source"],
                        target=kw["target"],
                        insertion=kw["insertion"],
                        reps=reps,
                        master_seed=seed,
                    )
                )
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
    return cells


# ---------- formatting ----------


def _g(v: float) -> str:
    return "%g" % v


def _cell(v) -> str:
    """One CSV field: shortest round-trip decimal, empty for None."""
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(float(v))  # float() first: numpy scalars repr differently
    if isinstance(v, int):
        return str(v)
    return str(v)


def _write_csv(path: str, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def _write_obstacles_csv(path: str, scene: Scene) -> None:
    rows = [
        (
            o.id,
            o.disk.center.x,
            o.disk.center.y,
            o.disk.radius,
            "T" if o.status is Status.TRUE else "F",
            o.p,
            o.c,
        )
        for o in scene.obstacles
    ]
    _write_csv(path, ["id", "x", "y", "r", "status", "p", "c"], rows)


def _write_walk_csv(path: str, scene: Scene, result: TraversalResult) -> None:
    pts = scene.graph.points
    rows: List[Tuple] = []
    cum = 0.0
    cur = scene.s
    rows.append((0, cur, pts[cur].x, pts[cur].y, cum, ""))
    for step, action in enumerate(result.actions, start=1):
        if action[0] == "move":
            _, _, v, eid = action
            cum += scene.graph.edges[eid][2]
            cur = v
            event = ""
        else:
            _, vtx, oid, revealed = action
            event = (
                f"disambiguate obstacle={oid} revealed={revealed} "
                f"cost={_g(scene.obstacles[oid].c)}"
            )
        rows.append((step, cur, pts[cur].x, pts[cur].y, cum, event))
    _write_csv(path, ["step", "vertex", "x", "y", "cum_distance", "event"], rows)


def _svg_scene(
    path: str,
    points: Sequence[Point2],
    walk: Sequence[int],
    obstacles: Sequence[Obstacle],
    s: int,
    t: int,
    window: Window,
) -> None:
    """Scene rendering: one walk polyline, one circle per obstacle, s/t rects.

    True obstacles are solid red, false ones dashed grey; the y axis is
    flipped so larger y is up, as in the plane.
    """
    pad = max(2.0, 0.03 * max(window.xmax - window.xmin, window.ymax - window.ymin))

    def sx(x: float) -> float:
        return x - window.xmin + pad

    def sy(y: float) -> float:
        return window.ymax - y + pad

    w = window.xmax - window.xmin + 2 * pad
    h = window.ymax - window.ymin + 2 * pad
    sw = max(w, h) / 300.0  # stroke width in world units
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {_g(w)} {_g(h)}" '
        f'width="720" height="{_g(720 * h / w)}">',
    ]
    for o in obstacles:
        cx, cy = sx(o.disk.center.x), sy(o.disk.center.y)
        if o.status is Status.TRUE:
            style = f'stroke="#c62828" stroke-width="{_g(2 * sw)}" fill="#c62828" fill-opacity="0.15"'
        else:
            style = (
                f'stroke="#616161" stroke-width="{_g(2 * sw)}" fill="none" '
                f'stroke-dasharray="{_g(6 * sw)} {_g(4 * sw)}"'
            )
        lines.append(
            f'<circle cx="{_g(cx)}" cy="{_g(cy)}" r="{_g(o.disk.radius)}" {style}/>'
        )
    walk_pts = " ".join(f"{_g(sx(points[v].x))},{_g(sy(points[v].y))}" for v in walk)
    lines.append(
        f'<polyline points="{walk_pts}" fill="none" stroke="#1565c0" '
        f'stroke-width="{_g(3 * sw)}"/>'
    )
    m = max(4 * sw, 0.6)
    for vid, color in ((s, "#2e7d32"), (t, "#000000")):
        px, py = sx(points[vid].x), sy(points[vid].y)
        lines.append(
            f'<rect x="{_g(px - m)}" y="{_g(py - m)}" width="{_g(2 * m)}" '
            f'height="{_g(2 * m)}" fill="{color}"/>'
        )
    lines.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def _ensure_outdir(out: str) -> str:
    os.makedirs(out, exist_ok=True)
    return out


# ---------- commands ----------


def cmd_simulate(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    seed = args.seed if args.seed is not None else cfg.get("run", "seed")
    cells_p = _placements(cfg)
    cells_c = _compositions(cfg)
    if len(cells_p) != 1 or len(cells_c) != 1:
        raise ConfigError(
            f"simulate needs a single parameter cell, got "
            f"{len(cells_p)} placement(s) x {len(cells_c)} composition(s)"
        )
    placement, comp = cells_p[0], cells_c[0]
    kw = _scene_kwargs(cfg)
    sensor = SensorModel(*cfg.get("scene", "beta"))
    cell = cell_key_for(
        placement, comp.kind, comp.n_T, comp.n_F, kw["radius"], kw["cost"],
        sensor, kw["grid"], kw["source"], kw["target"], kw["insertion"],
    )
    scene = build_scene(
        placement,
        comp.n_T,
        comp.n_F,
        sensor,
        cost=kw["cost"],
        radius=kw["radius"],
        grid=kw["grid"],
        source=kw["source"],
        target=kw["target"],
        insertion=kw["insertion"],
        master_seed=seed,
        cell_key=cell,
        rep=0,
    )
    result = rd_traverse(scene)
    out = _ensure_outdir(args.out)
    _write_obstacles_csv(os.path.join(out, "obstacles.csv"), scene)
    _write_walk_csv(os.path.join(out, "walk.csv"), scene, result)
    if args.svg:
        _svg_scene(
            os.path.join(out, "scene.svg"),
            scene.graph.points,
            result.walk,
            scene.obstacles,
            scene.s,
            scene.t,
            scene.window,
        )
    spent = sum(e.cost_paid for e in result.events)
    print(
        f"distance={_g(result.distance)}, disambiguation={_g(spent)}, "
        f"total={_g(result.total_cost)}"
    )
    return 0


_RECORD_FIELDS = (
    "placement",
    "gamma",
    "d",
    "kappa",
    "r0",
    "composition",
    "n_T",
    "n_F",
    "rep",
    "seed",
    "C",
    "n_dis",
    "walk_length",
)


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    seed = args.seed if args.seed is not None else cfg.get("run", "seed")
    reps = args.reps if args.reps is not None else cfg.get("run", "reps")
    jobs = args.jobs if args.jobs is not None else cfg.get("run", "jobs")
    cells = _expand_cells(cfg, seed, reps)
    total = sum(c.reps for c in cells)
    tick = max(1, total // 20)

    def progress(done: int, n: int) -> None:
        if done % tick == 0 or done == n:
            print(f"sweep: {done}/{n} replications", file=sys.stderr)

    records = run_sweep(cells, jobs=jobs, progress=progress)
    out = _ensure_outdir(args.out)
    rec_path = os.path.join(out, "records.csv")
    _write_csv(
        rec_path,
        _RECORD_FIELDS,
        [[getattr(r, f) for f in _RECORD_FIELDS] for r in records],
    )
    group = ("placement", "gamma", "d", "kappa", "r0", "composition", "n_T", "n_F")
    rows = summarize(records, group)
    sum_path = os.path.join(out, "summary.csv")
    _write_csv(
        sum_path,
        list(group)
        + ["count", "mean_C", "var_C", "min_C", "max_C", "range_C", "mean_n_dis"],
        [
            list(row.cell)
            + [
                row.count,
                row.mean_C,
                row.var_C,
                row.min_C,
                row.max_C,
                row.range_C,
                row.mean_n_dis,
            ]
            for row in rows
        ],
    )
    print(f"wrote {len(records)} records to {rec_path}")
    print(f"wrote {len(rows)} summary rows to {sum_path}")
    return 0


_ORDERING_HEADER = (
    "experiment",
    "label_x",
    "label_y",
    "holds",
    "max_violation",
    "n_x",
    "n_y",
    "mean_x",
    "mean_y",
    "median_x",
    "median_y",
    "tol",
)


def cmd_ordering(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    seed = args.seed if args.seed is not None else cfg.get("run", "seed")
    reps = args.reps if args.reps is not None else cfg.get("ordering", "reps")
    tol = cfg.get("ordering", "tol")
    n_o = cfg.get("ordering", "n_obstacles")
    placements = _placements(cfg)
    if len(placements) != 1:
        raise ConfigError("ordering needs a single placement cell")
    placement = placements[0]
    a, b = cfg.get("scene", "beta")
    sensor = SensorModel(a, b)
    rows: List[List] = []
    texts: List[str] = []

    def add(experiment: str, report, note: str = "") -> None:
        rows.append(
            [
                experiment,
                report.label_x,
                report.label_y,
                report.dominance_holds,
                report.max_violation,
                report.n_x,
                report.n_y,
                report.mean_x,
                report.mean_y,
                report.median_x,
                report.median_y,
                report.tol,
            ]
        )
        verdict = "holds" if report.dominance_holds else "FAILS"
        suffix = f" [{note}]" if note else ""
        texts.append(
            f"{experiment}: {report.label_x} <=st {report.label_y}: {verdict} "
            f"(max violation {_g(report.max_violation)}){suffix}"
        )

    # analytic marks dominance on a CDF grid (no sampling)
    grid = [i / 1000.0 for i in range(1001)]
    viol = max(beta_cdf(b, a, x) - beta_cdf(a, b, x) for x in grid)
    rows.append(
        [
            "marks-analytic",
            f"beta({_g(a)},{_g(b)})",
            f"beta({_g(b)},{_g(a)})",
            viol <= 1e-10,
            viol,
            0,
            0,
            a / (a + b),
            b / (a + b),
            None,
            None,
            1e-10,
        ]
    )
    texts.append(
        f"marks-analytic: beta({_g(a)},{_g(b)}) <=st beta({_g(b)},{_g(a)}): "
        f"{'holds' if viol <= 1e-10 else 'FAILS'} (max violation {_g(viol)})"
    )

    w_f, w_m, w_t = coupled_composition_samples(
        n_o, placement, sensor, reps, master_seed=seed
    )
    add("composition", dominates_st(w_f, w_m, tol, "falseonly", "mixed"))
    add("composition", dominates_st(w_m, w_t, tol, "mixed", "trueonly"))

    ratios = cfg.get("ordering", "ratios")
    if ratios is not None:
        ordered = sorted(ratios)
        by_rho = ratio_sweep_samples(
            n_o, ordered, placement, sensor, reps, master_seed=seed
        )
        for lo, hi in zip(ordered, ordered[1:]):
            add(
                "ratio",
                dominates_st(
                    by_rho[lo], by_rho[hi], tol, f"rho={_g(lo)}", f"rho={_g(hi)}"
                ),
            )

    blunt_beta = cfg.get("ordering", "blunt_beta")
    if blunt_beta is not None:
        blunt = SensorModel(*blunt_beta)
        lab_sharp = f"beta({_g(a)},{_g(b)})"
        lab_blunt = f"beta({_g(blunt.a)},{_g(blunt.b)})"
        sharp_f, blunt_f = sensor_fidelity_samples(
            sensor, blunt, "falseonly", n_o, placement, reps, master_seed=seed
        )
        add(
            "sensor-falseonly",
            dominates_st(
                sharp_f, blunt_f, tol, f"falseonly {lab_sharp}", f"falseonly {lab_blunt}"
            ),
        )
        sharp_t, blunt_t = sensor_fidelity_samples(
            sensor, blunt, "trueonly", n_o, placement, reps, master_seed=seed
        )
        add(
            "sensor-trueonly",
            dominates_st(
                blunt_t, sharp_t, tol, f"trueonly {lab_blunt}", f"trueonly {lab_sharp}"
            ),
            note="sharper marks raise all-true path weights",
        )

    out = _ensure_outdir(args.out)
    path = os.path.join(out, "ordering.csv")
    _write_csv(path, _ORDERING_HEADER, rows)
    for line in texts:
        print(line)
    print(f"wrote {len(rows)} ordering rows to {path}")
    return 0


# ---------- network mode ----------


def _read_csv_rows(path: str, n_min: int, n_max: int, what: str):
    """Yield (line_number, fields); a non-numeric first row is a header."""
    try:
        fh = open(path, "r", encoding="utf-8", newline="")
    except OSError:
        raise
    with fh:
        reader = csv.reader(fh)
        for lineno, row in enumerate(reader, start=1):
            if not row or all(not f.strip() for f in row):
                continue
            fields = [f.strip() for f in row]
            if lineno == 1:
                try:
                    float(fields[0])
                except ValueError:
                    continue  # header row
            if not n_min <= len(fields) <= n_max:
                raise ConfigError(
                    f"{what} line {lineno}: expected {n_min}"
                    + (f"-{n_max}" if n_max != n_min else "")
                    + f" fields, got {len(fields)}"
                )
            yield lineno, fields


def _read_network(nodes_path: str, edges_path: str):
    ids: List[int] = []
    pts: List[Point2] = []
    index: Dict[int, int] = {}
    for lineno, f in _read_csv_rows(nodes_path, 3, 3, "nodes"):
        try:
            nid, x, y = int(f[0]), float(f[1]), float(f[2])
        except ValueError:
            raise ConfigError(f"nodes line {lineno}: bad number in {f!r}") from None
        if nid in index:
            raise ConfigError(f"nodes line {lineno}: duplicate id {nid}")
        index[nid] = len(ids)
        ids.append(nid)
        pts.append(Point2(x, y))
    if len(pts) < 2:
        raise ConfigError(f"{nodes_path}: need at least two nodes")
    edges: List[Tuple[int, int, float]] = []
    for lineno, f in _read_csv_rows(edges_path, 2, 3, "edges"):
        try:
            u_id, v_id = int(f[0]), int(f[1])
        except ValueError:
            raise ConfigError(f"edges line {lineno}: bad node id in {f!r}") from None
        for nid in (u_id, v_id):
            if nid not in index:
                raise ConfigError(f"edges line {lineno}: unknown node id {nid}")
        u, v = index[u_id], index[v_id]
        if len(f) == 3:
            try:
                length = float(f[2])
            except ValueError:
                raise ConfigError(
                    f"edges line {lineno}: bad length {f[2]!r}"
                ) from None
        else:
            dx = pts[u].x - pts[v].x
            dy = pts[u].y - pts[v].y
            length = math.hypot(dx, dy)
        edges.append((u, v, length))
    try:
        graph = GeometricGraph(pts, edges)
    except ValueError as exc:
        raise ConfigError(f"{edges_path}: {exc}") from None
    return graph, ids, index


def _read_network_obstacles(path: str, sensor: SensorModel, seed: int) -> List[Obstacle]:
    """Manual obstacle table x,y,r,status,c with optional trailing mark p."""
    raw = []
    n_fields = None
    for lineno, f in _read_csv_rows(path, 5, 6, "obstacles"):
        if n_fields is None:
            n_fields = len(f)
        elif len(f) != n_fields:
            raise ConfigError(
                f"obstacles line {lineno}: mixed 5- and 6-field rows"
            )
        try:
            x, y, r, c = float(f[0]), float(f[1]), float(f[2]), float(f[4])
        except ValueError:
            raise ConfigError(f"obstacles line {lineno}: bad number in {f!r}") from None
        if f[3] not in ("T", "F"):
            raise ConfigError(
                f"obstacles line {lineno}: status must be T or F, got {f[3]!r}"
            )
        p = None
        if len(f) == 6:
            try:
                p = float(f[5])
            except ValueError:
                raise ConfigError(f"obstacles line {lineno}: bad mark {f[5]!r}") from None
        try:
            raw.append((Disk(Point2(x, y), r), Status(f[3]), c, p))
        except ValueError as exc:
            raise ConfigError(f"obstacles line {lineno}: {exc}") from None
    obstacles = [
        Obstacle(
            id=i,
            disk=disk,
            status=status,
            p=p,
            c=c,
            knowledge=Knowledge.AMBIGUOUS,
        )
        for i, (disk, status, c, p) in enumerate(raw)
    ]
    if obstacles and obstacles[0].p is None:
        marks = RngStream(seed, stream_index("network", "marks"))
        obstacles = assign_marks(obstacles, sensor, marks)
    return obstacles


def _node_bbox(points: Sequence[Point2]) -> Window:
    """Node bounding box, padded along any degenerate (collinear) axis."""
    xs = [p.x for p in points]
    ys = [p.y for p in points]
    xmin, xmax, ymin, ymax = min(xs), max(xs), min(ys), max(ys)
    span = max(xmax - xmin, ymax - ymin, 1.0)
    if xmax - xmin <= 0:
        xmin -= span / 2
        xmax += span / 2
    if ymax - ymin <= 0:
        ymin -= span / 2
        ymax += span / 2
    return Window(xmin, xmax, ymin, ymax)


def _generated_network_obstacles(
    cfg: RunConfig, graph: GeometricGraph, seed: int
) -> List[Obstacle]:
    """Placement-driven obstacles over the node bounding box."""
    comps = _compositions(cfg)
    placements = _placements(cfg)
    if len(comps) != 1 or len(placements) != 1:
        raise ConfigError("network needs a single parameter cell")
    comp, placement = comps[0], placements[0]
    bbox = _node_bbox(graph.points)
    kw = _scene_kwargs(cfg)
    n = comp.total
    place = RngStream(seed, stream_index("network", "placement"))
    status = RngStream(seed, stream_index("network", "status"))
    marks = RngStream(seed, stream_index("network", "marks"))
    pts = placement.sample(n, bbox, place)
    gen = status.generator()
    perm = gen.permutation(n)
    true_ids = set(int(i) for i in perm[: comp.n_T])
    radius = kw["radius"] if isinstance(kw["radius"], float) else kw["radius"][0]
    cost = kw["cost"] if isinstance(kw["cost"], float) else kw["cost"][0]
    obstacles = [
        Obstacle(
            id=i,
            disk=Disk(pts[i], radius),
            status=Status.TRUE if i in true_ids else Status.FALSE,
            p=None,
            c=cost,
            knowledge=Knowledge.AMBIGUOUS,
        )
        for i in range(n)
    ]
    sensor = SensorModel(*cfg.get("scene", "beta"))
    return assign_marks(obstacles, sensor, marks)


def cmd_network(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    seed = args.seed if args.seed is not None else cfg.get("run", "seed")
    graph, ids, index = _read_network(args.nodes, args.edges)
    s_id = cfg.get("network", "source")
    t_id = cfg.get("network", "target")
    if s_id is None or t_id is None:
        raise ConfigError("network mode needs [network] source and target node ids")
    for nid in (s_id, t_id):
        if nid not in index:
            raise ConfigError(f"[network] node id {nid} not in {args.nodes}")
    obstacles_path = cfg.get("network", "obstacles")
    sensor = SensorModel(*cfg.get("scene", "beta"))
    if obstacles_path is not None:
        if not os.path.isabs(obstacles_path):
            obstacles_path = os.path.join(cfg.base_dir, obstacles_path)
        obstacles = _read_network_obstacles(obstacles_path, sensor, seed)
    elif cfg.given("composition", "kind") or cfg.given("composition", "n_false"):
        obstacles = _generated_network_obstacles(cfg, graph, seed)
    else:
        obstacles = []
    bbox = _node_bbox(graph.points)
    scene = Scene(
        graph=graph,
        obstacles=tuple(obstacles),
        s=index[s_id],
        t=index[t_id],
        window=bbox,
        insertion_window=bbox,
    )
    result = rd_traverse(scene)
    out = _ensure_outdir(args.out)
    _write_obstacles_csv(os.path.join(out, "obstacles.csv"), scene)
    _write_walk_csv(os.path.join(out, "walk.csv"), scene, result)
    if args.svg:
        _svg_scene(
            os.path.join(out, "network.svg"),
            graph.points,
            result.walk,
            scene.obstacles,
            scene.s,
            scene.t,
            bbox,
        )
    spent = sum(e.cost_paid for e in result.events)
    print(
        f"total={_g(result.total_cost)} ({_g(result.distance)} path + "
        f"{_g(spent)} disambiguation)"
    )
    return 0


# ---------- entry point ----------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="obstaclesim",
        description=(
            "Obstacle-field traversal laboratory: lattice scenes, spatial "
            "point-process placements, sensor marks, and replan-on-reveal "
            "navigation."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, svg: bool = False) -> None:
        p.add_argument("--config", default=None, help="config file (key=value sections)")
        p.add_argument("--out", default="out", help="output directory (default: out)")
        p.add_argument("--seed", type=int, default=None, help="override [run] seed")
        if svg:
            p.add_argument("--svg", action="store_true", help="also write an SVG plot")

    p_sim = sub.add_parser("simulate", help="one scene, one traversal, CSV + SVG")
    common(p_sim, svg=True)
    p_sim.set_defaults(func=cmd_simulate)

    p_sweep = sub.add_parser("sweep", help="replicated Monte Carlo grid, records CSV")
    common(p_sweep)
    p_sweep.add_argument("--reps", type=int, default=None, help="override [run] reps")
    p_sweep.add_argument(
        "--jobs", type=int, default=None,
        help="worker processes; output bytes do not depend on this",
    )
    p_sweep.set_defaults(func=cmd_sweep)

    p_ord = sub.add_parser("ordering", help="stochastic dominance checks, CSV report")
    common(p_ord)
    p_ord.add_argument(
        "--reps", type=int, default=None, help="override [ordering] reps"
    )
    p_ord.set_defaults(func=cmd_ordering)

    p_net = sub.add_parser("network", help="traverse a user-supplied street network")
    p_net.add_argument("nodes", help="nodes CSV: id,x,y")
    p_net.add_argument("edges", help="edges CSV: u,v[,length]")
    common(p_net, svg=True)
    p_net.set_defaults(func=cmd_network)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except InfeasibleSceneError as exc:
        print(f"infeasible scene: {exc}", file=sys.stderr)
        return 3
    except SweepCellError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
