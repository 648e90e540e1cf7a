"""obstaclesim: traversal of stochastic obstacle fields on geometric graphs.

Scenes are disk obstacles dropped on an 8-adjacency lattice (or any planar
network), each either a real blocker or a false alarm, with a Beta-distributed
sensor mark for its probability of being real. A navigating agent replans
shortest paths under current knowledge and pays to disambiguate obstacles it
would otherwise have to cross. The package provides the samplers (uniform,
Strauss, Matern cluster), the replanning traversal, a deterministic Monte
Carlo harness, and empirical stochastic-dominance checks.
"""

from .geometry import (
    Disk,
    GeometricGraph,
    Point2,
    build_lattice,
    entry_parameter,
    index_edge_disks,
    lattice_vertex,
    segment_disk_intersects,
)
from .montecarlo import (
    ExperimentConfig,
    FalseOnly,
    MaternPlacement,
    Mixed,
    StraussPlacement,
    SweepCellError,
    SweepRecord,
    SummaryRow,
    TrueOnly,
    UniformPlacement,
    build_scene,
    pearson_corr,
    run_replication,
    run_sweep,
    stream_index,
    summarize,
)
from .ordering import (
    Ecdf,
    OrderingReport,
    VariabilityReport,
    coupled_composition_samples,
    dominates_st,
    lemma1_mc_check,
    ratio_sweep_samples,
    sensor_fidelity_samples,
    variability_experiment,
)
from .pointproc import (
    MaternParams,
    RngStream,
    StraussParams,
    Window,
    count_close_pairs,
    sample_matern,
    sample_strauss,
    sample_uniform,
)
from .sensor import (
    Knowledge,
    Obstacle,
    SensorModel,
    Status,
    assign_marks,
    beta_cdf,
    beta_sample,
)
from .traversal import (
    DisambiguationEvent,
    InfeasibleSceneError,
    Scene,
    TraversalResult,
    edge_weight,
    path_weight,
    rd_traverse,
    shortest_path,
)

__version__ = "0.1.0"

__all__ = [
    "Disk",
    "GeometricGraph",
    "Point2",
    "build_lattice",
    "entry_parameter",
    "index_edge_disks",
    "lattice_vertex",
    "segment_disk_intersects",
    "ExperimentConfig",
    "FalseOnly",
    "MaternPlacement",
    "Mixed",
    "StraussPlacement",
    "SweepCellError",
    "SweepRecord",
    "SummaryRow",
    "TrueOnly",
    "UniformPlacement",
    "build_scene",
    "pearson_corr",
    "run_replication",
    "run_sweep",
    "stream_index",
    "summarize",
    "Ecdf",
    "OrderingReport",
    "VariabilityReport",
    "coupled_composition_samples",
    "dominates_st",
    "lemma1_mc_check",
    "ratio_sweep_samples",
    "sensor_fidelity_samples",
    "variability_experiment",
    "MaternParams",
    "RngStream",
    "StraussParams",
    "Window",
    "count_close_pairs",
    "sample_matern",
    "sample_strauss",
    "sample_uniform",
    "Knowledge",
    "Obstacle",
    "SensorModel",
    "Status",
    "assign_marks",
    "beta_cdf",
    "beta_sample",
    "DisambiguationEvent",
    "InfeasibleSceneError",
    "Scene",
    "TraversalResult",
    "edge_weight",
    "path_weight",
    "rd_traverse",
    "shortest_path",
    "__version__",
]
