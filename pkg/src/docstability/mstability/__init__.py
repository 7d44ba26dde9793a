"""Multiscale graph partitioning: diffusion kernel, Louvain ensembles over a
Markov-time sweep, and VI-based robust level selection."""

from .diffusion import DiffusionError, DiffusionOperator, build_operator
from .louvain import louvain_dense, louvain_optimize
from .partition import (
    Partition,
    PartitionError,
    canonicalize,
    contingency,
    variation_of_information,
    vi_normalized,
)
from .scan import (
    ScanError,
    ScanResult,
    SelectedLevel,
    TimePoint,
    load_scan,
    save_scan,
    scan,
    select_robust,
    time_grid,
)

__all__ = [
    "DiffusionError",
    "DiffusionOperator",
    "build_operator",
    "louvain_dense",
    "louvain_optimize",
    "Partition",
    "PartitionError",
    "canonicalize",
    "contingency",
    "variation_of_information",
    "vi_normalized",
    "ScanError",
    "ScanResult",
    "SelectedLevel",
    "TimePoint",
    "load_scan",
    "save_scan",
    "scan",
    "select_robust",
    "time_grid",
]
