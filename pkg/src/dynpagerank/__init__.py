"""Parallel static and dynamic PageRank over CSR graphs."""

import numba as _numba

# Avoid probing an incompatible system TBB; fall back to OpenMP or workqueue.
_numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

from .engines import (  # noqa: E402
    APPROACHES,
    RankResult,
    dynamic_frontier,
    dynamic_traversal,
    naive_dynamic,
    run_approach,
    static_pagerank,
)
from .graph import BatchUpdate, CsrGraph, add_self_loops, apply_batch, build_csr, transpose  # noqa: E402
from .ranks import EngineConfig, PartitionStrategy  # noqa: E402

__all__ = [
    "APPROACHES",
    "BatchUpdate",
    "CsrGraph",
    "EngineConfig",
    "PartitionStrategy",
    "RankResult",
    "add_self_loops",
    "apply_batch",
    "build_csr",
    "dynamic_frontier",
    "dynamic_traversal",
    "naive_dynamic",
    "run_approach",
    "static_pagerank",
    "transpose",
]
