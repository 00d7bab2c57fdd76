"""End-to-end PageRank drivers: Static, Naive-dynamic, Dynamic Traversal,
Dynamic Frontier and Dynamic Frontier with Pruning.

All five share one synchronous loop: sweep, measure the L-inf change, swap
buffers, stop once the change is within tolerance. They differ only in the
starting ranks, which vertices are flagged, and whether the frontier grows.
Graphs must already carry a self-loop on every vertex.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import InputError
from .frontier import AffectedFlags, expand_affected, initial_affected, mark_reachable, traversal_seeds
from .graph import CsrGraph
from .partition import DegreePartition, partition_by_degree
from .ranks import (
    EngineConfig,
    Mode,
    PartitionStrategy,
    RankState,
    init_ranks_uniform,
    linf_norm_delta,
    update_ranks,
)

IterationCallback = Callable[[int, np.ndarray], None]

APPROACHES = ("static", "nd", "dt", "df", "dfp")


@dataclass
class RankResult:
    ranks: np.ndarray
    iterations: int
    affected_vertex_iterations: int
    converged: bool
    final_delta: float


def check_transposed(g_transpose: CsrGraph, g_forward: CsrGraph) -> None:
    """Cheap consistency check that ``g_transpose`` is the transpose of ``g_forward``."""
    n = g_forward.vertex_count
    if g_transpose.vertex_count != n or g_transpose.edge_count != g_forward.edge_count:
        raise InputError("graph pair differs in |V| or |E|; expected a graph and its transpose")
    in_degrees = np.bincount(g_forward.targets, minlength=n)
    if not np.array_equal(in_degrees, g_transpose.degrees):
        raise InputError("transpose degrees do not match the in-degrees of the forward graph")


def _rank_partition(g_transpose: CsrGraph, cfg: EngineConfig) -> Optional[DegreePartition]:
    if cfg.partition_strategy is PartitionStrategy.DONT_PARTITION:
        return None
    return partition_by_degree(g_transpose, cfg.low_degree_threshold)


def _expand_partition(g_forward: CsrGraph, cfg: EngineConfig) -> Optional[DegreePartition]:
    if cfg.partition_strategy is PartitionStrategy.PARTITION_BOTH:
        return partition_by_degree(g_forward, cfg.low_degree_threshold)
    return None


def _previous_state(previous_ranks, n: int) -> RankState:
    state = RankState.from_ranks(previous_ranks)
    if state.previous.ndim != 1 or state.previous.shape[0] != n:
        raise InputError(f"previous ranks have length {state.previous.shape}, graph has {n} vertices")
    return state


def _iterate(
    state: RankState,
    g_transpose: CsrGraph,
    g_forward: CsrGraph,
    cfg: EngineConfig,
    mode: Mode = Mode.PLAIN,
    flags: Optional[AffectedFlags] = None,
    expand: Optional[Callable[[], None]] = None,
    callback: Optional[IterationCallback] = None,
    check_convergence: bool = True,
) -> RankResult:
    rank_part = _rank_partition(g_transpose, cfg)
    work = 0
    delta = float("inf")
    converged = False
    iterations = 0
    for iterations in range(1, cfg.max_iterations + 1):
        if flags is not None:
            flags.neighbors_pending[:] = 0
        work += update_ranks(state, g_transpose, g_forward, rank_part, cfg, mode, flags)
        delta = linf_norm_delta(state.current, state.previous)
        state.swap()
        if callback is not None:
            callback(iterations, state.previous)
        if check_convergence and delta <= cfg.tolerance:
            converged = True
            break
        if expand is not None:
            expand()
    return RankResult(state.previous, iterations, work, converged, delta)


def static_pagerank(
    g_transpose: CsrGraph,
    g_forward: CsrGraph,
    cfg: EngineConfig = EngineConfig(),
    callback: Optional[IterationCallback] = None,
) -> RankResult:
    check_transposed(g_transpose, g_forward)
    state = init_ranks_uniform(g_forward.vertex_count)
    return _iterate(state, g_transpose, g_forward, cfg, callback=callback)


def power_iterate_fixed(
    g_transpose: CsrGraph, g_forward: CsrGraph, cfg: EngineConfig = EngineConfig()
) -> RankResult:
    """Static PageRank run for exactly ``cfg.max_iterations`` sweeps.

    ``converged`` reports whether the last sweep's change was within
    ``cfg.tolerance``, although the loop never stops early.
    """
    check_transposed(g_transpose, g_forward)
    state = init_ranks_uniform(g_forward.vertex_count)
    result = _iterate(state, g_transpose, g_forward, cfg, check_convergence=False)
    result.converged = result.final_delta <= cfg.tolerance
    return result


def naive_dynamic(
    g_transpose: CsrGraph,
    g_forward: CsrGraph,
    previous_ranks,
    cfg: EngineConfig = EngineConfig(),
    callback: Optional[IterationCallback] = None,
) -> RankResult:
    check_transposed(g_transpose, g_forward)
    state = _previous_state(previous_ranks, g_forward.vertex_count)
    return _iterate(state, g_transpose, g_forward, cfg, callback=callback)


def dynamic_traversal(
    g_forward: CsrGraph,
    g_transpose: CsrGraph,
    deletions,
    insertions,
    previous_ranks,
    cfg: EngineConfig = EngineConfig(),
    callback: Optional[IterationCallback] = None,
) -> RankResult:
    """Recompute only vertices reachable (in the updated graph) from the update sites."""
    check_transposed(g_transpose, g_forward)
    state = _previous_state(previous_ranks, g_forward.vertex_count)
    flags = mark_reachable(g_forward, traversal_seeds(deletions, insertions))
    return _iterate(state, g_transpose, g_forward, cfg, Mode.PLAIN, flags, callback=callback)


def dynamic_frontier(
    g_forward: CsrGraph,
    g_transpose: CsrGraph,
    deletions,
    insertions,
    previous_ranks,
    cfg: EngineConfig = EngineConfig(),
    pruning: bool = False,
    callback: Optional[IterationCallback] = None,
    initial_flags: Optional[AffectedFlags] = None,
) -> RankResult:
    """DF (``pruning=False``) or DF-P (``pruning=True``) PageRank.

    ``initial_flags`` replaces the batch-derived initial marking; it is
    expanded once before the first sweep exactly like the derived one.
    """
    check_transposed(g_transpose, g_forward)
    n = g_forward.vertex_count
    state = _previous_state(previous_ranks, n)
    expand_part = _expand_partition(g_forward, cfg)
    if initial_flags is None:
        flags = initial_affected(g_forward, deletions, insertions)
    else:
        flags = initial_flags.copy()
        if flags.vertex_affected.shape[0] != n or flags.neighbors_pending.shape[0] != n:
            raise InputError("initial flags do not match the vertex count")

    def expand() -> None:
        expand_affected(flags, g_forward, expand_part, cfg.low_degree_threshold)

    expand()
    mode = Mode.CLOSED_LOOP_PRUNE if pruning else Mode.PLAIN
    return _iterate(state, g_transpose, g_forward, cfg, mode, flags, expand, callback)


def run_approach(
    approach: str,
    g_forward: CsrGraph,
    g_transpose: CsrGraph,
    batch,
    previous_ranks,
    cfg: EngineConfig = EngineConfig(),
    callback: Optional[IterationCallback] = None,
) -> RankResult:
    """Dispatch by short approach name (``static``, ``nd``, ``dt``, ``df``, ``dfp``)."""
    if approach == "static":
        return static_pagerank(g_transpose, g_forward, cfg, callback)
    if approach == "nd":
        return naive_dynamic(g_transpose, g_forward, previous_ranks, cfg, callback)
    if approach == "dt":
        return dynamic_traversal(g_forward, g_transpose, batch.deletions, batch.insertions,
                                 previous_ranks, cfg, callback)
    if approach in ("df", "dfp"):
        return dynamic_frontier(g_forward, g_transpose, batch.deletions, batch.insertions,
                                previous_ranks, cfg, approach == "dfp", callback)
    raise InputError(f"unknown approach {approach!r}; expected one of {', '.join(APPROACHES)}")
