"""Synchronous pull-based rank updates and the norms used around them.

Each sweep reads ``state.previous`` and writes every entry of
``state.current`` exactly once. Low in-degree vertices are summed serially,
one task per vertex; high in-degree vertices split their in-edges over
``LANES`` strided partial sums that are then tree-reduced.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from numba import njit, prange

from .errors import InputError, InvariantError
from .graph import CsrGraph
from .partition import DEFAULT_LOW_DEGREE_THRESHOLD, DegreePartition

LANES = 32


class PartitionStrategy(str, enum.Enum):
    DONT_PARTITION = "dont-partition"
    PARTITION_TRANSPOSE = "partition-transpose"
    PARTITION_BOTH = "partition-both"


class Mode(enum.Enum):
    PLAIN = "plain"
    CLOSED_LOOP_PRUNE = "closed-loop-prune"


@dataclass(frozen=True)
class EngineConfig:
    damping: float = 0.85
    tolerance: float = 1e-10
    frontier_tolerance: float = 1e-6
    prune_tolerance: float = 1e-6
    max_iterations: int = 500
    low_degree_threshold: int = DEFAULT_LOW_DEGREE_THRESHOLD
    partition_strategy: PartitionStrategy = PartitionStrategy.PARTITION_BOTH

    def __post_init__(self):
        if not 0.0 < self.damping < 1.0:
            raise InputError(f"damping must lie in (0, 1), got {self.damping}")
        if not self.tolerance > 0.0:
            raise InputError(f"tolerance must be positive, got {self.tolerance}")
        if self.frontier_tolerance < 0.0 or self.prune_tolerance < 0.0:
            raise InputError("frontier and prune tolerances must be non-negative")
        if self.max_iterations < 1:
            raise InputError("max_iterations must be at least 1")
        if self.low_degree_threshold < 0:
            raise InputError("low_degree_threshold must be non-negative")
        object.__setattr__(self, "partition_strategy", PartitionStrategy(self.partition_strategy))


@dataclass
class RankState:
    """Double-buffered ranks: ``previous`` is read, ``current`` is written."""

    previous: np.ndarray
    current: np.ndarray

    def swap(self) -> None:
        self.previous, self.current = self.current, self.previous

    @classmethod
    def from_ranks(cls, ranks) -> "RankState":
        r = np.array(ranks, dtype=np.float64)
        return cls(r, r.copy())


def init_ranks_uniform(vertex_count: int) -> RankState:
    if vertex_count <= 0:
        raise InputError("cannot initialise ranks of an empty graph")
    return RankState(np.full(vertex_count, 1.0 / vertex_count), np.full(vertex_count, 1.0 / vertex_count))


# --- kernels -----------------------------------------------------------------


@njit(cache=True, inline="always")
def _pull_serial(v, t_off, t_tgt, outdeg, prev):
    c = 0.0
    for j in range(t_off[v], t_off[v + 1]):
        u = t_tgt[j]
        c += prev[u] / outdeg[u]
    return c


@njit(cache=True, inline="always")
def _pull_lanes(v, t_off, t_tgt, outdeg, prev):
    start = t_off[v]
    end = t_off[v + 1]
    partial = np.zeros(LANES)
    for lane in range(LANES):
        s = 0.0
        for j in range(start + lane, end, LANES):
            u = t_tgt[j]
            s += prev[u] / outdeg[u]
        partial[lane] = s
    width = LANES // 2
    while width > 0:
        for lane in range(width):
            partial[lane] += partial[lane + width]
        width //= 2
    return partial[0]


@njit(cache=True, inline="always")
def _settle(v, c, prev, cur, outdeg, vaff, npend, use_flags, closed_loop, alpha, c0, tau_f, tau_p):
    if closed_loop:
        d = outdeg[v]
        r = 1.0 / (1.0 - alpha / d) * (c0 + alpha * (c - prev[v] / d))
    else:
        r = c0 + alpha * c
    if use_flags:
        old = prev[v]
        denom = max(r, old)
        rel = abs(r - old) / denom if denom > 0.0 else 0.0
        if closed_loop and rel <= tau_p:
            vaff[v] = 0
        if rel > tau_f:
            npend[v] = 1
    cur[v] = r


@njit(parallel=True, cache=True)
def _sweep_vertices(vertices, lanes, t_off, t_tgt, outdeg, prev, cur, vaff, npend,
                    use_flags, closed_loop, alpha, c0, tau_f, tau_p):
    processed = 0
    for i in prange(vertices.shape[0]):
        v = vertices[i]
        if use_flags and vaff[v] == 0:
            cur[v] = prev[v]
            continue
        if lanes:
            c = _pull_lanes(v, t_off, t_tgt, outdeg, prev)
        else:
            c = _pull_serial(v, t_off, t_tgt, outdeg, prev)
        _settle(v, c, prev, cur, outdeg, vaff, npend, use_flags, closed_loop, alpha, c0, tau_f, tau_p)
        processed += 1
    return processed


@njit(parallel=True, cache=True)
def _sweep_dispatch(n, threshold, t_off, t_tgt, outdeg, prev, cur, vaff, npend,
                    use_flags, closed_loop, alpha, c0, tau_f, tau_p):
    processed = 0
    for v in prange(n):
        if use_flags and vaff[v] == 0:
            cur[v] = prev[v]
            continue
        if t_off[v + 1] - t_off[v] > threshold:
            c = _pull_lanes(v, t_off, t_tgt, outdeg, prev)
        else:
            c = _pull_serial(v, t_off, t_tgt, outdeg, prev)
        _settle(v, c, prev, cur, outdeg, vaff, npend, use_flags, closed_loop, alpha, c0, tau_f, tau_p)
        processed += 1
    return processed


_NO_FLAGS = np.zeros(0, dtype=np.uint8)


def update_ranks(
    state: RankState,
    g_transpose: CsrGraph,
    g_forward: CsrGraph,
    part: DegreePartition | None,
    cfg: EngineConfig,
    mode: Mode = Mode.PLAIN,
    flags=None,
) -> int:
    """Run one synchronous sweep and return how many vertices were recomputed.

    ``part`` must be the in-degree partition (built from ``g_transpose``);
    ``None`` selects the serial or lane path per vertex by inline degree test.
    Without ``flags`` every vertex is recomputed and no flags are touched.
    With flags, skipped vertices copy ``previous`` into ``current``; a vertex
    whose relative change exceeds the frontier tolerance gets its
    neighbors-pending flag set, and in closed-loop mode one whose relative
    change is within the prune tolerance is unmarked.
    """
    n = g_transpose.vertex_count
    if state.previous.shape[0] != n or state.current.shape[0] != n:
        raise InputError("rank buffers do not match the vertex count")
    if g_forward.has_dead_ends:
        raise InvariantError("graph has a vertex with no out-edges; add self-loops first")
    use_flags = flags is not None
    vaff = flags.vertex_affected if use_flags else _NO_FLAGS
    npend = flags.neighbors_pending if use_flags else _NO_FLAGS
    closed_loop = mode is Mode.CLOSED_LOOP_PRUNE
    alpha = cfg.damping
    common = (
        g_transpose.offsets, g_transpose.targets, g_forward.degrees,
        state.previous, state.current, vaff, npend, use_flags, closed_loop,
        alpha, (1.0 - alpha) / n, cfg.frontier_tolerance, cfg.prune_tolerance,
    )
    if part is None:
        return int(_sweep_dispatch(n, cfg.low_degree_threshold, *common))
    processed = _sweep_vertices(part.low, False, *common)
    processed += _sweep_vertices(part.high, True, *common)
    return int(processed)


def _check_lengths(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise InputError(f"length mismatch: {a.shape} vs {b.shape}")


def linf_norm_delta(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    _check_lengths(a, b)
    return float(np.max(np.abs(a - b))) if a.size else 0.0


def l1_norm_delta(a, b) -> float:
    # np.sum reduces pairwise in a fixed order for a contiguous 1-D array.
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    _check_lengths(a, b)
    return float(np.sum(np.abs(a - b)))
