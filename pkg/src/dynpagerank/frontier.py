"""Marking of vertices affected by a batch update.

Flag writes during expansion are plain byte stores of ``1``; concurrent
writers only ever store the same value.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit, prange

from .errors import InputError
from .graph import CsrGraph, as_edge_array
from .partition import DEFAULT_LOW_DEGREE_THRESHOLD, DegreePartition

FLAG_DTYPE = np.uint8


@dataclass
class AffectedFlags:
    vertex_affected: np.ndarray
    neighbors_pending: np.ndarray

    @classmethod
    def empty(cls, vertex_count: int) -> "AffectedFlags":
        return cls(np.zeros(vertex_count, FLAG_DTYPE), np.zeros(vertex_count, FLAG_DTYPE))

    @classmethod
    def all_affected(cls, vertex_count: int) -> "AffectedFlags":
        return cls(np.ones(vertex_count, FLAG_DTYPE), np.zeros(vertex_count, FLAG_DTYPE))

    def affected_ids(self) -> np.ndarray:
        return np.flatnonzero(self.vertex_affected)

    def pending_ids(self) -> np.ndarray:
        return np.flatnonzero(self.neighbors_pending)

    def copy(self) -> "AffectedFlags":
        return AffectedFlags(self.vertex_affected.copy(), self.neighbors_pending.copy())


def initial_affected(g: CsrGraph, deletions, insertions) -> AffectedFlags:
    """Mark deletion targets affected, and every update source as neighbors-pending."""
    n = g.vertex_count
    dels = as_edge_array(deletions)
    ins = as_edge_array(insertions)
    for pairs in (dels, ins):
        if pairs.size and (pairs.min() < 0 or pairs.max() >= n):
            raise InputError(f"batch endpoint out of range for |V|={n}")
    flags = AffectedFlags.empty(n)
    flags.neighbors_pending[dels[:, 0]] = 1
    flags.vertex_affected[dels[:, 1]] = 1
    flags.neighbors_pending[ins[:, 0]] = 1
    return flags


@njit(cache=True, inline="always")
def _mark_out(u, off, tgt, vaff):
    for j in range(off[u], off[u + 1]):
        vaff[tgt[j]] = 1


@njit(cache=True, inline="always")
def _mark_out_lanes(u, off, tgt, vaff, lanes):
    start = off[u]
    end = off[u + 1]
    for lane in range(lanes):
        for j in range(start + lane, end, lanes):
            vaff[tgt[j]] = 1


@njit(parallel=True, cache=True)
def _expand_vertices(vertices, lanes, off, tgt, vaff, npend):
    for i in prange(vertices.shape[0]):
        u = vertices[i]
        if npend[u]:
            if lanes:
                _mark_out_lanes(u, off, tgt, vaff, 32)
            else:
                _mark_out(u, off, tgt, vaff)


@njit(parallel=True, cache=True)
def _expand_dispatch(n, threshold, off, tgt, vaff, npend):
    for u in prange(n):
        if npend[u]:
            if off[u + 1] - off[u] > threshold:
                _mark_out_lanes(u, off, tgt, vaff, 32)
            else:
                _mark_out(u, off, tgt, vaff)


def expand_affected(
    flags: AffectedFlags,
    g: CsrGraph,
    part: DegreePartition | None = None,
    threshold: int = DEFAULT_LOW_DEGREE_THRESHOLD,
) -> None:
    """Mark every out-neighbor of each neighbors-pending vertex as affected.

    ``part`` is the out-degree partition of ``g``; without it each pending
    vertex picks its path by an inline degree test against ``threshold``.
    ``neighbors_pending`` is left untouched.
    """
    if part is None:
        _expand_dispatch(g.vertex_count, threshold, g.offsets, g.targets,
                         flags.vertex_affected, flags.neighbors_pending)
        return
    _expand_vertices(part.low, False, g.offsets, g.targets, flags.vertex_affected, flags.neighbors_pending)
    _expand_vertices(part.high, True, g.offsets, g.targets, flags.vertex_affected, flags.neighbors_pending)


@njit(parallel=True, cache=True)
def _bfs_level(frontier, off, tgt, visited, nxt):
    for i in prange(frontier.shape[0]):
        u = frontier[i]
        for j in range(off[u], off[u + 1]):
            v = tgt[j]
            if visited[v] == 0:
                nxt[v] = 1


def reachable_levels(g: CsrGraph, seeds) -> list[np.ndarray]:
    """Level-synchronous BFS from ``seeds``; returns the sorted frontier of each level."""
    n = g.vertex_count
    seeds = np.unique(np.asarray(seeds, dtype=np.int64))
    if seeds.size and (seeds[0] < 0 or seeds[-1] >= n):
        raise InputError(f"seed out of range for |V|={n}")
    visited = np.zeros(n, FLAG_DTYPE)
    levels = []
    frontier = seeds
    nxt = np.zeros(n, FLAG_DTYPE)
    while frontier.size:
        visited[frontier] = 1
        levels.append(frontier)
        _bfs_level(frontier, g.offsets, g.targets, visited, nxt)
        frontier = np.flatnonzero(nxt)
        nxt[frontier] = 0
    return levels


def mark_reachable(g: CsrGraph, seeds) -> AffectedFlags:
    flags = AffectedFlags.empty(g.vertex_count)
    for level in reachable_levels(g, seeds):
        flags.vertex_affected[level] = 1
    return flags


def traversal_seeds(deletions, insertions) -> np.ndarray:
    """Sources of every update plus deletion targets."""
    dels = as_edge_array(deletions)
    ins = as_edge_array(insertions)
    return np.unique(np.concatenate([dels[:, 0], dels[:, 1], ins[:, 0]]))
