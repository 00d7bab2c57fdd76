"""Immutable CSR graphs, transposes, self-loop augmentation and batch updates.

Vertex ids are dense integers ``0..n-1``. Every target slice is kept sorted
and free of duplicates, so two graphs with the same edge set have identical
``offsets``/``targets`` arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError

INDEX_DTYPE = np.int64


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class CsrGraph:
    """Directed graph in compressed sparse row form.

    Used both for a graph G (rows hold out-neighbors) and for its transpose
    G' (rows hold in-neighbors); the class does not care which.
    """

    vertex_count: int
    offsets: np.ndarray
    targets: np.ndarray

    @property
    def edge_count(self) -> int:
        return int(self.targets.shape[0])

    @cached_property
    def degrees(self) -> np.ndarray:
        return _readonly(np.diff(self.offsets))

    def degree(self, v: int) -> int:
        return int(self.offsets[v + 1] - self.offsets[v])

    def neighbors(self, v: int) -> np.ndarray:
        return self.targets[self.offsets[v] : self.offsets[v + 1]]

    @cached_property
    def sources(self) -> np.ndarray:
        """Source id of every edge, aligned with ``targets``."""
        return _readonly(np.repeat(np.arange(self.vertex_count, dtype=INDEX_DTYPE), self.degrees))

    @cached_property
    def edge_keys(self) -> np.ndarray:
        """Sorted ``source * n + target`` key per edge (row-major order is already sorted)."""
        return _readonly(self.sources * self.vertex_count + self.targets)

    @cached_property
    def has_dead_ends(self) -> bool:
        return bool(self.vertex_count and self.degrees.min() == 0)

    def edges(self) -> list[tuple[int, int]]:
        return list(zip(self.sources.tolist(), self.targets.tolist()))

    def has_edge(self, u: int, v: int) -> bool:
        nbrs = self.neighbors(u)
        i = np.searchsorted(nbrs, v)
        return bool(i < nbrs.shape[0] and nbrs[i] == v)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CsrGraph):
            return NotImplemented
        return (
            self.vertex_count == other.vertex_count
            and np.array_equal(self.offsets, other.offsets)
            and np.array_equal(self.targets, other.targets)
        )

    def __repr__(self) -> str:
        return f"CsrGraph(|V|={self.vertex_count}, |E|={self.edge_count})"


@dataclass(frozen=True)
class BatchUpdate:
    """Edge deletions and insertions turning one snapshot into the next."""

    deletions: np.ndarray = field(default_factory=lambda: np.empty((0, 2), dtype=INDEX_DTYPE))
    insertions: np.ndarray = field(default_factory=lambda: np.empty((0, 2), dtype=INDEX_DTYPE))

    def __post_init__(self):
        object.__setattr__(self, "deletions", as_edge_array(self.deletions))
        object.__setattr__(self, "insertions", as_edge_array(self.insertions))

    def __len__(self) -> int:
        return int(self.deletions.shape[0] + self.insertions.shape[0])

    def validate(self, vertex_count: int) -> None:
        for name, pairs in (("deletion", self.deletions), ("insertion", self.insertions)):
            if pairs.size and (pairs.min() < 0 or pairs.max() >= vertex_count):
                raise InputError(f"{name} endpoint out of range for |V|={vertex_count}")
        if self.deletions.size and np.any(self.deletions[:, 0] == self.deletions[:, 1]):
            raise InputError("batch deletes a self-loop")
        if self.deletions.size and self.insertions.size:
            n = max(vertex_count, 1)
            both = np.intersect1d(_keys(self.deletions, n), _keys(self.insertions, n))
            if both.size:
                u, v = divmod(int(both[0]), n)
                raise InputError(f"edge ({u}, {v}) is both deleted and inserted")


@dataclass
class BatchStats:
    """Tally of no-op entries seen while applying a batch."""

    missing_deletions: int = 0
    existing_insertions: int = 0


def as_edge_array(edges: Iterable[Sequence[int]] | np.ndarray) -> np.ndarray:
    a = np.asarray(edges, dtype=INDEX_DTYPE)
    if a.size == 0:
        return np.empty((0, 2), dtype=INDEX_DTYPE)
    if a.ndim != 2 or a.shape[1] != 2:
        raise InputError(f"edge list must have shape (k, 2), got {a.shape}")
    return np.ascontiguousarray(a)


def _keys(pairs: np.ndarray, n: int) -> np.ndarray:
    return pairs[:, 0] * n + pairs[:, 1]


def _from_sorted_keys(keys: np.ndarray, vertex_count: int) -> CsrGraph:
    src, tgt = np.divmod(keys, vertex_count) if vertex_count else (keys, keys)
    counts = np.bincount(src, minlength=vertex_count)
    offsets = np.zeros(vertex_count + 1, dtype=INDEX_DTYPE)
    np.cumsum(counts, out=offsets[1:])
    return CsrGraph(vertex_count, _readonly(offsets), _readonly(tgt.astype(INDEX_DTYPE)))


def build_csr(edges, vertex_count: int) -> CsrGraph:
    """Build a CSR graph from ``(source, target)`` pairs, collapsing duplicates."""
    if vertex_count < 0:
        raise InputError("vertex_count must be non-negative")
    pairs = as_edge_array(edges)
    if pairs.size and (pairs.min() < 0 or pairs.max() >= vertex_count):
        raise InputError(f"edge endpoint out of range for |V|={vertex_count}")
    return _from_sorted_keys(np.unique(_keys(pairs, vertex_count)), vertex_count)


def transpose(g: CsrGraph) -> CsrGraph:
    n = g.vertex_count
    return _from_sorted_keys(np.sort(g.targets * n + g.sources), n)


def add_self_loops(g: CsrGraph) -> CsrGraph:
    n = g.vertex_count
    loops = np.arange(n, dtype=INDEX_DTYPE) * (n + 1)
    keys = np.union1d(g.edge_keys, loops)
    if keys.shape[0] == g.edge_count:
        return g
    return _from_sorted_keys(keys, n)


def apply_batch_with_stats(g: CsrGraph, batch: BatchUpdate) -> tuple[CsrGraph, BatchStats]:
    """Return ``(E minus deletions) union insertions`` plus self-loops, with a no-op tally."""
    n = g.vertex_count
    batch.validate(n)
    stats = BatchStats()
    keys = g.edge_keys
    if batch.deletions.size:
        dels = np.unique(_keys(batch.deletions, n))
        present = np.isin(dels, keys, assume_unique=True)
        stats.missing_deletions = int(dels.shape[0] - present.sum())
        keys = np.setdiff1d(keys, dels[present], assume_unique=True)
    if batch.insertions.size:
        ins = np.unique(_keys(batch.insertions, n))
        stats.existing_insertions = int(np.isin(ins, keys, assume_unique=True).sum())
        keys = np.union1d(keys, ins)
    return add_self_loops(_from_sorted_keys(keys, n)), stats


def apply_batch(g: CsrGraph, batch: BatchUpdate) -> CsrGraph:
    return apply_batch_with_stats(g, batch)[0]
