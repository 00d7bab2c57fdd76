"""Dataset loaders and batch-update generators."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InputError, ParseError, SizingError
from .graph import INDEX_DTYPE, BatchUpdate, CsrGraph

MAX_INSERT_ATTEMPTS_FACTOR = 100


@dataclass(frozen=True)
class TemporalEdgeList:
    """Time-ordered ``(source, target, timestamp)`` records; duplicates allowed."""

    sources: np.ndarray
    targets: np.ndarray
    timestamps: np.ndarray
    vertex_count: int

    def __len__(self) -> int:
        return int(self.sources.shape[0])

    def edge_array(self, start: int = 0, stop: int | None = None) -> np.ndarray:
        return np.column_stack([self.sources[start:stop], self.targets[start:stop]])


def load_matrix_market(path) -> tuple[np.ndarray, int]:
    """Read a MatrixMarket coordinate file as 0-based ``(edges, vertex_count)``.

    Values (if any) are ignored; symmetric and skew-symmetric matrices are
    expanded to both directions. The vertex count is ``max(rows, cols)``.
    """
    path = Path(path)
    src: list[int] = []
    dst: list[int] = []
    symmetric = False
    size = None
    declared = 0
    with path.open("r", encoding="utf-8") as fh:
        header = fh.readline()
        tokens = header.strip().lower().split()
        if len(tokens) < 4 or tokens[0] != "%%matrixmarket" or tokens[1] != "matrix":
            raise ParseError("missing '%%MatrixMarket matrix' header", path, 1)
        if tokens[2] != "coordinate":
            raise ParseError(f"unsupported format {tokens[2]!r}; only 'coordinate' is read", path, 1)
        if len(tokens) > 4:
            if tokens[4] not in ("general", "symmetric", "skew-symmetric", "hermitian"):
                raise ParseError(f"unknown symmetry {tokens[4]!r}", path, 1)
            symmetric = tokens[4] != "general"
        for lineno, line in enumerate(fh, start=2):
            s = line.strip()
            if not s or s.startswith("%"):
                continue
            fields = s.split()
            try:
                if size is None:
                    rows, cols, declared = int(fields[0]), int(fields[1]), int(fields[2])
                    size = (rows, cols)
                    continue
                i, j = int(fields[0]), int(fields[1])
            except (ValueError, IndexError):
                raise ParseError(f"malformed entry {s!r}", path, lineno) from None
            if not (1 <= i <= size[0] and 1 <= j <= size[1]):
                raise ParseError(f"index ({i}, {j}) outside declared {size[0]}x{size[1]}", path, lineno)
            src.append(i - 1)
            dst.append(j - 1)
    if size is None:
        raise ParseError("missing size line", path)
    if len(src) != declared:
        raise ParseError(f"expected {declared} entries, found {len(src)}", path)
    edges = np.column_stack([np.array(src, dtype=INDEX_DTYPE), np.array(dst, dtype=INDEX_DTYPE)])
    if symmetric:
        off_diag = edges[edges[:, 0] != edges[:, 1]]
        edges = np.concatenate([edges, off_diag[:, ::-1]])
    return edges.reshape(-1, 2), max(size)


def write_matrix_market(path, g: CsrGraph) -> None:
    n = g.vertex_count
    with Path(path).open("w", encoding="utf-8") as fh:
        fh.write("%%MatrixMarket matrix coordinate pattern general\n")
        fh.write(f"{n} {n} {g.edge_count}\n")
        for u, v in zip(g.sources.tolist(), g.targets.tolist()):
            fh.write(f"{u + 1} {v + 1}\n")


def load_temporal_edge_list(path) -> TemporalEdgeList:
    """Read a SNAP-style ``src dst timestamp`` file.

    Original ids are compacted to ``0..n-1`` in ascending id order, and
    records are stably sorted by timestamp.
    """
    path = Path(path)
    rows: list[tuple[int, int, int]] = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            fields = s.split()
            if len(fields) < 3:
                raise ParseError(f"expected 'src dst timestamp', got {s!r}", path, lineno)
            try:
                rows.append((int(fields[0]), int(fields[1]), int(fields[2])))
            except ValueError:
                raise ParseError(f"non-integer field in {s!r}", path, lineno) from None
    raw = np.array(rows, dtype=np.int64).reshape(-1, 3)
    ids, compact = np.unique(raw[:, :2], return_inverse=True)
    compact = compact.reshape(-1, 2)
    order = np.argsort(raw[:, 2], kind="stable")
    return TemporalEdgeList(
        sources=compact[order, 0].astype(INDEX_DTYPE),
        targets=compact[order, 1].astype(INDEX_DTYPE),
        timestamps=raw[order, 2],
        vertex_count=int(ids.shape[0]),
    )


def write_temporal_edge_list(path, t: TemporalEdgeList) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for u, v, ts in zip(t.sources.tolist(), t.targets.tolist(), t.timestamps.tolist()):
            fh.write(f"{u} {v} {ts}\n")


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def batch_size_for(fraction: float, total: int) -> int:
    """Batch size as a fraction of ``total`` edges, rounded half-up, at least 1."""
    return max(1, round_half_up(fraction * total))


def split_temporal(
    t: TemporalEdgeList, base_fraction: float = 0.9, batch_count: int = 100, batch_size: int = 1
) -> tuple[np.ndarray, list[BatchUpdate]]:
    """Split into a base edge list and ``batch_count`` insertion-only batches.

    The base is the first ``floor(base_fraction * |E_T|)`` records; each batch
    takes the next ``batch_size`` records in time order.
    """
    if not 0.0 < base_fraction < 1.0:
        raise InputError(f"base_fraction must lie in (0, 1), got {base_fraction}")
    if batch_count < 1 or batch_size < 1:
        raise InputError("batch_count and batch_size must be positive")
    total = len(t)
    base_len = int(math.floor(base_fraction * total))
    available = total - base_len
    if batch_count * batch_size > available:
        raise SizingError(
            f"{available} records follow the base; only {available // batch_size} "
            f"batches of {batch_size} fit (requested {batch_count})"
        )
    base = np.unique(t.edge_array(0, base_len), axis=0).reshape(-1, 2)
    batches = []
    for k in range(batch_count):
        lo = base_len + k * batch_size
        batches.append(BatchUpdate(insertions=t.edge_array(lo, lo + batch_size)))
    return base, batches


def generate_random_batch(
    g: CsrGraph, total_size: int, insert_fraction: float = 0.8, seed: int = 0
) -> BatchUpdate:
    """Random mix of uniform vertex-pair insertions and uniform edge deletions.

    Insertions never repeat an existing edge, a self-pair or each other;
    deletions are drawn without replacement from the non-self-loop edges.
    Draws come from ``numpy.random.Generator(PCG64(seed))``.
    """
    if total_size < 1:
        raise InputError("total_size must be at least 1")
    if not 0.0 <= insert_fraction <= 1.0:
        raise InputError("insert_fraction must lie in [0, 1]")
    n = g.vertex_count
    n_ins = min(total_size, math.ceil(insert_fraction * total_size - 1e-9))
    n_del = total_size - n_ins
    rng = np.random.Generator(np.random.PCG64(seed))

    candidates = np.flatnonzero(g.sources != g.targets)
    if n_del > candidates.shape[0]:
        raise SizingError(f"requested {n_del} deletions but only {candidates.shape[0]} non-loop edges exist")

    existing = g.edge_keys
    chosen: list[int] = []
    seen: set[int] = set()
    attempts = 0
    while len(chosen) < n_ins:
        if attempts >= MAX_INSERT_ATTEMPTS_FACTOR * n_ins or n < 2:
            raise SizingError(f"found only {len(chosen)} of {n_ins} insertable pairs")
        u, v = rng.integers(0, n, size=2)
        attempts += 1
        key = int(u) * n + int(v)
        if u == v or key in seen:
            continue
        i = np.searchsorted(existing, key)
        if i < existing.shape[0] and existing[i] == key:
            continue
        seen.add(key)
        chosen.append(key)
    ins_keys = np.array(chosen, dtype=INDEX_DTYPE)
    insertions = np.column_stack(np.divmod(ins_keys, n)) if n_ins else np.empty((0, 2), INDEX_DTYPE)

    picked = np.sort(rng.choice(candidates, size=n_del, replace=False)) if n_del else candidates[:0]
    deletions = np.column_stack([g.sources[picked], g.targets[picked]])
    return BatchUpdate(deletions=deletions, insertions=insertions)


def random_digraph(
    vertex_count: int, edge_count: int, seed: int = 0, kind: str = "uniform"
) -> np.ndarray:
    """Random directed edge list (before dedup/self-loops) for tests and demos.

    ``uniform`` draws both endpoints uniformly. ``powerlaw`` draws targets
    with probability proportional to ``(rank + 1) ** -0.8`` after a random
    relabelling, giving a skewed in-degree distribution.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    src = rng.integers(0, vertex_count, size=edge_count)
    if kind == "uniform":
        dst = rng.integers(0, vertex_count, size=edge_count)
    elif kind == "powerlaw":
        weights = (np.arange(vertex_count) + 1.0) ** -0.8
        weights /= weights.sum()
        labels = rng.permutation(vertex_count)
        dst = labels[rng.choice(vertex_count, size=edge_count, p=weights)]
    else:
        raise InputError(f"unknown graph kind {kind!r}")
    return np.column_stack([src, dst]).astype(INDEX_DTYPE)
