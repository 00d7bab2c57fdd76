"""Two-bucket vertex partitioning by degree.

Low-degree vertices (degree <= threshold) come first, then high-degree ones,
each bucket in ascending id order. Pass G to split by out-degree, or its
transpose G' to split by in-degree.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit, prange

from .graph import INDEX_DTYPE, CsrGraph

DEFAULT_LOW_DEGREE_THRESHOLD = 32
_SCAN_BLOCK = 4096


@dataclass(frozen=True)
class DegreePartition:
    order: np.ndarray
    low_count: int
    threshold: int

    @property
    def low(self) -> np.ndarray:
        return self.order[: self.low_count]

    @property
    def high(self) -> np.ndarray:
        return self.order[self.low_count :]


@njit(parallel=True, cache=True)
def _blocked_exclusive_scan(values, out, block):
    n = values.shape[0]
    nblocks = (n + block - 1) // block
    totals = np.zeros(nblocks + 1, dtype=out.dtype)
    for b in prange(nblocks):
        s = 0
        for i in range(b * block, min(n, (b + 1) * block)):
            s += values[i]
        totals[b + 1] = s
    for b in range(nblocks):
        totals[b + 1] += totals[b]
    for b in prange(nblocks):
        s = totals[b]
        for i in range(b * block, min(n, (b + 1) * block)):
            out[i] = s
            s += values[i]
    return totals[nblocks]


def exclusive_scan(values: np.ndarray, parallel: bool = False) -> np.ndarray:
    """Exclusive prefix sum of an integer array.

    Returns an array one longer than ``values``; the last entry is the total.
    The parallel path scans fixed blocks, then offsets them by the scanned
    block totals. Integer addition makes both paths bit-identical.
    """
    values = np.asarray(values, dtype=INDEX_DTYPE)
    out = np.zeros(values.shape[0] + 1, dtype=INDEX_DTYPE)
    if parallel and values.shape[0]:
        out[-1] = _blocked_exclusive_scan(values, out, _SCAN_BLOCK)
    else:
        np.cumsum(values, out=out[1:])
    return out


def partition_by_degree(
    g: CsrGraph, threshold: int = DEFAULT_LOW_DEGREE_THRESHOLD, parallel_scan: bool = False
) -> DegreePartition:
    """Flag, scan and scatter low-degree ids, then the same for high-degree ids."""
    n = g.vertex_count
    deg = g.degrees
    ids = np.arange(n, dtype=INDEX_DTYPE)
    order = np.empty(n, dtype=INDEX_DTYPE)

    is_low = deg <= threshold
    slots = exclusive_scan(is_low, parallel_scan)
    low_count = int(slots[n])
    order[slots[:n][is_low]] = ids[is_low]

    is_high = ~is_low
    slots = exclusive_scan(is_high, parallel_scan)
    order[low_count + slots[:n][is_high]] = ids[is_high]

    order.setflags(write=False)
    return DegreePartition(order, low_count, threshold)
