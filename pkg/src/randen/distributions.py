"""Unbiased draws and the sample workloads built on them.

Bounded draws use the multiply-shift reduction: the high 64 bits of
``r * bound`` for a 64-bit ``r``.  Unlike masking or modulo, this needs no
rejection loop and its bias (at most ``bound / 2**64``) is far below
anything the workloads here could detect.  Unit doubles keep the top 53
bits: ``(r >> 11) * 2**-53`` lies in [0, 1) on an even grid.

Every function takes the engine as an argument and consumes draws in a
documented order, so two engines with equal streams produce equal results.
"""

from __future__ import annotations

import numpy as np

_U64 = 1 << 64
_LOW32 = 0xFFFFFFFF


def uniform_below(engine, bound: int) -> int:
    """A draw in [0, bound) via the multiply-shift reduction."""
    if not 0 < bound <= _U64:
        raise ValueError("bound must be in [1, 2**64]")
    return (engine.next_u64() * bound) >> 64


def unit_double(r: int) -> float:
    """Map a 64-bit draw to [0, 1) using its top 53 bits."""
    if not 0 <= r < _U64:
        raise ValueError("r must be a 64-bit value")
    return (r >> 11) * 2.0**-53


def _mulhi_u64(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """High 64 bits of a 64x64 product, via 32-bit partial products."""
    a = a.astype(np.uint64)
    b = b.astype(np.uint64)
    a_lo = a & np.uint64(_LOW32)
    a_hi = a >> np.uint64(32)
    b_lo = b & np.uint64(_LOW32)
    b_hi = b >> np.uint64(32)
    lo_lo = a_lo * b_lo
    mid1 = a_hi * b_lo + (lo_lo >> np.uint64(32))
    mid2 = a_lo * b_hi + (mid1 & np.uint64(_LOW32))
    return a_hi * b_hi + (mid1 >> np.uint64(32)) + (mid2 >> np.uint64(32))


def _bulk_u64(engine, count: int) -> np.ndarray:
    if hasattr(engine, "fill_u64"):
        return engine.fill_u64(count)
    return np.array([engine.next_u64() for _ in range(count)], dtype=np.uint64)


def _unit_doubles(draws: np.ndarray) -> np.ndarray:
    return (draws >> np.uint64(11)).astype(np.float64) * 2.0**-53


def fisher_yates(engine, items):
    """Shuffle ``items`` in place and return it.

    One draw per step, i from len-1 down to 1, j = uniform_below(i + 1);
    every permutation is reached with equal probability.
    """
    n = len(items)
    if n < 2:
        return items
    if hasattr(engine, "fill_u64") and n > 64:
        # same draws, bulk-reduced: bounds n, n-1, ..., 2
        draws = _bulk_u64(engine, n - 1)
        bounds = np.arange(n, 1, -1, dtype=np.uint64)
        idx = _mulhi_u64(draws, bounds)
        for i, j in zip(range(n - 1, 0, -1), (int(v) for v in idx)):
            items[i], items[j] = items[j], items[i]
        return items
    for i in range(n - 1, 0, -1):
        j = uniform_below(engine, i + 1)
        items[i], items[j] = items[j], items[i]
    return items


def reservoir_sample(engine, stream, k: int):
    """Uniform k-subset of an iterable of unknown length (one pass).

    The first k elements fill the reservoir; element i >= k replaces slot
    j = uniform_below(i + 1) when j < k.  A draw is consumed for every
    element beyond the first k even when k == 0.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    reservoir = []
    count = 0
    for count, item in enumerate(stream, start=1):
        i = count - 1
        if i < k:
            reservoir.append(item)
            continue
        j = uniform_below(engine, i + 1)
        if j < k:
            reservoir[j] = item
    if count < k:
        raise ValueError(f"stream yielded {count} elements but k={k}")
    return reservoir


def monte_carlo_pi(engine, n: int) -> float:
    """Estimate pi from n points in the unit square (two draws per point,
    x before y); standard error is about 1.64 / sqrt(n)."""
    if n <= 0:
        raise ValueError("n must be >= 1")
    draws = _bulk_u64(engine, 2 * n)
    x = _unit_doubles(draws[0::2])
    y = _unit_doubles(draws[1::2])
    inside = int(np.count_nonzero(x * x + y * y <= 1.0))
    return 4.0 * inside / n
