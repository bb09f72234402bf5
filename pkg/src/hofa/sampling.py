"""Counter-based random draws.

Sample ``i`` of stream ``s`` under seed ``seed`` is produced by a Philox
generator keyed on ``(seed, s)`` whose counter is positioned at the block
containing ``i``.  A draw therefore depends only on ``(seed, s, i)``, so any
partition of ``range(N)`` across workers reproduces the same per-sample values,
and reductions done on the reassembled array are bit-identical.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable

import numpy as np

BLOCK = 4096
_MASK64 = (1 << 64) - 1


def _block_generator(seed: int, stream: int, block: int) -> np.random.Generator:
    key = np.array([seed & _MASK64, stream & _MASK64], dtype=np.uint64)
    counter = np.array([0, 0, block & _MASK64, 0], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key, counter=counter))


def uniform_block(seed: int, stream: int, block: int, width: int) -> np.ndarray:
    """Uniform floats in [0, 1), shape (BLOCK, width), for one block."""
    return _block_generator(seed, stream, block).random((BLOCK, width))


def uniform_rows(seed: int, stream: int, start: int, stop: int, width: int) -> np.ndarray:
    """Rows ``start..stop-1`` of the stream's (conceptually infinite) uniform matrix."""
    if stop <= start:
        return np.empty((0, width))
    b0, b1 = start // BLOCK, (stop - 1) // BLOCK
    parts = [uniform_block(seed, stream, b, width) for b in range(b0, b1 + 1)]
    rows = np.concatenate(parts, axis=0)
    off = start - b0 * BLOCK
    return rows[off: off + (stop - start)]


def integer_rows(seed: int, stream: int, start: int, stop: int, moduli) -> np.ndarray:
    """Integer rows with column ``j`` uniform on ``[0, moduli[j])``."""
    moduli = np.asarray(moduli, dtype=np.int64)
    u = uniform_rows(seed, stream, start, stop, len(moduli))
    out = np.floor(u * moduli).astype(np.int64)
    return np.minimum(out, moduli - 1)


def partition(n: int, workers: int) -> list[tuple[int, int]]:
    """Split ``range(n)`` into at most ``workers`` contiguous chunks."""
    workers = max(1, min(int(workers), max(n, 1)))
    edges = np.linspace(0, n, workers + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def map_samples(fn: Callable[[int, int], np.ndarray], n: int, workers: int = 1) -> np.ndarray:
    """Evaluate ``fn(start, stop)`` over a partition of ``range(n)`` and reassemble.

    ``fn`` must return the per-sample values for its index range; the result is
    the concatenation in index order, independent of ``workers``.
    """
    chunks = partition(n, workers)
    if not chunks:
        return np.empty(0)
    if len(chunks) == 1:
        return fn(*chunks[0])
    with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
        parts = list(pool.map(lambda c: fn(*c), chunks))
    return np.concatenate(parts)


def mean_and_stderr(values: np.ndarray) -> tuple[complex | float, float]:
    """Sample mean and its standard error (complex values: scalar stderr of |error|)."""
    n = values.shape[0]
    mean = values.mean()
    if n < 2:
        return mean, 0.0
    var = np.mean(np.abs(values - mean) ** 2) * n / (n - 1)
    return mean, float(np.sqrt(var / n))
