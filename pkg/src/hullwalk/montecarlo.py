"""Reproducible random streams and replicate-level Monte Carlo plumbing.

Every random draw in the package comes from a Philox generator keyed by a
tuple of integers ``(seed, *stream)``.  A replicate therefore depends only on
its own key, never on how many workers ran or in which order they finished.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np


def stream(seed: int, *key: int) -> np.random.Generator:
    """Return the generator for ``(seed, *key)``.

    Philox is counter based, so the draw index is the counter and the key is
    derived from the seed and the stream id.
    """
    if seed is None:
        raise ValueError("a seed is required")
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def stream_from(key, *tag: int) -> np.random.Generator:
    """Like :func:`stream` but ``key`` may be a seed or a tuple ``(seed, *ids)``."""
    base = tuple(key) if isinstance(key, (tuple, list)) else (key,)
    return stream(*base, *tag)


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    replications: int
    seed: int | None = None

    @classmethod
    def from_samples(cls, samples, seed=None) -> "McEstimate":
        x = np.asarray(samples, dtype=float).ravel()
        if x.size == 0:
            raise ValueError("no samples")
        se = float(np.std(x, ddof=1) / math.sqrt(x.size)) if x.size > 1 else math.inf
        return cls(float(np.mean(x)), se, int(x.size), seed)

    def within(self, target: float, k: float = 3.0) -> bool:
        return abs(self.mean - target) <= k * self.std_error


@dataclass(frozen=True)
class VectorEstimate:
    """Mean of a vector-valued replicate quantity with per-coordinate errors."""

    mean: np.ndarray
    std_error: np.ndarray
    replications: int
    seed: int | None = None

    @classmethod
    def from_samples(cls, samples, seed=None) -> "VectorEstimate":
        x = np.atleast_2d(np.asarray(samples, dtype=float))
        n = x.shape[0]
        se = np.std(x, axis=0, ddof=1) / math.sqrt(n) if n > 1 else np.full(x.shape[1], math.inf)
        return cls(x.mean(axis=0), se, n, seed)


def combined_std_error(a: McEstimate, b: McEstimate) -> float:
    return math.hypot(a.std_error, b.std_error)


def _run_chunk(fn, indices):
    return [fn(i) for i in indices]


def map_replicates(fn: Callable[[int], np.ndarray], count: int, workers: int = 1) -> np.ndarray:
    """Evaluate ``fn(i)`` for ``i in range(count)`` and stack in index order.

    With ``workers > 1`` the indices are fanned out to a process pool in
    contiguous chunks; the result is reassembled by index, so the output is
    bit-identical to the serial run.
    """
    if count <= 0:
        raise ValueError("count must be positive")
    if workers <= 1 or count < 2 * workers:
        out = [fn(i) for i in range(count)]
    else:
        bounds = np.linspace(0, count, 4 * workers + 1).astype(int)
        chunks = [range(lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, [fn] * len(chunks), chunks))
        out = [r for part in parts for r in part]
    return np.asarray(out, dtype=float)


def jackknife_variance(x: Sequence[float]) -> tuple[float, float]:
    """Sample variance of ``x`` and its delete-one jackknife standard error."""
    x = np.asarray(x, dtype=float).ravel()
    n = x.size
    if n < 3:
        raise ValueError("jackknife needs at least 3 samples")
    var = float(np.var(x, ddof=1))
    # closed-form leave-one-out variances; shift by the mean for conditioning
    y = x - x.mean()
    s1, s2 = y.sum(), np.dot(y, y)
    loo = (s2 - y * y - (s1 - y) ** 2 / (n - 1)) / (n - 2)
    se = math.sqrt((n - 1) / n * float(np.sum((loo - loo.mean()) ** 2)))
    return var, se
