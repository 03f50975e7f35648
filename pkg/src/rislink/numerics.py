"""Seeded sampling, order statistics and Gaussian tail helpers.

Every random draw in the package goes through :class:`RngStream`, which wraps a
counter-based Philox generator keyed by ``(seed, stream_id)``.  Monte-Carlo
trials are split into chunks, each chunk getting its own stream id, so results
do not depend on how chunks are distributed over workers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special


class ParameterError(ValueError):
    """Raised when an argument falls outside the documented domain."""


@dataclass(frozen=True)
class RngStream:
    """Deterministic random stream identified by ``(seed, stream_id)``."""

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise ParameterError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if int(self.stream_id) < 0:
            raise ParameterError("stream_id must be non-negative")

    def generator(self) -> np.random.Generator:
        """Fresh generator positioned at draw index 0 of this stream."""
        ss = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.stream_id),))
        return np.random.Generator(np.random.Philox(ss))

    def substream(self, index: int) -> "RngStream":
        """Independent child stream; children of distinct streams never collide."""
        # Pairing keeps (stream_id, index) -> child id injective.
        a, b = int(self.stream_id), int(index) + 1
        child = (a + b) * (a + b + 1) // 2 + b
        return RngStream(self.seed, child)


@dataclass(frozen=True)
class SummaryStats:
    median_db: float
    range_db: float
    samples: int


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise ParameterError(f"expected RngStream or numpy Generator, got {type(rng).__name__}")


def sample_circular_gaussian(rng, n, variance=1.0) -> np.ndarray:
    """Draw i.i.d. zero-mean circularly-symmetric complex Gaussian samples.

    Parameters
    ----------
    rng : RngStream or numpy.random.Generator
        Source of randomness.  A stream always restarts at draw index 0, a
        generator continues from its current state.
    n : int or tuple of int
        Output shape.
    variance : float
        Expected power ``E|x|^2`` of every sample.

    Returns
    -------
    numpy.ndarray of complex128
    """
    if not variance > 0 or not np.isfinite(variance):
        raise ParameterError(f"variance must be positive and finite, got {variance}")
    gen = _as_generator(rng)
    shape = (n,) if np.isscalar(n) else tuple(n)
    scale = np.sqrt(variance / 2.0)
    return scale * (gen.standard_normal(shape) + 1j * gen.standard_normal(shape))


def percentile(values, p) -> float:
    """Linear-interpolation percentile, ``p`` given as a fraction in [0, 1]."""
    x = np.sort(np.asarray(values, dtype=float).ravel())
    if x.size == 0:
        raise ParameterError("percentile of an empty sample")
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"p must lie in [0, 1], got {p}")
    pos = p * (x.size - 1)
    lo = int(np.floor(pos))
    hi = min(lo + 1, x.size - 1)
    frac = pos - lo
    return float(x[lo] + frac * (x[hi] - x[lo]))


def quantiles(values, ps) -> np.ndarray:
    """Vectorised :func:`percentile` over an array of fractions (one sort)."""
    x = np.sort(np.asarray(values, dtype=float).ravel())
    if x.size == 0:
        raise ParameterError("percentile of an empty sample")
    ps = np.asarray(ps, dtype=float)
    if np.any((ps < 0) | (ps > 1)):
        raise ParameterError("fractions must lie in [0, 1]")
    return np.interp(ps * (x.size - 1), np.arange(x.size), x)


def summarize_db(values_db, lower=0.001, upper=0.999) -> SummaryStats:
    """Median and percentile span (both in dB) of a dB-valued sample."""
    values_db = np.asarray(values_db, dtype=float)
    lo = percentile(values_db, lower)
    hi = percentile(values_db, upper)
    return SummaryStats(
        median_db=percentile(values_db, 0.5),
        range_db=hi - lo,
        samples=int(values_db.size),
    )


def q_function(x):
    """Gaussian tail probability Q(x) = P(Z > x)."""
    return special.ndtr(-np.asarray(x, dtype=float))


def q_inverse(epsilon) -> float:
    """Inverse of the Gaussian tail function."""
    if not 0.0 < epsilon < 1.0:
        raise ParameterError(f"epsilon must lie in (0, 1), got {epsilon}")
    # ndtri(eps) keeps full relative precision for tiny eps, unlike ndtri(1 - eps).
    return float(-special.ndtri(epsilon))


def to_db(x):
    return 10.0 * np.log10(x)


def from_db(x_db):
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)
