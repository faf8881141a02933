"""Empirical distribution tools used to grade the simulations."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq
from scipy.special import erfc


@dataclass(frozen=True)
class Sample:
    """Values plus a label and the digest of the config that produced them."""

    values: np.ndarray
    label: str = ""
    digest: str = ""

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float).reshape(-1))

    def __len__(self) -> int:
        return self.values.size


def _values(sample) -> np.ndarray:
    vals = sample.values if isinstance(sample, Sample) else np.asarray(sample, dtype=float)
    vals = vals.reshape(-1)
    if vals.size == 0:
        raise ValueError("statistic needs a nonempty sample")
    return vals


def ecdf(sample, x):
    """Fraction of sample values ``<= x`` (right-continuous)."""
    vals = np.sort(_values(sample))
    out = np.searchsorted(vals, x, side="right") / vals.size
    return float(out) if np.ndim(out) == 0 else out


def ks_one_sample(sample, cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """``sup_x |F_n(x) - F(x)|`` using both one-sided gaps at each sample point."""
    vals = np.sort(_values(sample))
    n = vals.size
    f = np.asarray(cdf(vals), dtype=float)
    upper = np.arange(1, n + 1) / n - f
    lower = f - np.arange(n) / n
    return float(max(upper.max(), lower.max(), 0.0))


def ks_two_sample(a, b) -> float:
    """``sup_x |F_a(x) - F_b(x)|``."""
    va, vb = np.sort(_values(a)), np.sort(_values(b))
    grid = np.concatenate([va, vb])
    fa = np.searchsorted(va, grid, side="right") / va.size
    fb = np.searchsorted(vb, grid, side="right") / vb.size
    return float(np.abs(fa - fb).max())


def stable_half_cdf(x, T: float = 1.0):
    """CDF of ``S(T)`` for the 1/2-stable subordinator with ``nu(x, inf) = x^-1/2``.

    The Laplace exponent is ``Gamma(1/2) sqrt(lambda)``, i.e. a Lévy law with
    scale ``pi T^2 / 2``: ``P(S(T) <= x) = erfc((T/2) sqrt(pi / x))``.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise ValueError("stable_half_cdf is defined for x > 0")
    if T <= 0:
        raise ValueError("T must be positive")
    out = erfc(0.5 * T * np.sqrt(np.pi / arr))
    return float(out) if out.ndim == 0 else out


def stable_half_quantile(p: float, T: float = 1.0) -> float:
    """Numeric inverse of :func:`stable_half_cdf` (bracketed root search)."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    hi = 1.0
    while stable_half_cdf(hi, T) < p:
        hi *= 4.0
    lo = hi / 4.0
    while stable_half_cdf(lo, T) > p:
        lo /= 4.0
    return brentq(lambda x: stable_half_cdf(x, T) - p, lo, hi, xtol=1e-14, rtol=1e-14)


def default_box_scales(delta: float, diam: float, count: int = 12) -> np.ndarray:
    """Geometric scales from ``delta^0.9`` to ``diam / 10``."""
    lo, hi = delta**0.9, diam / 10.0
    if not 0 < lo < hi:
        raise ValueError(f"empty scale window [{lo}, {hi}]")
    return np.geomspace(lo, hi, count)


def box_counts(points_1d, scales: Sequence[float]) -> np.ndarray:
    """Occupied boxes of a grid anchored at the sample minimum, per scale."""
    vals = _values(points_1d)
    shifted = vals - vals.min()
    return np.array([np.unique(np.floor(shifted / eps)).size for eps in scales])


def box_count_dimension(points_1d, scales: Sequence[float]) -> float:
    """Least-squares slope of ``log N(eps)`` against ``log(1/eps)``.

    The grid is anchored at the smallest point, so the estimate is unchanged
    by affine maps of the data when the scales are mapped along.  For the
    crinkled range under the square-root metric the dimension doubles; see
    :func:`crinkled_dimension`.
    """
    scales = np.asarray(scales, dtype=float)
    if scales.size < 3 or np.any(scales <= 0) or np.unique(scales).size < scales.size:
        raise ValueError("need at least 3 distinct positive scales")
    if scales.max() / scales.min() < 100 * (1 - 1e-9):
        raise ValueError("scales must span at least two decades")
    counts = box_counts(points_1d, scales)
    slope = np.polyfit(np.log(1.0 / scales), np.log(counts), 1)[0]
    # constant counts can fit to a slope of -1e-17 or so
    return max(float(slope), 0.0)


def crinkled_dimension(points_1d, scales: Sequence[float]) -> float:
    return 2.0 * box_count_dimension(points_1d, scales)
