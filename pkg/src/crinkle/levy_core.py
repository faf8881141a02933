"""Lévy measures, Poisson jump series, subordinators and crinkled ranges.

A drift-free subordinator is built from the atoms ``(x_k, y_k)`` of a Poisson
random measure with intensity ``Leb x nu``.  The crinkled version sends the
k-th jump along its own basis vector ``e_k`` with length ``sqrt(y_k)``, so the
squared distance between two points of its range is the jump mass between
them.  Everything here works with jumps above a threshold ``delta``; the mass
below the threshold is only available in expectation (``compensate_small``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

__all__ = [
    "LevyMeasure",
    "StablePower",
    "CustomTail",
    "JumpSet",
    "CrinkledRange",
    "sample_jumps",
    "sample_subordinator_values",
    "subordinator_value",
    "range_points",
    "epsilon_net",
    "range_distance",
    "range_distance_matrix",
    "hull_vertex_mask",
]


class LevyMeasure:
    """Lévy measure on (0, inf) described through its tail ``x -> nu(x, inf)``."""

    def tail(self, x):
        raise NotImplementedError

    def inverse_tail(self, u):
        raise NotImplementedError

    def small_jump_mean(self, s: float) -> float:
        raise NotImplementedError

    def total_mass(self) -> float:
        """``nu(0, inf)``; infinite for infinite-activity measures."""
        return math.inf

    def _check_positive(self, x):
        arr = np.asarray(x, dtype=float)
        if np.any(~(arr > 0)):
            raise ValueError(f"tail is defined for x > 0 only, got {x!r}")
        return arr


@dataclass(frozen=True)
class StablePower(LevyMeasure):
    """Stable Lévy measure with ``nu(x, inf) = x**-alpha``, ``0 < alpha < 1``."""

    alpha: float

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")

    def tail(self, x):
        arr = self._check_positive(x)
        out = arr ** (-self.alpha)
        return float(out) if out.ndim == 0 else out

    def inverse_tail(self, u):
        arr = self._check_positive(u)
        out = arr ** (-1.0 / self.alpha)
        return float(out) if out.ndim == 0 else out

    def small_jump_mean(self, s: float) -> float:
        """``int_0^s x nu(dx) = alpha s^(1-alpha) / (1-alpha)``."""
        if s < 0:
            raise ValueError(f"s must be nonnegative, got {s}")
        a = self.alpha
        return a * s ** (1.0 - a) / (1.0 - a)


@dataclass(frozen=True)
class CustomTail(LevyMeasure):
    """User-supplied Lévy measure.

    ``tail`` must be nonincreasing and right-continuous with ``tail(x) -> 0``,
    ``inverse_tail`` its generalized inverse, and ``small_moment(s)`` must
    return the finite value of ``int_0^s x nu(dx)``.  Pass ``total_mass`` for a
    finite (compound Poisson) measure to allow sampling with ``delta = 0``.
    """

    tail_fn: Callable[[np.ndarray], np.ndarray]
    inverse_tail_fn: Callable[[np.ndarray], np.ndarray]
    small_moment: Callable[[float], float]
    total_mass_value: Optional[float] = None

    def __post_init__(self):
        if not math.isfinite(float(self.small_moment(1.0))):
            raise ValueError("small_moment(1) must be finite")
        if self.total_mass_value is not None and not (
            0 <= self.total_mass_value < math.inf
        ):
            raise ValueError("total_mass_value must be finite and nonnegative")

    def tail(self, x):
        arr = self._check_positive(x)
        out = np.asarray(self.tail_fn(arr), dtype=float)
        return float(out) if out.ndim == 0 else out

    def inverse_tail(self, u):
        arr = self._check_positive(u)
        out = np.asarray(self.inverse_tail_fn(arr), dtype=float)
        return float(out) if out.ndim == 0 else out

    def small_jump_mean(self, s: float) -> float:
        if s < 0:
            raise ValueError(f"s must be nonnegative, got {s}")
        if s == 0:
            return 0.0
        return float(self.small_moment(s))

    def total_mass(self) -> float:
        return math.inf if self.total_mass_value is None else self.total_mass_value


@dataclass(frozen=True)
class JumpSet:
    """Poisson atoms on ``[0, T] x (delta, inf)`` sorted by time.

    ``measure`` is the Lévy measure the atoms were drawn from; it is ``None``
    for jump sets built from walk data, in which case small-jump compensation
    is unavailable.
    """

    horizon: float
    threshold: float
    times: np.ndarray
    sizes: np.ndarray
    measure: Optional[LevyMeasure] = field(default=None, compare=False)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float).reshape(-1)
        sizes = np.asarray(self.sizes, dtype=float).reshape(-1)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "sizes", sizes)
        if self.horizon <= 0:
            raise ValueError("horizon must be positive")
        if self.threshold < 0:
            raise ValueError("threshold must be nonnegative")
        if times.shape != sizes.shape:
            raise ValueError("times and sizes must have equal length")
        if times.size:
            if times[0] < 0 or times[-1] > self.horizon:
                raise ValueError("atom times must lie in [0, horizon]")
            if np.any(np.diff(times) <= 0):
                raise ValueError("atom times must be strictly increasing")
            if np.any(~(sizes > self.threshold)):
                raise ValueError("every jump size must exceed the threshold")

    def __len__(self) -> int:
        return self.times.size

    @property
    def total(self) -> float:
        return float(self.sizes.sum())


@dataclass(frozen=True)
class CrinkledRange:
    """Prefix points ``sum_{j<=l} sqrt(y_j) e_{axis_j}`` of a crinkled path.

    Point 0 is the origin and point ``l`` has exactly ``l`` nonzero
    coordinates.  ``axes[j]`` is the basis index used by the j-th retained
    jump, so ranges built from the same jump set share an ambient space.
    """

    times: np.ndarray
    increments: np.ndarray
    axes: np.ndarray
    cumulative: np.ndarray

    def __len__(self) -> int:
        return self.cumulative.size

    @property
    def ambient_dim(self) -> int:
        return int(self.axes.max()) + 1 if self.axes.size else 0

    def coordinates(self, dim: Optional[int] = None) -> np.ndarray:
        """Dense ``(len, dim)`` coordinate matrix of the prefix points."""
        dim = max(self.ambient_dim, 1) if dim is None else dim
        if self.axes.size and dim <= self.axes.max():
            raise ValueError(f"dim={dim} too small for axis {self.axes.max()}")
        out = np.zeros((len(self), dim))
        if self.axes.size:
            roots = np.sqrt(self.increments)
            rows = np.arange(1, len(self))
            out[rows, self.axes] = roots
            # one nonzero per column, so the running sum copies it exactly
            out = np.cumsum(out, axis=0)
        return out


def _poisson_mean(measure: LevyMeasure, T: float, delta: float) -> float:
    if delta == 0:
        mass = measure.total_mass()
        if not math.isfinite(mass):
            raise ValueError(
                "delta = 0 needs a finite Lévy measure (infinite expected atom count)"
            )
        return T * mass
    return T * measure.tail(delta)


def _draw_sizes(measure: LevyMeasure, delta: float, count: int, rng) -> np.ndarray:
    # Y has tail tail(u)/tail(delta) on [delta, inf): Y = inverse_tail(tail(delta) * U)
    level = measure.total_mass() if delta == 0 else measure.tail(delta)
    u = 1.0 - rng.random(count)  # in (0, 1]
    if isinstance(measure, StablePower):
        sizes = delta * u ** (-1.0 / measure.alpha)
    else:
        sizes = np.asarray(measure.inverse_tail(level * u), dtype=float)
    # u = 1 maps onto delta itself; keep the strict inequality
    return np.maximum(sizes, np.nextafter(delta, math.inf))


def sample_jumps(measure: LevyMeasure, T: float, delta: float, rng) -> JumpSet:
    """Atoms of the Poisson random measure in ``[0, T] x (delta, inf)``.

    The count is Poisson with mean ``T * tail(delta)``, times are uniform on
    ``[0, T]`` and sizes come from inverse transform of the normalized tail.
    """
    if T <= 0:
        raise ValueError("T must be positive")
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    mean = _poisson_mean(measure, T, delta)
    count = int(rng.poisson(mean))
    times = rng.uniform(0.0, T, count)
    sizes = _draw_sizes(measure, delta, count, rng)
    order = np.argsort(times, kind="stable")
    times, sizes = times[order], sizes[order]
    while count > 1:
        dup = np.flatnonzero(np.diff(times) <= 0) + 1
        if dup.size == 0:
            break
        times[dup] = rng.uniform(0.0, T, dup.size)
        order = np.argsort(times, kind="stable")
        times, sizes = times[order], sizes[order]
    return JumpSet(T, delta, times, sizes, measure)


def sample_subordinator_values(
    measure: LevyMeasure,
    T: float,
    delta: float,
    size: int,
    rng,
    compensate_small: bool = True,
    chunk: int = 20_000_000,
) -> np.ndarray:
    """``size`` independent copies of ``S(T)`` from the jump series above ``delta``.

    Only jump sizes are drawn (times are irrelevant for the terminal value).
    Work is split so that at most about ``chunk`` sizes are held at once.
    """
    mean = _poisson_mean(measure, T, delta)
    counts = rng.poisson(mean, size)
    out = np.empty(size)
    start = 0
    while start < size:
        csum = np.cumsum(counts[start:])
        stop = start + max(1, int(np.searchsorted(csum, chunk, side="right")))
        block = counts[start:stop]
        sizes = _draw_sizes(measure, delta, int(block.sum()), rng)
        owner = np.repeat(np.arange(block.size), block)
        out[start:stop] = np.bincount(owner, weights=sizes, minlength=block.size)
        start = stop
    if compensate_small:
        out += T * measure.small_jump_mean(delta)
    return out


def subordinator_value(jumps: JumpSet, t: float, compensate_small: bool = False) -> float:
    """``S(t) = sum of y_k with x_k <= t``, optionally plus ``t * int_0^delta x nu(dx)``."""
    if not 0 <= t <= jumps.horizon:
        raise ValueError(f"t={t} outside [0, {jumps.horizon}]")
    k = int(np.searchsorted(jumps.times, t, side="right"))
    value = float(jumps.sizes[:k].sum())
    if compensate_small:
        if jumps.measure is None:
            raise ValueError("compensation needs the jump set's Lévy measure")
        value += t * jumps.measure.small_jump_mean(jumps.threshold)
    return value


def _range_from(times, sizes, axes) -> CrinkledRange:
    cumulative = np.concatenate([[0.0], np.cumsum(sizes)])
    return CrinkledRange(
        times=np.concatenate([[0.0], times]),
        increments=np.asarray(sizes, dtype=float),
        axes=np.asarray(axes, dtype=np.int64),
        cumulative=cumulative,
    )


def range_points(jumps: JumpSet) -> CrinkledRange:
    """Closed range of the crinkled path: the ``P + 1`` prefix points."""
    return _range_from(jumps.times, jumps.sizes, np.arange(len(jumps)))


def epsilon_net(jumps: JumpSet, s: float) -> CrinkledRange:
    """Range built from the jumps with ``y_k > s`` only.

    Its Hausdorff distance to :func:`range_points` is at most
    ``sqrt(sum of y_k <= s)``.
    """
    if s < jumps.threshold:
        raise ValueError(
            f"s={s} is below the simulation threshold {jumps.threshold}; "
            "the missing jumps were never sampled"
        )
    keep = np.flatnonzero(jumps.sizes > s)
    return _range_from(jumps.times[keep], jumps.sizes[keep], keep)


def range_distance(rng_: CrinkledRange, i: int, j: int) -> float:
    """Distance between prefix points ``i`` and ``j`` via ``sqrt|S_i - S_j|``."""
    n = len(rng_)
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"indices ({i}, {j}) out of range for {n} points")
    return math.sqrt(abs(rng_.cumulative[i] - rng_.cumulative[j]))


def range_distance_matrix(rng_: CrinkledRange) -> np.ndarray:
    c = rng_.cumulative
    return np.sqrt(np.abs(c[:, None] - c[None, :]))


def hull_vertex_mask(rng_: CrinkledRange) -> np.ndarray:
    """Flag prefix points that are exposed vertices of the convex hull.

    For point ``l`` the direction ``c = sum_{k<=l} e_k / sqrt(y_k) -
    e_{l+1} / sqrt(y_{l+1})`` gives ``<c, p_m> = min(m, l) - [m > l]``, which
    is maximized uniquely at ``m = l``.  The projections are computed, not
    assumed, so degenerate inputs (zero jumps) come out unflagged.
    """
    n = len(rng_)
    roots = np.sqrt(rng_.increments)
    mask = np.zeros(n, dtype=bool)
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = np.where(roots > 0, 1.0 / roots, np.nan)
    for l in range(n):
        weights = np.zeros(n - 1)
        weights[:l] = inv[:l]
        if l < n - 1:
            weights[l] = -inv[l]
        proj = np.concatenate([[0.0], np.cumsum(weights * roots)])
        others = np.delete(proj, l)
        mask[l] = others.size == 0 or bool(proj[l] > np.max(others) + 0.5)
    return mask
