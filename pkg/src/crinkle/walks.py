"""Heavy-tailed random walks in R^d and their rescaled point sets.

Three step families are available:

* ``rotational`` -- uniform direction on the sphere times an independent radius;
* ``axis`` -- ``+-R e_J`` with ``J`` uniform on ``{1..d}``;
* ``iid`` -- i.i.d. symmetric coordinates with ``P(xi^2 > t) = t^-alpha``,
  scaled by ``d^(-1/(2 alpha))``.

The squared radius is Pareto: ``P(R^2 > t) = (t / r0^2)^-alpha`` for
``t >= r0^2`` with ``r0 = radial_min``, so ``a(n) = r0^2 n^(1/alpha)``.

Axis walks touch at most one coordinate per step.  Their paths are stored in
the coordinate subspace of the touched axes (``WalkPath.axes`` maps columns to
coordinates); that subspace is isometric to its image in R^d, so distances,
norms and Hausdorff distances are unaffected.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .levy_core import JumpSet, StablePower
from .metric import FinitePointSet

DEFAULT_MEMORY_BUDGET = 1 << 30  # bytes for dense step + partial-sum arrays


class ResourceLimitError(RuntimeError):
    """Raised when a dense walk would exceed the configured memory budget."""


class Family(str, enum.Enum):
    ROTATIONAL = "rotational"
    AXIS = "axis"
    IID = "iid"


def norming(n: int, alpha: float) -> float:
    """``a(n) = n^(1/alpha)``, so that ``n * P(R^2 > a(n)) = 1`` for unit Pareto."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return float(n) ** (1.0 / alpha)


@dataclass(frozen=True)
class RadialLaw:
    """Law of the squared step norm: ``P(R^2 > t) = min(1, (t / scale)^-alpha)``."""

    alpha: float
    scale: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.scale <= 0:
            raise ValueError("scale must be positive")

    def tail(self, t):
        t = np.asarray(t, dtype=float)
        ratio = np.maximum(t, self.scale) / self.scale
        out = ratio ** (-self.alpha)
        return float(out) if out.ndim == 0 else out

    def cdf(self, t):
        out = 1.0 - np.asarray(self.tail(t))
        return float(out) if out.ndim == 0 else out

    def sample(self, size, rng) -> np.ndarray:
        """Squared radii by inverse transform."""
        u = 1.0 - rng.random(size)
        return self.scale * u ** (-1.0 / self.alpha)

    def sample_above(self, threshold: float, size, rng) -> np.ndarray:
        """Squared radii conditioned on ``R^2 >= threshold``."""
        base = max(threshold, self.scale)
        u = 1.0 - rng.random(size)
        return base * u ** (-1.0 / self.alpha)

    def levy_measure(self) -> StablePower:
        return StablePower(self.alpha)


@dataclass(frozen=True)
class WalkConfig:
    d: int
    n: int
    T: float = 1.0
    alpha: float = 0.5
    family: Family = Family.AXIS
    radial_min: float = 1.0
    trunc_s: float = 0.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if self.d < 1 or self.n < 1:
            raise ValueError("d and n must be positive integers")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.T <= 0:
            raise ValueError("T must be positive")
        if self.radial_min <= 0:
            raise ValueError("radial_min must be positive")
        if self.trunc_s < 0:
            raise ValueError("trunc_s must be nonnegative")

    @property
    def steps(self) -> int:
        """``floor(n T)``, robust to representation error in ``T``."""
        return int(math.floor(self.n * self.T + 1e-9))

    @property
    def a_n(self) -> float:
        return self.radial_min**2 * norming(self.n, self.alpha)

    @property
    def radial(self) -> RadialLaw:
        return RadialLaw(self.alpha, self.radial_min**2)


@dataclass(frozen=True)
class WalkPath:
    config: WalkConfig
    steps: np.ndarray
    partial_sums: np.ndarray
    step_norms_sq: np.ndarray
    axes: Optional[np.ndarray] = None
    truncation: float = 0.0

    @classmethod
    def from_steps(cls, config: WalkConfig, steps, axes=None, truncation=0.0) -> "WalkPath":
        steps = np.asarray(steps, dtype=float)
        if steps.ndim != 2:
            raise ValueError("steps must be a 2-d array")
        sums = np.zeros((steps.shape[0] + 1, steps.shape[1]))
        np.cumsum(steps, axis=0, out=sums[1:])
        norms = np.einsum("ij,ij->i", steps, steps)
        return cls(config, steps, sums, norms, axes, truncation)

    def __len__(self) -> int:
        return self.partial_sums.shape[0]

    @property
    def a_n(self) -> float:
        return self.config.a_n

    def dense(self) -> np.ndarray:
        """Partial sums as an ``(m + 1, d)`` array in the original coordinates."""
        if self.axes is None:
            return self.partial_sums
        out = np.zeros((len(self), self.config.d))
        out[:, self.axes] = self.partial_sums
        return out


def sample_step_rotational(d: int, radial: RadialLaw, rng, size=None) -> np.ndarray:
    """Uniform direction on the sphere (normalized Gaussian) times ``R``."""
    shape = 1 if size is None else size
    g = rng.standard_normal((shape, d))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    r = np.sqrt(radial.sample(shape, rng))
    out = g * r[:, None]
    return out[0] if size is None else out


def sample_step_axis(d: int, radial: RadialLaw, rng, size=None):
    """Sparse step ``+-R e_J``: returns ``(axis, signed value)``.

    With ``size`` given both entries are arrays of that length.
    """
    shape = 1 if size is None else size
    axes = rng.integers(0, d, shape)
    signs = np.where(rng.random(shape) < 0.5, -1.0, 1.0)
    values = signs * np.sqrt(radial.sample(shape, rng))
    if size is None:
        return int(axes[0]), float(values[0])
    return axes, values


def axis_to_dense(d: int, axis, value) -> np.ndarray:
    axis = np.atleast_1d(axis)
    value = np.atleast_1d(value)
    out = np.zeros((axis.size, d))
    out[np.arange(axis.size), axis] = value
    return out


def sample_step_iid(d: int, alpha: float, rng, size=None, scale: float = 1.0) -> np.ndarray:
    """``d^(-1/(2 alpha)) (xi_1..xi_d)`` with symmetric Pareto-tailed ``xi``.

    ``|xi| = scale * U^(-1/(2 alpha))`` so ``P(xi^2 > t) = (t/scale^2)^-alpha``.
    """
    shape = (1 if size is None else size, d)
    mag = scale * (1.0 - rng.random(shape)) ** (-0.5 / alpha)
    signs = np.where(rng.random(shape) < 0.5, -1.0, 1.0)
    out = signs * mag * d ** (-0.5 / alpha)
    return out[0] if size is None else out


def _check_budget(rows: int, cols: int, budget: int) -> None:
    need = 2 * rows * cols * 8
    if need > budget:
        raise ResourceLimitError(
            f"dense walk needs ~{need / 2**20:.0f} MiB (steps x d = {rows} x {cols}); "
            f"budget is {budget / 2**20:.0f} MiB"
        )


def simulate_walk(config: WalkConfig, rng, memory_budget: int = DEFAULT_MEMORY_BUDGET) -> WalkPath:
    """``floor(nT)`` i.i.d. steps from the configured family, starting at 0."""
    m, d = config.steps, config.d
    radial = config.radial
    if config.family is Family.AXIS:
        axes, values = sample_step_axis(d, radial, rng, size=m)
        used, col = np.unique(axes, return_inverse=True)
        if used.size == 0:
            used = np.zeros(1, dtype=np.int64)
        _check_budget(m, used.size, memory_budget)
        steps = np.zeros((m, used.size))
        steps[np.arange(m), col] = values
        return WalkPath.from_steps(config, steps, axes=used)
    _check_budget(m, d, memory_budget)
    if config.family is Family.ROTATIONAL:
        steps = sample_step_rotational(d, radial, rng, size=m)
    else:
        steps = sample_step_iid(d, config.alpha, rng, size=m, scale=config.radial_min)
    return WalkPath.from_steps(config, steps.reshape(m, d))


def truncate_steps(path: WalkPath, s: float) -> WalkPath:
    """Zero every step with ``|X_k|^2 < s a(n)``; steps on the boundary are kept."""
    if s < 0:
        raise ValueError("s must be nonnegative")
    keep = path.step_norms_sq >= s * path.a_n
    steps = path.steps * keep[:, None]
    sums = np.zeros_like(path.partial_sums)
    np.cumsum(steps, axis=0, out=sums[1:])
    norms = np.where(keep, path.step_norms_sq, 0.0)
    return replace(path, steps=steps, partial_sums=sums, step_norms_sq=norms, truncation=s)


def scaled_point_set(path: WalkPath) -> FinitePointSet:
    """All partial sums divided by ``sqrt(a(n))``."""
    return FinitePointSet(path.partial_sums / math.sqrt(path.a_n))


def jump_prefix_points(path: WalkPath) -> FinitePointSet:
    """Origin plus the scaled partial sums right after each nonzero step.

    For a truncated walk this is the set of distinct prefix points, ordered in
    time, which is what gets matched against a crinkled range.
    """
    nonzero = path.step_norms_sq > 0
    pts = np.zeros((int(nonzero.sum()) + 1, path.steps.shape[1]))
    np.cumsum(path.steps[nonzero], axis=0, out=pts[1:])
    return FinitePointSet(pts / math.sqrt(path.a_n))


def jumps_from_walk(path: WalkPath, s: float) -> JumpSet:
    """Atoms ``(k/n, |X_k|^2 / a(n))`` of the steps with ``|X_k|^2 >= s a(n)``."""
    cfg = path.config
    keep = np.flatnonzero((path.step_norms_sq >= s * path.a_n) & (path.step_norms_sq > 0))
    times = np.minimum((keep + 1) / cfg.n, cfg.T)
    sizes = path.step_norms_sq[keep] / path.a_n
    threshold = float(np.nextafter(s, 0.0)) if s > 0 else 0.0
    return JumpSet(cfg.T, threshold, times, sizes, None)
