"""Finite metric spaces, Hausdorff and Gromov-Hausdorff distances.

Two kinds of object are handled: point clouds with coordinates
(:class:`FinitePointSet`, all living in a common R^d inside l^2) and abstract
distance matrices (:class:`FiniteMetricSpace`).  The Gromov-Hausdorff distance
is computed as half the minimal distortion over correspondences, which is only
tractable for a handful of points; for larger sets the module offers upper
bounds (distortion of a given correspondence, Procrustes-aligned Hausdorff
distance).

Note on constants: for a correspondence ``R`` one always has
``d_GH <= dis(R) / 2``.  Some proofs quote the weaker ``d_GH <= 2 dis(f)`` for
a bijection ``f``; :func:`correspondence_distortion` returns ``dis(R)`` and
callers pick the constant they need.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial.distance import cdist, pdist, squareform
from scipy.special import polygamma

from .levy_core import CrinkledRange

ZERO_TOL = 1e-9


@dataclass(frozen=True)
class FinitePointSet:
    """Nonempty finite subset of R^dim, one point per row."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] == 0 or pts.shape[1] == 0:
            raise ValueError("a point set needs at least one point of dimension >= 1")
        object.__setattr__(self, "points", pts)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]

    def padded(self, dim: int) -> np.ndarray:
        """Coordinates embedded in R^dim by appending zero coordinates."""
        if dim < self.dim:
            raise ValueError(f"cannot embed dimension {self.dim} into {dim}")
        if dim == self.dim:
            return self.points
        out = np.zeros((len(self), dim))
        out[:, : self.dim] = self.points
        return out


@dataclass(frozen=True)
class FiniteMetricSpace:
    dist: np.ndarray

    def __post_init__(self):
        dist = np.asarray(self.dist, dtype=float)
        object.__setattr__(self, "dist", dist)
        if dist.ndim != 2 or dist.shape[0] != dist.shape[1] or dist.shape[0] == 0:
            raise ValueError("distance matrix must be square and nonempty")

    @classmethod
    def checked(cls, dist, tol: float = ZERO_TOL) -> "FiniteMetricSpace":
        """Build and verify the metric axioms (O(n^3) triangle check)."""
        space = cls(dist)
        d = space.dist
        scale = max(1.0, float(d.max(initial=0.0)))
        if np.any(d < 0) or np.any(np.abs(np.diag(d)) > tol * scale):
            raise ValueError("distances must be nonnegative with zero diagonal")
        if np.any(np.abs(d - d.T) > tol * scale):
            raise ValueError("distance matrix is not symmetric")
        for k in range(d.shape[0]):
            if np.any(d > d[:, k][:, None] + d[k, :][None, :] + tol * scale):
                raise ValueError(f"triangle inequality fails through point {k}")
        return space

    @property
    def size(self) -> int:
        return self.dist.shape[0]


@dataclass(frozen=True)
class Correspondence:
    """Relation between index sets ``{0..size_x-1}`` and ``{0..size_y-1}``
    in which every index on both sides appears at least once."""

    pairs: np.ndarray
    size_x: int
    size_y: int

    def __post_init__(self):
        pairs = np.asarray(self.pairs, dtype=np.int64).reshape(-1, 2)
        object.__setattr__(self, "pairs", pairs)
        if pairs.size == 0:
            raise ValueError("a correspondence needs at least one pair")
        i, j = pairs[:, 0], pairs[:, 1]
        if i.min() < 0 or j.min() < 0 or i.max() >= self.size_x or j.max() >= self.size_y:
            raise ValueError("pair index out of range")
        if np.unique(i).size != self.size_x or np.unique(j).size != self.size_y:
            raise ValueError("correspondence does not cover both index sets")

    @classmethod
    def identity(cls, n: int) -> "Correspondence":
        idx = np.arange(n)
        return cls(np.column_stack([idx, idx]), n, n)


def distance_matrix(ps: FinitePointSet) -> FiniteMetricSpace:
    if len(ps) == 1:
        return FiniteMetricSpace(np.zeros((1, 1)))
    return FiniteMetricSpace(squareform(pdist(ps.points)))


def _directed(a: np.ndarray, b: np.ndarray, block: int = 1 << 22) -> float:
    rows = max(1, block // max(b.shape[0], 1))
    worst = 0.0
    for start in range(0, a.shape[0], rows):
        worst = max(worst, float(cdist(a[start : start + rows], b).min(axis=1).max()))
    return worst


def hausdorff(A: FinitePointSet, B: FinitePointSet) -> float:
    """Hausdorff distance between two point sets of the same ambient dimension."""
    if A.dim != B.dim:
        raise ValueError(f"dimension mismatch: {A.dim} vs {B.dim}")
    return max(_directed(A.points, B.points), _directed(B.points, A.points))


def diameter(M: FiniteMetricSpace) -> float:
    return float(M.dist.max())


def correspondence_distortion(
    X: FiniteMetricSpace, Y: FiniteMetricSpace, R: Correspondence
) -> float:
    """``max |d_X(i, i') - d_Y(j, j')|`` over pairs ``(i, j), (i', j')`` in ``R``."""
    if R.size_x != X.size or R.size_y != Y.size:
        raise ValueError(
            f"correspondence is {R.size_x}x{R.size_y}, spaces are {X.size}x{Y.size}"
        )
    i, j = R.pairs[:, 0], R.pairs[:, 1]
    return float(np.abs(X.dist[np.ix_(i, i)] - Y.dist[np.ix_(j, j)]).max())


def _covering_relation_exists(ok: np.ndarray, nx: int, ny: int) -> bool:
    """Is there a set of pairwise-compatible pairs covering all rows and columns?

    ``ok[p, q]`` says pairs ``p = i*ny + j`` and ``q`` may coexist.  Each
    uncovered index is branched on in turn; the running AND of compatibility
    rows (as integer bitmasks) keeps only pairs that fit everything chosen.
    """
    rows = [int("".join("1" if v else "0" for v in r[::-1]), 2) for r in ok]
    full_x, full_y = (1 << nx) - 1, (1 << ny) - 1

    def search(allowed: int, cov_x: int, cov_y: int) -> bool:
        if cov_x != full_x:
            i = (~cov_x & (cov_x + 1)).bit_length() - 1
            cand = [i * ny + j for j in range(ny)]
        elif cov_y != full_y:
            j = (~cov_y & (cov_y + 1)).bit_length() - 1
            cand = [i * ny + j for i in range(nx)]
        else:
            return True
        cand = [p for p in cand if allowed >> p & 1]
        # prefer pairs that also cover a new column/row
        cand.sort(key=lambda p: (cov_y >> (p % ny) & 1, cov_x >> (p // ny) & 1))
        for p in cand:
            if search(allowed & rows[p], cov_x | 1 << (p // ny), cov_y | 1 << (p % ny)):
                return True
        return False

    return search((1 << (nx * ny)) - 1, 0, 0)


def gh_exact_small(X: FiniteMetricSpace, Y: FiniteMetricSpace, max_size: int = 6) -> float:
    """Exact Gromov-Hausdorff distance, ``min over correspondences of dis / 2``.

    The optimum is one of the values ``|d_X(i,i') - d_Y(j,j')|``; those are
    bisected with an exhaustive feasibility search, so the cost is exponential
    in the number of points and the sizes are capped.
    """
    if X.size > max_size or Y.size > max_size:
        raise ValueError(
            f"exact GH refused for sizes {X.size}, {Y.size} > {max_size} "
            "(correspondence search is exponential)"
        )
    nx, ny = X.size, Y.size
    # gap[(i,j),(i',j')] = |dX(i,i') - dY(j,j')|
    gap = np.abs(
        X.dist[:, None, :, None] - Y.dist[None, :, None, :]
    ).reshape(nx * ny, nx * ny)
    values = np.unique(gap)
    lo, hi = 0, values.size - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _covering_relation_exists(gap <= values[mid], nx, ny):
            hi = mid
        else:
            lo = mid + 1
    return float(values[lo]) / 2.0


def match_increments(walk: FinitePointSet, range_: CrinkledRange) -> Correspondence:
    """Order-preserving bijection between walk prefix points and range points.

    ``walk`` must hold the origin followed by the partial sums after each
    retained step, in time order, one per atom of ``range_``.
    """
    if len(walk) != len(range_):
        raise ValueError(
            f"walk has {len(walk) - 1} retained steps but the range has "
            f"{len(range_) - 1} atoms; re-truncate so the counts agree"
        )
    return Correspondence.identity(len(walk))


def procrustes_align(A: FinitePointSet, B: FinitePointSet, R: Optional[Correspondence] = None):
    """Rigidly move ``A`` onto ``B`` (rotation/reflection plus translation).

    The orthogonal map minimizes the squared error over the matched pairs
    after centring both sides at their matched-pair centroids.  Returns the
    moved copy of ``A`` and ``B``, both embedded in the larger dimension.
    """
    if R is None:
        if len(A) != len(B):
            raise ValueError("point sets differ in size; supply a correspondence")
        R = Correspondence.identity(len(A))
    dim = max(A.dim, B.dim)
    a_all, b_all = A.padded(dim), B.padded(dim)
    a = a_all[R.pairs[:, 0]]
    b = b_all[R.pairs[:, 1]]
    ca, cb = a.mean(axis=0), b.mean(axis=0)
    u, _, vt = np.linalg.svd((a - ca).T @ (b - cb), full_matrices=False)
    moved = (a_all - ca) @ (u @ vt) + cb
    return FinitePointSet(moved), FinitePointSet(b_all)


def d_iso_upper(A: FinitePointSet, B: FinitePointSet, R: Optional[Correspondence] = None) -> float:
    """Upper bound on the Hausdorff distance up to isometry.

    Any rigid copy of ``A`` gives ``d_iso <= d_H(copy, B)``; the copy used is
    the Procrustes fit on ``R`` (index matching when ``R`` is omitted).  This
    is a bound, not the infimum.
    """
    moved, target = procrustes_align(A, B, R)
    return hausdorff(moved, target)


def wiener_point(t: float, K: int) -> np.ndarray:
    """First ``K`` coordinates of the Wiener spiral at time ``t``."""
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must lie in [0, 1], got {t}")
    if K < 1:
        raise ValueError("K must be positive")
    k = np.arange(1, K + 1, dtype=float)
    return (2.0 * math.sqrt(2.0) / math.pi) * np.sin(math.pi * (k - 0.5) * t) / (2 * k - 1)


def wiener_tail_bound(K: int) -> float:
    """Bound on ``|w_t - truncation_K(w_t)|^2``: ``(8/pi^2) sum_{k>K} (2k-1)^-2``.

    Uses ``sum_{k>K} (2k-1)^-2 = psi'(K + 1/2) / 4``.
    """
    return float(8.0 / math.pi**2 * polygamma(1, K + 0.5) / 4.0)


def wiener_distance_bound(K: int) -> float:
    """Bound on ``| |w_t - w_s| - |trunc w_t - trunc w_s| |`` for any ``s, t``."""
    return 2.0 * math.sqrt(wiener_tail_bound(K))
