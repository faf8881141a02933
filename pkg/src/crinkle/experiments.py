"""Monte Carlo drivers that grade the walk-to-crinkled-range limit.

Each driver returns an :class:`ExperimentReport` and is a deterministic
function of its arguments: every replicate (or fixed-size block of draws)
reads its own stream from :func:`crinkle.streams.seed_stream`, and results are
reassembled in task order, so the worker count never changes the output.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, replace
from functools import partial
from typing import Optional, Sequence

import numpy as np
from scipy.spatial.distance import pdist

from .levy_core import (
    StablePower,
    range_distance_matrix,
    range_points,
    sample_jumps,
    sample_subordinator_values,
)
from .metric import (
    ZERO_TOL,
    FiniteMetricSpace,
    FinitePointSet,
    correspondence_distortion,
    d_iso_upper,
    distance_matrix,
    hausdorff,
    match_increments,
)
from .stats import (
    box_count_dimension,
    default_box_scales,
    ks_one_sample,
    ks_two_sample,
    stable_half_cdf,
)
from .streams import run_tasks, seed_stream
from .walks import (
    Family,
    RadialLaw,
    WalkConfig,
    WalkPath,
    jump_prefix_points,
    jumps_from_walk,
    sample_step_iid,
    scaled_point_set,
    simulate_walk,
    truncate_steps,
)

DEFAULT_TOLERANCES = {
    "diameter_ks": 0.06,
    "orthogonality_sigmas": 4.0,
    "truncated_moment_rel": 0.05,
    "heyde_rel": 0.10,
    "gh_proxy_factor": 0.2,
    "dimension_abs": 0.15,
}
MIN_ACCEPTANCE = 1e-3

# stream purpose tags
_WALK, _REFERENCE, _PAIRS, _PILOT, _MOMENT, _HEYDE, _COUPLED, _DIMENSION = range(1, 9)

_BLOCK_FLOATS = 1 << 22  # floats per draw block; fixes the block layout


def _tolerances(overrides: Optional[dict]) -> dict:
    tol = dict(DEFAULT_TOLERANCES)
    for key, value in (overrides or {}).items():
        if key not in tol:
            raise KeyError(f"unknown tolerance {key!r}")
        tol[key] = float(value)
    return tol


def _plain(value):
    """JSON-safe copy: numpy scalars unwrapped, non-finite floats to None."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_plain(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value) if math.isfinite(value) else None
    return value


def _cell(value) -> str:
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


@dataclass
class ExperimentReport:
    """Outcome of one experiment.

    ``statistics`` maps a name to ``{"value": ..., "replicates": N, ...}``;
    ``checks`` maps a name to ``{"passed": bool, "value": ..., "tolerance": ...}``;
    ``samples`` holds equal-length columns of per-replicate values.
    """

    name: str
    parameters: dict
    statistics: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    samples: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    def add_statistic(self, key: str, value, replicates: int, **extra) -> None:
        self.statistics[key] = {"value": value, "replicates": int(replicates), **extra}

    def add_check(self, key: str, passed: bool, value, tolerance) -> None:
        self.checks[key] = {"passed": bool(passed), "value": value, "tolerance": tolerance}

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks.values())

    def to_dict(self) -> dict:
        return _plain(
            {
                "name": self.name,
                "parameters": self.parameters,
                "statistics": self.statistics,
                "checks": self.checks,
                "passed": self.passed,
                "warnings": self.warnings,
            }
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def samples_csv(self) -> str:
        columns = list(self.samples)
        lengths = {len(self.samples[c]) for c in columns}
        if len(lengths) > 1:
            raise ValueError(f"sample columns differ in length: {sorted(lengths)}")
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in zip(*(self.samples[c] for c in columns)):
            writer.writerow([_cell(v) for v in row])
        return buf.getvalue()


def _blocks(total: int, size: int) -> list[tuple[int, int, int]]:
    """``(index, start, length)`` for consecutive blocks covering ``total``."""
    return [(b, start, min(size, total - start)) for b, start in enumerate(range(0, total, size))]


def _walk_parameters(config: WalkConfig, replicates: int, **extra) -> dict:
    return {
        "d": config.d,
        "n": config.n,
        "T": config.T,
        "alpha": config.alpha,
        "family": config.family.value,
        "radial_min": config.radial_min,
        "s": config.trunc_s,
        "replicates": replicates,
        "seed": config.seed,
        **extra,
    }


# ---------------------------------------------------------------- diameter


def max_sq_distance(points: np.ndarray) -> float:
    if points.shape[0] < 2:
        return 0.0
    return float(pdist(points, "sqeuclidean").max())


def _half_cdf_with_zero(x, T):
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape)
    pos = x > 0
    out[pos] = stable_half_cdf(x[pos], T)
    return out


def _diameter_task(config: WalkConfig, replicate: int) -> float:
    path = simulate_walk(config, seed_stream(config.seed, replicate, _WALK))
    return max_sq_distance(path.partial_sums) / path.a_n


def experiment_diameter(
    config: WalkConfig,
    replicates: int,
    *,
    delta: float = 1e-8,
    workers: int = 1,
    tolerances: Optional[dict] = None,
) -> ExperimentReport:
    """Squared diameter of the rescaled walk against the law of ``S(T)``.

    The reference ``S(T)`` sample has the same size as the walk sample and
    comes from the compensated jump series above ``delta``.  The closed-form
    comparison is made only for ``alpha = 1/2``.
    """
    if replicates < 100:
        raise ValueError(f"experiment_diameter needs replicates >= 100, got {replicates}")
    tol = _tolerances(tolerances)
    diam = np.array(run_tasks(partial(_diameter_task, config), range(replicates), workers))
    ref = sample_subordinator_values(
        StablePower(config.alpha), config.T, delta, replicates,
        seed_stream(config.seed, 0, _REFERENCE),
    )
    report = ExperimentReport(
        "diameter", _walk_parameters(config, replicates, delta=delta, steps=config.steps)
    )
    report.add_statistic("diam_sq_median", float(np.median(diam)), replicates)
    report.add_statistic("reference_median", float(np.median(ref)), replicates)
    two = ks_two_sample(diam, ref)
    report.add_statistic("ks_two_sample", two, replicates, reference_size=replicates)
    report.add_check("ks_two_sample", two <= tol["diameter_ks"], two, tol["diameter_ks"])
    if config.alpha == 0.5:
        cdf = partial(_half_cdf_with_zero, T=config.T)
        one = ks_one_sample(diam, cdf)
        report.add_statistic("ks_closed_form", one, replicates)
        report.add_statistic("ks_reference_closed_form", ks_one_sample(ref, cdf), replicates)
        report.add_check("ks_closed_form", one <= tol["diameter_ks"], one, tol["diameter_ks"])
    report.samples = {
        "replicate": list(range(replicates)),
        "diam_sq": diam.tolist(),
        "reference": ref.tolist(),
    }
    return report


# ------------------------------------------------------------ orthogonality


def _iid_norms_sq(d: int, alpha: float, count: int, rng, radial_min: float):
    x = sample_step_iid(d, alpha, rng, size=count, scale=radial_min)
    return x, np.einsum("ij,ij->i", x, x)


def _inner_products(config: WalkConfig, s: float, count: int, rng) -> np.ndarray:
    """``<Theta_1, Theta_2>`` for ``count`` pairs with both norms ``>= s a(n)``.

    For the rotational and axis families the direction is independent of the
    radius, so conditioning on the norms does not change the law of the pair
    and directions are drawn directly.
    """
    d = config.d
    if config.family is Family.AXIS:
        j = rng.integers(0, d, (2, count))
        signs = np.where(rng.random((2, count)) < 0.5, -1.0, 1.0)
        return np.where(j[0] == j[1], signs[0] * signs[1], 0.0)
    if config.family is Family.ROTATIONAL:
        g = rng.standard_normal((2, count, d))
        g /= np.linalg.norm(g, axis=2, keepdims=True)
        return np.einsum("ij,ij->i", g[0], g[1])
    # iid: rejection on the norm condition
    need, kept = 2 * count, []
    batch = max(1, _BLOCK_FLOATS // d)
    got = 0
    while got < need:
        x, norms = _iid_norms_sq(d, config.alpha, batch, rng, config.radial_min)
        sel = x[norms >= s * config.a_n]
        sel /= np.linalg.norm(sel, axis=1, keepdims=True)
        kept.append(sel)
        got += sel.shape[0]
    theta = np.concatenate(kept)[:need]
    return np.einsum("ij,ij->i", theta[:count], theta[count:])


def _pairs_task(config: WalkConfig, s: float, task) -> np.ndarray:
    d_index, block, length = task
    rng = seed_stream(config.seed, block, (_PAIRS, d_index))
    return _inner_products(config, s, length, rng)


def _iid_level(config: WalkConfig, s: float, warnings: list) -> tuple[float, float]:
    """Widen ``s`` until a pilot batch accepts at least ``MIN_ACCEPTANCE``."""
    batch = max(1000, _BLOCK_FLOATS // config.d)
    _, norms = _iid_norms_sq(
        config.d, config.alpha, batch, seed_stream(config.seed, config.d, _PILOT),
        config.radial_min,
    )
    rate = float(np.mean(norms >= s * config.a_n))
    start = s
    while rate < MIN_ACCEPTANCE and s > 1e-12:
        s /= 2.0
        rate = float(np.mean(norms >= s * config.a_n))
    if s != start:
        warnings.append(
            f"d={config.d}: acceptance below {MIN_ACCEPTANCE} at s={start}; widened to s={s}"
        )
    return s, rate


def experiment_orthogonality(
    config: WalkConfig,
    replicates: int,
    *,
    eps: float = 0.1,
    d_ladder: Optional[Sequence[int]] = None,
    workers: int = 1,
    tolerances: Optional[dict] = None,
) -> ExperimentReport:
    """``P{|<Theta_1, Theta_2>| > eps}`` given both squared norms ``>= s a(n)``.

    ``replicates`` is the number of conditioned pairs per dimension.  Over the
    ladder the estimates must not increase beyond joint Monte Carlo noise; for
    the axis family the exact value ``1/d`` is checked as well.
    """
    if replicates < 1:
        raise ValueError("replicates must be positive")
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    tol = _tolerances(tolerances)
    ladder = [config.d] if d_ladder is None else [int(d) for d in d_ladder]
    s = config.trunc_s
    report = ExperimentReport(
        "orthogonality", _walk_parameters(config, replicates, eps=eps, d_ladder=ladder)
    )
    cols = {"d": [], "pair": [], "inner": []}
    estimates, errors = [], []
    sigmas = tol["orthogonality_sigmas"]
    for idx, d in enumerate(ladder):
        cfg = replace(config, d=d)
        if cfg.family is Family.IID:
            s_used, rate = _iid_level(cfg, s, report.warnings)
        else:
            s_used, rate = s, float(cfg.radial.tail(s * cfg.a_n))
        per_block = max(1, _BLOCK_FLOATS // (2 * d)) if cfg.family is not Family.AXIS else 1 << 20
        tasks = [(idx, b, n) for b, _, n in _blocks(replicates, per_block)]
        inner = np.concatenate(run_tasks(partial(_pairs_task, cfg, s_used), tasks, workers))
        p = float(np.mean(np.abs(inner) > eps))
        se = math.sqrt(p * (1 - p) / replicates)
        estimates.append(p)
        errors.append(se)
        report.add_statistic(
            f"prob_d{d}", p, replicates, stderr=se, s_used=s_used, acceptance=rate
        )
        if cfg.family is Family.AXIS:
            exact = 1.0 / d if eps < 1 else 0.0
            band = sigmas * math.sqrt(exact * (1 - exact) / replicates)
            report.add_check(f"axis_exact_d{d}", abs(p - exact) <= band, p, [exact, band])
        cols["d"] += [d] * replicates
        cols["pair"] += list(range(replicates))
        cols["inner"] += inner.tolist()
    jumps = [
        estimates[k + 1] - estimates[k] - sigmas * math.hypot(errors[k], errors[k + 1])
        for k in range(len(ladder) - 1)
    ]
    worst = max(jumps, default=-math.inf)
    report.add_check("monotone_decay", worst <= 0, worst, 0.0)
    report.samples = cols
    return report


# -------------------------------------------------------- truncated moment


def truncated_moment_limit(alpha: float, s: float) -> float:
    return alpha * s ** (1 - alpha) / (1 - alpha)


def truncated_moment_exact(alpha: float, n: int, s: float) -> float:
    """Finite-``n`` value of ``(n/a(n)) E[R^2; R^2 <= s a(n)]`` for the Pareto radius."""
    if s * n ** (1 / alpha) < 1:
        return 0.0
    return alpha / (1 - alpha) * (s ** (1 - alpha) - n ** (1 - 1 / alpha))


def _moment_task(radial: RadialLaw, cuts: np.ndarray, total: int, stratified: bool, seed, task):
    block, start, length = task
    rng = seed_stream(seed, block, _MOMENT)
    v = rng.random(length)
    u = (start + np.arange(length) + v) / total if stratified else v
    r2 = radial.scale * (1.0 - u) ** (-1.0 / radial.alpha)
    out = []
    for cut in cuts:
        f = np.where(r2 <= cut, r2, 0.0)
        even = f[: length - length % 2]
        out.append((f.sum(), (f * f).sum(), ((even[0::2] - even[1::2]) ** 2).sum()))
    return np.array(out)


def experiment_truncated_moment(
    config: WalkConfig,
    replicates: int,
    *,
    s_values: Optional[Sequence[float]] = None,
    stratified: bool = True,
    workers: int = 1,
    tolerances: Optional[dict] = None,
) -> ExperimentReport:
    """Estimate ``(n/a(n)) E[|X|^2 1{|X|^2 <= s a(n)}]`` from ``replicates`` draws.

    With ``stratified=True`` the uniforms behind the inverse transform are
    one per stratum ``[i/N, (i+1)/N)``; the standard error then comes from
    the spread within adjacent stratum pairs.  All ``s`` share the draws, so
    the estimates are nondecreasing in ``s``.
    """
    if replicates < 2:
        raise ValueError("need at least 2 draws")
    tol = _tolerances(tolerances)
    s_list = [config.trunc_s] if s_values is None else [float(s) for s in s_values]
    if any(s <= 0 for s in s_list):
        raise ValueError("truncation levels must be positive")
    a = config.a_n
    cuts = np.array(s_list) * a
    block = 1 << 18
    tasks = _blocks(replicates, block)
    parts = run_tasks(
        partial(_moment_task, config.radial, cuts, replicates, stratified, config.seed),
        tasks, workers,
    )
    sums = np.sum(parts, axis=0)
    norm = config.n / a
    report = ExperimentReport(
        "truncated-moment",
        _walk_parameters(config, replicates, s_values=s_list, stratified=stratified),
    )
    cols = {"block": [], "s": [], "estimate": [], "draws": []}
    for k, s in enumerate(s_list):
        total, squares, paired = sums[k]
        mean = total / replicates
        if stratified:
            se = norm * math.sqrt(paired) / replicates
        else:
            se = norm * math.sqrt(max(squares / replicates - mean**2, 0.0) / (replicates - 1))
        est = norm * mean
        limit = truncated_moment_limit(config.alpha, s)
        report.add_statistic(
            f"moment_s{s:g}", est, replicates, stderr=se, limit=limit,
            exact_finite_n=truncated_moment_exact(config.alpha, config.n, s),
        )
        rel = abs(est - limit) / limit
        report.add_check(f"moment_s{s:g}", rel <= tol["truncated_moment_rel"], rel,
                         tol["truncated_moment_rel"])
        for (b, _, length), part in zip(tasks, parts):
            cols["block"].append(b)
            cols["s"].append(s)
            cols["estimate"].append(norm * part[k][0] / length)
            cols["draws"].append(length)
    report.samples = cols
    return report


# -------------------------------------------------------------- Heyde tail


def _heyde_task(alpha, d, n, x_grid, method, seed, task):
    block, _, length = task
    rng = seed_stream(seed, block, _HEYDE)
    cuts = np.asarray(x_grid) * float(n) ** (1 / alpha)
    out = np.zeros((len(cuts), 2))
    if method == "crude":
        x = sample_step_iid(d, alpha, rng, size=length)
        norms = np.einsum("ij,ij->i", x, x)
        for k, cut in enumerate(cuts):
            hit = (norms > cut).sum()
            out[k] = hit, hit
        return out
    # Conditional Monte Carlo: integrate out the coordinate that is the
    # maximum, Z = d * P(xi^2 > max(M, t - S)) with M, S over the other d - 1.
    if d > 1:
        xi2 = (1.0 - rng.random((length, d - 1))) ** (-1.0 / alpha)
        rest, top = xi2.sum(axis=1), xi2.max(axis=1)
    else:
        rest = top = np.zeros(length)
    scale = float(d) ** (1 / alpha)
    for k, cut in enumerate(cuts):
        level = np.maximum(top, cut * scale - rest)
        z = d * np.minimum(1.0, level ** (-alpha))
        out[k] = z.sum(), (z * z).sum()
    return out


def experiment_heyde_tail(
    alpha: float,
    d: int,
    n: int,
    x_grid: Sequence[float],
    replicates: int,
    *,
    seed: int = 0,
    method: str = "conditional",
    workers: int = 1,
    tolerances: Optional[dict] = None,
) -> ExperimentReport:
    """``n P{|X|^2 > x n^(1/alpha)}`` for the i.i.d.-coordinate family.

    ``method="crude"`` counts exceedances of simulated steps (binomial error);
    ``"conditional"`` averages the exact exceedance probability given all
    but the largest coordinate, which removes most of the variance.
    """
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if method not in ("conditional", "crude"):
        raise ValueError(f"unknown method {method!r}")
    if replicates < 2 or d < 1 or n < 1:
        raise ValueError("replicates >= 2, d >= 1 and n >= 1 required")
    tol = _tolerances(tolerances)
    x_grid = [float(x) for x in x_grid]
    if any(x <= 0 for x in x_grid):
        raise ValueError("x values must be positive")
    tasks = _blocks(replicates, max(1, _BLOCK_FLOATS // d))
    parts = run_tasks(partial(_heyde_task, alpha, d, n, x_grid, method, seed), tasks, workers)
    sums = np.sum(parts, axis=0)
    report = ExperimentReport(
        "heyde-tail",
        {"alpha": alpha, "d": d, "n": n, "x_grid": x_grid, "replicates": replicates,
         "seed": seed, "method": method, "family": Family.IID.value},
    )
    cols = {"block": [], "x": [], "estimate": [], "draws": []}
    for k, x in enumerate(x_grid):
        mean = sums[k, 0] / replicates
        var = max(sums[k, 1] / replicates - mean**2, 0.0)
        est, se = n * mean, n * math.sqrt(var / (replicates - 1))
        target = x ** (-alpha)
        report.add_statistic(f"tail_x{x:g}", est, replicates, stderr=se, target=target)
        rel = abs(est - target) / target
        report.add_check(f"tail_x{x:g}", rel <= tol["heyde_rel"], rel, tol["heyde_rel"])
        for (b, _, length), part in zip(tasks, parts):
            cols["block"].append(b)
            cols["x"].append(x)
            cols["estimate"].append(n * part[k, 0] / length)
            cols["draws"].append(length)
    report.samples = cols
    return report


# --------------------------------------------------------- GH convergence


def coupled_pair_statistics(path: WalkPath, s: float) -> dict:
    """Compare a walk with the crinkled range built from its own large steps.

    Returns the atom count, the distortion of the time-order matching (and
    twice it, the bijection form of the GH bound), the Procrustes bound on the
    distance up to isometry, and the Hausdorff distance between the rescaled
    truncated and full walks.
    """
    trunc = truncate_steps(path, s)
    walk_pts = jump_prefix_points(trunc)
    jumps = jumps_from_walk(path, s)
    crange = range_points(jumps)
    R = match_increments(walk_pts, crange)
    distortion = correspondence_distortion(
        distance_matrix(walk_pts), FiniteMetricSpace(range_distance_matrix(crange)), R
    )
    iso = d_iso_upper(walk_pts, FinitePointSet(crange.coordinates()), R)
    gap = hausdorff(scaled_point_set(trunc), scaled_point_set(path))
    return {
        "atoms": len(jumps),
        "distortion": distortion,
        "bijection_bound": 2.0 * distortion,
        "d_iso": iso,
        "hausdorff": gap,
    }


_COUPLED_KEYS = ("atoms", "distortion", "bijection_bound", "d_iso", "hausdorff")


def _coupled_task(config: WalkConfig, s: float, task) -> dict:
    d_index, replicate = task
    path = simulate_walk(config, seed_stream(config.seed, replicate, (_COUPLED, d_index)))
    return coupled_pair_statistics(path, s)


def small_jump_proxy(alpha: float, s: float, T: float = 1.0) -> float:
    """``T alpha s^(1-alpha) / (1-alpha)``: limiting mass of the dropped steps."""
    return T * truncated_moment_limit(alpha, s)


def _strictly_decreasing(values: Sequence[float], tie: float = ZERO_TOL) -> bool:
    """Each value below its predecessor by more than ``tie``."""
    return all(b < a - tie for a, b in zip(values, values[1:]))


def experiment_gh_convergence(
    config: WalkConfig,
    replicates: int,
    *,
    d_ladder: Optional[Sequence[int]] = None,
    workers: int = 1,
    tolerances: Optional[dict] = None,
) -> ExperimentReport:
    """Coupled walk/range comparisons over a ladder of dimensions.

    Truncation level is ``config.trunc_s``.  Medians that differ by at most
    ``ZERO_TOL`` count as ties, so rounding noise cannot fake a decrease.
    """
    s = config.trunc_s
    if s <= 0:
        raise ValueError("gh-convergence needs a positive truncation level s")
    if replicates < 1:
        raise ValueError("replicates must be positive")
    tol = _tolerances(tolerances)
    ladder = [config.d] if d_ladder is None else [int(d) for d in d_ladder]
    proxy = small_jump_proxy(config.alpha, s, config.T)
    report = ExperimentReport(
        "gh-convergence",
        _walk_parameters(config, replicates, d_ladder=ladder, proxy=proxy),
    )
    cols = {k: [] for k in ("d", "replicate", *_COUPLED_KEYS)}
    medians = []
    last_gap = math.nan
    for idx, d in enumerate(ladder):
        rows = run_tasks(
            partial(_coupled_task, replace(config, d=d), s),
            [(idx, r) for r in range(replicates)], workers,
        )
        for r, row in enumerate(rows):
            cols["d"].append(d)
            cols["replicate"].append(r)
            for key in _COUPLED_KEYS:
                cols[key].append(row[key])
        for key in _COUPLED_KEYS:
            vals = np.array([row[key] for row in rows], dtype=float)
            report.add_statistic(
                f"{key}_d{d}", float(np.median(vals)), replicates,
                mean=float(vals.mean()), p90=float(np.quantile(vals, 0.9)),
            )
        medians.append(report.statistics[f"distortion_d{d}"]["value"])
        last_gap = report.statistics[f"hausdorff_d{d}"]["value"]
    report.add_check("distortion_median_decreasing", _strictly_decreasing(medians),
                     medians, ZERO_TOL)
    bound = tol["gh_proxy_factor"] * math.sqrt(proxy)
    report.add_check("hausdorff_below_proxy", last_gap < bound, last_gap, bound)
    report.samples = cols
    return report


# --------------------------------------------------------------- dimension


def _dimension_task(alpha: float, T: float, delta: float, seed: int, replicate: int) -> float:
    rng = seed_stream(seed, replicate, _DIMENSION)
    jumps = sample_jumps(StablePower(alpha), T, delta, rng)
    points = np.concatenate([[0.0], np.cumsum(jumps.sizes)])
    try:
        scales = default_box_scales(delta, points[-1])
    except ValueError:
        return math.nan
    return box_count_dimension(points, scales)


def experiment_dimension(
    alpha: float,
    replicates: int,
    *,
    T: float = 1.0,
    delta: float = 1e-8,
    seed: int = 0,
    workers: int = 1,
    tolerances: Optional[dict] = None,
) -> ExperimentReport:
    """Box-counting slope of simulated subordinator ranges, one per replicate.

    Every replicate's slope must lie within the tolerance of ``alpha``; the
    crinkled-range estimate is twice the slope.
    """
    if replicates < 1:
        raise ValueError("replicates must be positive")
    tol = _tolerances(tolerances)["dimension_abs"]
    slopes = np.array(
        run_tasks(partial(_dimension_task, alpha, T, delta, seed), range(replicates), workers)
    )
    report = ExperimentReport(
        "dimension",
        {"alpha": alpha, "T": T, "delta": delta, "replicates": replicates, "seed": seed},
    )
    ok = slopes[np.isfinite(slopes)]
    if ok.size < slopes.size:
        report.warnings.append(
            f"{slopes.size - ok.size} replicate(s) had an empty scale window and were skipped"
        )
    mean = float(ok.mean()) if ok.size else math.nan
    worst = float(np.abs(ok - alpha).max()) if ok.size else math.nan
    se = float(ok.std(ddof=1) / math.sqrt(ok.size)) if ok.size > 1 else None
    report.add_statistic("slope_mean", mean, ok.size, stderr=se)
    report.add_statistic("crinkled_dimension", 2 * mean, ok.size)
    report.add_check("slope_each_replicate", ok.size > 0 and worst <= tol, worst, tol)
    report.add_check("crinkled_mean", abs(2 * mean - 2 * alpha) <= 2 * tol,
                     abs(2 * mean - 2 * alpha), 2 * tol)
    report.samples = {
        "replicate": list(range(replicates)),
        "slope": slopes.tolist(),
        "crinkled": (2 * slopes).tolist(),
    }
    return report


__all__ = [
    "DEFAULT_TOLERANCES",
    "ExperimentReport",
    "coupled_pair_statistics",
    "experiment_diameter",
    "experiment_dimension",
    "experiment_gh_convergence",
    "experiment_heyde_tail",
    "experiment_orthogonality",
    "experiment_truncated_moment",
    "max_sq_distance",
    "small_jump_proxy",
    "truncated_moment_exact",
    "truncated_moment_limit",
]
