from __future__ import annotations

import json
import math

import numpy as np
import pytest
from scipy import integrate

from crinkle.experiments import (
    ExperimentReport,
    coupled_pair_statistics,
    experiment_diameter,
    experiment_dimension,
    experiment_gh_convergence,
    experiment_heyde_tail,
    experiment_orthogonality,
    experiment_truncated_moment,
    small_jump_proxy,
    truncated_moment_exact,
    truncated_moment_limit,
)
from crinkle.streams import seed_stream
from crinkle.walks import RadialLaw, WalkConfig, WalkPath, simulate_walk


class TestReport:
    def test_json_is_stable_and_strict(self):
        r = ExperimentReport("x", {"b": 1, "a": np.float64(2.5)})
        r.add_statistic("s", math.nan, 3)
        r.add_check("c", np.bool_(True), np.float64(0.1), 0.2)
        text = r.to_json()
        assert text == r.to_json()
        data = json.loads(text)
        assert data["statistics"]["s"] == {"replicates": 3, "value": None}
        assert list(data["parameters"]) == ["a", "b"]
        assert data["passed"] is True

    def test_samples_csv_round_trips_floats(self):
        r = ExperimentReport("x", {})
        vals = [0.1, 1 / 3, 2.0**-60, 12345.678901234567]
        r.samples = {"i": [0, 1, 2, 3], "v": vals}
        lines = r.samples_csv().splitlines()
        assert lines[0] == "i,v"
        assert [float(line.split(",")[1]) for line in lines[1:]] == vals

    def test_ragged_samples(self):
        r = ExperimentReport("x", {})
        r.samples = {"a": [1], "b": [1, 2]}
        with pytest.raises(ValueError):
            r.samples_csv()

    def test_failed_check_fails_report(self):
        r = ExperimentReport("x", {})
        r.add_check("ok", True, 0, 1)
        r.add_check("bad", False, 2, 1)
        assert not r.passed


class TestDiameter:
    def test_single_step_echoes_radial_sample(self):
        cfg = WalkConfig(d=1, n=1, T=1.0, family="axis", seed=4)
        report = experiment_diameter(cfg, 100, delta=1e-4)
        expected = [
            simulate_walk(cfg, seed_stream(4, r, 1)).step_norms_sq[0] for r in range(100)
        ]
        np.testing.assert_allclose(report.samples["diam_sq"], expected, rtol=1e-15)

    def test_deterministic(self):
        cfg = WalkConfig(d=20, n=20, seed=9)
        a = experiment_diameter(cfg, 100, delta=1e-4)
        b = experiment_diameter(cfg, 100, delta=1e-4)
        assert a.to_json() == b.to_json()
        assert a.samples_csv() == b.samples_csv()

    def test_needs_replicates(self):
        with pytest.raises(ValueError, match="100"):
            experiment_diameter(WalkConfig(d=2, n=2), 10)

    def test_no_closed_form_for_other_alpha(self):
        report = experiment_diameter(WalkConfig(d=5, n=10, alpha=0.6), 100, delta=1e-3)
        assert "ks_closed_form" not in report.checks
        assert "ks_two_sample" in report.checks


class TestOrthogonality:
    def test_axis_exact(self):
        report = experiment_orthogonality(WalkConfig(d=10, n=10, family="axis", seed=2), 20000)
        assert report.statistics["prob_d10"]["value"] == pytest.approx(0.1, abs=0.01)
        assert report.checks["axis_exact_d10"]["passed"]

    @pytest.mark.parametrize("family", ["axis", "rotational", "iid"])
    def test_eps_above_one(self, family):
        report = experiment_orthogonality(WalkConfig(d=5, n=10, family=family), 500, eps=1.01)
        assert report.statistics["prob_d5"]["value"] == 0.0

    def test_rotational_concentration(self):
        cfg = WalkConfig(d=100, n=200, family="rotational", trunc_s=0.1, seed=1)
        report = experiment_orthogonality(cfg, 10_000, eps=0.3)
        assert report.statistics["prob_d100"]["value"] <= 0.01

    def test_ladder_decays(self):
        cfg = WalkConfig(d=10, n=50, family="iid", trunc_s=0.1, seed=3)
        report = experiment_orthogonality(cfg, 2000, eps=0.3, d_ladder=[5, 50])
        p5, p50 = (report.statistics[f"prob_d{d}"]["value"] for d in (5, 50))
        assert p50 < p5
        assert report.checks["monotone_decay"]["passed"]

    def test_rare_condition_widens_s(self):
        # with n = 10^6 the norm condition is hit about once per 10^5 draws
        cfg = WalkConfig(d=4, n=1_000_000, family="iid", trunc_s=1.0)
        report = experiment_orthogonality(cfg, 200, eps=0.5)
        assert report.warnings and "widened" in report.warnings[0]
        assert report.statistics["prob_d4"]["s_used"] < 1.0
        assert report.statistics["prob_d4"]["acceptance"] >= 1e-3


class TestTruncatedMoment:
    @pytest.mark.parametrize("alpha, n, s", [(0.5, 100, 0.25), (0.3, 20, 2.0), (0.7, 1000, 0.01)])
    def test_exact_value_against_quadrature(self, alpha, n, s):
        a = n ** (1 / alpha)
        law = RadialLaw(alpha)
        # density of R^2 is alpha t^(-alpha-1) on [1, inf)
        val, _ = integrate.quad(lambda t: t * alpha * t ** (-alpha - 1), 1.0, s * a)
        assert truncated_moment_exact(alpha, n, s) == pytest.approx(n / a * val, rel=1e-9)
        assert law.tail(1.0) == 1.0

    def test_limit_examples(self):
        assert truncated_moment_limit(0.5, 0.25) == pytest.approx(0.5)
        assert truncated_moment_limit(0.5, 1.0) == pytest.approx(1.0)

    def test_below_floor_is_zero(self):
        cfg = WalkConfig(d=1, n=100, alpha=0.5)
        report = experiment_truncated_moment(cfg, 1000, s_values=[0.5e-4])
        assert report.statistics["moment_s5e-05"]["value"] == 0.0

    @pytest.mark.parametrize("stratified", [True, False])
    def test_estimate_and_error(self, stratified):
        cfg = WalkConfig(d=1, n=100, alpha=0.5, seed=11)
        report = experiment_truncated_moment(cfg, 200_000, s_values=[1.0], stratified=stratified)
        stat = report.statistics["moment_s1"]
        assert abs(stat["value"] - stat["exact_finite_n"]) < 5 * stat["stderr"]
        assert stat["replicates"] == 200_000

    def test_monotone_in_s(self):
        cfg = WalkConfig(d=1, n=1000, alpha=0.4, seed=5)
        s_grid = [0.01, 0.1, 0.5, 1.0, 4.0]
        report = experiment_truncated_moment(cfg, 50_000, s_values=s_grid, stratified=False)
        vals = [report.statistics[f"moment_s{s:g}"]["value"] for s in s_grid]
        assert vals == sorted(vals)

    def test_stratified_error_smaller(self):
        cfg = WalkConfig(d=1, n=1000, alpha=0.5, seed=5)
        a = experiment_truncated_moment(cfg, 100_000, s_values=[1.0], stratified=True)
        b = experiment_truncated_moment(cfg, 100_000, s_values=[1.0], stratified=False)
        assert a.statistics["moment_s1"]["stderr"] < b.statistics["moment_s1"]["stderr"]


class TestHeyde:
    def test_one_dimension_is_exact(self):
        # d = 1: n P(xi^2 > x n^(1/alpha)) = x^-alpha with no randomness left
        report = experiment_heyde_tail(0.5, 1, 30, [1.0, 4.0], 50)
        assert report.statistics["tail_x1"]["value"] == pytest.approx(1.0, rel=1e-12)
        assert report.statistics["tail_x4"]["value"] == pytest.approx(0.5, rel=1e-12)

    def test_methods_agree(self):
        crude = experiment_heyde_tail(0.5, 20, 20, [1.0], 40_000, method="crude", seed=2)
        cond = experiment_heyde_tail(0.5, 20, 20, [1.0], 40_000, seed=2)
        a, b = crude.statistics["tail_x1"], cond.statistics["tail_x1"]
        assert abs(a["value"] - b["value"]) < 4 * math.hypot(a["stderr"], b["stderr"])
        assert b["stderr"] < a["stderr"]

    def test_large_x_goes_to_zero(self):
        report = experiment_heyde_tail(0.5, 10, 10, [1e6], 1000)
        assert report.statistics["tail_x1e+06"]["value"] < 2e-3

    def test_bad_method(self):
        with pytest.raises(ValueError):
            experiment_heyde_tail(0.5, 10, 10, [1.0], 100, method="magic")


def _orthogonal_path(norms, n=4):
    d = len(norms)
    cfg = WalkConfig(d=d, n=n, alpha=0.5)
    steps = np.zeros((d, d))
    steps[np.arange(d), np.arange(d)] = np.sqrt(norms)
    return WalkPath.from_steps(cfg, steps)


class TestCoupledPair:
    def test_orthogonal_steps_have_zero_distortion(self):
        out = coupled_pair_statistics(_orthogonal_path([16.0, 1.0, 64.0, 36.0]), 0.5)
        assert out["atoms"] == 3
        assert out["distortion"] < 1e-15
        assert out["d_iso"] < 1e-12

    def test_nothing_survives(self):
        out = coupled_pair_statistics(_orthogonal_path([16.0, 1.0, 64.0, 36.0]), 100.0)
        assert out["atoms"] == 0
        assert out["distortion"] == 0.0 and out["d_iso"] == 0.0

    def test_collinear_steps_distort(self):
        cfg = WalkConfig(d=1, n=4, alpha=0.5)
        path = WalkPath.from_steps(cfg, np.array([[4.0], [4.0], [0.0], [0.0]]))
        out = coupled_pair_statistics(path, 0.5)
        # walk distance 2 between origin and second point, range sqrt(2)
        assert out["distortion"] == pytest.approx(2 - math.sqrt(2))
        assert out["bijection_bound"] == 2 * out["distortion"]


class TestGhConvergence:
    def test_report_shape(self):
        cfg = WalkConfig(d=10, n=50, family="axis", trunc_s=0.1, seed=1)
        report = experiment_gh_convergence(cfg, 10, d_ladder=[10, 100])
        assert len(report.samples["d"]) == 20
        assert report.parameters["proxy"] == pytest.approx(small_jump_proxy(0.5, 0.1))
        assert {"distortion_median_decreasing", "hausdorff_below_proxy"} <= set(report.checks)

    def test_needs_positive_s(self):
        with pytest.raises(ValueError):
            experiment_gh_convergence(WalkConfig(d=2, n=2), 5)


class TestDimension:
    def test_slopes_near_alpha(self):
        report = experiment_dimension(0.5, 3, delta=1e-6, seed=1)
        assert abs(report.statistics["slope_mean"]["value"] - 0.5) < 0.15
        assert report.statistics["crinkled_dimension"]["value"] == pytest.approx(
            2 * report.statistics["slope_mean"]["value"]
        )
