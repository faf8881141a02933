from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import integrate, stats

from crinkle.levy_core import (
    CrinkledRange,
    CustomTail,
    JumpSet,
    StablePower,
    epsilon_net,
    hull_vertex_mask,
    range_distance,
    range_distance_matrix,
    range_points,
    sample_jumps,
    sample_subordinator_values,
    subordinator_value,
)


class TestStablePower:
    def test_tail_values(self):
        assert StablePower(0.5).tail(1.0) == 1.0
        assert StablePower(0.5).tail(4.0) == 0.5
        # frozen from 10 ** -1.8
        assert StablePower(0.3).tail(1e6) == pytest.approx(0.015848931924611134, rel=1e-14)

    def test_inverse_tail_round_trip(self, stable):
        x = np.geomspace(1e-6, 1e6, 25)
        np.testing.assert_allclose(stable.inverse_tail(stable.tail(x)), x, rtol=1e-12)

    @pytest.mark.parametrize("x", [0.0, -1.0])
    def test_tail_domain(self, x):
        with pytest.raises(ValueError):
            StablePower(0.5).tail(x)

    @pytest.mark.parametrize("alpha", [0.0, 1.0, -0.2, 1.5])
    def test_alpha_range(self, alpha):
        with pytest.raises(ValueError):
            StablePower(alpha)

    @pytest.mark.parametrize("s, expected", [(0.0, 0.0), (0.25, 0.5), (1.0, 1.0)])
    def test_small_jump_mean_examples(self, s, expected):
        assert StablePower(0.5).small_jump_mean(s) == pytest.approx(expected, abs=1e-15)

    @pytest.mark.parametrize("s", [1e-3, 0.2, 1.0, 7.5])
    def test_small_jump_mean_against_quadrature(self, stable, s):
        # nu(dx) = alpha x^(-alpha-1) dx, so x nu(dx) = alpha x^-alpha dx
        a = stable.alpha
        value, _ = integrate.quad(lambda x: a * x ** (-a), 0, s)
        assert stable.small_jump_mean(s) == pytest.approx(value, rel=1e-8)

    def test_small_jump_mean_negative(self):
        with pytest.raises(ValueError):
            StablePower(0.5).small_jump_mean(-1.0)


class TestCustomTail:
    def _compound(self):
        # unit-mass exponential jumps: tail e^-x, small moment 1 - (1+s) e^-s
        return CustomTail(
            lambda x: np.exp(-x),
            lambda u: -np.log(u),
            lambda s: 1.0 - (1.0 + s) * math.exp(-s),
            total_mass_value=1.0,
        )

    def test_infinite_small_moment_rejected(self):
        with pytest.raises(ValueError):
            CustomTail(lambda x: x**-1.5, lambda u: u ** (-1 / 1.5), lambda s: math.inf)

    def test_zero_threshold_needs_finite_mass(self, rng):
        with pytest.raises(ValueError, match="finite"):
            sample_jumps(StablePower(0.5), 1.0, 0.0, rng)
        jumps = sample_jumps(self._compound(), 50.0, 0.0, rng)
        assert np.all(jumps.sizes > 0)

    def test_sizes_follow_the_tail(self, rng):
        jumps = sample_jumps(self._compound(), 5000.0, 0.0, rng)
        ks = stats.kstest(jumps.sizes, "expon").statistic
        assert ks < 4 / math.sqrt(len(jumps))


class TestJumpSet:
    def test_rejects_unsorted_times(self):
        with pytest.raises(ValueError, match="increasing"):
            JumpSet(1.0, 0.1, [0.5, 0.2], [1.0, 1.0])

    def test_rejects_small_sizes(self):
        with pytest.raises(ValueError, match="threshold"):
            JumpSet(1.0, 0.1, [0.2, 0.5], [0.1, 1.0])

    def test_rejects_times_outside_horizon(self):
        with pytest.raises(ValueError):
            JumpSet(1.0, 0.0, [0.2, 1.5], [1.0, 1.0])

    def test_sample_jumps_invariants(self, stable, rng):
        jumps = sample_jumps(stable, 2.0, 1e-3, rng)
        assert np.all(np.diff(jumps.times) > 0)
        assert np.all((jumps.times >= 0) & (jumps.times <= 2.0))
        assert np.all(jumps.sizes > 1e-3)

    def test_atom_count_is_poisson(self, rng):
        mean = 1e-4 ** -0.5  # T * delta^-alpha = 100
        counts = [len(sample_jumps(StablePower(0.5), 1.0, 1e-4, rng)) for _ in range(400)]
        assert abs(np.mean(counts) - mean) < 4 * math.sqrt(mean / 400)
        assert np.var(counts, ddof=1) == pytest.approx(mean, rel=0.25)

    def test_size_law(self, rng):
        jumps = sample_jumps(StablePower(0.5), 50.0, 1e-2, rng)
        # P(Y > y) = (y / delta)^-alpha above the threshold
        ks = stats.kstest(jumps.sizes, lambda y: 1 - (y / 1e-2) ** -0.5).statistic
        assert ks < 4 / math.sqrt(len(jumps))

    def test_seeded_reproducibility(self):
        a = sample_jumps(StablePower(0.4), 1.0, 1e-3, np.random.default_rng(3))
        b = sample_jumps(StablePower(0.4), 1.0, 1e-3, np.random.default_rng(3))
        np.testing.assert_array_equal(a.times, b.times)
        np.testing.assert_array_equal(a.sizes, b.sizes)


class TestSubordinator:
    def test_value_counts_jumps_up_to_t(self):
        jumps = JumpSet(1.0, 0.0, [0.1, 0.4, 0.9], [2.0, 3.0, 5.0])
        assert subordinator_value(jumps, 0.0) == 0.0
        assert subordinator_value(jumps, 0.4) == 5.0
        assert subordinator_value(jumps, 1.0) == 10.0

    def test_compensation(self):
        jumps = JumpSet(1.0, 0.25, [0.5], [1.0], StablePower(0.5))
        assert subordinator_value(jumps, 1.0, compensate_small=True) == pytest.approx(1.5)

    def test_compensation_needs_measure(self):
        with pytest.raises(ValueError):
            subordinator_value(JumpSet(1.0, 0.1, [0.5], [1.0]), 1.0, compensate_small=True)

    def test_t_outside_horizon(self, jumps):
        with pytest.raises(ValueError):
            subordinator_value(jumps, 1.5)

    def test_vectorized_values_match_jump_sets(self):
        vals = sample_subordinator_values(StablePower(0.5), 1.0, 1e-2, 3000,
                                          np.random.default_rng(1), compensate_small=False)
        single = [sample_jumps(StablePower(0.5), 1.0, 1e-2, np.random.default_rng(k)).total
                  for k in range(3000)]
        assert stats.ks_2samp(vals, single).statistic < 0.05

    def test_chunking_keeps_values(self):
        full = sample_subordinator_values(StablePower(0.6), 1.0, 1e-3, 50,
                                          np.random.default_rng(9))
        chunked = sample_subordinator_values(StablePower(0.6), 1.0, 1e-3, 50,
                                             np.random.default_rng(9), chunk=100)
        np.testing.assert_allclose(full, chunked, rtol=1e-12)


class TestCrinkledRange:
    def test_structure(self, jumps):
        r = range_points(jumps)
        coords = r.coordinates()
        assert len(r) == len(jumps) + 1
        np.testing.assert_array_equal(coords[0], 0.0)
        np.testing.assert_array_equal((coords != 0).sum(axis=1), np.arange(len(r)))
        np.testing.assert_allclose((coords**2).sum(axis=1), r.cumulative, rtol=1e-12)

    def test_distance_matches_coordinates(self, jumps):
        r = range_points(jumps)
        c = r.coordinates()
        for i, j in [(0, 1), (3, 17), (len(r) - 1, 0)]:
            direct = float(np.linalg.norm(c[i] - c[j]))
            assert range_distance(r, i, j) == pytest.approx(direct, rel=1e-12)
        assert range_distance(r, 5, 5) == 0.0

    def test_distance_index_error(self, jumps):
        with pytest.raises(IndexError):
            range_distance(range_points(jumps), 0, len(jumps) + 1)

    def test_distance_matrix_shape(self, jumps):
        m = range_distance_matrix(range_points(jumps))
        assert m.shape == (len(jumps) + 1,) * 2
        np.testing.assert_array_equal(m, m.T)

    def test_empty_jump_set(self):
        r = range_points(JumpSet(1.0, 0.5, [], []))
        assert len(r) == 1
        assert r.coordinates().shape == (1, 1)

    def test_coordinates_dim_too_small(self, jumps):
        with pytest.raises(ValueError):
            range_points(jumps).coordinates(dim=2)


class TestEpsilonNet:
    def test_keeps_large_jumps_only(self, jumps):
        net = epsilon_net(jumps, 0.05)
        np.testing.assert_array_equal(net.increments, jumps.sizes[jumps.sizes > 0.05])
        # shares axes with the full range
        np.testing.assert_array_equal(net.axes, np.flatnonzero(jumps.sizes > 0.05))

    def test_s_below_threshold(self, jumps):
        with pytest.raises(ValueError, match="threshold"):
            epsilon_net(jumps, 1e-4)

    def test_s_at_threshold_is_full_range(self, jumps):
        net = epsilon_net(jumps, jumps.threshold)
        np.testing.assert_array_equal(net.cumulative, range_points(jumps).cumulative)

    def test_huge_s_gives_origin(self, jumps):
        assert len(epsilon_net(jumps, 1e9)) == 1


def _in_hull_of_others(points: np.ndarray, l: int) -> bool:
    from scipy.optimize import linprog

    others = np.delete(points, l, axis=0)
    m = others.shape[0]
    a_eq = np.vstack([others.T, np.ones(m)])
    b_eq = np.concatenate([points[l], [1.0]])
    res = linprog(np.zeros(m), A_eq=a_eq, b_eq=b_eq, bounds=[(0, None)] * m, method="highs")
    return res.status == 0


class TestHull:
    def test_every_prefix_point_is_a_vertex(self, rng):
        for _ in range(5):
            jumps = sample_jumps(StablePower(0.5), 1.0, 0.05, rng)
            assert hull_vertex_mask(range_points(jumps)).all()

    def test_against_linear_programming(self, rng):
        for _ in range(10):
            k = int(rng.integers(1, 7))
            r = range_points(JumpSet(1.0, 0.0, np.sort(rng.random(k)) , rng.random(k) + 0.1))
            pts = r.coordinates()
            expected = [not _in_hull_of_others(pts, l) for l in range(len(r))]
            np.testing.assert_array_equal(hull_vertex_mask(r), expected)

    def test_single_point(self):
        assert hull_vertex_mask(range_points(JumpSet(1.0, 0.0, [], []))).tolist() == [True]

    def test_direct_construction(self):
        r = CrinkledRange(np.array([0.0, 0.5]), np.array([4.0]), np.array([0]),
                          np.array([0.0, 4.0]))
        np.testing.assert_array_equal(r.coordinates(), [[0.0], [2.0]])


class TestWorkedExample:
    """Atoms (0.3, 2.0) and (0.7, 1.0)."""

    @pytest.fixture
    def two(self):
        return JumpSet(1.0, 0.5, [0.3, 0.7], [2.0, 1.0], StablePower(0.5))

    def test_subordinator(self, two):
        assert [subordinator_value(two, t) for t in (0.2, 0.5, 1.0)] == [0.0, 2.0, 3.0]

    def test_range(self, two):
        c = range_points(two).coordinates()
        np.testing.assert_allclose(c, [[0, 0], [math.sqrt(2), 0], [math.sqrt(2), 1]])
        assert range_distance(range_points(two), 0, 2) == pytest.approx(math.sqrt(3))
        assert float(((c[2] - c[0]) ** 2).sum()) == pytest.approx(3.0)

    def test_net(self, two):
        from crinkle.metric import FinitePointSet, hausdorff

        net = epsilon_net(two, 1.5)
        np.testing.assert_allclose(net.coordinates(2), [[0, 0], [math.sqrt(2), 0]])
        gap = hausdorff(FinitePointSet(net.coordinates(2)), FinitePointSet(range_points(two).coordinates()))
        assert gap <= 1.0


class TestRangeInvariants:
    def test_gram_identity(self, jumps):
        r = range_points(jumps)
        c = r.coordinates()
        idx = np.arange(len(r))
        expected = r.cumulative[np.minimum.outer(idx, idx)]
        np.testing.assert_allclose(c @ c.T, expected, rtol=1e-12, atol=1e-15)

    def test_subordinator_monotone(self, jumps):
        grid = np.linspace(0, 1, 101)
        vals = [subordinator_value(jumps, t) for t in grid]
        assert np.all(np.diff(vals) >= 0)

    def test_poisson_mean_many_replicates(self, rng):
        # T = 2, delta = 4: mean 2 * 4^-0.5 = 1
        counts = np.array([len(sample_jumps(StablePower(0.5), 2.0, 4.0, rng)) for _ in range(10_000)])
        assert abs(counts.mean() - 1.0) < 4 * math.sqrt(1.0 / 10_000)

    def test_tiny_horizon_is_empty(self, rng):
        assert all(len(sample_jumps(StablePower(0.5), 1e-9, 1.0, rng)) == 0 for _ in range(100))
