import math
import os
import sys
import unittest

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "src"))

from levy_storage.estimation import (choose_resample_size, confidence_interval, draw_probes, estimate_curve,
                                     estimate_grid, estimate_poisson, estimate_with_interval, normal_interval,
                                     plugin_variance, resample_curve, resample_estimate, residuals, round_to_grid)
from levy_storage.levy import build_truncated_cp, levy_density_of
from levy_storage.schema import (CompoundPoisson, DomainError, EmptyProbeSampleError, ExponentialJobs,
                                 GammaSubordinator, GridObservations, InverseGaussianSubordinator, ProbeSample,
                                 SumSubordinator, VarianceUnavailableError)
from levy_storage.simulation import (exact_probe_values, make_stream, sample_grid, simulate_path,
                                     stationary_init)

MM1 = CompoundPoisson(rate=1.0, jobs=ExponentialJobs(rate=2.0))
SLOW_TESTS_ENABLED = os.environ.get("LEVY_STORAGE_SLOW_TESTS_ENABLED") == "True"


def synthetic_sample(values, xi: float = 1.0) -> ProbeSample:
    """A sample whose i-th probe sits on grid point i."""
    n = len(values) - 1
    return ProbeSample(xi=xi, delta=1.0, horizon=float(n), probe_times=np.arange(1, n + 1, dtype=float),
                       rounded_indices=np.arange(1, n + 1), values=values)


def mm1_grid(horizon: float, delta: float, seed: int) -> GridObservations:
    v0 = stationary_init(MM1, make_stream(seed, 0, 2))
    return sample_grid(simulate_path(MM1, horizon, v0, make_stream(seed, 0, 0)), delta)


class TestRounding(unittest.TestCase):
    def test_nearest_grid_point_ties_up(self):
        np.testing.assert_array_equal(round_to_grid([0.24, 0.25, 0.26, 0.74, 0.75], 0.5), [0, 1, 1, 1, 2])


class TestEstimator(unittest.TestCase):
    def test_all_empty_gives_alpha(self):
        sample = synthetic_sample([0.0] * 11)
        for alpha in (0.5, 1.0, 3.0):
            with self.subTest(alpha=alpha):
                self.assertAlmostEqual(estimate_grid(sample, alpha).phi_hat, alpha, places=14)

    def test_two_probes(self):
        estimate = estimate_grid(synthetic_sample([1.0, 0.0, 0.0]), 1.0)
        expected = 1.0 + (1.0 - math.exp(-1.0)) / 2.0
        self.assertAlmostEqual(estimate.phi_hat, expected, places=14)
        self.assertAlmostEqual(estimate.phi_hat, 1.31606, places=5)
        self.assertEqual(estimate.n, 2)
        self.assertEqual(estimate.zero_fraction, 1.0)
        self.assertAlmostEqual(estimate.recomputed_phi(), estimate.phi_hat, places=14)

    def test_alpha_zero_gives_zero(self):
        sample = synthetic_sample([0.3, 0.0, 1.2, 0.5])
        self.assertEqual(estimate_grid(sample, 0.0).phi_hat, 0.0)

    def test_zero_tolerance(self):
        sample = synthetic_sample([0.0, 1e-13, 0.5, 1e-13])
        self.assertEqual(estimate_grid(sample, 1.0).zero_fraction, 0.0)
        self.assertAlmostEqual(estimate_grid(sample, 1.0, zero_tolerance=1e-12).zero_fraction, 2.0 / 3.0)

    def test_curve_matches_pointwise_estimates(self):
        rng = np.random.default_rng(3)
        values = np.where(rng.random(51) < 0.4, 0.0, rng.exponential(1.0, 51))
        sample = synthetic_sample(values, xi=0.7)
        alphas = [0.0, 0.1, 1.0, 2.5, 10.0]
        expected = [estimate_grid(sample, a).phi_hat for a in alphas]
        np.testing.assert_allclose(estimate_curve(sample, alphas), expected, rtol=1e-12, atol=1e-15)

    def test_interior_probe_order_does_not_matter(self):
        # Only V(0), the last probe value and the empirical law of the probe values enter the estimate
        rng = np.random.default_rng(5)
        values = np.where(rng.random(41) < 0.4, 0.0, rng.exponential(1.0, 41))
        shuffled = values.copy()
        shuffled[1:-1] = rng.permutation(values[1:-1])
        for alpha in (0.5, 1.0, 4.0):
            with self.subTest(alpha=alpha):
                self.assertAlmostEqual(estimate_grid(synthetic_sample(shuffled, xi=0.8), alpha).phi_hat,
                                       estimate_grid(synthetic_sample(values, xi=0.8), alpha).phi_hat, places=12)

    def test_negative_alpha_is_rejected(self):
        with self.assertRaises(DomainError):
            estimate_grid(synthetic_sample([0.0, 0.0]), -1.0)

    def test_poisson_estimator_matches_grid_estimator(self):
        values = [0.4, 0.0, 0.3, 0.0, 0.0]
        self.assertEqual(estimate_poisson(values, 1.0, 2.0).phi_hat,
                         estimate_grid(synthetic_sample(values), 2.0).phi_hat)


class TestResiduals(unittest.TestCase):
    def test_estimator_is_rebuilt_from_residuals(self):
        rng = np.random.default_rng(11)
        for trial in range(100):
            n = int(rng.integers(1, 200))
            values = np.where(rng.random(n + 1) < 0.3, 0.0, rng.gamma(0.7, 2.0, n + 1))
            sample = synthetic_sample(values, xi=float(rng.uniform(0.1, 5.0)))
            alpha = float(rng.uniform(0.05, 8.0))
            phi_value = float(rng.uniform(0.0, 5.0))
            estimate = estimate_grid(sample, alpha)
            rebuilt = phi_value + float(np.mean(residuals(sample, alpha, phi_value))) / estimate.lst_mean
            with self.subTest(trial=trial):
                self.assertLessEqual(abs(rebuilt - estimate.phi_hat), 1e-12 * max(1.0, abs(estimate.phi_hat)))


class TestIntervals(unittest.TestCase):
    def test_normal_interval(self):
        interval = normal_interval(0.0, 1.0, 100, 0.95)
        self.assertAlmostEqual(interval.hi, 0.195996, places=6)
        self.assertAlmostEqual(interval.lo, -0.195996, places=6)
        self.assertEqual(interval.level, 0.95)
        with self.assertRaises(DomainError):
            normal_interval(0.0, 1.0, 100, 1.0)

    def test_no_variance_without_empty_probes(self):
        sample = synthetic_sample([0.5, 0.2, 0.7, 1.1])
        with self.assertRaises(VarianceUnavailableError):
            plugin_variance(sample, 1.0)
        estimate = estimate_with_interval(sample, 1.0)
        self.assertIsNone(estimate.ci)
        self.assertIsNone(estimate.sigma_hat_sq)

    def test_interval_on_simulated_grid(self):
        grid = mm1_grid(2000.0, 0.05, 4)
        sample = draw_probes(grid, 2000.0, 1.0, make_stream(4, 0, 1))
        estimate = estimate_with_interval(sample, 1.0)
        self.assertIsNotNone(estimate.ci)
        self.assertLess(estimate.ci.lo, estimate.phi_hat)
        self.assertGreater(estimate.ci.hi, estimate.phi_hat)
        # Plug-in variance near 104 / 243
        self.assertAlmostEqual(estimate.sigma_hat_sq, 104.0 / 243.0, delta=0.25)
        interval = confidence_interval(sample, 1.0)
        self.assertEqual((interval.lo, interval.hi), (estimate.ci.lo, estimate.ci.hi))


class TestDrawProbes(unittest.TestCase):
    def setUp(self):
        self.grid = mm1_grid(100.0, 0.5, 2)

    def test_probes_read_the_grid(self):
        sample = draw_probes(self.grid, 100.0, 1.0, make_stream(2, 0, 1))
        self.assertTrue(np.all(sample.rounded_indices <= self.grid.m))
        self.assertEqual(sample.values[0], self.grid.values[0])
        np.testing.assert_array_equal(sample.values[1:], self.grid.values[sample.rounded_indices])
        np.testing.assert_array_equal(sample.rounded_indices, round_to_grid(sample.probe_times, 0.5))
        self.assertAlmostEqual(sample.n, 100, delta=40)

    def test_fixed_n(self):
        sample = draw_probes(self.grid, 100.0, 1.0, make_stream(2, 0, 1), n=20)
        self.assertEqual(sample.n, 20)
        with self.assertRaises(DomainError):
            draw_probes(self.grid, 100.0, 1.0, make_stream(2, 0, 1), n=1000)

    def test_shorter_horizon_uses_a_prefix(self):
        sample = draw_probes(self.grid, 50.0, 1.0, make_stream(2, 0, 1))
        self.assertLessEqual(int(sample.rounded_indices[-1]), 100)

    def test_grid_must_cover_the_horizon(self):
        with self.assertRaises(DomainError):
            draw_probes(self.grid, 200.0, 1.0, make_stream(2, 0, 1))

    def test_empty_sample(self):
        with self.assertRaises(EmptyProbeSampleError):
            draw_probes(self.grid, 100.0, 1e-9, make_stream(2, 0, 1))


class TestResampling(unittest.TestCase):
    def setUp(self):
        self.grid = mm1_grid(50.0, 0.1, 8)

    def test_resample_estimate(self):
        result = resample_estimate(self.grid, 50.0, 1.0, 5, 1.0, make_stream(8, 0, 1))
        self.assertEqual(result.K, 5)
        self.assertAlmostEqual(result.mean_phi, float(np.mean(result.phi_hats)), places=14)
        self.assertEqual(len(result.per_iteration), 5)

    def test_resample_curve_matches_pointwise_resampling(self):
        curve = resample_curve(self.grid, 50.0, 1.0, 4, [0.5, 1.0], make_stream(8, 0, 1))
        single = resample_estimate(self.grid, 50.0, 1.0, 4, 1.0, make_stream(8, 0, 1))
        self.assertEqual(curve.K, 4)
        self.assertAlmostEqual(float(curve.mean_curve[1]), single.mean_phi, places=12)
        np.testing.assert_array_equal(curve.probe_counts, single.probe_counts)

    def test_averaging_reduces_dispersion(self):
        rng = make_stream(8, 0, 1)
        singles = [resample_estimate(self.grid, 50.0, 1.0, 1, 1.0, rng).mean_phi for _ in range(60)]
        averaged = [resample_estimate(self.grid, 50.0, 1.0, 20, 1.0, rng).mean_phi for _ in range(60)]
        self.assertLess(np.var(averaged, ddof=1), 0.2 * np.var(singles, ddof=1))

    def test_choose_resample_size(self):
        rng = make_stream(8, 0, 1)
        self.assertEqual(choose_resample_size(self.grid, 50.0, 1.0, 1.0, rng, tolerance=10.0, candidates=(1, 4)), 1)
        self.assertEqual(choose_resample_size(self.grid, 50.0, 1.0, 1.0, rng, tolerance=0.0, candidates=(4, 1)), 4)

    def test_invalid_k(self):
        with self.assertRaises(DomainError):
            resample_estimate(self.grid, 50.0, 1.0, 0, 1.0, make_stream(8, 0, 1))

    def test_canonical_resampling_variance_reduction(self):
        if not SLOW_TESTS_ENABLED:
            self.skipTest("LEVY_STORAGE_SLOW_TESTS_ENABLED is not True")
        canonical = SumSubordinator(components=(GammaSubordinator(shape=2.0, rate=5.0),
                                                InverseGaussianSubordinator(mean=0.4, shape=1.0)))
        cp = build_truncated_cp(levy_density_of(canonical), 1e-5).to_compound_poisson()
        grid = sample_grid(simulate_path(cp, 25.0, 0.0, make_stream(12, 0, 0)), 0.05)
        rng = make_stream(12, 0, 1)
        singles = [resample_estimate(grid, 25.0, 1.0, 1, 1.0, rng).mean_phi for _ in range(200)]
        averaged = [resample_estimate(grid, 25.0, 1.0, 100, 1.0, rng).mean_phi for _ in range(200)]
        self.assertLessEqual(np.var(averaged, ddof=1), 0.2 * np.var(singles, ddof=1))


class TestConsistency(unittest.TestCase):
    def test_exact_probes_on_long_path(self):
        v0 = stationary_init(MM1, make_stream(5, 0, 2))
        path = simulate_path(MM1, 20_000.0, v0, make_stream(5, 0, 0))
        _, values = exact_probe_values(path, 1.0, make_stream(5, 0, 1))
        self.assertAlmostEqual(estimate_poisson(values, 1.0, 1.0).phi_hat, 2.0 / 3.0, delta=0.06)

    def test_grid_estimates_for_several_widths(self):
        if not SLOW_TESTS_ENABLED:
            self.skipTest("LEVY_STORAGE_SLOW_TESTS_ENABLED is not True")
        v0 = stationary_init(MM1, make_stream(6, 0, 2))
        path = simulate_path(MM1, 50_000.0, v0, make_stream(6, 0, 0))
        estimates = {}
        for delta in (0.1, 0.5, 2.0):
            sample = draw_probes(sample_grid(path, delta), 50_000.0, 1.0, make_stream(6, 0, 1))
            estimates[delta] = [estimate_grid(sample, alpha).phi_hat for alpha in (0.5, 1.0, 2.0)]
            for alpha, value in zip((0.5, 1.0, 2.0), estimates[delta]):
                with self.subTest(delta=delta, alpha=alpha):
                    self.assertLessEqual(abs(value - alpha * (alpha + 1.0) / (alpha + 2.0)), 0.02)
        for k in range(3):
            values = [estimates[delta][k] for delta in estimates]
            self.assertLessEqual(max(values) - min(values), 0.03)


if __name__ == '__main__':
    unittest.main()
