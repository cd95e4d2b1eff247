"""Tests for the statistics toolbox, checked against scipy/numpy oracles."""

import math
import unittest

import numpy as np
from scipy import stats as sps
from scipy.spatial import distance

from cogmarket.errors import InputError, NumericError
from cogmarket.stats import (
    Histogram,
    describe_groups,
    entropy,
    histogram_jsd,
    icc,
    js_divergence,
    moments,
    ols,
    pearson,
    shapiro_wilk,
    shared_edges,
    welch_t_one_tailed,
)


class TestPearson(unittest.TestCase):
    def test_matches_scipy(self):
        rng = np.random.default_rng(3)
        x = rng.normal(size=40)
        y = 0.5 * x + rng.normal(size=40)
        r, p = pearson(x, y)
        ref = sps.pearsonr(x, y)
        self.assertAlmostEqual(r, ref[0], places=12)
        self.assertAlmostEqual(p, ref[1], delta=1e-9 + 1e-6 * ref[1])

    def test_perfect_correlation(self):
        r, p = pearson([1, 2, 3, 4], [2, 4, 6, 8])
        self.assertAlmostEqual(r, 1.0)
        self.assertLess(p, 1e-12)

    def test_zero_variance(self):
        with self.assertRaises(NumericError):
            pearson([1, 2, 3], [5, 5, 5])

    def test_length_mismatch(self):
        with self.assertRaises(InputError):
            pearson([1, 2, 3], [1, 2, 3, 4])


class TestWelch(unittest.TestCase):
    def test_matches_scipy_one_tailed(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            a = rng.normal(0.3, 1.0, 25)
            b = rng.normal(0.0, 2.0, 18)
            t, p = welch_t_one_tailed(a, b)
            ref = sps.ttest_ind(a, b, equal_var=False, alternative="greater")
            self.assertAlmostEqual(t, ref.statistic, places=9)
            self.assertLess(abs(p - ref.pvalue), 0.1 * ref.pvalue + 1e-12)

    def test_zero_variance_sample(self):
        with self.assertRaises(NumericError):
            welch_t_one_tailed([1.0, 1.0, 1.0], [0.5, 0.7, 0.2])


class TestICC(unittest.TestCase):
    def test_identical_raters(self):
        self.assertAlmostEqual(icc([(1, 1), (2, 2), (4, 4), (3, 3)]), 1.0)

    def test_offset_raters(self):
        # consistency ICC ignores a constant rater offset
        self.assertAlmostEqual(icc([(1, 3), (2, 4), (4, 6), (3, 5)]), 1.0)

    def test_noisy_raters_below_one(self):
        value = icc([(1, 1.5), (2, 1.8), (4, 4.6), (3, 2.5), (5, 5.2)])
        self.assertLess(value, 1.0)
        self.assertGreater(value, 0.8)

    def test_independent_raters_near_zero(self):
        rng = np.random.default_rng(0)
        pairs = rng.normal(size=(200, 2))
        self.assertLess(abs(icc(pairs)), 0.2)

    def test_too_few_pairs(self):
        with self.assertRaises(InputError):
            icc([(1, 1), (2, 2)])

    def test_constant_subjects(self):
        with self.assertRaises(NumericError):
            icc([(2, 2), (2, 2), (2, 2)])


class TestShapiroWilk(unittest.TestCase):
    def test_matches_scipy(self):
        rng = np.random.default_rng(2024)
        for i in range(50):
            n = int(rng.integers(3, 200))
            sample = rng.normal(size=n) if i % 2 else rng.exponential(size=n)
            w, p = shapiro_wilk(sample)
            ref = sps.shapiro(sample)
            self.assertAlmostEqual(w, ref.statistic, delta=1e-3)
            self.assertAlmostEqual(p, ref.pvalue, delta=5e-3)

    def test_rejects_skewed_sample(self):
        sample = np.random.default_rng(5).lognormal(0.0, 1.0, 300)
        _, p = shapiro_wilk(sample)
        self.assertLess(p, 0.05)

    def test_constant_sample(self):
        with self.assertRaises(NumericError):
            shapiro_wilk([2.0, 2.0, 2.0, 2.0])

    def test_too_small(self):
        with self.assertRaises(InputError):
            shapiro_wilk([1.0, 2.0])


class TestJSD(unittest.TestCase):
    def test_identity_is_zero(self):
        self.assertAlmostEqual(js_divergence([0.2, 0.3, 0.5], [0.2, 0.3, 0.5]), 0.0)

    def test_disjoint_is_one(self):
        self.assertAlmostEqual(js_divergence([1.0, 0.0], [0.0, 1.0]), 1.0)

    def test_symmetric_and_bounded(self):
        rng = np.random.default_rng(9)
        for _ in range(200):
            p = rng.random(8)
            q = rng.random(8)
            p /= p.sum()
            q /= q.sum()
            d = js_divergence(p, q)
            self.assertAlmostEqual(d, js_divergence(q, p), places=12)
            self.assertGreaterEqual(d, 0.0)
            self.assertLessEqual(d, 1.0)

    def test_root_is_a_metric(self):
        rng = np.random.default_rng(13)
        for i in range(300):
            alpha = 0.2 if i % 2 else 1.0
            p, q, r = rng.dirichlet([alpha] * 6, size=3)
            pr = math.sqrt(js_divergence(p, r))
            pq = math.sqrt(js_divergence(p, q))
            qr = math.sqrt(js_divergence(q, r))
            self.assertLessEqual(pr, pq + qr + 1e-9)

    def test_matches_scipy_distance(self):
        rng = np.random.default_rng(17)
        for _ in range(50):
            p, q = rng.dirichlet([1.0] * 5, size=2)
            self.assertAlmostEqual(js_divergence(p, q), distance.jensenshannon(p, q, base=2) ** 2, places=9)

    def test_unnormalized_rejected(self):
        with self.assertRaises(InputError):
            js_divergence([0.5, 0.6], [0.5, 0.5])

    def test_support_mismatch(self):
        a = Histogram([0, 1, 2], [1, 1])
        b = Histogram([0, 1, 3], [1, 1])
        with self.assertRaises(InputError):
            js_divergence(a, b)

    def test_histogram_jsd_same_sample(self):
        sample = [1, 2, 2, 3, 5, 8]
        self.assertAlmostEqual(histogram_jsd(sample, sample), 0.0)

    def test_shared_edges_degenerate(self):
        edges = shared_edges([4.0, 4.0], [4.0], bins=2)
        self.assertEqual(list(edges), [3.5, 4.0, 4.5])


class TestOLS(unittest.TestCase):
    def test_recovers_coefficients_and_orthogonal_residuals(self):
        rng = np.random.default_rng(1)
        X = rng.normal(size=(60, 3))
        y = 0.5 + X @ np.array([1.0, -2.0, 0.25]) + rng.normal(0.0, 0.01, 60)
        fit = ols(X, y, intercept=True, names=("a", "b", "c"))
        np.testing.assert_allclose(fit.coefficients, [0.5, 1.0, -2.0, 0.25], atol=0.01)
        design = np.column_stack([np.ones(60), X])
        self.assertLess(float(np.max(np.abs(design.T @ fit.residuals))), 1e-9)
        self.assertGreater(fit.r_squared, 0.99)
        self.assertEqual(set(fit.to_dict()["coefficients"]), {"const", "a", "b", "c"})

    def test_matches_lstsq(self):
        rng = np.random.default_rng(4)
        X = rng.normal(size=(30, 2))
        y = rng.normal(size=30)
        fit = ols(X, y)
        ref, *_ = np.linalg.lstsq(X, y, rcond=None)
        np.testing.assert_allclose(fit.coefficients, ref, rtol=1e-10)

    def test_rank_deficient(self):
        X = np.column_stack([np.arange(10.0), 2 * np.arange(10.0)])
        with self.assertRaises(NumericError):
            ols(X, np.arange(10.0))

    def test_too_few_rows(self):
        with self.assertRaises(InputError):
            ols([[1.0, 2.0], [3.0, 4.0]], [1.0, 2.0])


class TestDescriptive(unittest.TestCase):
    def test_moments(self):
        m = moments([1.0, 2.0, 3.0, 4.0])
        self.assertAlmostEqual(m.mean, 2.5)
        self.assertAlmostEqual(m.sd, math.sqrt(1.25))
        self.assertAlmostEqual(m.skewness, 0.0)
        self.assertAlmostEqual(m.cv, math.sqrt(1.25) / 2.5)

    def test_constant_sample_has_no_skew(self):
        m = moments([3.0, 3.0, 3.0])
        self.assertEqual(m.sd, 0.0)
        self.assertIsNone(m.skewness)

    def test_entropy(self):
        self.assertAlmostEqual(entropy([1, 1]), math.log(2))
        self.assertAlmostEqual(entropy([5, 0]), 0.0)
        with self.assertRaises(NumericError):
            entropy([0, 0])

    def test_describe_groups_sorted_with_notes(self):
        report = describe_groups({"b": [1.0, 2.0, 4.0, 8.0], "a": [2.0, 2.0, 2.0]})
        self.assertEqual(list(report), ["a", "b"])
        self.assertIsNone(report["a"]["shapiro_p"])
        self.assertIn("note", report["a"])
        self.assertIsNotNone(report["b"]["shapiro_p"])


if __name__ == "__main__":
    unittest.main()
