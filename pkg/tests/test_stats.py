import itertools
import math
import random

import numpy as np
import pytest
import scipy.special
import scipy.stats

from expertfind.stats import (
    anova_oneway,
    cohens_kappa,
    f_sf,
    manova_wilks,
    regularized_incomplete_beta,
)


class TestIncompleteBeta:
    def test_against_scipy_grid(self):
        # scipy is the independent oracle here; implementation is our own
        for a in (0.5, 1.0, 2.5, 10.0, 55.0):
            for b in (0.5, 1.0, 3.0, 40.0):
                for x in (0.001, 0.1, 0.37, 0.5, 0.73, 0.9, 0.999):
                    ours = regularized_incomplete_beta(a, b, x)
                    ref = scipy.special.betainc(a, b, x)
                    assert ours == pytest.approx(ref, abs=1e-10)

    def test_bounds(self):
        assert regularized_incomplete_beta(2.0, 3.0, 0.0) == 0.0
        assert regularized_incomplete_beta(2.0, 3.0, 1.0) == 1.0

    def test_f_tail_against_scipy(self):
        for df1 in (1, 2, 5, 24):
            for df2 in (1, 6, 30, 120):
                for f in (0.1, 1.0, 3.0, 5.1433, 50.0):
                    assert f_sf(f, df1, df2) == pytest.approx(
                        scipy.stats.f.sf(f, df1, df2), abs=1e-10
                    )

    def test_f_tail_tabled_critical_value(self):
        # F crit at alpha=0.05 for (2, 6) dof is 5.1433 in standard tables
        assert f_sf(5.1433, 2, 6) == pytest.approx(0.05, abs=5e-5)

    def test_f_tail_edges(self):
        assert f_sf(0.0, 3, 10) == 1.0
        assert f_sf(math.inf, 3, 10) == 0.0


class TestCohensKappa:
    def test_perfect_agreement(self):
        report = cohens_kappa([0, 1, 2, 1], [0, 1, 2, 1])
        assert report.kappa == 1.0
        assert report.observed_agreement == 1.0

    def test_hand_example(self):
        # A = [E,E,N,O], B = [E,N,N,O]: po = 0.75, pe = 0.3125
        report = cohens_kappa([0, 0, 1, 2], [0, 1, 1, 2])
        assert report.observed_agreement == pytest.approx(0.75)
        assert report.expected_agreement == pytest.approx(0.3125)
        assert report.kappa == pytest.approx(0.63636, abs=1e-5)

    def test_accepts_names(self):
        report = cohens_kappa(
            ["expert", "expert", "non_expert", "out_of_scope"],
            ["expert", "non_expert", "non_expert", "oos"],
        )
        assert report.kappa == pytest.approx(0.63636, abs=1e-5)

    def test_random_labels_near_zero(self):
        rng = random.Random(20240517)
        a = [rng.randrange(3) for _ in range(10_000)]
        b = [rng.randrange(3) for _ in range(10_000)]
        assert abs(cohens_kappa(a, b).kappa) < 0.05

    def test_symmetric(self):
        rng = random.Random(7)
        a = [rng.randrange(3) for _ in range(200)]
        b = [rng.randrange(3) for _ in range(200)]
        assert cohens_kappa(a, b).kappa == pytest.approx(cohens_kappa(b, a).kappa)

    def test_relabeling_bijection_invariance(self):
        rng = random.Random(99)
        a = [rng.randrange(3) for _ in range(300)]
        b = [rng.randrange(3) for _ in range(300)]
        base = cohens_kappa(a, b).kappa
        for perm in itertools.permutations(range(3)):
            ka = cohens_kappa([perm[x] for x in a], [perm[x] for x in b]).kappa
            assert ka == pytest.approx(base)

    def test_constant_equal_coders(self):
        report = cohens_kappa([1, 1, 1], [1, 1, 1])
        assert report.kappa == 1.0

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            cohens_kappa([0, 1], [0])

    def test_contingency_sums_to_n(self):
        report = cohens_kappa([0, 1, 2, 0], [2, 1, 0, 0])
        assert report.contingency.sum() == report.n_items == 4


class TestAnova:
    def test_hand_example(self):
        res = anova_oneway([[1, 2, 3], [2, 3, 4], [3, 4, 5]])
        assert res.f_value == 3.0
        assert res.df_between == 2
        assert res.df_within == 6
        assert res.ss_between == pytest.approx(6.0)
        assert res.ss_within == pytest.approx(6.0)

    def test_identical_means_f_zero(self):
        res = anova_oneway([[1.0, 3.0], [2.0, 2.0], [0.0, 4.0]])
        assert res.f_value == 0.0
        assert res.p_value == 1.0

    def test_translation_invariance(self):
        groups = [[1.5, 2.2, 0.9], [3.1, 2.8], [0.2, 0.4, 0.3, 0.6]]
        base = anova_oneway(groups).f_value
        shifted = anova_oneway([[x + 17.25 for x in g] for g in groups]).f_value
        assert shifted == pytest.approx(base, rel=1e-9)

    def test_affine_invariance(self):
        groups = [[1.5, 2.2, 0.9], [3.1, 2.8], [0.2, 0.4, 0.3, 0.6]]
        base = anova_oneway(groups).f_value
        scaled = anova_oneway([[-3.0 * x + 5 for x in g] for g in groups]).f_value
        assert scaled == pytest.approx(base, rel=1e-9)

    def test_p_value_matches_scipy(self):
        rng = np.random.default_rng(3)
        groups = [rng.normal(m, 1.0, size=20) for m in (0.0, 0.4, 0.9)]
        res = anova_oneway(groups)
        ref = scipy.stats.f_oneway(*groups)
        assert res.f_value == pytest.approx(ref.statistic, rel=1e-10)
        assert res.p_value == pytest.approx(ref.pvalue, abs=1e-10)

    def test_degenerate_all_constant(self):
        res = anova_oneway([[2.0, 2.0], [2.0, 2.0]])
        assert res.f_value == 0.0

    def test_validation(self):
        with pytest.raises(ValueError):
            anova_oneway([[1.0, 2.0]])
        with pytest.raises(ValueError):
            anova_oneway([[1.0], []])
        with pytest.raises(ValueError):
            anova_oneway([[1.0], [2.0]])  # n == groups


class TestManova:
    def _toy_groups(self):
        rng = np.random.default_rng(11)
        base = rng.normal(size=(12, 2))
        g1 = base + np.array([0.0, 0.0])
        g2 = rng.normal(size=(10, 2)) + np.array([1.0, 0.5])
        g3 = rng.normal(size=(11, 2)) + np.array([-0.5, 1.5])
        return [g1, g2, g3]

    def test_equal_means_lambda_one(self):
        rng = np.random.default_rng(5)
        shared = rng.normal(size=(15, 3))
        res = manova_wilks([shared.copy(), shared.copy()])
        assert res.wilks_lambda == pytest.approx(1.0)
        assert res.f_approx == pytest.approx(0.0, abs=1e-12)

    def test_one_feature_equals_anova(self):
        rng = np.random.default_rng(8)
        groups = [rng.normal(m, 1.0, size=(14, 1)) for m in (0.0, 0.8, 1.6)]
        res = manova_wilks(groups)
        ref = anova_oneway([g.ravel() for g in groups])
        assert res.f_approx == pytest.approx(ref.f_value, abs=1e-8)
        assert res.p_value == pytest.approx(ref.p_value, abs=1e-8)

    def test_lambda_matches_direct_determinant_ratio(self):
        groups = self._toy_groups()
        res = manova_wilks(groups)
        # independent scatter computation via explicit loops
        allx = np.vstack(groups)
        grand = allx.mean(axis=0)
        w = np.zeros((2, 2))
        b = np.zeros((2, 2))
        for g in groups:
            mu = g.mean(axis=0)
            for row in g:
                d = (row - mu).reshape(-1, 1)
                w += d @ d.T
            dm = (mu - grand).reshape(-1, 1)
            b += len(g) * (dm @ dm.T)
        lam_ref = np.linalg.det(w) / np.linalg.det(w + b)
        assert res.wilks_lambda == pytest.approx(lam_ref, rel=1e-10)

    def test_lambda_at_most_one(self):
        res = manova_wilks(self._toy_groups())
        assert res.wilks_lambda <= 1.0

    def test_translating_a_group_decreases_lambda(self):
        groups = self._toy_groups()
        base = manova_wilks(groups).wilks_lambda
        moved = [g.copy() for g in groups]
        moved[0] = moved[0] + np.array([5.0, -5.0])
        assert manova_wilks(moved).wilks_lambda < base

    def test_singular_within_drops_collinear_column(self):
        groups = self._toy_groups()
        doubled = [np.column_stack([g, g[:, 0]]) for g in groups]  # col 2 = col 0
        with pytest.warns(RuntimeWarning, match="collinear"):
            res = manova_wilks(doubled)
        assert res.dropped_columns == [2]
        clean = manova_wilks(groups)
        assert res.wilks_lambda == pytest.approx(clean.wilks_lambda, rel=1e-9)

    def test_validation(self):
        with pytest.raises(ValueError):
            manova_wilks([np.zeros((5, 2))])
        with pytest.raises(ValueError):
            manova_wilks([np.zeros((2, 2)), np.zeros((2, 2))])
