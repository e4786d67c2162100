"""Welch/Student t-tests, the t CDF backend, and Pearson correlation."""

import math

import numpy as np
import pytest
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st

from splitvote.errors import DegenerateGroup, MisalignedKeys, ZeroVariance
from splitvote.stats import (
    pearson,
    proxy_association,
    regularized_incomplete_beta,
    t_cdf,
    t_test,
    two_sided_p,
)


class TestTCdf:
    def test_symmetry_at_zero(self):
        assert t_cdf(0.0, 5.0) == 0.5

    @pytest.mark.parametrize(
        "t,df",
        [(12.706, 1.0), (2.776, 4.0)],
    )
    def test_classic_critical_values(self, t, df):
        # Standard two-sided 5% critical points of the t table.
        assert two_sided_p(t, df) == pytest.approx(0.05, abs=1e-3)

    @given(
        st.floats(min_value=-30.0, max_value=30.0),
        st.floats(min_value=0.5, max_value=500.0),
    )
    @settings(max_examples=200)
    def test_mirror_symmetry(self, t, df):
        assert t_cdf(-t, df) + t_cdf(t, df) == pytest.approx(1.0, abs=1e-12)

    def test_normal_limit(self):
        for t in (-2.5, -0.7, 0.3, 1.3, 2.1):
            phi = 0.5 * (1.0 + math.erf(t / math.sqrt(2.0)))
            assert t_cdf(t, 1e6) == pytest.approx(phi, abs=1e-4)

    def test_against_reference_distribution(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            t = float(rng.normal(0.0, 4.0))
            df = float(rng.uniform(0.5, 300.0))
            assert t_cdf(t, df) == pytest.approx(
                scipy.stats.t.cdf(t, df), abs=1e-11
            )

    def test_incomplete_beta_against_reference(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            a = float(rng.uniform(0.1, 50.0))
            b = float(rng.uniform(0.1, 50.0))
            x = float(rng.uniform(0.0, 1.0))
            assert regularized_incomplete_beta(a, b, x) == pytest.approx(
                scipy.stats.beta.cdf(x, a, b), abs=1e-11
            )

    def test_invalid_df(self):
        with pytest.raises(ValueError):
            t_cdf(1.0, 0.0)


class TestTTest:
    def test_hand_example(self):
        result = t_test([0.4, 0.5, 0.6], [0.6, 0.7, 0.8])
        assert result.t_value == pytest.approx(-2.449, abs=1e-3)
        assert result.df == pytest.approx(4.0, abs=1e-9)
        assert result.p_value == pytest.approx(0.0705, abs=2e-3)

    def test_identical_groups(self):
        result = t_test([0.1, 0.2, 0.3], [0.1, 0.2, 0.3])
        assert result.t_value == 0.0
        assert result.p_value == 1.0

    def test_swapping_groups_negates_t(self):
        a = [0.4, 0.55, 0.62, 0.7]
        b = [0.5, 0.52, 0.81]
        fwd = t_test(a, b)
        rev = t_test(b, a)
        assert fwd.t_value == -rev.t_value
        assert fwd.p_value == rev.p_value

    def test_location_invariance(self):
        a = [0.41, 0.52, 0.58, 0.7]
        b = [0.52, 0.61, 0.77]
        base = t_test(a, b)
        shifted = t_test([v + 5.0 for v in a], [v + 5.0 for v in b])
        assert shifted.t_value == pytest.approx(base.t_value, abs=1e-10)
        assert shifted.p_value == pytest.approx(base.p_value, abs=1e-10)

    def test_against_reference_welch(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            a = rng.normal(0.0, 1.0, size=int(rng.integers(3, 40)))
            b = rng.normal(0.3, 2.0, size=int(rng.integers(3, 40)))
            ours = t_test(list(a), list(b))
            ref = scipy.stats.ttest_ind(a, b, equal_var=False)
            assert ours.t_value == pytest.approx(ref.statistic, abs=1e-9)
            assert ours.p_value == pytest.approx(ref.pvalue, abs=1e-9)

    def test_against_reference_student(self):
        rng = np.random.default_rng(8)
        a = rng.normal(size=12)
        b = rng.normal(0.5, 1.0, size=20)
        ours = t_test(list(a), list(b), equal_var=True)
        ref = scipy.stats.ttest_ind(a, b, equal_var=True)
        assert ours.t_value == pytest.approx(ref.statistic, abs=1e-9)
        assert ours.p_value == pytest.approx(ref.pvalue, abs=1e-9)
        assert ours.df == len(a) + len(b) - 2

    def test_degenerate_group(self):
        with pytest.raises(DegenerateGroup):
            t_test([1.0], [1.0, 2.0])

    def test_zero_variance_flagged(self):
        result = t_test([0.4, 0.4], [0.7, 0.7])
        assert result.zero_variance
        assert result.p_value == 0.0
        assert math.isinf(result.t_value)


class TestPearson:
    def test_perfect_positive(self):
        result = pearson([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
        assert result.r == 1.0
        assert result.p_value == 0.0

    def test_perfect_negative(self):
        assert pearson([1.0, 2.0, 3.0], [6.0, 4.0, 2.0]).r == -1.0

    def test_hand_example(self):
        result = pearson([1.0, 2.0, 3.0, 4.0], [1.0, 3.0, 2.0, 4.0])
        assert abs(result.r - 0.8) <= 1e-12
        assert result.n == 4

    def test_against_reference(self):
        rng = np.random.default_rng(9)
        for _ in range(40):
            x = rng.normal(size=30)
            y = 0.4 * x + rng.normal(size=30)
            ours = pearson(list(x), list(y))
            ref = scipy.stats.pearsonr(x, y)
            assert ours.r == pytest.approx(ref.statistic, abs=1e-10)
            assert ours.p_value == pytest.approx(ref.pvalue, abs=1e-9)

    @given(
        st.floats(min_value=-9.0, max_value=9.0).filter(lambda a: abs(a) > 1e-3),
        st.floats(min_value=-5.0, max_value=5.0),
    )
    @settings(max_examples=100)
    def test_affine_invariance(self, a, b):
        x = [1.0, 2.5, 3.0, 4.7, 5.1]
        y = [2.0, 1.0, 4.0, 3.5, 5.0]
        base = pearson(x, y).r
        scaled = pearson([a * v + b for v in x], y).r
        assert scaled == pytest.approx(math.copysign(base, a * base), abs=1e-9)

    def test_zero_variance(self):
        with pytest.raises(ZeroVariance):
            pearson([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])

    def test_too_few_points(self):
        with pytest.raises(DegenerateGroup):
            pearson([1.0, 2.0], [2.0, 1.0])

    def test_length_mismatch(self):
        with pytest.raises(MisalignedKeys):
            pearson([1.0, 2.0, 3.0], [1.0, 2.0])


class TestProxyAssociation:
    def test_all_flags_false(self):
        keys = [("c", a) for a in range(1, 6)]
        entropies = {k: 0.1 * i for i, k in enumerate(keys)}
        flags = {k: False for k in keys}
        with pytest.raises(DegenerateGroup):
            proxy_association(entropies, flags)

    def test_split_constant_groups(self):
        entropies = {}
        flags = {}
        for i in range(50):
            entropies[("a", i + 1)] = 0.0
            flags[("a", i + 1)] = False
            entropies[("b", i + 1)] = 0.41
            flags[("b", i + 1)] = True
        assoc = proxy_association(entropies, flags)
        assert assoc.mean_absent == 0.0
        assert assoc.mean_present == pytest.approx(0.41)
        assert assoc.ttest.p_value < 1e-6
        assert abs(assoc.ttest.t_value) > 100 or math.isinf(assoc.ttest.t_value)

    def test_split_noisy_groups(self):
        rng = np.random.default_rng(3)
        entropies = {}
        flags = {}
        for i in range(60):
            entropies[("a", i + 1)] = float(rng.normal(0.1, 0.02))
            flags[("a", i + 1)] = False
            entropies[("b", i + 1)] = float(rng.normal(0.5, 0.02))
            flags[("b", i + 1)] = True
        assoc = proxy_association(entropies, flags)
        assert assoc.n_absent == assoc.n_present == 60
        assert assoc.ttest.t_value < 0  # present group is noisier
        assert assoc.ttest.p_value < 1e-6

    def test_misaligned_keys(self):
        with pytest.raises(MisalignedKeys):
            proxy_association({("a", 1): 0.2}, {("a", 2): True})
