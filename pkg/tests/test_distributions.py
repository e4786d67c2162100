"""Entropy, soft labels, and dissent statistics for vote distributions."""

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from splitvote.distributions import (
    MAX_BINARY_ENTROPY,
    Histogram,
    SoftLabel,
    VoteDistribution,
    entropy,
    entropy_from_probs,
    entropy_histogram,
    is_single_dissent,
    soft_label,
)

_counts = st.tuples(
    st.integers(min_value=0, max_value=17), st.integers(min_value=0, max_value=17)
).filter(lambda c: sum(c) >= 1)


class TestEntropy:
    def test_unanimous_is_zero(self):
        assert entropy(VoteDistribution(0, 7)) == 0.0
        assert entropy(VoteDistribution(7, 0)) == 0.0

    def test_single_dissent_chamber(self):
        # -(1/7 ln(1/7) + 6/7 ln(6/7)), the natural-log convention
        assert entropy(VoteDistribution(1, 6)) == pytest.approx(0.410116, abs=1e-3)

    def test_near_even_chamber(self):
        assert entropy(VoteDistribution(3, 4)) == pytest.approx(0.683, abs=1e-3)

    @given(_counts)
    def test_symmetry(self, counts):
        a, b = counts
        assert entropy(VoteDistribution(a, b)) == entropy(VoteDistribution(b, a))

    @pytest.mark.parametrize("k", range(1, 9))
    def test_even_split_is_ln2(self, k):
        assert entropy(VoteDistribution(k, k)) == pytest.approx(
            math.log(2), abs=1e-12
        )

    @given(_counts)
    def test_zero_iff_one_side_empty(self, counts):
        a, b = counts
        h = entropy(VoteDistribution(a, b))
        assert 0.0 <= h <= MAX_BINARY_ENTROPY + 1e-15
        assert (h == 0.0) == (a == 0 or b == 0)


class TestSoftLabel:
    def test_single_dissent(self):
        label = soft_label(VoteDistribution(1, 6))
        assert label.probs == pytest.approx((1 / 7, 6 / 7), abs=1e-15)

    def test_unanimous(self):
        assert soft_label(VoteDistribution(7, 0)).probs == (1.0, 0.0)

    def test_grand_chamber(self):
        label = soft_label(VoteDistribution(8, 9))
        assert label.probs == (8 / 17, 9 / 17)

    @given(_counts)
    def test_scale_invariance(self, counts):
        a, b = counts
        assert soft_label(VoteDistribution(2 * a, 2 * b)) == soft_label(
            VoteDistribution(a, b)
        )

    def test_entropy_from_probs_matches(self):
        d = VoteDistribution(3, 4)
        assert entropy_from_probs(soft_label(d).probs) == entropy(d)

    def test_rejects_non_simplex(self):
        with pytest.raises(ValueError):
            SoftLabel((0.6, 0.5))
        with pytest.raises(ValueError):
            SoftLabel((1.2, -0.2))

    def test_invalid_distribution(self):
        with pytest.raises(ValueError):
            VoteDistribution(0, 0)
        with pytest.raises(ValueError):
            VoteDistribution(-1, 5)


class TestSingleDissent:
    def test_examples(self):
        assert is_single_dissent(VoteDistribution(1, 6))
        assert is_single_dissent(VoteDistribution(16, 1))
        assert not is_single_dissent(VoteDistribution(0, 7))
        assert not is_single_dissent(VoteDistribution(2, 15))


class TestEntropyHistogram:
    def test_all_unanimous(self):
        hist = entropy_histogram([VoteDistribution(0, 7)] * 10, bin_width=0.05)
        assert hist.counts[0] == 10
        assert sum(hist.counts) == 10

    def test_mixed_bins(self):
        dists = [VoteDistribution(1, 6)] * 6 + [VoteDistribution(0, 7)] * 4
        hist = entropy_histogram(dists, bin_width=0.1)
        by_lower = {round(lo, 10): count for lo, _, count in hist.rows()}
        assert by_lower[0.0] == 4
        assert by_lower[0.4] == 6

    def test_empty_input(self):
        hist = entropy_histogram([], bin_width=0.05)
        assert sum(hist.counts) == 0
        assert hist.bins >= 1

    def test_max_entropy_lands_in_last_bin(self):
        hist = entropy_histogram([VoteDistribution(3, 3)], bin_width=0.05)
        assert hist.counts[-1] == 1

    def test_edges_cover_range(self):
        hist = entropy_histogram([], bin_width=0.05)
        assert hist.edges[0] == 0.0
        assert hist.edges[-1] >= MAX_BINARY_ENTROPY


class TestHistogramBinning:
    def test_value_on_bin_edge(self):
        hist = Histogram.from_bins([0.5], 10)
        assert hist.counts[5] == 1

    def test_top_of_range(self):
        hist = Histogram.from_bins([1.0], 10)
        assert hist.counts[9] == 1

    def test_rejects_bad_width(self):
        with pytest.raises(ValueError):
            Histogram.from_width([], 0.0, 0.0, 1.0)
