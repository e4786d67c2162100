"""Judge vote distributions: entropy, soft labels, and dissent statistics.

A :class:`VoteDistribution` records how a bench split between finding a
violation and finding none for one case-article pair. Entropy is measured in
nats (natural logarithm), so a 7-judge bench splitting 1-6 scores about 0.41
and an even split reaches ln 2. The normalized counts double as a soft label,
the human probability vector used for distance calibration and soft-loss
training.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

MAX_BINARY_ENTROPY = math.log(2.0)

_SIMPLEX_TOL = 1e-12


@dataclass(frozen=True)
class VoteDistribution:
    """Vote counts for one case-article pair, violation side first."""

    violation: int
    non_violation: int

    def __post_init__(self) -> None:
        if self.violation < 0 or self.non_violation < 0:
            raise ValueError("vote counts must be non-negative")
        if self.total < 1:
            raise ValueError("a vote distribution needs at least one vote")

    @property
    def counts(self) -> tuple[int, int]:
        return (self.violation, self.non_violation)

    @property
    def total(self) -> int:
        return self.violation + self.non_violation


@dataclass(frozen=True)
class SoftLabel:
    """A point on the binary probability simplex.

    The component order is contextual: :func:`soft_label` produces
    (violation, non-violation) to mirror the vote counts, while prediction
    records store (non-violation, violation) so that index 1 lines up with
    the positive class of the classifier. Conversions happen at the join
    boundary in :mod:`splitvote.dataio`.
    """

    probs: tuple[float, float]

    def __post_init__(self) -> None:
        p = tuple(float(v) for v in self.probs)
        object.__setattr__(self, "probs", p)
        if len(p) != 2:
            raise ValueError("soft labels are binary, expected 2 components")
        if any(not math.isfinite(v) or v < 0.0 or v > 1.0 for v in p):
            raise ValueError(f"soft label components must lie in [0, 1]: {p}")
        if abs(sum(p) - 1.0) > _SIMPLEX_TOL:
            raise ValueError(f"soft label components must sum to 1: {p}")

    def __iter__(self):
        return iter(self.probs)

    def __getitem__(self, idx: int) -> float:
        return self.probs[idx]


def soft_label(dist: VoteDistribution) -> SoftLabel:
    """Normalize vote counts into probabilities, violation share first."""
    total = dist.total
    return SoftLabel((dist.violation / total, dist.non_violation / total))


def entropy(dist: VoteDistribution) -> float:
    """Shannon entropy of the normalized vote counts, in nats.

    H = -sum_i p_i ln p_i with p_i = n_i / total; 0 ln 0 is taken as 0, so a
    unanimous bench scores exactly 0 and an even split exactly ln 2.
    """
    return entropy_from_probs(n / dist.total for n in dist.counts)


def entropy_from_probs(probs: Iterable[float]) -> float:
    """Entropy in nats of an already-normalized probability vector."""
    h = 0.0
    for p in probs:
        if p > 0.0:
            h -= p * math.log(p)
    return h


def is_single_dissent(dist: VoteDistribution) -> bool:
    """True when exactly one judge opposed the majority."""
    return min(dist.counts) == 1


@dataclass(frozen=True)
class Histogram:
    """Equal-width histogram with explicit edges.

    Bins are left-closed, right-open, except the last bin which also includes
    the upper boundary.
    """

    edges: tuple[float, ...]
    counts: tuple[int, ...]

    @property
    def bins(self) -> int:
        return len(self.counts)

    def rows(self) -> list[tuple[float, float, int]]:
        """(lower, upper, count) triples, handy for CSV output."""
        return [
            (self.edges[i], self.edges[i + 1], self.counts[i])
            for i in range(self.bins)
        ]

    @staticmethod
    def from_width(
        values: Iterable[float], width: float, lo: float, hi: float
    ) -> "Histogram":
        """Bin values into [lo, hi] with the given bin width.

        The top of the range is rounded up to a whole number of bins, so any
        value up to and including hi lands in the last bin.
        """
        if width <= 0.0:
            raise ValueError("bin width must be positive")
        nbins = max(1, int(math.ceil((hi - lo) / width - 1e-9)))
        counts = [0] * nbins
        for v in values:
            idx = int((v - lo) / width)
            counts[min(max(idx, 0), nbins - 1)] += 1
        edges = tuple(lo + i * width for i in range(nbins + 1))
        return Histogram(edges, tuple(counts))

    @staticmethod
    def from_bins(
        values: Iterable[float], bins: int, lo: float = 0.0, hi: float = 1.0
    ) -> "Histogram":
        """Bin values into a fixed number of equal bins over [lo, hi]."""
        if bins < 1:
            raise ValueError("need at least one bin")
        span = hi - lo
        counts = [0] * bins
        for v in values:
            idx = int((v - lo) / span * bins)
            counts[min(max(idx, 0), bins - 1)] += 1
        edges = tuple(lo + span * i / bins for i in range(bins + 1))
        return Histogram(edges, tuple(counts))


def entropy_histogram(
    dists: Sequence[VoteDistribution], bin_width: float = 0.05
) -> Histogram:
    """Histogram of vote-distribution entropies over [0, ln 2]."""
    return Histogram.from_width(
        (entropy(d) for d in dists), bin_width, 0.0, MAX_BINARY_ENTROPY
    )
