"""Per-instance difficulty scoring from paired prediction sources.

The score compares two probability estimates of the gold class for the same
pair: p_cond from a model that saw the input, and p_null from a model fit on
the label distribution alone (empty input). The pointwise information gain

    PVI = log2(p_cond) - log2(p_null)    [bits]

is positive when the input helped and negative when it misled, so higher
means easier. Group comparisons (for example unanimous vs split-vote pairs)
reduce to mean PVI per group plus an independent t-test, and alignment with
human disagreement is measured by Pearson correlation against the entropy of
the judges' vote distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from .errors import DegenerateGroup, MisalignedKeys
from .stats import CorrResult, TTestResult, pearson, t_test

_PROB_FLOOR = 1e-12


def pvi(p_cond: float, p_null: float) -> float:
    """Information gain of the conditioned model over the null model, in bits.

    Both probabilities are clamped to [1e-12, 1] before the logarithms.
    """
    p_cond = min(max(p_cond, _PROB_FLOOR), 1.0)
    p_null = min(max(p_null, _PROB_FLOOR), 1.0)
    return math.log2(p_cond) - math.log2(p_null)


@dataclass(frozen=True)
class PviRecord:
    """Conditioned and null gold-class probabilities for one pair."""

    case_id: str
    article: int
    p_cond: float
    p_null: float
    pvi: float

    def __post_init__(self) -> None:
        if not 0.0 < self.p_cond <= 1.0 or not 0.0 < self.p_null <= 1.0:
            raise ValueError("probabilities must lie in (0, 1]")
        if abs(self.pvi - pvi(self.p_cond, self.p_null)) > 1e-12:
            raise ValueError(
                f"stored pvi {self.pvi} disagrees with recomputation from "
                f"p_cond={self.p_cond}, p_null={self.p_null}"
            )

    @property
    def key(self) -> tuple[str, int]:
        return (self.case_id, self.article)

    @staticmethod
    def from_probs(
        case_id: str, article: int, p_cond: float, p_null: float
    ) -> "PviRecord":
        return PviRecord(case_id, article, p_cond, p_null, pvi(p_cond, p_null))


@dataclass(frozen=True)
class GroupDifficultyReport:
    """Mean difficulty per group with an independent t-test between them.

    Group 1 collects the records the predicate selected, group 0 the rest;
    means mirror the t-test's argument order (group 0 first).
    """

    n_0: int
    n_1: int
    mean_0: float
    mean_1: float
    ttest: TTestResult


def dataset_pvi(
    records: Sequence[PviRecord], grouping: Callable[[PviRecord], bool]
) -> GroupDifficultyReport:
    """Split records by a predicate and compare mean PVI between the parts."""
    group_0 = [r.pvi for r in records if not grouping(r)]
    group_1 = [r.pvi for r in records if grouping(r)]
    if len(group_0) < 2 or len(group_1) < 2:
        raise DegenerateGroup(
            f"need at least 2 records per group, got {len(group_0)} and {len(group_1)}"
        )
    result = t_test(group_0, group_1)
    return GroupDifficultyReport(
        n_0=len(group_0),
        n_1=len(group_1),
        mean_0=result.mean_0,
        mean_1=result.mean_1,
        ttest=result,
    )


def pvi_entropy_correlation(
    records: Sequence[PviRecord],
    entropies: Mapping[tuple[str, int], float] | Sequence[float],
) -> CorrResult:
    """Pearson correlation between PVI scores and vote-distribution entropy.

    ``entropies`` is either a mapping keyed by (case_id, article) or a
    sequence already aligned with the records; misaligned keys or lengths
    raise :class:`MisalignedKeys`.
    """
    values = [r.pvi for r in records]
    if isinstance(entropies, Mapping):
        missing = [r.key for r in records if r.key not in entropies]
        if missing:
            raise MisalignedKeys(
                f"no entropy for {len(missing)} pairs, e.g. {missing[:3]}"
            )
        aligned = [entropies[r.key] for r in records]
    else:
        if len(entropies) != len(records):
            raise MisalignedKeys(
                f"{len(records)} records vs {len(entropies)} entropies"
            )
        aligned = list(entropies)
    return pearson(values, aligned)
