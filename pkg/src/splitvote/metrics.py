"""Classification and calibration metrics over case-article predictions.

All metrics operate on :class:`PredictionRecord` instances, one per
case-article pair. The class convention throughout is

    index 0 = non-violation, index 1 = violation (the positive class),

for logits, probabilities, and attached human soft labels alike; argmax ties
break toward class 0. Three metric families live here:

* F1 suite: micro over pooled counts, macro over per-article F1, and the
  hard-macro variant that restricts each article's pool to pairs where the
  article was actually alleged, leaving a smaller set of harder negatives.
* ECE: expected calibration error, the bin-weighted mean absolute gap
  between confidence and accuracy over M equal-width bins on (0, 1].
* DistCE: total variation distance between the model's predictive
  distribution and the judges' vote distribution, 0.5 * ||q - p||_1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .distributions import Histogram, SoftLabel
from .errors import EmptyInput, MissingHumanLabel

VALID_SPLITS = ("train", "dev", "test")


@dataclass(frozen=True)
class PredictionRecord:
    """One case-article pair with model scores and optional human label.

    ``logits`` are pre-softmax scores in class order (non-violation,
    violation); ``gold`` is 1 when the court found a violation. ``human``,
    when present, holds the normalized judge votes in the same class order.
    """

    case_id: str
    article: int
    logits: tuple[float, float]
    gold: int
    alleged: bool
    split: str
    human: SoftLabel | None = None

    def __post_init__(self) -> None:
        logits = tuple(float(z) for z in self.logits)
        object.__setattr__(self, "logits", logits)
        if len(logits) != 2 or not all(map(math.isfinite, logits)):
            raise ValueError(f"logits must be a finite 2-vector: {self.logits}")
        if self.gold not in (0, 1):
            raise ValueError(f"gold must be 0 or 1, got {self.gold!r}")
        if self.article < 1:
            raise ValueError("article numbers are positive")
        if self.split not in VALID_SPLITS:
            raise ValueError(f"split must be one of {VALID_SPLITS}: {self.split!r}")

    @property
    def key(self) -> tuple[str, int]:
        return (self.case_id, self.article)


def softmax(logits: Sequence[float]) -> tuple[float, float]:
    """Numerically stable two-class softmax."""
    a, b = logits
    m = a if a > b else b
    ea = math.exp(a - m)
    eb = math.exp(b - m)
    s = ea + eb
    return (ea / s, eb / s)


def predicted_class(record: PredictionRecord) -> int:
    """Argmax over logits with ties broken toward class 0 (non-violation)."""
    return 1 if record.logits[1] > record.logits[0] else 0


def confidence(record: PredictionRecord) -> float:
    """Probability the model assigns to its own predicted class."""
    return max(softmax(record.logits))


@dataclass(frozen=True)
class EceBin:
    """One confidence bin (lower, upper], with its occupancy statistics."""

    lower: float
    upper: float
    count: int
    mean_confidence: float | None
    accuracy: float | None


@dataclass(frozen=True)
class EceReport:
    """Expected calibration error plus the per-bin data behind it."""

    ece: float
    bins: tuple[EceBin, ...]
    n: int
    m: int


def ece(records: Sequence[PredictionRecord], bins: int = 10) -> EceReport:
    """Expected calibration error over M equal-width bins on (0, 1].

    ECE = sum_m (|B_m| / N) * |acc(B_m) - conf(B_m)| where confidence is the
    max softmax probability and a record is accurate when its argmax equals
    the gold class. The scalar is computed from the emitted bins, so it is
    reproducible from the report to the last bit.
    """
    if not records:
        raise EmptyInput("cannot compute ECE over zero records")
    if bins < 1:
        raise ValueError("need at least one bin")
    # Exact per-bin summation keeps the result invariant under any
    # permutation of the input records.
    confidences: list[list[float]] = [[] for _ in range(bins)]
    correct = [0] * bins
    for r in records:
        c = confidence(r)
        idx = min(max(math.ceil(c * bins) - 1, 0), bins - 1)
        confidences[idx].append(c)
        correct[idx] += int(predicted_class(r) == r.gold)
    n = len(records)
    out = []
    total = 0.0
    for i in range(bins):
        lower, upper = i / bins, (i + 1) / bins
        count = len(confidences[i])
        if count == 0:
            out.append(EceBin(lower, upper, 0, None, None))
            continue
        mean_conf = math.fsum(confidences[i]) / count
        acc = correct[i] / count
        out.append(EceBin(lower, upper, count, mean_conf, acc))
        total += count / n * abs(acc - mean_conf)
    return EceReport(total, tuple(out), n, bins)


def ece_from_bins(report: EceReport) -> float:
    """Recompute the ECE scalar from a report's bins (consistency check)."""
    return math.fsum(
        b.count / report.n * abs(b.accuracy - b.mean_confidence)
        for b in report.bins
        if b.count
    )


def dist_ce(q: SoftLabel | Sequence[float], p: Sequence[float]) -> float:
    """Distance calibration error: total variation between q and p.

    DistCE = 0.5 * sum_c |q_c - p_c|, a metric on the binary simplex with
    range [0, 1]. Both arguments must already sum to 1.
    """
    q0, q1 = q
    p0, p1 = p
    return 0.5 * (abs(q0 - p0) + abs(q1 - p1))


def mean_dist_ce(records: Sequence[PredictionRecord]) -> float:
    """Arithmetic mean of per-record DistCE, in [0, 1].

    Reports elsewhere may scale this by 100 for display; the raw value stays
    in probability units.
    """
    if not records:
        raise EmptyInput("cannot average DistCE over zero records")
    values = []
    for r in records:
        if r.human is None:
            raise MissingHumanLabel(
                f"record {r.case_id}/article {r.article} has no judge votes"
            )
        values.append(dist_ce(r.human, softmax(r.logits)))
    return math.fsum(values) / len(values)


@dataclass(frozen=True)
class ArticleCounts:
    """Per-article confusion counts; degenerate when the article has no
    gold-positive and no predicted-positive pair in its pool."""

    tp: int
    fp: int
    fn: int
    f1: float
    degenerate: bool


@dataclass(frozen=True)
class F1Report:
    micro_f1: float
    macro_f1: float
    hard_macro_f1: float
    per_article: dict[int, ArticleCounts] = field(default_factory=dict)
    per_article_alleged: dict[int, ArticleCounts] = field(default_factory=dict)


def _f1(tp: int, fp: int, fn: int) -> float:
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def _per_article(records: Iterable[PredictionRecord]) -> dict[int, ArticleCounts]:
    raw: dict[int, list[int]] = {}
    for r in records:
        tp_fp_fn = raw.setdefault(r.article, [0, 0, 0])
        pred = predicted_class(r)
        if pred == 1 and r.gold == 1:
            tp_fp_fn[0] += 1
        elif pred == 1 and r.gold == 0:
            tp_fp_fn[1] += 1
        elif pred == 0 and r.gold == 1:
            tp_fp_fn[2] += 1
    return {
        a: ArticleCounts(tp, fp, fn, _f1(tp, fp, fn), tp + fp + fn == 0)
        for a, (tp, fp, fn) in sorted(raw.items())
    }


def _macro(per_article: dict[int, ArticleCounts]) -> float:
    scores = [c.f1 for c in per_article.values() if not c.degenerate]
    return math.fsum(scores) / len(scores) if scores else 0.0


def f1_suite(records: Sequence[PredictionRecord]) -> F1Report:
    """Micro, macro, and hard-macro F1 with violation as the positive class.

    Micro pools true/false positives and false negatives over every record.
    Macro averages per-article F1 over articles that have at least one
    gold-positive or predicted-positive pair; articles without any are
    recorded with F1 = 0 and flagged degenerate. Hard-macro repeats the
    per-article computation on the alleged pairs only, which can drop
    false positives raised on never-alleged pairs but can never change an
    article's true positives on well-formed data.
    """
    if not records:
        raise EmptyInput("cannot score zero records")
    tp = fp = fn = 0
    for r in records:
        pred = predicted_class(r)
        if pred == 1 and r.gold == 1:
            tp += 1
        elif pred == 1 and r.gold == 0:
            fp += 1
        elif pred == 0 and r.gold == 1:
            fn += 1
    per_article = _per_article(records)
    per_alleged = _per_article(r for r in records if r.alleged)
    return F1Report(
        micro_f1=_f1(tp, fp, fn),
        macro_f1=_macro(per_article),
        hard_macro_f1=_macro(per_alleged),
        per_article=per_article,
        per_article_alleged=per_alleged,
    )


@dataclass(frozen=True)
class PairedHistograms:
    """Aligned distribution data for model-vs-human comparison plots.

    ``model`` bins the model's violation probability, ``human`` the judges'
    violation share, and ``dist_ce`` the per-pair distance between the two.
    """

    model: Histogram
    human: Histogram
    dist_ce: Histogram


def confidence_histogram(
    records: Sequence[PredictionRecord], bins: int = 10
) -> PairedHistograms:
    """Histograms of model P(violation), human q(violation), and DistCE."""
    model_p = []
    human_q = []
    distances = []
    for r in records:
        if r.human is None:
            raise MissingHumanLabel(
                f"record {r.case_id}/article {r.article} has no judge votes"
            )
        p = softmax(r.logits)
        model_p.append(p[1])
        human_q.append(r.human[1])
        distances.append(dist_ce(r.human, p))
    return PairedHistograms(
        model=Histogram.from_bins(model_p, bins),
        human=Histogram.from_bins(human_q, bins),
        dist_ce=Histogram.from_bins(distances, bins),
    )
