"""Extraction of judge vote splits from judgment conclusion text.

Operative clauses in court conclusions carry the vote information in a small
number of recurring shapes:

    "Holds, by six votes to one, that there has been a violation of
     Article 3 of the Convention"
    "Holds by 4 votes to 3 that Article 6 has not been violated"
    "Holds unanimously that there has been no violation of Article 8"

The first number is always the side of the operative holding, so "by four
votes to three ... no violation" means four judges found no violation.
Unanimous clauses carry no numbers; they resolve against the bench size
(3-judge Committee, 7-judge Chamber, 17-judge Grand Chamber). Matching is
case-insensitive and tolerant of optional commas and arbitrary whitespace,
including line breaks. Counts may be written as digits or as English number
words up to "seventeen".

When an explicit split does not add up to the bench size the extraction is
still returned and an :class:`InconsistentVoteSum` warning is emitted; real
documents occasionally record abstentions and downstream code decides what
to do with such rows.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

from .errors import NoVotePattern, UnknownFormation, UnparsableNumeral


class BenchFormation(Enum):
    """Court formation; the enum value is the number of judges."""

    COMMITTEE = 3
    CHAMBER = 7
    GRAND_CHAMBER = 17

    @property
    def size(self) -> int:
        return self.value


class InconsistentVoteSum(UserWarning):
    """Explicit vote split that does not sum to the bench size."""

    def __init__(self, article: int, votes: tuple[int, int], expected: int):
        self.article = article
        self.votes = votes
        self.expected = expected
        super().__init__(
            f"article {article}: votes {votes[0]}+{votes[1]} != bench size {expected}"
        )


@dataclass(frozen=True)
class VoteExtraction:
    """One parsed holding: article, vote counts, and the outcome held.

    ``found_violation`` reflects the phrasing of the clause (what the
    majority held), not a comparison of the counts; on well-formed text the
    two agree.
    """

    article: int
    votes_violation: int
    votes_noviolation: int
    found_violation: bool
    source_span: tuple[int, int]

    def __post_init__(self) -> None:
        if self.article < 1:
            raise ValueError("article numbers are positive")
        if self.votes_violation < 0 or self.votes_noviolation < 0:
            raise ValueError("vote counts must be non-negative")
        if self.votes_violation + self.votes_noviolation < 1:
            raise ValueError("at least one vote is required")
        lo, hi = self.source_span
        if lo < 0 or hi <= lo:
            raise ValueError("source span must be non-empty and ordered")

    @property
    def signature(self) -> tuple[int, int, int, bool]:
        """Content identity, ignoring where in the text the clause sat."""
        return (
            self.article,
            self.votes_violation,
            self.votes_noviolation,
            self.found_violation,
        )


_NUMBER_WORDS = {
    "zero": 0,
    "one": 1,
    "two": 2,
    "three": 3,
    "four": 4,
    "five": 5,
    "six": 6,
    "seven": 7,
    "eight": 8,
    "nine": 9,
    "ten": 10,
    "eleven": 11,
    "twelve": 12,
    "thirteen": 13,
    "fourteen": 14,
    "fifteen": 15,
    "sixteen": 16,
    "seventeen": 17,
}

_NUM = r"(?:\d{1,2}|" + "|".join(_NUMBER_WORDS) + r")"

_CONCLUSION_RE = re.compile(
    rf"""
    \bholds
    (?:\s*,)?\s*
    (?:
        by\s+(?P<maj>{_NUM})\s+votes?\s+to\s+(?P<min>{_NUM})
      | (?P<unanimous>unanimously)
    )
    (?:\s*,)?\s+
    that\s+
    (?:
        there\s+has\s+been\s+(?P<phrase>a|no)\s+violation\s+of\s+
        article\s+(?P<art_a>[1-9]\d{{0,3}})
        (?:\s+of\s+the\s+convention)?
      |
        article\s+(?P<art_b>[1-9]\d{{0,3}})\s+has\s+
        (?:(?P<negated>not)\s+)?been\s+violated
    )
    """,
    re.IGNORECASE | re.VERBOSE,
)


def normalize_numeral(token: str) -> int:
    """Turn a vote-count token into an integer in [0, 17].

    Accepts digit strings and English number words up to "seventeen"; the
    largest bench has 17 judges, so anything above that is rejected.
    """
    t = token.strip().lower()
    if t.isdigit():
        value = int(t)
        if value <= 17:
            return value
        raise UnparsableNumeral(f"vote count out of range: {token!r}")
    if t in _NUMBER_WORDS:
        return _NUMBER_WORDS[t]
    raise UnparsableNumeral(f"cannot read vote count: {token!r}")


def resolve_bench(metadata_tag: str) -> BenchFormation:
    """Map a court-formation label to its bench, case-insensitively.

    Punctuation and spacing are ignored, so "GRANDCHAMBER", "Grand Chamber"
    and "grand_chamber" all resolve to the 17-judge formation.
    """
    key = re.sub(r"[^a-z]", "", metadata_tag.lower())
    if key == "committee":
        return BenchFormation.COMMITTEE
    if key == "chamber":
        return BenchFormation.CHAMBER
    if key == "grandchamber":
        return BenchFormation.GRAND_CHAMBER
    raise UnknownFormation(f"unrecognized court formation: {metadata_tag!r}")


def parse_conclusion(
    text: str, bench: BenchFormation = BenchFormation.CHAMBER
) -> list[VoteExtraction]:
    """Extract every vote-bearing holding from conclusion text.

    Returns one :class:`VoteExtraction` per matched clause, in document
    order. Unanimous clauses resolve to (bench.size, 0) or (0, bench.size)
    depending on the outcome held. Raises :class:`NoVotePattern` when no
    clause matches at all.
    """
    if not text:
        raise NoVotePattern("empty input text")
    extractions: list[VoteExtraction] = []
    for match in _CONCLUSION_RE.finditer(text):
        if match.group("phrase") is not None:
            found = match.group("phrase").lower() == "a"
            article = int(match.group("art_a"))
        else:
            found = match.group("negated") is None
            article = int(match.group("art_b"))
        if match.group("unanimous"):
            votes = (bench.size, 0) if found else (0, bench.size)
        else:
            try:
                maj = normalize_numeral(match.group("maj"))
                mino = normalize_numeral(match.group("min"))
            except UnparsableNumeral:
                continue
            if maj + mino < 1:
                continue
            votes = (maj, mino) if found else (mino, maj)
            if maj + mino != bench.size:
                warnings.warn(
                    InconsistentVoteSum(article, (maj, mino), bench.size),
                    stacklevel=2,
                )
        extractions.append(
            VoteExtraction(
                article=article,
                votes_violation=votes[0],
                votes_noviolation=votes[1],
                found_violation=found,
                source_span=match.span(),
            )
        )
    if not extractions:
        raise NoVotePattern("no conclusion clause with vote information found")
    return extractions


_WORDS_BY_VALUE = {v: w for w, v in _NUMBER_WORDS.items()}


def render_conclusion(
    extraction: VoteExtraction,
    template: str = "violation-of",
    use_words: bool = False,
    unanimity: bool = False,
) -> str:
    """Render an extraction back into a canonical conclusion clause.

    Inverse of :func:`parse_conclusion` for the documented templates; used
    for round-trip testing and synthetic corpus construction. ``unanimity``
    requires one side of the vote to be zero.
    """
    fv = extraction.found_violation
    maj, mino = (
        (extraction.votes_violation, extraction.votes_noviolation)
        if fv
        else (extraction.votes_noviolation, extraction.votes_violation)
    )
    if unanimity:
        if mino != 0:
            raise ValueError("unanimity rendering needs a zero minority")
        head = "Holds unanimously that"
    elif use_words:
        head = f"Holds, by {_WORDS_BY_VALUE[maj]} votes to {_WORDS_BY_VALUE[mino]}, that"
    else:
        head = f"Holds, by {maj} votes to {mino}, that"
    if template == "violation-of":
        body = (
            f"there has been {'a' if fv else 'no'} violation of "
            f"Article {extraction.article} of the Convention"
        )
    elif template == "has-been-violated":
        body = f"Article {extraction.article} has {'' if fv else 'not '}been violated"
    else:
        raise ValueError(f"unknown template: {template!r}")
    return f"{head} {body}"


@dataclass(frozen=True)
class ExtractionScore:
    """Precision, recall, F1 of extracted holdings against gold ones."""

    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    fn: int


def score_extraction(
    predicted: Iterable[tuple[str, object]],
    gold: Iterable[tuple[str, object]],
) -> ExtractionScore:
    """Score extractions keyed by case id against a gold standard.

    An extraction counts as a true positive only when case id, article, both
    vote counts, and the outcome all match exactly; source spans are ignored.
    Either side may carry :class:`VoteExtraction` instances or anything else
    exposing the same ``signature`` tuple (such as wire-format vote records).
    Duplicate holdings are matched with multiset semantics.
    """
    from collections import Counter

    pred_keys = Counter((cid,) + e.signature for cid, e in predicted)
    gold_keys = Counter((cid,) + e.signature for cid, e in gold)
    tp = sum(min(pred_keys[k], gold_keys[k]) for k in pred_keys)
    n_pred = sum(pred_keys.values())
    n_gold = sum(gold_keys.values())
    fp = n_pred - tp
    fn = n_gold - tp
    precision = tp / n_pred if n_pred else 1.0
    recall = tp / n_gold if n_gold else 1.0
    f1 = (
        2.0 * precision * recall / (precision + recall)
        if precision + recall > 0.0
        else 0.0
    )
    return ExtractionScore(precision, recall, f1, tp, fp, fn)
