"""File formats: JSONL record streams, CSV tables, and the vote join.

Record streams are JSON Lines so that a malformed record can be reported
with its line number. The two stream schemas are:

* predictions: {"case_id", "article", "logits": [z0, z1], "gold",
  "alleged", "split", "human": [q0, q1] (optional)}
* votes: {"case_id", "article", "votes_violation", "votes_noviolation",
  "found_violation"}

Class order in predictions is (non-violation, violation); vote records carry
named counts, and :func:`join_votes` converts them into soft labels in the
prediction class order, so q[1] is the share of judges voting violation.

Tabular analysis outputs (entropy, histograms, associations) are plain CSV.
Floats are written with ``repr`` semantics, which round-trips exactly and is
deterministic across runs.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .distributions import SoftLabel, VoteDistribution
from .errors import DuplicateKey, SchemaError
from .metrics import VALID_SPLITS, PredictionRecord

PairKey = tuple[str, int]


@dataclass(frozen=True)
class VoteRecord:
    """Wire form of one extracted vote split."""

    case_id: str
    article: int
    votes_violation: int
    votes_noviolation: int
    found_violation: bool

    @property
    def key(self) -> PairKey:
        return (self.case_id, self.article)

    @property
    def signature(self) -> tuple[int, int, int, bool]:
        """Content identity, comparable with VoteExtraction signatures."""
        return (
            self.article,
            self.votes_violation,
            self.votes_noviolation,
            self.found_violation,
        )

    def distribution(self) -> VoteDistribution:
        return VoteDistribution(self.votes_violation, self.votes_noviolation)


@dataclass(frozen=True)
class ConclusionDoc:
    """One judgment conclusion to be parsed, with its court formation tag."""

    case_id: str
    formation: str
    text: str


def _iter_jsonl(path: str | Path):
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"invalid JSON: {exc.msg}", line=lineno) from exc
            if not isinstance(obj, dict):
                raise SchemaError("each line must be a JSON object", line=lineno)
            yield lineno, obj


def _field(obj: dict, name: str, lineno: int):
    if name not in obj:
        raise SchemaError(f"missing field {name!r}", line=lineno)
    return obj[name]


def _int_field(obj: dict, name: str, lineno: int, minimum: int = 0) -> int:
    value = _field(obj, name, lineno)
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(f"field {name!r} must be an integer", line=lineno)
    if value < minimum:
        raise SchemaError(f"field {name!r} must be >= {minimum}", line=lineno)
    return value


def _bool_field(obj: dict, name: str, lineno: int) -> bool:
    value = _field(obj, name, lineno)
    if not isinstance(value, bool):
        raise SchemaError(f"field {name!r} must be a boolean", line=lineno)
    return value


def _str_field(obj: dict, name: str, lineno: int) -> str:
    value = _field(obj, name, lineno)
    if not isinstance(value, str) or not value:
        raise SchemaError(f"field {name!r} must be a non-empty string", line=lineno)
    return value


def _prob_pair(obj: dict, name: str, lineno: int) -> tuple[float, float]:
    value = _field(obj, name, lineno)
    if (
        not isinstance(value, list)
        or len(value) != 2
        or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    ):
        raise SchemaError(f"field {name!r} must be a list of 2 numbers", line=lineno)
    return (float(value[0]), float(value[1]))


def load_predictions(path: str | Path) -> list[PredictionRecord]:
    """Load and validate a prediction JSONL file.

    Raises :class:`SchemaError` with the offending line number and
    :class:`DuplicateKey` when a (case_id, article) pair repeats.
    """
    records: list[PredictionRecord] = []
    seen: dict[PairKey, int] = {}
    for lineno, obj in _iter_jsonl(path):
        case_id = _str_field(obj, "case_id", lineno)
        article = _int_field(obj, "article", lineno, minimum=1)
        logits = _prob_pair(obj, "logits", lineno)
        if not all(map(math.isfinite, logits)):
            raise SchemaError("logits must be finite", line=lineno)
        gold = _int_field(obj, "gold", lineno)
        if gold not in (0, 1):
            raise SchemaError("field 'gold' must be 0 or 1", line=lineno)
        alleged = _bool_field(obj, "alleged", lineno)
        split = _str_field(obj, "split", lineno)
        if split not in VALID_SPLITS:
            raise SchemaError(
                f"field 'split' must be one of {VALID_SPLITS}", line=lineno
            )
        human = None
        if obj.get("human") is not None:
            pair = _prob_pair(obj, "human", lineno)
            try:
                human = SoftLabel(pair)
            except ValueError as exc:
                raise SchemaError(str(exc), line=lineno) from exc
        key = (case_id, article)
        if key in seen:
            raise DuplicateKey(
                f"duplicate pair {case_id}/article {article} "
                f"(lines {seen[key]} and {lineno})"
            )
        seen[key] = lineno
        records.append(
            PredictionRecord(
                case_id=case_id,
                article=article,
                logits=logits,
                gold=gold,
                alleged=alleged,
                split=split,
                human=human,
            )
        )
    return records


def prediction_to_obj(record: PredictionRecord) -> dict:
    obj = {
        "case_id": record.case_id,
        "article": record.article,
        "logits": list(record.logits),
        "gold": record.gold,
        "alleged": record.alleged,
        "split": record.split,
    }
    if record.human is not None:
        obj["human"] = list(record.human.probs)
    return obj


def write_predictions(
    path: str | Path,
    records: Iterable[PredictionRecord],
    extra: Mapping[PairKey, dict] | None = None,
) -> None:
    """Write predictions as JSONL; ``extra`` merges extra fields per pair."""
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            obj = prediction_to_obj(record)
            if extra and record.key in extra:
                obj.update(extra[record.key])
            handle.write(json.dumps(obj) + "\n")


def load_vote_records(path: str | Path) -> list[VoteRecord]:
    records: list[VoteRecord] = []
    seen: dict[PairKey, int] = {}
    for lineno, obj in _iter_jsonl(path):
        record = VoteRecord(
            case_id=_str_field(obj, "case_id", lineno),
            article=_int_field(obj, "article", lineno, minimum=1),
            votes_violation=_int_field(obj, "votes_violation", lineno),
            votes_noviolation=_int_field(obj, "votes_noviolation", lineno),
            found_violation=_bool_field(obj, "found_violation", lineno),
        )
        if record.votes_violation + record.votes_noviolation < 1:
            raise SchemaError("vote counts sum to zero", line=lineno)
        if record.key in seen:
            raise DuplicateKey(
                f"duplicate pair {record.case_id}/article {record.article} "
                f"(lines {seen[record.key]} and {lineno})"
            )
        seen[record.key] = lineno
        records.append(record)
    return records


def write_vote_records(path: str | Path, records: Iterable[VoteRecord]) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for r in records:
            obj = {
                "case_id": r.case_id,
                "article": r.article,
                "votes_violation": r.votes_violation,
                "votes_noviolation": r.votes_noviolation,
                "found_violation": r.found_violation,
            }
            handle.write(json.dumps(obj) + "\n")


def load_conclusions(path: str | Path) -> list[ConclusionDoc]:
    """Load conclusion documents from JSONL; formation defaults to CHAMBER."""
    docs = []
    for lineno, obj in _iter_jsonl(path):
        docs.append(
            ConclusionDoc(
                case_id=_str_field(obj, "case_id", lineno),
                formation=str(obj.get("formation", "CHAMBER")),
                text=_str_field(obj, "text", lineno),
            )
        )
    return docs


@dataclass(frozen=True)
class JoinReport:
    """Which pairs failed to line up during a vote join."""

    unmatched_predictions: tuple[PairKey, ...]
    unmatched_votes: tuple[PairKey, ...]


def join_votes(
    predictions: Sequence[PredictionRecord], vote_records: Sequence[VoteRecord]
) -> tuple[list[PredictionRecord], JoinReport]:
    """Attach soft labels from vote records to matching predictions.

    Matched predictions get ``human`` = (non-violation share, violation
    share) derived from the counts; unmatched pairs on either side are
    reported, not rejected.
    """
    from dataclasses import replace

    by_key: dict[PairKey, VoteRecord] = {}
    for vote in vote_records:
        if vote.key in by_key:
            raise DuplicateKey(f"duplicate vote pair {vote.key}")
        by_key[vote.key] = vote
    joined = []
    unmatched_preds = []
    matched = set()
    for record in predictions:
        vote = by_key.get(record.key)
        if vote is None:
            unmatched_preds.append(record.key)
            joined.append(record)
            continue
        matched.add(record.key)
        total = vote.votes_violation + vote.votes_noviolation
        human = SoftLabel(
            (vote.votes_noviolation / total, vote.votes_violation / total)
        )
        joined.append(replace(record, human=human))
    unmatched_votes = sorted(k for k in by_key if k not in matched)
    return joined, JoinReport(tuple(unmatched_preds), tuple(unmatched_votes))


def write_entropy_csv(path: str | Path, rows: Iterable[dict]) -> None:
    """Write per-pair entropy rows: case_id, article, entropy, single_dissent."""
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["case_id", "article", "entropy", "single_dissent"])
        for row in rows:
            writer.writerow(
                [
                    row["case_id"],
                    row["article"],
                    repr(float(row["entropy"])),
                    "" if row.get("single_dissent") is None else str(row["single_dissent"]).lower(),
                ]
            )


def read_entropy_csv(path: str | Path) -> dict[PairKey, float]:
    out: dict[PairKey, float] = {}
    with open(path, encoding="utf-8", newline="") as handle:
        for lineno, row in enumerate(csv.DictReader(handle), start=2):
            try:
                key = (row["case_id"], int(row["article"]))
                out[key] = float(row["entropy"])
            except (KeyError, TypeError, ValueError) as exc:
                raise SchemaError(f"bad entropy row: {exc}", line=lineno) from exc
    return out


def read_proxy_csv(path: str | Path) -> dict[str, dict[PairKey, bool]]:
    """Read proxy flags keyed by pair: case_id, article, then 0/1 columns."""
    columns: dict[str, dict[PairKey, bool]] = {}
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        names = [f for f in (reader.fieldnames or []) if f not in ("case_id", "article")]
        if not names:
            raise SchemaError("proxy CSV needs case_id, article, and flag columns")
        for name in names:
            columns[name] = {}
        for lineno, row in enumerate(reader, start=2):
            try:
                key = (row["case_id"], int(row["article"]))
                for name in names:
                    columns[name][key] = row[name].strip() in ("1", "true", "True")
            except (KeyError, TypeError, ValueError) as exc:
                raise SchemaError(f"bad proxy row: {exc}", line=lineno) from exc
    return columns


def write_histogram_csv(path: str | Path, histogram) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["lower", "upper", "count"])
        for lower, upper, count in histogram.rows():
            writer.writerow([repr(lower), repr(upper), count])


def _data_file(name: str):
    return resources.files("splitvote").joinpath("data", name)


def default_articles() -> tuple[int, ...]:
    """The default article allow-list shipped as package data.

    Protocol articles are encoded as protocol*1000 + article, so 1001 stands
    for Article 1 of Protocol No. 1.
    """
    payload = json.loads(_data_file("default_articles.json").read_text("utf-8"))
    return tuple(int(a) for a in payload["articles"])


def load_bundled_corpus() -> tuple[list[ConclusionDoc], list[VoteRecord]]:
    """The synthetic conclusion corpus and its gold extractions."""
    with resources.as_file(_data_file("conclusion_corpus.jsonl")) as p:
        docs = load_conclusions(p)
    with resources.as_file(_data_file("conclusion_gold.jsonl")) as p:
        gold = load_vote_records(p)
    return docs, gold


def bundled_toy_paths() -> tuple[Path, Path]:
    """Filesystem paths of the bundled toy predictions and votes."""
    pred = _data_file("toy_predictions.jsonl")
    votes = _data_file("toy_votes.jsonl")
    with resources.as_file(pred) as p1, resources.as_file(votes) as p2:
        return Path(p1), Path(p2)
