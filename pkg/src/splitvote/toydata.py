"""Deterministic toy dataset used by tests and the bundled CLI walkthrough.

The generator builds a few hundred case-article pairs with chamber and grand
chamber vote splits (mostly unanimous, a small split-vote share dominated by
single dissents), an intentionally overconfident synthetic classifier, and a
matching null-input predictor. Everything is a pure function of the seed;
the bundled JSONL files under ``splitvote/data`` were written by this module
and can be regenerated with ``python -m splitvote.toydata``.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .dataio import VoteRecord, write_predictions, write_vote_records
from .metrics import PredictionRecord

DEFAULT_SEED = 20607

_ARTICLES = (2, 3, 5, 6, 8, 10, 11, 14)
_CASES_PER_SPLIT = 100
_UNANIMOUS_SHARE = 0.92
_SINGLE_DISSENT_SHARE = 0.6


def _draw_votes(rng: np.random.Generator, size: int) -> tuple[int, int]:
    """(violation, non-violation) counts for one bench."""
    majority_violation = rng.random() < 0.55
    if rng.random() < _UNANIMOUS_SHARE:
        minority = 0
    elif rng.random() < _SINGLE_DISSENT_SHARE:
        minority = 1
    else:
        minority = int(rng.integers(2, size // 2 + 1))
    if majority_violation:
        return (size - minority, minority)
    return (minority, size - minority)


def generate(
    seed: int = DEFAULT_SEED,
) -> tuple[list[PredictionRecord], list[VoteRecord], list[PredictionRecord]]:
    """Build (predictions, votes, null_predictions) for the toy corpus."""
    rng = np.random.default_rng(seed)
    predictions: list[PredictionRecord] = []
    votes: list[VoteRecord] = []
    case_no = 0
    for split in ("train", "dev", "test"):
        for _ in range(_CASES_PER_SPLIT):
            case_no += 1
            case_id = f"toy-{case_no:04d}"
            size = 17 if rng.random() < 0.1 else 7
            n_articles = 2 if rng.random() < 0.6 else 1
            articles = sorted(
                rng.choice(len(_ARTICLES), size=n_articles, replace=False)
            )
            for idx in articles:
                article = _ARTICLES[idx]
                v, nv = _draw_votes(rng, size)
                gold = int(v > nv)
                split_vote = min(v, nv) > 0
                # Split-vote pairs are harder for the synthetic model too.
                signal = 0.6 if split_vote else 1.1
                noise = 1.4 if split_vote else 1.0
                base = signal * (2 * gold - 1) + rng.normal(0.0, noise)
                predictions.append(
                    PredictionRecord(
                        case_id=case_id,
                        article=article,
                        logits=(0.0, 2.5 * base),
                        gold=gold,
                        alleged=True,
                        split=split,
                    )
                )
                votes.append(
                    VoteRecord(
                        case_id=case_id,
                        article=article,
                        votes_violation=v,
                        votes_noviolation=nv,
                        found_violation=gold == 1,
                    )
                )
    # Two vote records without predictions, so joins have something to report.
    votes.append(VoteRecord("toy-extra-1", 3, 7, 0, True))
    votes.append(VoteRecord("toy-extra-2", 6, 1, 6, False))

    rate = sum(r.gold for r in predictions) / len(predictions)
    null_logit = math.log(rate / (1.0 - rate))
    null_predictions = [
        PredictionRecord(
            case_id=r.case_id,
            article=r.article,
            logits=(0.0, null_logit),
            gold=r.gold,
            alleged=r.alleged,
            split=r.split,
        )
        for r in predictions
    ]
    return predictions, votes, null_predictions


def write_toy_files(out_dir: str | Path, seed: int = DEFAULT_SEED) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    predictions, votes, null_predictions = generate(seed)
    write_predictions(out / "toy_predictions.jsonl", predictions)
    write_vote_records(out / "toy_votes.jsonl", votes)
    write_predictions(out / "toy_null_predictions.jsonl", null_predictions)


if __name__ == "__main__":
    write_toy_files(Path(__file__).parent / "data")
