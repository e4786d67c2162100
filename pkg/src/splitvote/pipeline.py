"""End-to-end report generation: join, group, score, calibrate, emit.

The report mirrors the standard result-table shape for this task: one block
per group (all pairs, unanimous pairs, split-vote pairs) holding counts,
micro/macro/hard-macro F1, ECE with its bins, and mean DistCE, computed for
the raw model and optionally again after temperature scaling. Grouping runs
on the human label: a pair is unanimous when its vote entropy is exactly
zero, split-vote otherwise, so the two groups always sum to "all".

Everything is deterministic given the config: records are processed in file
order, aggregation uses canonical ordering, and no timestamps or absolute
output paths enter the emitted files, so two runs over the same inputs are
byte-identical.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from . import calibration, dataio, difficulty, metrics, stats
from .distributions import entropy as vote_entropy
from .distributions import entropy_from_probs, is_single_dissent
from .errors import EmptyInput, MissingHumanLabel
from .metrics import PredictionRecord


@dataclass
class RunConfig:
    """Inputs and knobs for one report run."""

    predictions_path: str
    votes_path: str | None = None
    split: str = "test"
    ece_bins: int = 10
    entropy_bin_width: float = 0.05
    hist_bins: int = 10
    temperature: float | None = None
    grid: calibration.TemperatureGrid | None = None
    objective: str | None = None
    null_predictions_path: str | None = None
    proxies_path: str | None = None
    articles: Sequence[int] | None = field(default_factory=dataio.default_articles)
    seed: int = 0
    out_dir: str = "report_out"

    def echo(self) -> dict:
        """Config as recorded in the report; excludes the output directory
        so that runs into different directories stay byte-identical."""
        return {
            "predictions_path": str(self.predictions_path),
            "votes_path": None if self.votes_path is None else str(self.votes_path),
            "split": self.split,
            "ece_bins": self.ece_bins,
            "entropy_bin_width": self.entropy_bin_width,
            "hist_bins": self.hist_bins,
            "temperature": self.temperature,
            "grid": None
            if self.grid is None
            else {"lo": self.grid.lo, "hi": self.grid.hi, "step": self.grid.step},
            "objective": self.objective,
            "null_predictions_path": None
            if self.null_predictions_path is None
            else str(self.null_predictions_path),
            "proxies_path": None
            if self.proxies_path is None
            else str(self.proxies_path),
            "articles": None if self.articles is None else list(self.articles),
            "seed": self.seed,
        }


def is_split_vote(record: PredictionRecord) -> bool:
    """A pair counts as split-vote when its vote entropy is positive."""
    return entropy_from_probs(record.human.probs) > 0.0


def _group_block(records: list[PredictionRecord], ece_bins: int) -> dict:
    f1 = metrics.f1_suite(records)
    ece_report = metrics.ece(records, ece_bins)
    return {
        "count": len(records),
        "micro_f1": f1.micro_f1,
        "macro_f1": f1.macro_f1,
        "hard_macro_f1": f1.hard_macro_f1,
        "ece": ece_report.ece,
        "mean_dist_ce": metrics.mean_dist_ce(records),
        "ece_bins": [
            {
                "lower": b.lower,
                "upper": b.upper,
                "count": b.count,
                "mean_confidence": b.mean_confidence,
                "accuracy": b.accuracy,
            }
            for b in ece_report.bins
        ],
    }


def _pairs_rows(records: list[PredictionRecord]) -> list[list]:
    rows = []
    for r in records:
        p = metrics.softmax(r.logits)
        q = r.human
        rows.append(
            [
                r.case_id,
                r.article,
                r.split,
                "split_vote" if is_split_vote(r) else "unanimous",
                r.gold,
                metrics.predicted_class(r),
                str(r.alleged).lower(),
                repr(max(p)),
                int(metrics.predicted_class(r) == r.gold),
                repr(p[1]),
                repr(q[1]),
                repr(metrics.dist_ce(q, p)),
                repr(entropy_from_probs(q.probs)),
            ]
        )
    return rows


def _write_pairs_csv(path: Path, records: list[PredictionRecord]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(
            [
                "case_id",
                "article",
                "split",
                "group",
                "gold",
                "pred",
                "alleged",
                "confidence",
                "correct",
                "p_violation",
                "q_violation",
                "dist_ce",
                "entropy",
            ]
        )
        writer.writerows(_pairs_rows(records))


def _variant_outputs(
    records: list[PredictionRecord],
    config: RunConfig,
    out: Path,
    suffix: str,
) -> dict:
    unanimous = [r for r in records if not is_split_vote(r)]
    split_vote = [r for r in records if is_split_vote(r)]
    block = {
        "all": _group_block(records, config.ece_bins),
        "unanimous": _group_block(unanimous, config.ece_bins)
        if unanimous
        else {"count": 0},
        "split_vote": _group_block(split_vote, config.ece_bins)
        if split_vote
        else {"count": 0},
    }
    hists = metrics.confidence_histogram(records, config.hist_bins)
    dataio.write_histogram_csv(out / f"hist_model_prob{suffix}.csv", hists.model)
    dataio.write_histogram_csv(out / f"hist_dist_ce{suffix}.csv", hists.dist_ce)
    if not suffix:
        dataio.write_histogram_csv(out / "hist_human_prob.csv", hists.human)
    _write_pairs_csv(out / f"pairs{suffix}.csv", records)
    return block


def _pvi_section(
    records: list[PredictionRecord], config: RunConfig, out: Path
) -> dict:
    null_records = dataio.load_predictions(config.null_predictions_path)
    null_by_key = {r.key: r for r in null_records}
    missing = [r.key for r in records if r.key not in null_by_key]
    if missing:
        from .errors import MisalignedKeys

        raise MisalignedKeys(
            f"null predictions missing {len(missing)} pairs, e.g. {missing[:3]}"
        )
    pvi_records = []
    for r in records:
        p_cond = max(metrics.softmax(r.logits)[r.gold], 1e-12)
        nr = null_by_key[r.key]
        p_null = max(metrics.softmax(nr.logits)[r.gold], 1e-12)
        pvi_records.append(
            difficulty.PviRecord.from_probs(r.case_id, r.article, p_cond, p_null)
        )
    with open(out / "pvi.csv", "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["case_id", "article", "p_cond", "p_null", "pvi"])
        for pr in pvi_records:
            writer.writerow(
                [pr.case_id, pr.article, repr(pr.p_cond), repr(pr.p_null), repr(pr.pvi)]
            )
    split_keys = {r.key for r in records if is_split_vote(r)}
    group_report = difficulty.dataset_pvi(
        pvi_records, lambda pr: pr.key in split_keys
    )
    section = {
        "sign_convention": "log2(p_cond) - log2(p_null); higher means easier",
        "n_unanimous": group_report.n_0,
        "n_split_vote": group_report.n_1,
        "mean_pvi_unanimous": group_report.mean_0,
        "mean_pvi_split_vote": group_report.mean_1,
        "t_value": group_report.ttest.t_value,
        "df": group_report.ttest.df,
        "p_value": group_report.ttest.p_value,
    }
    sv_records = [pr for pr in pvi_records if pr.key in split_keys]
    entropies = {
        r.key: entropy_from_probs(r.human.probs) for r in records if is_split_vote(r)
    }
    if len(sv_records) >= 3 and len({entropies[p.key] for p in sv_records}) > 1:
        corr = difficulty.pvi_entropy_correlation(sv_records, entropies)
        section["entropy_correlation"] = {
            "r": corr.r,
            "p_value": corr.p_value,
            "n": corr.n,
        }
    return section


def _assoc_section(
    records: list[PredictionRecord], config: RunConfig, out: Path
) -> dict:
    proxies = dataio.read_proxy_csv(config.proxies_path)
    entropies = {r.key: entropy_from_probs(r.human.probs) for r in records}
    rows = []
    for name in sorted(proxies):
        flags = {k: v for k, v in proxies[name].items() if k in entropies}
        covered = {k: entropies[k] for k in flags}
        assoc = stats.proxy_association(covered, flags)
        rows.append(
            {
                "proxy": name,
                "n_absent": assoc.n_absent,
                "n_present": assoc.n_present,
                "mean_absent": assoc.mean_absent,
                "mean_present": assoc.mean_present,
                "t_value": assoc.ttest.t_value,
                "df": assoc.ttest.df,
                "p_value": assoc.ttest.p_value,
            }
        )
    with open(out / "assoc.csv", "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(
            [
                "proxy",
                "n_absent",
                "n_present",
                "mean_absent",
                "mean_present",
                "t_value",
                "df",
                "p_value",
            ]
        )
        for row in rows:
            writer.writerow(
                [
                    row["proxy"],
                    row["n_absent"],
                    row["n_present"],
                    repr(row["mean_absent"]),
                    repr(row["mean_present"]),
                    repr(row["t_value"]),
                    repr(row["df"]),
                    repr(row["p_value"]),
                ]
            )
    return {"rows": rows}


def run_pipeline(config: RunConfig) -> dict:
    """Run the full report and write its files under config.out_dir.

    Returns the report dictionary (the same object serialized to
    report.json).
    """
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    records = dataio.load_predictions(config.predictions_path)
    join_info = None
    votes = None
    if config.votes_path is not None:
        votes = dataio.load_vote_records(config.votes_path)
        records, join_report = dataio.join_votes(records, votes)
        join_info = {
            "unmatched_predictions": [list(k) for k in join_report.unmatched_predictions],
            "unmatched_votes": [list(k) for k in join_report.unmatched_votes],
        }

    selected = [r for r in records if r.split == config.split]
    if config.articles is not None:
        allowed = set(config.articles)
        selected = [r for r in selected if r.article in allowed]
    if not selected:
        raise EmptyInput(
            f"no records in split {config.split!r} after article filtering"
        )
    labelled = [r for r in selected if r.human is not None]
    dropped = len(selected) - len(labelled)
    if not labelled:
        raise MissingHumanLabel(
            "no record in the selected split carries judge votes; "
            "supply --votes or inline human labels"
        )

    # Entropy table: exact vote counts when available, soft labels otherwise.
    if votes is not None:
        keys = {r.key for r in labelled}
        rows = [
            {
                "case_id": v.case_id,
                "article": v.article,
                "entropy": vote_entropy(v.distribution()),
                "single_dissent": is_single_dissent(v.distribution()),
            }
            for v in votes
            if v.key in keys
        ]
    else:
        rows = [
            {
                "case_id": r.case_id,
                "article": r.article,
                "entropy": entropy_from_probs(r.human.probs),
                "single_dissent": None,
            }
            for r in labelled
        ]
    dataio.write_entropy_csv(out / "entropy.csv", rows)

    report: dict = {
        "config": config.echo(),
        "split": config.split,
        "n_selected": len(selected),
        "n_labelled": len(labelled),
        "n_without_votes": dropped,
    }
    if join_info is not None:
        report["join"] = join_info

    report["groups"] = _variant_outputs(labelled, config, out, "")

    t = config.temperature
    fitted = None
    if t is None and config.grid is not None:
        dev = [r for r in records if r.split == "dev"]
        if not dev:
            raise EmptyInput("temperature fitting requested but no dev records")
        fitted = calibration.fit_temperature(
            dev, config.objective or "nll", config.grid, config.ece_bins
        )
        t = fitted.t
    if t is not None:
        scaled = calibration.scale_records(labelled, t)
        report["temperature"] = {
            "t": t,
            "objective": None if fitted is None else fitted.objective,
            "dev_objective_value": None if fitted is None else fitted.dev_objective_value,
        }
        report["groups_temperature_scaled"] = _variant_outputs(
            scaled, config, out, "_temperature_scaled"
        )

    if config.null_predictions_path is not None:
        report["pvi"] = _pvi_section(labelled, config, out)
    if config.proxies_path is not None:
        report["associations"] = _assoc_section(labelled, config, out)

    (out / "report.json").write_text(
        json.dumps(report, indent=2) + "\n", encoding="utf-8"
    )
    return report
