"""Command-line surface tying the modules into one pipeline.

Subcommands mirror the processing stages: extract-votes, entropy, metrics,
calibrate, apply, pvi, train-soft, assoc, and report. Exit codes: 0 on
success, 1 on a validation error, 2 on an I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from . import calibration, dataio, difficulty, metrics, pipeline, softtrain, stats
from .distributions import entropy, entropy_histogram, is_single_dissent
from .errors import SplitVoteError
from .votes import InconsistentVoteSum, parse_conclusion, resolve_bench


def _load_input_docs(paths: list[str], formation: str) -> list[dataio.ConclusionDoc]:
    """One JSONL file, or any number of plain-text files (one doc each)."""
    if len(paths) == 1 and paths[0].endswith(".jsonl"):
        return dataio.load_conclusions(paths[0])
    return [
        dataio.ConclusionDoc(
            case_id=Path(p).stem,
            formation=formation,
            text=Path(p).read_text(encoding="utf-8"),
        )
        for p in paths
    ]


def _cmd_extract_votes(args) -> None:
    docs = _load_input_docs(args.input, args.formation)
    records = []
    issues = []
    for doc in docs:
        bench = resolve_bench(doc.formation)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", InconsistentVoteSum)
            try:
                extractions = parse_conclusion(doc.text, bench)
            except SplitVoteError as exc:
                issues.append({"case_id": doc.case_id, "problem": str(exc)})
                continue
            for w in caught:
                if isinstance(w.message, InconsistentVoteSum):
                    issues.append(
                        {"case_id": doc.case_id, "problem": str(w.message)}
                    )
        for e in extractions:
            records.append(
                dataio.VoteRecord(
                    case_id=doc.case_id,
                    article=e.article,
                    votes_violation=e.votes_violation,
                    votes_noviolation=e.votes_noviolation,
                    found_violation=e.found_violation,
                )
            )
    dataio.write_vote_records(args.output, records)
    if args.issues:
        with open(args.issues, "w", encoding="utf-8") as handle:
            for issue in issues:
                handle.write(json.dumps(issue) + "\n")
    print(f"extracted {len(records)} vote records from {len(docs)} documents "
          f"({len(issues)} issues)")


def _cmd_entropy(args) -> None:
    votes = dataio.load_vote_records(args.votes)
    rows = [
        {
            "case_id": v.case_id,
            "article": v.article,
            "entropy": entropy(v.distribution()),
            "single_dissent": is_single_dissent(v.distribution()),
        }
        for v in votes
    ]
    dataio.write_entropy_csv(args.output, rows)
    if args.histogram:
        hist = entropy_histogram([v.distribution() for v in votes], args.bin_width)
        dataio.write_histogram_csv(args.histogram, hist)
    print(f"wrote entropy for {len(rows)} pairs")


def _load_for_metrics(args):
    records = dataio.load_predictions(args.predictions)
    if getattr(args, "votes", None):
        records, _ = dataio.join_votes(records, dataio.load_vote_records(args.votes))
    if getattr(args, "split", None) and args.split != "all":
        records = [r for r in records if r.split == args.split]
    return records


def _article_table(per_article) -> dict:
    return {
        str(article): {
            "tp": c.tp, "fp": c.fp, "fn": c.fn, "f1": c.f1,
            "degenerate": c.degenerate,
        }
        for article, c in per_article.items()
    }


def _cmd_metrics(args) -> None:
    records = _load_for_metrics(args)
    f1 = metrics.f1_suite(records)
    ece_report = metrics.ece(records, args.bins)
    payload = {
        "count": len(records),
        "micro_f1": f1.micro_f1,
        "macro_f1": f1.macro_f1,
        "hard_macro_f1": f1.hard_macro_f1,
        "ece": ece_report.ece,
    }
    have_human = all(r.human is not None for r in records)
    if have_human:
        payload["mean_dist_ce"] = metrics.mean_dist_ce(records)
    payload["per_article"] = _article_table(f1.per_article)
    payload["per_article_alleged"] = _article_table(f1.per_article_alleged)
    payload["ece_bins"] = [
        {
            "lower": b.lower,
            "upper": b.upper,
            "count": b.count,
            "mean_confidence": b.mean_confidence,
            "accuracy": b.accuracy,
        }
        for b in ece_report.bins
    ]
    Path(args.output).write_text(json.dumps(payload, indent=2) + "\n", "utf-8")
    if args.hist_dir and have_human:
        hist_dir = Path(args.hist_dir)
        hist_dir.mkdir(parents=True, exist_ok=True)
        hists = metrics.confidence_histogram(records, args.bins)
        dataio.write_histogram_csv(hist_dir / "hist_model_prob.csv", hists.model)
        dataio.write_histogram_csv(hist_dir / "hist_human_prob.csv", hists.human)
        dataio.write_histogram_csv(hist_dir / "hist_dist_ce.csv", hists.dist_ce)
    print(f"scored {len(records)} records -> {args.output}")


def _cmd_calibrate(args) -> None:
    records = dataio.load_predictions(args.dev)
    grid = calibration.TemperatureGrid.parse(args.grid)
    fitted = calibration.fit_temperature(records, args.objective, grid, args.bins)
    payload = {
        "t": fitted.t,
        "objective": fitted.objective,
        "dev_objective_value": fitted.dev_objective_value,
        "grid": {"lo": grid.lo, "hi": grid.hi, "step": grid.step},
        "n_dev": len(records),
    }
    Path(args.output).write_text(json.dumps(payload, indent=2) + "\n", "utf-8")
    print(f"fitted temperature {fitted.t:g} ({fitted.objective}) -> {args.output}")


def _cmd_apply(args) -> None:
    records = dataio.load_predictions(args.predictions)
    extra = {
        r.key: {
            "probs": list(calibration.apply_temperature(r.logits, args.t)),
            "temperature": args.t,
        }
        for r in records
    }
    dataio.write_predictions(args.output, records, extra)
    print(f"scaled {len(records)} records at t={args.t:g} -> {args.output}")


def _cmd_pvi(args) -> None:
    cond = dataio.load_predictions(args.cond)
    null = dataio.load_predictions(args.null)
    null_by_key = {r.key: r for r in null}
    missing = [r.key for r in cond if r.key not in null_by_key]
    if missing:
        from .errors import MisalignedKeys

        raise MisalignedKeys(
            f"null predictions missing {len(missing)} pairs, e.g. {missing[:3]}"
        )
    records = []
    for r in cond:
        p_cond = max(metrics.softmax(r.logits)[r.gold], 1e-12)
        p_null = max(metrics.softmax(null_by_key[r.key].logits)[r.gold], 1e-12)
        records.append(
            difficulty.PviRecord.from_probs(r.case_id, r.article, p_cond, p_null)
        )
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "pvi.csv", "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["case_id", "article", "p_cond", "p_null", "pvi"])
        for pr in records:
            writer.writerow(
                [pr.case_id, pr.article, repr(pr.p_cond), repr(pr.p_null), repr(pr.pvi)]
            )
    payload: dict = {
        "sign_convention": "log2(p_cond) - log2(p_null); higher means easier",
        "n": len(records),
    }
    if args.entropy:
        entropies = dataio.read_entropy_csv(args.entropy)
        uncovered = [r.key for r in records if r.key not in entropies]
        if uncovered:
            from .errors import MisalignedKeys

            raise MisalignedKeys(
                f"entropy table missing {len(uncovered)} pairs, "
                f"e.g. {uncovered[:3]}"
            )
        split_keys = {k for k, h in entropies.items() if h > 0.0}
        group = difficulty.dataset_pvi(records, lambda pr: pr.key in split_keys)
        payload["groups"] = {
            "n_unanimous": group.n_0,
            "n_split_vote": group.n_1,
            "mean_pvi_unanimous": group.mean_0,
            "mean_pvi_split_vote": group.mean_1,
            "t_value": group.ttest.t_value,
            "df": group.ttest.df,
            "p_value": group.ttest.p_value,
        }
        corr = difficulty.pvi_entropy_correlation(records, entropies)
        payload["entropy_correlation"] = {"r": corr.r, "p_value": corr.p_value, "n": corr.n}
    (out_dir / "pvi_report.json").write_text(json.dumps(payload, indent=2) + "\n", "utf-8")
    print(f"scored {len(records)} pairs -> {out_dir}")


def _cmd_train_soft(args) -> None:
    rows = []
    with open(args.features, encoding="utf-8", newline="") as handle:
        for row in csv.reader(handle):
            if not row:
                continue
            try:
                rows.append([float(v) for v in row])
            except ValueError:
                continue  # header line
    targets = []
    with open(args.targets, encoding="utf-8") as handle:
        for line in handle:
            if line.strip():
                value = json.loads(line)
                targets.append(value["target"] if isinstance(value, dict) else value)
    problem = softtrain.SoftTrainProblem(np.asarray(rows), np.asarray(targets))
    config = softtrain.TrainConfig(
        learning_rate=args.learning_rate,
        epochs=args.epochs,
        seed=args.seed,
        average=args.average,
    )
    model = softtrain.train(problem, config)
    model.save(args.output)
    final = model.training_trace[-1]
    print(f"trained {final[0]} epochs, final loss {final[1]:.6f} -> {args.output}")


def _cmd_assoc(args) -> None:
    entropies = dataio.read_entropy_csv(args.entropy)
    proxies = dataio.read_proxy_csv(args.proxy)
    names = [args.column] if args.column else sorted(proxies)
    with open(args.output, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(
            ["proxy", "n_absent", "n_present", "mean_absent", "mean_present",
             "t_value", "df", "p_value"]
        )
        for name in names:
            if name not in proxies:
                raise SplitVoteError(f"proxy column not in file: {name!r}")
            flags = proxies[name]
            assoc = stats.proxy_association(entropies, flags, equal_var=args.equal_var)
            writer.writerow(
                [name, assoc.n_absent, assoc.n_present,
                 repr(assoc.mean_absent), repr(assoc.mean_present),
                 repr(assoc.ttest.t_value), repr(assoc.ttest.df),
                 repr(assoc.ttest.p_value)]
            )
    print(f"wrote {len(names)} association rows -> {args.output}")


def _cmd_report(args) -> None:
    config = pipeline.RunConfig(
        predictions_path=args.predictions,
        votes_path=args.votes,
        split=args.split,
        ece_bins=args.bins,
        entropy_bin_width=args.bin_width,
        hist_bins=args.hist_bins,
        temperature=args.temperature,
        grid=calibration.TemperatureGrid.parse(args.grid) if args.grid else None,
        objective=args.objective,
        null_predictions_path=args.null,
        proxies_path=args.proxies,
        articles=_parse_articles(args.articles),
        seed=args.seed,
        out_dir=args.out_dir,
    )
    report = pipeline.run_pipeline(config)
    groups = report["groups"]
    print(
        f"report -> {args.out_dir}: all={groups['all']['count']} "
        f"unanimous={groups['unanimous']['count']} "
        f"split_vote={groups['split_vote']['count']}"
    )


def _parse_articles(spec: str | None):
    if spec is None:
        return dataio.default_articles()
    if spec == "all":
        return None
    return tuple(int(a) for a in json.loads(Path(spec).read_text("utf-8"))["articles"])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="splitvote",
        description="Judge vote splits, disagreement statistics, and "
        "classifier calibration for case-outcome predictions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract-votes", help="parse conclusion text into vote records")
    p.add_argument(
        "--input",
        required=True,
        nargs="+",
        help="a conclusions JSONL (case_id, formation, text) or plain-text "
        "files, one conclusion per file",
    )
    p.add_argument(
        "--formation",
        default="CHAMBER",
        help="court formation for plain-text inputs (default CHAMBER)",
    )
    p.add_argument("--output", required=True, help="vote records JSONL")
    p.add_argument("--issues", help="optional JSONL of parse problems and warnings")
    p.set_defaults(func=_cmd_extract_votes)

    p = sub.add_parser("entropy", help="entropy table and histogram from vote records")
    p.add_argument("--votes", required=True)
    p.add_argument("--output", required=True, help="entropy CSV")
    p.add_argument("--histogram", help="optional histogram CSV")
    p.add_argument("--bin-width", type=float, default=0.05)
    p.set_defaults(func=_cmd_entropy)

    p = sub.add_parser("metrics", help="F1 suite, ECE, and DistCE for one file")
    p.add_argument("--predictions", required=True)
    p.add_argument("--votes", help="optional vote records to join")
    p.add_argument("--split", default="all", choices=["all", "train", "dev", "test"])
    p.add_argument("--bins", type=int, default=10)
    p.add_argument("--hist-dir", help="also write histogram CSVs here")
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_metrics)

    p = sub.add_parser("calibrate", help="fit a temperature on a dev file")
    p.add_argument("--dev", required=True)
    p.add_argument("--objective", default="nll", choices=["nll", "ece"])
    p.add_argument("--grid", default="0.25:10:0.05")
    p.add_argument("--bins", type=int, default=10, help="ECE bins for the ece objective")
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_calibrate)

    p = sub.add_parser("apply", help="attach temperature-scaled probabilities")
    p.add_argument("--predictions", required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_apply)

    p = sub.add_parser("pvi", help="per-pair difficulty from paired prediction files")
    p.add_argument("--cond", required=True, help="input-conditioned predictions JSONL")
    p.add_argument("--null", required=True, help="null-input predictions JSONL")
    p.add_argument("--entropy", help="entropy CSV for grouping and correlation")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_pvi)

    p = sub.add_parser("train-soft", help="train the linear soft-label classifier")
    p.add_argument("--features", required=True, help="CSV feature matrix")
    p.add_argument("--targets", required=True, help="JSONL soft targets")
    p.add_argument("--epochs", type=int, default=500)
    p.add_argument("--learning-rate", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--average", action="store_true", help="mean-form loss")
    p.add_argument("--output", required=True, help="model JSON")
    p.set_defaults(func=_cmd_train_soft)

    p = sub.add_parser("assoc", help="entropy association rows for proxy variables")
    p.add_argument("--entropy", required=True)
    p.add_argument("--proxy", required=True)
    p.add_argument("--column", help="one proxy column (default: all)")
    p.add_argument("--equal-var", action="store_true", help="pooled Student variant")
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_assoc)

    p = sub.add_parser("report", help="full grouped report over one dataset")
    p.add_argument("--predictions", required=True)
    p.add_argument("--votes")
    p.add_argument("--split", default="test", choices=["train", "dev", "test"])
    p.add_argument("--bins", type=int, default=10)
    p.add_argument("--bin-width", type=float, default=0.05)
    p.add_argument("--hist-bins", type=int, default=10)
    p.add_argument("--temperature", type=float)
    p.add_argument("--grid", help="fit temperature on dev records: lo:hi:step")
    p.add_argument("--objective", default="nll", choices=["nll", "ece"])
    p.add_argument("--null", help="null predictions for a PVI section")
    p.add_argument("--proxies", help="proxy CSV for an association section")
    p.add_argument("--articles", help="'all' or a JSON allow-list file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except SplitVoteError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
