"""Command-line surface: subcommands, wiring, and exit codes."""

import json

import numpy as np
import pytest

from splitvote.cli import main
from splitvote.dataio import (
    bundled_toy_paths,
    load_predictions,
    load_vote_records,
    read_entropy_csv,
)


@pytest.fixture(scope="module")
def toy_paths():
    return bundled_toy_paths()


@pytest.fixture()
def corpus_path():
    from importlib import resources

    return str(
        resources.files("splitvote").joinpath("data", "conclusion_corpus.jsonl")
    )


class TestExtractVotes:
    def test_extracts_corpus(self, corpus_path, tmp_path, capsys):
        out = tmp_path / "votes.jsonl"
        issues = tmp_path / "issues.jsonl"
        code = main(
            [
                "extract-votes",
                "--input", corpus_path,
                "--output", str(out),
                "--issues", str(issues),
            ]
        )
        assert code == 0
        records = load_vote_records(out)
        assert len(records) == 49
        issue_lines = [
            json.loads(line) for line in issues.read_text("utf-8").splitlines()
        ]
        assert any("bench size" in i["problem"] for i in issue_lines)
        assert sum("no conclusion clause" in i["problem"] for i in issue_lines) == 5


class TestEntropyCommand:
    def test_entropy_table_and_histogram(self, corpus_path, tmp_path):
        votes = tmp_path / "votes.jsonl"
        main(["extract-votes", "--input", corpus_path, "--output", str(votes)])
        out = tmp_path / "entropy.csv"
        hist = tmp_path / "hist.csv"
        code = main(
            [
                "entropy",
                "--votes", str(votes),
                "--output", str(out),
                "--histogram", str(hist),
                "--bin-width", "0.1",
            ]
        )
        assert code == 0
        entropies = read_entropy_csv(out)
        assert entropies[("c001", 3)] == pytest.approx(0.410116, abs=1e-5)
        assert hist.read_text("utf-8").startswith("lower,upper,count")


class TestMetricsCommand:
    def test_metrics_with_join(self, toy_paths, tmp_path):
        pred, votes = toy_paths
        out = tmp_path / "metrics.json"
        code = main(
            [
                "metrics",
                "--predictions", str(pred),
                "--votes", str(votes),
                "--split", "test",
                "--output", str(out),
            ]
        )
        assert code == 0
        payload = json.loads(out.read_text("utf-8"))
        assert 0.0 <= payload["ece"] <= 1.0
        assert 0.0 <= payload["mean_dist_ce"] <= 1.0
        assert payload["count"] > 0


class TestCalibrateAndApply:
    def test_calibrate_then_apply(self, toy_paths, tmp_path):
        pred, _ = toy_paths
        temp_out = tmp_path / "temperature.json"
        code = main(
            [
                "calibrate",
                "--dev", str(pred),
                "--objective", "nll",
                "--grid", "0.5:4:0.25",
                "--output", str(temp_out),
            ]
        )
        assert code == 0
        fitted = json.loads(temp_out.read_text("utf-8"))
        assert 0.5 <= fitted["t"] <= 4.0

        scaled_out = tmp_path / "scaled.jsonl"
        code = main(
            [
                "apply",
                "--predictions", str(pred),
                "--t", str(fitted["t"]),
                "--output", str(scaled_out),
            ]
        )
        assert code == 0
        first = json.loads(scaled_out.read_text("utf-8").splitlines()[0])
        assert first["temperature"] == fitted["t"]
        assert first["probs"][0] + first["probs"][1] == pytest.approx(1.0, abs=1e-12)
        # The original records must re-load unchanged apart from extras.
        assert len(load_predictions(scaled_out)) == len(load_predictions(pred))


class TestPviCommand:
    def test_pvi_with_entropy_grouping(self, toy_paths, tmp_path):
        pred, votes = toy_paths
        null_path = pred.with_name("toy_null_predictions.jsonl")
        votes_out = tmp_path / "entropy.csv"
        main(["entropy", "--votes", str(votes), "--output", str(votes_out)])
        code = main(
            [
                "pvi",
                "--cond", str(pred),
                "--null", str(null_path),
                "--entropy", str(votes_out),
                "--out-dir", str(tmp_path / "pvi"),
            ]
        )
        assert code == 0
        payload = json.loads((tmp_path / "pvi" / "pvi_report.json").read_text("utf-8"))
        assert payload["n"] == len(load_predictions(pred))
        assert "groups" in payload and "entropy_correlation" in payload


class TestTrainSoftCommand:
    def test_train_from_files(self, tmp_path):
        rng = np.random.default_rng(0)
        X = np.hstack([rng.normal(size=(40, 2)), np.ones((40, 1))])
        features = tmp_path / "features.csv"
        features.write_text(
            "\n".join(",".join(repr(float(v)) for v in row) for row in X) + "\n",
            "utf-8",
        )
        targets = tmp_path / "targets.jsonl"
        with open(targets, "w", encoding="utf-8") as handle:
            for row in X:
                q = 0.8 if row[0] > 0 else 0.2
                handle.write(json.dumps([1.0 - q, q]) + "\n")
        model_out = tmp_path / "model.json"
        code = main(
            [
                "train-soft",
                "--features", str(features),
                "--targets", str(targets),
                "--epochs", "50",
                "--output", str(model_out),
            ]
        )
        assert code == 0
        payload = json.loads(model_out.read_text("utf-8"))
        assert len(payload["weights"]) == 3
        losses = [loss for _, loss in payload["training_trace"]]
        assert losses[-1] <= losses[0]


class TestAssocCommand:
    def test_association_rows(self, tmp_path):
        entropy = tmp_path / "entropy.csv"
        with open(entropy, "w", encoding="utf-8") as handle:
            handle.write("case_id,article,entropy,single_dissent\n")
            for i in range(30):
                handle.write(f"c{i},3,{0.05 * (i % 3)},false\n")
        proxy = tmp_path / "proxy.csv"
        with open(proxy, "w", encoding="utf-8") as handle:
            handle.write("case_id,article,KeyCase\n")
            for i in range(30):
                handle.write(f"c{i},3,{1 if i % 2 else 0}\n")
        out = tmp_path / "assoc.csv"
        code = main(
            [
                "assoc",
                "--entropy", str(entropy),
                "--proxy", str(proxy),
                "--column", "KeyCase",
                "--output", str(out),
            ]
        )
        assert code == 0
        lines = out.read_text("utf-8").splitlines()
        assert lines[0].startswith("proxy,n_absent,n_present,mean_absent")
        assert lines[1].startswith("KeyCase,15,15,")


class TestReportCommand:
    def test_full_report(self, toy_paths, tmp_path):
        pred, votes = toy_paths
        code = main(
            [
                "report",
                "--predictions", str(pred),
                "--votes", str(votes),
                "--out-dir", str(tmp_path / "rep"),
            ]
        )
        assert code == 0
        report = json.loads((tmp_path / "rep" / "report.json").read_text("utf-8"))
        groups = report["groups"]
        assert (
            groups["unanimous"]["count"] + groups["split_vote"]["count"]
            == groups["all"]["count"]
        )


class TestExitCodes:
    def test_validation_error_is_one(self, tmp_path):
        bad = tmp_path / "bad.jsonl"
        bad.write_text('{"case_id": "c1"}\n', encoding="utf-8")
        code = main(
            ["metrics", "--predictions", str(bad), "--output", str(tmp_path / "o.json")]
        )
        assert code == 1

    def test_missing_file_is_two(self, tmp_path):
        code = main(
            [
                "metrics",
                "--predictions", str(tmp_path / "nope.jsonl"),
                "--output", str(tmp_path / "o.json"),
            ]
        )
        assert code == 2
