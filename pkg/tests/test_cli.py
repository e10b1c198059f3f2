import json
import os

import pytest

from regretstream.cli import main
from regretstream.events import Corpus
from regretstream.features import load_feature_matrix
from regretstream.synth import POST_START, SynthConfig

WINDOW = ("2015-08-03T00:00:00Z", "2015-08-17T00:00:00Z", "2015-08-24T00:00:00Z")


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    """A small synthetic stream driven end-to-end through the CLI."""
    root = tmp_path_factory.mktemp("cli")
    synth_cfg = root / "synth.json"
    synth_cfg.write_text(json.dumps({
        "seed": 3, "n_users": 60, "tweet_rate_min": 1.5, "tweet_rate_max": 2.2,
        "orphan_deletes": 1,
    }))
    assert main([
        "synth", "--config", str(synth_cfg),
        "--out-events", str(root / "events.jsonl"),
        "--out-ledger", str(root / "ledger.jsonl"),
    ]) == 0
    assert main([
        "ingest", "--events", str(root / "events.jsonl"),
        "--window", *WINDOW,
        "--out", str(root / "corpus.json"),
    ]) == 0
    assert main([
        "clean", "--corpus", str(root / "corpus.json"),
        "--out", str(root / "cleaned.json"),
        "--report", str(root / "cleanup.json"),
    ]) == 0
    return root


class TestSynthCommand:
    def test_byte_identical_reruns(self, workdir, tmp_path):
        cfg = workdir / "synth.json"
        for tag in ("a", "b"):
            assert main([
                "synth", "--config", str(cfg),
                "--out-events", str(tmp_path / f"e{tag}.jsonl"),
                "--out-ledger", str(tmp_path / f"l{tag}.jsonl"),
            ]) == 0
        assert (tmp_path / "ea.jsonl").read_bytes() == (tmp_path / "eb.jsonl").read_bytes()
        assert (tmp_path / "la.jsonl").read_bytes() == (tmp_path / "lb.jsonl").read_bytes()

    def test_seed_flag_overrides_config(self, workdir, tmp_path):
        cfg = workdir / "synth.json"
        assert main([
            "synth", "--config", str(cfg), "--seed", "99",
            "--out-events", str(tmp_path / "e.jsonl"),
            "--out-ledger", str(tmp_path / "l.jsonl"),
        ]) == 0
        assert (tmp_path / "e.jsonl").read_bytes() != (workdir / "events.jsonl").read_bytes()


class TestIngestCommand:
    def test_corpus_file_valid(self, workdir):
        corpus = Corpus.load(workdir / "corpus.json")
        assert len(corpus) > 0

    def test_missing_events_file_is_io_error(self, tmp_path):
        code = main([
            "ingest", "--events", str(tmp_path / "nope.jsonl"),
            "--window", *WINDOW, "--out", str(tmp_path / "c.json"),
        ])
        assert code == 2

    def test_bad_window_is_validation_error(self, workdir, tmp_path):
        code = main([
            "ingest", "--events", str(workdir / "events.jsonl"),
            "--window", WINDOW[1], WINDOW[0], WINDOW[2],
            "--out", str(tmp_path / "c.json"),
        ])
        assert code == 1

    def test_usage_error_exit_code(self):
        assert main(["ingest", "--events"]) == 1


class TestCleanCommand:
    def test_report_written(self, workdir):
        report = json.loads((workdir / "cleanup.json").read_text())
        assert set(report["stages"]) == {"non_language", "non_whitelisted", "retweets", "superficial"}
        removed = sum(s["removed"] for s in report["stages"].values())
        assert removed + report["retained"]["tweets"] == report["input"]["tweets"]

    def test_cleaned_corpus_loadable(self, workdir):
        cleaned = Corpus.load(workdir / "cleaned.json")
        assert all(t.lang == "en" for t in cleaned)


class TestFeaturizeCommand:
    def test_rsf1_output(self, workdir, tmp_path):
        out = tmp_path / "features.rsf1"
        assert main([
            "featurize", "--corpus", str(workdir / "cleaned.json"),
            "--out", str(out), "--with-responses",
        ]) == 0
        matrix = load_feature_matrix(out)
        assert matrix.dense.shape[1] == 112
        assert matrix.response.shape[1] == 93

    def test_pretagged_input_honored(self, workdir, tmp_path):
        from regretstream.textkit import RuleTagger, tokenize

        cleaned = Corpus.load(workdir / "cleaned.json")
        first = cleaned.tweets[0]
        n_tokens = len(tokenize(first.text))
        tags_path = tmp_path / "tags.jsonl"
        tags_path.write_text(json.dumps({"id": first.id, "tags": ["interjection"] * n_tokens}) + "\n")
        out = tmp_path / "features.rsf1"
        assert main([
            "featurize", "--corpus", str(workdir / "cleaned.json"),
            "--tags", str(tags_path), "--out", str(out),
        ]) == 0
        matrix = load_feature_matrix(out)
        row = list(matrix.tweet_ids).index(first.id)
        slot = 65 + RuleTagger.tagset.index("interjection")
        assert matrix.dense[row, slot] == n_tokens


class TestAnalyzeCommand:
    def test_all_metrics(self, workdir, tmp_path):
        out = tmp_path / "reports"
        assert main([
            "analyze", "--corpus", str(workdir / "cleaned.json"),
            "--metrics", "ntd,nud,users,temporal,response,traits",
            "--alpha", "0.05", "--out", str(out),
            "--structural-only",
        ]) == 0
        assert (out / "group_comparison.json").exists()
        assert (out / "group_comparison.csv").exists()
        assert (out / "user_groups.json").exists()
        assert (out / "ccdf_followers.csv").exists()
        assert (out / "temporal.json").exists()
        assert (out / "response.json").exists()
        assert (out / "traits.json").exists()
        temporal = json.loads((out / "temporal.json").read_text())
        assert sum(temporal["deleted"]) == pytest.approx(100.0, abs=1e-9)

    def test_unknown_metric_rejected(self, workdir, tmp_path):
        code = main([
            "analyze", "--corpus", str(workdir / "cleaned.json"),
            "--metrics", "ntd,bogus", "--out", str(tmp_path / "r"),
        ])
        assert code == 1


class TestAnnotateAggCommand:
    def test_regret_reference_counts(self, tmp_path):
        path = tmp_path / "annotations.jsonl"
        with open(path, "w") as fh:
            for i in range(100):
                fh.write(json.dumps({
                    "item_id": i, "group": "deleted",
                    "answers": {"expressive": ["yes", "yes", "no"]},
                    "regret": ["yes"] * 3 if i < 16 else ["no"] * 3,
                }) + "\n")
            for i in range(100):
                fh.write(json.dumps({
                    "item_id": 100 + i, "group": "non_deleted",
                    "answers": {},
                    "regret": ["yes"] * 3 if i < 6 else ["no"] * 3,
                }) + "\n")
        out = tmp_path / "agg.json"
        assert main(["annotate-agg", "--annotations", str(path), "--out", str(out)]) == 0
        result = json.loads(out.read_text())
        assert result["regret"]["fisher"]["effect"] == pytest.approx(0.335, abs=0.005)
        assert result["regret"]["fisher"]["p_two_sided"] == pytest.approx(0.04, abs=0.01)


@pytest.fixture(scope="module")
def train_config_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("cfg") / "train.json"
    path.write_text(json.dumps({
        "n_per_class": 50,
        "stage2_hyper": {"ada_depth": 2, "ada_rounds": 8},
        "derived_feature_folds": 3,
    }))
    return path


class TestTrainPredictAblate:
    def test_train_writes_bundle_and_metrics(self, workdir, train_config_path, tmp_path):
        bundle = tmp_path / "model.rsb1"
        metrics = tmp_path / "metrics.json"
        assert main([
            "train", "--corpus", str(workdir / "cleaned.json"),
            "--config", str(train_config_path), "--seed", "7",
            "--out", str(bundle), "--metrics-out", str(metrics),
        ]) == 0
        assert bundle.read_bytes()[:4] == b"RSB1"
        payload = json.loads(metrics.read_text())
        assert 0.0 <= payload["metrics"]["f1"] <= 1.0

    def test_train_deterministic_across_threads(self, workdir, train_config_path, tmp_path):
        outs = []
        for tag, threads in (("a", "1"), ("b", "4")):
            bundle = tmp_path / f"model_{tag}.rsb1"
            metrics = tmp_path / f"metrics_{tag}.json"
            env_before = os.environ.get("REGRETSTREAM_THREADS")
            os.environ["REGRETSTREAM_THREADS"] = threads
            try:
                assert main([
                    "train", "--corpus", str(workdir / "cleaned.json"),
                    "--config", str(train_config_path), "--seed", "7",
                    "--out", str(bundle), "--metrics-out", str(metrics),
                ]) == 0
            finally:
                if env_before is None:
                    os.environ.pop("REGRETSTREAM_THREADS", None)
                else:
                    os.environ["REGRETSTREAM_THREADS"] = env_before
            outs.append((bundle.read_bytes(), metrics.read_bytes()))
        assert outs[0] == outs[1]

    def test_predict_on_events(self, workdir, train_config_path, tmp_path):
        bundle = tmp_path / "model.rsb1"
        assert main([
            "train", "--corpus", str(workdir / "cleaned.json"),
            "--config", str(train_config_path), "--seed", "7",
            "--out", str(bundle),
        ]) == 0
        out = tmp_path / "predictions.jsonl"
        assert main([
            "predict", "--bundle", str(bundle),
            "--events", str(workdir / "events.jsonl"),
            "--out", str(out),
        ]) == 0
        lines = [json.loads(l) for l in out.read_text().splitlines()]
        assert lines
        assert {"id", "predicted_deleted", "score"} <= set(lines[0])
        assert any(l["predicted_deleted"] for l in lines)
        assert any(not l["predicted_deleted"] for l in lines)

    def test_ablate_report(self, workdir, train_config_path, tmp_path):
        out = tmp_path / "ablation.json"
        assert main([
            "ablate", "--corpus", str(workdir / "cleaned.json"),
            "--config", str(train_config_path), "--seed", "7",
            "--groups", "user,tweet", "--out", str(out), "--threads", "2",
        ]) == 0
        report = json.loads(out.read_text())
        assert set(report["dropped"]) == {"user", "tweet"}

    def test_ablate_unknown_group(self, workdir, train_config_path, tmp_path):
        code = main([
            "ablate", "--corpus", str(workdir / "cleaned.json"),
            "--config", str(train_config_path),
            "--groups", "user,wat", "--out", str(tmp_path / "x.json"),
        ])
        assert code == 1
