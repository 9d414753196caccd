# pyright: reportMissingParameterType=false
import logging
import os
import xml.etree.ElementTree as ET

import orjson
import pandas as pd
import pytest
import yaml

from entry.main import main
from src.evaluation import POOLED, segments


def _paths(tmp_path) -> dict[str, str]:
    root = str(tmp_path)
    return {
        "corpus": os.path.join(root, "corpus"),
        "test": os.path.join(root, "corpus", "target", "test.csv"),
        "checkpoint": os.path.join(root, "model", "checkpoint.yml"),
        "model": os.path.join(root, "model"),
        "detect": os.path.join(root, "detect"),
    }


def _svg_ids(path: str, prefix: str) -> list[str]:
    tree = ET.parse(path)
    return [el.get("id", "") for el in tree.iter() if el.get("id", "").startswith(prefix)]


@pytest.fixture
def trained(tiny_config_file, tmp_path) -> dict[str, str]:
    assert main(["synth", "--config", tiny_config_file, "--target"]) == 0
    assert main(["train", "--config", tiny_config_file]) == 0
    return _paths(tmp_path)


# --- synth ---
def test_synth_writes_corpus_and_manifest(tiny_config_file, tmp_path):
    assert main(["synth", "--config", tiny_config_file, "--target"]) == 0
    paths = _paths(tmp_path)
    files = sorted(os.listdir(paths["corpus"]))
    assert "series_00000.csv" in files and "manifest.yml" in files
    assert os.path.isfile(paths["test"])
    manifest = orjson.loads(open(os.path.join(paths["corpus"], "run_manifest.json"), "rb").read())
    assert manifest["command"] == "synth"
    assert [t["stage"] for t in manifest["timings"]] == ["corpus", "target_split"]


def test_synth_is_reproducible(tiny_config_file, tmp_path):
    other = str(tmp_path / "again")
    assert main(["synth", "--config", tiny_config_file]) == 0
    assert main(["synth", "--config", tiny_config_file, "--set", f"paths.corpus_dir={other}"]) == 0
    first = _paths(tmp_path)["corpus"]
    for name in sorted(os.listdir(first)):
        if name.startswith("series_"):
            with open(os.path.join(first, name), "rb") as a, open(os.path.join(other, name), "rb") as b:
                assert a.read() == b.read()


def test_invalid_config_exits_with_one(tiny_config_file, caplog):
    with caplog.at_level(logging.ERROR):
        code = main(["synth", "--config", tiny_config_file, "--set", "synth.beta0_range=[2, 1]"])
    assert code == 1
    assert "synth.beta0_range" in caplog.text


def test_too_many_target_events_exits_with_one(tiny_config_file, caplog):
    overrides = ["--set", "synth.target_anomaly_events=20", "--set", "synth.target_test_length=32"]
    with caplog.at_level(logging.ERROR):
        code = main(["synth", "--config", tiny_config_file, "--target", *overrides])
    assert code == 1
    assert "synth.target_anomaly_events" in caplog.text


# --- train ---
def test_train_writes_checkpoint_and_loss_log(trained):
    assert os.path.isfile(trained["checkpoint"])
    log = pd.read_csv(os.path.join(trained["model"], "loss_log.csv"))
    assert log["phase"].tolist() == ["pretrain", "finetune"]
    manifest = orjson.loads(open(os.path.join(trained["model"], "run_manifest.json"), "rb").read())
    assert manifest["command"] == "train"
    assert manifest["inputs"]


def test_train_is_reproducible(trained, tiny_config_file, tmp_path):
    again = str(tmp_path / "model_again")
    overrides = ["--set", f"paths.train_dir={again}", "--set", f"paths.checkpoint={again}/checkpoint.yml"]
    assert main(["train", "--config", tiny_config_file, *overrides]) == 0
    with open(trained["checkpoint"], "rb") as a, open(os.path.join(again, "checkpoint.yml"), "rb") as b:
        assert a.read() == b.read()


def test_train_no_augment_only_finetunes(tiny_config_file, tmp_path):
    assert main(["synth", "--config", tiny_config_file, "--target", "--no-corpus"]) == 0
    assert main(["train", "--config", tiny_config_file, "--ablation", "no_augment"]) == 0
    log = pd.read_csv(os.path.join(_paths(tmp_path)["model"], "loss_log.csv"))
    assert set(log["phase"]) == {"finetune"}


# --- detect / report ---
def test_detect_with_labels_and_report(trained, tiny_config_file):
    assert main(["detect", "--config", tiny_config_file, "--labels"]) == 0
    run_dir = trained["detect"]
    for name in ("calibration.yml", "manifest.json", "metrics.csv", "metrics.txt", "test_scores.csv"):
        assert os.path.isfile(os.path.join(run_dir, name)), name

    scores = pd.read_csv(os.path.join(run_dir, "test_scores.csv"))
    assert list(scores.columns) == ["t", "score", "label"]
    metrics = pd.read_csv(os.path.join(run_dir, "metrics.csv"))
    assert metrics["entity"].tolist() == ["test", POOLED]
    calibration = yaml.safe_load(open(os.path.join(run_dir, "calibration.yml"), encoding="utf-8"))
    assert calibration["threshold"] > 0

    assert main(["report", "--config", tiny_config_file]) == 0
    svg = os.path.join(run_dir, "report", "test.svg")
    assert len(_svg_ids(svg, "panel_")) == 4
    truth = pd.read_csv(trained["test"])["label"].to_numpy().astype(bool)
    assert len(_svg_ids(svg, "anomaly_span_")) == len(segments(truth))
    index = open(os.path.join(run_dir, "report", "index.html"), encoding="utf-8").read()
    assert "test.svg" in index


def test_detect_with_label_file(trained, tiny_config_file, tmp_path):
    labels = tmp_path / "labels.csv"
    pd.read_csv(trained["test"])[["label"]].to_csv(labels, index=False)
    assert main(["detect", "--config", tiny_config_file, "--labels", str(labels)]) == 0
    assert os.path.isfile(os.path.join(trained["detect"], "metrics.csv"))


def test_detect_without_labels_skips_metrics(trained, tiny_config_file):
    assert main(["detect", "--config", tiny_config_file]) == 0
    assert not os.path.exists(os.path.join(trained["detect"], "metrics.csv"))
    assert main(["report", "--config", tiny_config_file]) == 0
    svg = os.path.join(trained["detect"], "report", "test.svg")
    assert len(_svg_ids(svg, "panel_")) == 4
    assert not _svg_ids(svg, "anomaly_span_")


def test_corrupted_checkpoint_exits_with_two(trained, tiny_config_file, caplog):
    with open(trained["checkpoint"], "w", encoding="utf-8") as f:
        f.write("format: loop_tad.checkpoint/v1\nparams: [\n")
    with caplog.at_level(logging.ERROR):
        code = main(["detect", "--config", tiny_config_file])
    assert code == 2
    assert "byte offset" in caplog.text


def test_non_numeric_checkpoint_value_exits_with_two(trained, tiny_config_file, caplog):
    with open(trained["checkpoint"], encoding="utf-8") as f:
        document = yaml.safe_load(f)
    document["params"][0]["values"][0] = "x0.19"
    with open(trained["checkpoint"], "w", encoding="utf-8") as f:
        yaml.safe_dump(document, f, sort_keys=False)
    with caplog.at_level(logging.ERROR):
        code = main(["detect", "--config", tiny_config_file])
    assert code == 2
    assert "CheckpointError" in caplog.text
    assert "byte offset" in caplog.text


def test_report_without_detection_exits_with_two(tiny_config_file, tmp_path):
    assert main(["report", "--config", tiny_config_file, "--run-dir", str(tmp_path / "empty")]) == 2


# --- ablate ---
def test_ablate_writes_summary(trained, tiny_config_file, tmp_path):
    assert main(["ablate", "--config", tiny_config_file, "--modes", "none", "no_augment"]) == 0
    summary = yaml.safe_load(open(tmp_path / "ablation" / "summary.yml", encoding="utf-8"))
    assert [r["ablation"] for r in summary["results"]] == ["none", "no_augment"]
    assert all(0.0 <= r["f1"] <= 1.0 for r in summary["results"])
    assert os.path.isfile(tmp_path / "ablation" / "none" / "detect" / "metrics.csv")


def test_detect_is_reproducible(trained, tiny_config_file, tmp_path):
    again = str(tmp_path / "detect_again")
    assert main(["detect", "--config", tiny_config_file, "--labels"]) == 0
    assert main(["detect", "--config", tiny_config_file, "--labels", "--run-dir", again]) == 0
    for name in ("metrics.csv", "calibration.yml", "test_scores.csv"):
        with open(os.path.join(trained["detect"], name), "rb") as a, open(os.path.join(again, name), "rb") as b:
            assert a.read() == b.read(), name
