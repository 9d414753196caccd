# pyright: reportMissingParameterType=false
"""desk-scale 종단 실행 (TAD_RUN_SLOW=1 일 때만)"""
import os

import numpy as np
import pandas as pd
import pytest

from entry.main import main
from src.evaluation import POOLED
from src.shared.config import load_run_config
from src.synthgen import gen_dataset, generate_series, load_corpus
from src.training import normalize_components, run_training

pytestmark = pytest.mark.slow

HELD_OUT = 16


def _overrides(root: str) -> list[str]:
    return [
        f"paths.corpus_dir={root}/corpus",
        f"paths.target_dir={root}/corpus/target",
        f"paths.train_data={root}/corpus/target/train.csv",
        f"paths.test_data={root}/corpus/target/test.csv",
        f"paths.checkpoint={root}/model/checkpoint.yml",
        f"paths.train_dir={root}/model",
        f"paths.run_dir={root}/detect",
        "train.progress=false",
    ]


def _pearson(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.corrcoef(a, b)[0, 1])


def test_pretraining_learns_decomposition(tmp_path):
    run = load_run_config(None, [*_overrides(str(tmp_path)), "train.phase=pretrain"])
    gen_dataset(run.synth, run.paths.corpus_dir)
    result = run_training(run, load_corpus(run.paths.corpus_dir))

    losses = [r.loss for r in result.history]
    assert np.all(np.isfinite(losses))
    assert losses[-1] <= 0.2 * losses[0]

    held_out = run.synth.model_copy(update={"master_seed": run.synth.master_seed + 1})
    trend_r, seasonal_r = [], []
    for i in range(HELD_OUT):
        x, trend, seasonal, _ = normalize_components(generate_series(held_out, i, anomalous=False).components)
        trend_hat, seasonal_hat, _ = result.net.decompose(x)
        trend_r.append(_pearson(trend_hat, trend))
        seasonal_r.append(_pearson(seasonal_hat, seasonal))
    assert np.median(trend_r) >= 0.8
    assert np.median(seasonal_r) >= 0.8


def test_end_to_end_detection(tmp_path):
    args = [arg for item in _overrides(str(tmp_path)) for arg in ("--set", item)]
    assert main(["synth", "--target", *args]) == 0
    assert main(["train", *args]) == 0
    assert main(["detect", "--labels", *args]) == 0

    metrics = pd.read_csv(tmp_path / "detect" / "metrics.csv").set_index("entity")
    assert metrics.loc[POOLED, "f1"] >= 0.8


def test_all_ablation_modes_run(tmp_path):
    args = [arg for item in _overrides(str(tmp_path)) for arg in ("--set", item)]
    assert main(["synth", "--target", *args]) == 0
    assert main(["ablate", *args]) == 0

    manifests = []
    for mode in ("none", "no_sep", "no_decomp", "no_augment"):
        path = tmp_path / "ablation" / mode / "detect" / "manifest.json"
        assert path.is_file()
        manifests.append(path.read_bytes())
    assert len(set(manifests)) == 4
    assert os.path.isfile(tmp_path / "ablation" / "summary.yml")
