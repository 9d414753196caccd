# pyright: reportMissingParameterType=false
"""공통 pytest 픽스처"""
from __future__ import annotations

import os

import numpy as np
import pytest

from src.shared.config import validate_config
from src.shared.schemas import ModelConfig, RunConfig

SLOW_ENV = "TAD_RUN_SLOW"


def pytest_collection_modifyitems(config, items):
    if os.getenv(SLOW_ENV) == "1":
        return
    skip_slow = pytest.mark.skip(reason=f"{SLOW_ENV}=1 일 때만 실행")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def tiny_model_config() -> ModelConfig:
    return ModelConfig(
        frame_length=2, stride=1, basis_count=4, bottleneck_dim=3,
        hidden_dim=3, block_count=1, chunk_size=4,
    )


def tiny_run_dict(root: str) -> dict[str, object]:
    """수 초 안에 끝나는 전체 파이프라인 설정"""
    return {
        "seed": 7,
        "synth": {
            "series_count": 4, "length": 64, "period_range": [4, 12], "phase_range": [0, 11],
            "anomaly_ratio": 0.5, "anomaly_window_length": [3, 6],
            "target_train_length": 256, "target_test_length": 256, "target_anomaly_events": 2,
        },
        "model": {
            "frame_length": 2, "stride": 1, "basis_count": 4, "bottleneck_dim": 3,
            "hidden_dim": 3, "block_count": 1, "chunk_size": 4,
        },
        "train": {
            "pretrain_epochs": 1, "finetune_epochs": 1, "batch_size": 4,
            "block_length": 32, "progress": False,
        },
        "pot": {"init_quantile": 0.8, "risk": 0.01, "min_excesses": 5},
        "paths": {
            "corpus_dir": os.path.join(root, "corpus"),
            "target_dir": os.path.join(root, "corpus", "target"),
            "train_data": os.path.join(root, "corpus", "target", "train.csv"),
            "test_data": os.path.join(root, "corpus", "target", "test.csv"),
            "checkpoint": os.path.join(root, "model", "checkpoint.yml"),
            "train_dir": os.path.join(root, "model"),
            "run_dir": os.path.join(root, "detect"),
        },
    }


@pytest.fixture
def tiny_run(tmp_path) -> RunConfig:
    return validate_config(tiny_run_dict(str(tmp_path)))


@pytest.fixture
def tmp_corpus(tiny_run) -> str:
    from src.synthgen import gen_dataset

    gen_dataset(tiny_run.synth, tiny_run.paths.corpus_dir)
    return tiny_run.paths.corpus_dir


@pytest.fixture
def tiny_config_file(tmp_path) -> str:
    import yaml

    path = tmp_path / "tiny.yml"
    path.write_text(yaml.safe_dump(tiny_run_dict(str(tmp_path))), encoding="utf-8")
    return str(path)
