"""
탐지 파이프라인: 정규화 → 블록 분할 → 분해 → 점수 → POT 임계값 → 라벨
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from pandas import DataFrame

from src.model import DecompositionNet
from src.shared.errors import DataError
from src.shared.schemas import RunConfig
from src.training.preprocess import NormStats, normalize

from .pot import PotResult, label_anomalies, pot_threshold
from .scoring import score

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]

# --- 실행 디렉터리 구성 ---
SCORES_SUFFIX = "_scores.csv"
DECOMPOSITION_SUFFIX = "_decomposition.csv"
CALIBRATION_NAME = "calibration.yml"
METRICS_CSV = "metrics.csv"
METRICS_TXT = "metrics.txt"
MANIFEST_NAME = "manifest.json"


@dataclass(slots=True)
class Reconstruction:
    """정규화 공간의 입력과 예측 성분, 각각 (T, D)"""

    normalized: FloatArray
    trend: FloatArray
    seasonal: FloatArray
    remainder: FloatArray

    def fitted(self, include_remainder: bool) -> FloatArray:
        out = self.trend + self.seasonal
        return out + self.remainder if include_remainder else out


@dataclass(slots=True)
class EntityResult:
    name: str
    reconstruction: Reconstruction
    scores: FloatArray
    labels: NDArray[np.bool_]
    truth: NDArray[np.bool_] | None


def reconstruct(
    net: DecompositionNet, stats: NormStats, values: FloatArray, block_length: int, batch_size: int = 8
) -> Reconstruction:
    normalized = normalize(np.asarray(values, dtype=np.float64).reshape(len(values), -1), stats)
    trend, seasonal, remainder = net.decompose_series(normalized, block_length, batch_size)
    return Reconstruction(normalized, trend, seasonal, remainder)


def entity_scores(
    net: DecompositionNet, stats: NormStats, values: FloatArray, run: RunConfig
) -> tuple[Reconstruction, FloatArray]:
    rec = reconstruct(net, stats, values, run.train.block_length, run.train.batch_size)
    return rec, score(rec.normalized, rec.fitted(run.detect.include_remainder))


def calibrate(
    net: DecompositionNet, stats: NormStats, train_values: list[FloatArray], run: RunConfig
) -> PotResult:
    """학습 분할(이상 없음 가정) 점수로 POT 임계값을 정합니다."""
    if not train_values:
        raise DataError("보정용 학습 분할이 없습니다")
    scores = np.concatenate([entity_scores(net, stats, v, run)[1] for v in train_values])
    return pot_threshold(scores, run.pot)


def detect_entity(
    net: DecompositionNet,
    stats: NormStats,
    values: FloatArray,
    truth: NDArray[np.bool_] | None,
    pot: PotResult,
    run: RunConfig,
    name: str = "series",
) -> EntityResult:
    rec, scores = entity_scores(net, stats, values, run)
    labels = label_anomalies(scores, pot.threshold)
    logger.info(f"🔎 [{name}] 이상 라벨 {int(labels.sum())}/{len(labels)}개")
    return EntityResult(name, rec, scores, labels, truth)


# ---------------------------------------------------------------------------
# CSV 프레임
# ---------------------------------------------------------------------------
def scores_frame(result: EntityResult) -> DataFrame:
    """t,score,label"""
    return DataFrame(
        {
            "t": np.arange(len(result.scores)),
            "score": result.scores,
            "label": result.labels.astype(np.int64),
        }
    )


def decomposition_frame(result: EntityResult) -> DataFrame:
    """보고서용: t, 채널별 x/trend/seasonal/remainder, 정답 라벨(있으면)"""
    rec = result.reconstruction
    data: dict[str, object] = {"t": np.arange(rec.normalized.shape[0])}
    for d in range(rec.normalized.shape[1]):
        data[f"x_{d}"] = rec.normalized[:, d]
        data[f"trend_{d}"] = rec.trend[:, d]
        data[f"seasonal_{d}"] = rec.seasonal[:, d]
        data[f"remainder_{d}"] = rec.remainder[:, d]
    if result.truth is not None:
        data["truth"] = result.truth.astype(np.int64)
    return DataFrame(data)
