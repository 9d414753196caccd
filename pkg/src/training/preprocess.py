"""
전처리: 채널별 min/max 정규화와 길이 P 블록 분할
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from src.shared.errors import DataError

logger = logging.getLogger(__name__)

EPS = 1e-8

FloatArray = NDArray[np.float64]


def _as_matrix(values: FloatArray) -> FloatArray:
    data = np.asarray(values, dtype=np.float64)
    if data.ndim == 1:
        return data[:, None]
    if data.ndim != 2:
        raise DataError(f"(T,) 또는 (T, D) 입력이 필요합니다: shape {data.shape}")
    return data


@dataclass(frozen=True, slots=True)
class NormStats:
    """학습 분할에서 계산한 채널별 최소/최대"""

    minimum: FloatArray
    maximum: FloatArray

    @property
    def channels(self) -> int:
        return len(self.minimum)

    @property
    def degenerate(self) -> NDArray[np.bool_]:
        return ~(self.maximum > self.minimum)

    @classmethod
    def fit(cls, values: FloatArray) -> NormStats:
        data = _as_matrix(values)
        if data.shape[0] == 0:
            raise DataError("정규화 통계를 계산할 학습 데이터가 비어 있습니다")
        stats = cls(data.min(axis=0), data.max(axis=0))
        for d in np.flatnonzero(stats.degenerate):
            logger.warning(f"⚠️ 채널 {d} 의 값이 일정합니다 (min == max). 정규화 결과는 0 으로 고정됩니다")
        return stats

    def to_dict(self) -> dict[str, list[float]]:
        return {"min": [float(v) for v in self.minimum], "max": [float(v) for v in self.maximum]}

    @classmethod
    def from_dict(cls, data: dict[str, object]) -> NormStats:
        try:
            lo = np.asarray(data["min"], dtype=np.float64)
            hi = np.asarray(data["max"], dtype=np.float64)
        except (KeyError, TypeError, ValueError) as e:
            raise DataError(f"정규화 통계 형식 오류: {e}") from e
        if lo.shape != hi.shape or lo.ndim != 1:
            raise DataError("정규화 통계의 min/max 길이가 다릅니다")
        return cls(lo, hi)


def normalize(values: FloatArray, stats: NormStats) -> FloatArray:
    """
    x' = (x − min)/(max − min + ε) 를 [0, 1−ε] 로 자릅니다. 값이 일정한 채널은 0.

    Raises:
        DataError: 채널 수가 통계와 다를 때
    """
    data = _as_matrix(values)
    if data.shape[1] != stats.channels:
        raise DataError(f"채널 수 불일치: 데이터 {data.shape[1]}, 정규화 통계 {stats.channels}")
    scaled = (data - stats.minimum) / (stats.maximum - stats.minimum + EPS)
    scaled = np.clip(scaled, 0.0, 1.0 - EPS)
    scaled[:, stats.degenerate] = 0.0
    return scaled if np.ndim(values) == 2 else scaled[:, 0]


@dataclass(slots=True)
class Blocks:
    """
    채널을 펼친 블록 묶음. 행 순서는 (채널, 블록) 순입니다.
    valid 는 패딩이 아닌 위치에서 True.
    """

    values: FloatArray  # (채널 × 블록 수, P)
    valid: NDArray[np.bool_]
    length: int
    channels: int

    def __len__(self) -> int:
        return self.values.shape[0]

    @property
    def per_channel(self) -> int:
        return self.values.shape[0] // self.channels

    def restore(self, rows: FloatArray) -> FloatArray:
        """블록 행 (n, P) 을 패딩을 제거한 (T, D) 로 되돌립니다."""
        stacked = np.asarray(rows).reshape(self.channels, -1)
        return np.ascontiguousarray(stacked[:, : self.length].T)


def segment(values: FloatArray, block_length: int) -> Blocks:
    """
    (T, D) 를 채널마다 길이 P 의 겹치지 않는 블록으로 자릅니다.
    마지막 짧은 블록은 가장자리 값 복제로 채우고 valid 마스크로 구분합니다.
    """
    data = _as_matrix(values)
    length, channels = data.shape
    if length < 1:
        raise DataError("분할할 시리즈가 비어 있습니다")
    per_channel = math.ceil(length / block_length)
    padded = np.pad(data, ((0, per_channel * block_length - length), (0, 0)), mode="edge")
    rows = padded.T.reshape(channels * per_channel, block_length)
    valid = np.zeros((channels, per_channel * block_length), dtype=bool)
    valid[:, :length] = True
    return Blocks(
        np.ascontiguousarray(rows),
        valid.reshape(channels * per_channel, block_length),
        length,
        channels,
    )


def stack_blocks(blocks: list[Blocks]) -> tuple[FloatArray, NDArray[np.bool_]]:
    """여러 시리즈의 블록 행을 하나로 이어 붙입니다."""
    if not blocks:
        raise DataError("블록이 없습니다")
    return np.concatenate([b.values for b in blocks]), np.concatenate([b.valid for b in blocks])
