"""
복원 오차 기반 이상 점수
Score(t) = ‖x_t − x̂_t‖₂ (채널 축 L2 노름)
"""
from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

from src.shared.errors import DataError

FloatArray = NDArray[np.float64]


def _as_matrix(values: FloatArray) -> FloatArray:
    data = np.asarray(values, dtype=np.float64)
    return data[:, None] if data.ndim == 1 else data


def score(original: FloatArray, reconstructed: FloatArray) -> FloatArray:
    """
    (T, D) 두 배열의 시점별 잔차 L2 노름. 패딩이 제거된 입력을 받습니다.

    Raises:
        DataError: shape 가 다를 때
    """
    x, x_hat = _as_matrix(original), _as_matrix(reconstructed)
    if x.shape != x_hat.shape:
        raise DataError(f"점수 계산 shape 불일치: {x.shape} vs {x_hat.shape}")
    return np.sqrt(np.sum((x - x_hat) ** 2, axis=1))
