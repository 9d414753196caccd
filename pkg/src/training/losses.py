"""
학습 손실
- loss_dec: Σ_d (‖τ−τ̂‖² + ‖s−ŝ‖² + ‖r−r̂‖²)  (사전학습)
- loss_rec: Σ_d ‖x − (τ̂ + ŝ)‖²                (미세조정, r̂ 는 의도적으로 제외)
배치 행은 채널을 펼친 블록이므로 행 합이 곧 채널 합입니다. 패딩 위치는 valid 마스크로 제외합니다.
"""
from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

from src.model import Decomposition
from src.numerics import Tensor, ops


def _mask_tensor(valid: NDArray[np.bool_] | None, shape: tuple[int, ...]) -> Tensor | None:
    if valid is None:
        return None
    mask = np.asarray(valid, dtype=np.float64)
    if mask.shape != shape:
        raise ValueError(f"valid 마스크 shape {mask.shape} 가 {shape} 와 다릅니다")
    return Tensor.constant(mask)


def masked_sse(pred: Tensor, target: Tensor, mask: Tensor | None) -> Tensor:
    """‖(pred − target) ⊙ mask‖²"""
    if mask is None:
        return ops.mse(pred, target, reduction="sum")
    return ops.mse(ops.mul(pred, mask), ops.mul(target, mask), reduction="sum")


def loss_dec(
    truth: Decomposition, pred: Decomposition, valid: NDArray[np.bool_] | None = None
) -> Tensor:
    mask = _mask_tensor(valid, pred.trend.shape)
    return ops.add(
        ops.add(
            masked_sse(pred.trend, truth.trend, mask),
            masked_sse(pred.seasonal, truth.seasonal, mask),
        ),
        masked_sse(pred.remainder, truth.remainder, mask),
    )


def loss_rec(
    x: Tensor, trend: Tensor, seasonal: Tensor, valid: NDArray[np.bool_] | None = None
) -> Tensor:
    mask = _mask_tensor(valid, x.shape)
    return masked_sse(ops.add(trend, seasonal), x, mask)
