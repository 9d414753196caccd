"""
프레임 분할(frame) 과 overlap-add 복원
프레임 k 는 샘플 [k·S, k·S+L) 를 담으며, 모든 샘플이 덮이도록 오른쪽을 0 으로 채웁니다.
복원은 겹치는 기여를 더한 뒤 시점별 기여 횟수로 나누고 패딩을 잘라냅니다.
"""
from __future__ import annotations

import math

import numpy as np

from src.numerics import DimensionError, Tensor, ops
from src.numerics.ops import IndexArray


def frame_count(length: int, size: int, step: int) -> int:
    """K = ceil((P − L)/S) + 1 (패딩 후 floor((P' − L)/S) + 1 과 같음)"""
    if length < size:
        raise DimensionError("frame", (length,), detail=f"길이 {length} 가 프레임 길이 {size} 보다 짧습니다")
    return math.ceil((length - size) / step) + 1


def padded_length(length: int, size: int, step: int) -> int:
    return (frame_count(length, size, step) - 1) * step + size


def frame_indices(length: int, size: int, step: int) -> IndexArray:
    """idx[l, k] = k·S + l, shape (L, K)"""
    if size < 1 or step < 1 or step > size:
        raise DimensionError("frame", (size, step), detail="1 ≤ S ≤ L 이어야 합니다")
    count = frame_count(length, size, step)
    return (np.arange(size)[:, None] + step * np.arange(count)[None, :]).astype(np.intp)


def overlap_counts(idx: IndexArray, size: int) -> np.ndarray:
    """각 시점에 겹쳐 들어가는 프레임 수"""
    return np.bincount(idx.reshape(-1), minlength=size).astype(np.float64)


def pad_right(x: Tensor, amount: int, axis: int = -1) -> Tensor:
    """axis 끝에 0 을 amount 개 붙입니다."""
    if amount <= 0:
        return x
    shape = list(x.shape)
    shape[axis] = amount
    return ops.concat([x, Tensor.zeros(shape)], axis=axis)


def frame(x: Tensor, frame_length: int, stride: int) -> Tensor:
    """
    마지막 축(길이 P) 을 (L, K) 프레임 행렬로 바꿉니다.
    (P,) → (L, K), (B, P) → (B, L, K)
    """
    length = x.shape[-1]
    idx = frame_indices(length, frame_length, stride)
    padded = pad_right(x, padded_length(length, frame_length, stride) - length)
    return ops.take(padded, idx, axis=-1)


def overlap_add(frames: Tensor, stride: int, length: int) -> Tensor:
    """
    frame() 의 역연산. (..., L, K) → (..., P)

    Raises:
        DimensionError: 프레임 수 K 가 (P, L, S) 와 맞지 않을 때
    """
    if frames.ndim < 2:
        raise DimensionError("overlap_add", frames.shape, detail="(L, K) 이상의 차원이 필요합니다")
    frame_length, count = frames.shape[-2:]
    if length < frame_length or frame_count(length, frame_length, stride) != count:
        raise DimensionError(
            "overlap_add", frames.shape, detail=f"P={length}, S={stride} 와 프레임 수가 맞지 않습니다"
        )
    idx = frame_indices(length, frame_length, stride)
    total = padded_length(length, frame_length, stride)
    summed = ops.scatter_add(frames, idx, axis=-1, size=total)
    inverse = Tensor.constant(1.0 / overlap_counts(idx, total))
    normalized = ops.mul(summed, ops.broadcast_to(inverse, summed.shape))
    return ops.slice_axis(normalized, 0, length, axis=-1)
