"""
중앙 차분(central finite difference) 기반 기울기 검증
"""
from __future__ import annotations

from collections.abc import Callable, Sequence

import numpy as np

from .tensor import Tensor, current_tape, no_grad


def numeric_grad(fn: Callable[[], Tensor], x: Tensor, eps: float = 1e-5) -> np.ndarray:
    """x 의 각 원소를 ±eps 만큼 흔들어 스칼라 fn() 의 편미분을 근사합니다."""
    grad = np.zeros_like(x.data)
    flat = x.data.reshape(-1)
    out = grad.reshape(-1)
    with no_grad():
        for i in range(flat.size):
            original = flat[i]
            flat[i] = original + eps
            plus = fn().item()
            flat[i] = original - eps
            minus = fn().item()
            flat[i] = original
            out[i] = (plus - minus) / (2.0 * eps)
    return grad


def gradcheck(fn: Callable[[], Tensor], inputs: Sequence[Tensor], eps: float = 1e-5) -> float:
    """
    Tape 역전파 기울기와 수치 기울기의 최대 상대 오차를 반환합니다.
    상대 오차 = ||analytic - numeric|| / max(||analytic||, ||numeric||, 1e-12)
    """
    current_tape().reset()
    for x in inputs:
        x.zero_grad()
    loss = fn()
    loss.backward()
    analytic = [np.zeros_like(x.data) if x.grad is None else x.grad.copy() for x in inputs]

    worst = 0.0
    for x, a in zip(inputs, analytic):
        n = numeric_grad(fn, x, eps)
        denom = max(float(np.linalg.norm(a)), float(np.linalg.norm(n)), 1e-12)
        worst = max(worst, float(np.linalg.norm(a - n)) / denom)
        x.zero_grad()
    return worst
