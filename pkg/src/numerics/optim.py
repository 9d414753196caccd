"""
ADAM 옵티마이저 (bias correction 포함)
파라미터는 이름 → Tensor 매핑으로 전달되며, 모멘트 버퍼도 같은 이름으로 관리됩니다.
"""
from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

from .tensor import AutogradError, FloatArray, Tensor


@dataclass(slots=True)
class AdamState:
    """1차/2차 모멘트 버퍼와 스텝 카운터"""

    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: dict[str, FloatArray] = field(default_factory=dict)
    v: dict[str, FloatArray] = field(default_factory=dict)


def adam_step(params: Mapping[str, Tensor], state: AdamState, lr: float) -> AdamState:
    """
    ADAM 한 스텝을 제자리(in-place)로 적용하고 기울기를 비웁니다.

    Raises:
        AutogradError: 기울기가 없는 파라미터, 또는 모멘트 버퍼와 shape 가 다른 파라미터
    """
    missing = [name for name, p in params.items() if p.grad is None]
    if missing:
        raise AutogradError(f"기울기가 없는 파라미터: {', '.join(missing)}")

    state.step += 1
    bc1 = 1.0 - state.beta1 ** state.step
    bc2 = 1.0 - state.beta2 ** state.step

    for name, p in params.items():
        g = p.grad
        assert g is not None
        if name not in state.m:
            state.m[name] = np.zeros_like(p.data)
            state.v[name] = np.zeros_like(p.data)
        m, v = state.m[name], state.v[name]
        if m.shape != p.data.shape:
            raise AutogradError(f"모멘트 버퍼 shape 불일치: {name} {m.shape} != {p.data.shape}")

        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * (g * g)

        m_hat = m / bc1
        v_hat = v / bc2
        p.data -= lr * m_hat / (np.sqrt(v_hat) + state.eps)
        p.grad = None
    return state
