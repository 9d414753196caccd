"""
분해 네트워크 (인코더 U → 분리기 → 마스크 → 공유 디코더 V → overlap-add)
단변량 블록 (B, P) 을 (τ̂, ŝ, r̂) 로 바꿉니다. 다변량 입력은 채널마다 같은 파라미터로 독립 분해합니다.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator
from numpy.typing import NDArray

from src.numerics import Tensor, no_grad, ops, uniform_init
from src.shared.schemas import ModelConfig

from .framing import frame, overlap_add
from .separator import PREFIX, MaskSet, init_separator, separate

logger = logging.getLogger(__name__)

ENCODER = "encoder.U"
DECODER = "decoder.V"


@dataclass(slots=True)
class Decomposition:
    """예측 성분, 각각 (B, P)"""

    trend: Tensor
    seasonal: Tensor
    remainder: Tensor

    def reconstruction(self, include_remainder: bool = False) -> Tensor:
        """점수 계산용 복원값: τ̂ + ŝ (include_remainder 이면 + r̂)"""
        out = ops.add(self.trend, self.seasonal)
        return ops.add(out, self.remainder) if include_remainder else out


class DecompositionNet:
    """설정 + 이름 붙은 파라미터 묶음"""

    def __init__(self, config: ModelConfig, params: dict[str, Tensor]):
        self.config = config
        self.params = params

    @classmethod
    def initialize(cls, config: ModelConfig, rng: Generator) -> DecompositionNet:
        n, length = config.basis_count, config.frame_length
        params: dict[str, Tensor] = {
            ENCODER: Tensor.parameter(uniform_init((n, length), length, rng), name=ENCODER),
            DECODER: Tensor.parameter(uniform_init((n, length), n, rng), name=DECODER),
        }
        # 분리기를 끈 ablation 에서도 같은 난수 순서를 유지하도록 항상 초기화
        params.update(init_separator(config, rng))
        return cls(config, params)

    # ------------------------------------------------------------------
    # 파라미터
    # ------------------------------------------------------------------
    def trainable(self) -> dict[str, Tensor]:
        """학습에 쓰이는 파라미터. 분리기가 꺼져 있으면 U, V 만 반환합니다."""
        if self.config.separator_enabled:
            return dict(self.params)
        return {k: v for k, v in self.params.items() if not k.startswith(f"{PREFIX}.")}

    def parameter_count(self) -> int:
        return sum(p.size for p in self.trainable().values())

    def state(self) -> dict[str, NDArray[np.float64]]:
        return {name: p.data.copy() for name, p in self.params.items()}

    # ------------------------------------------------------------------
    # 단계별 연산
    # ------------------------------------------------------------------
    def encode(self, frames: Tensor) -> Tensor:
        """E = U·X, (L, K) → (N, K) 또는 (B, L, K) → (B, N, K). 활성함수 없음."""
        return ops.matmul(self.params[ENCODER], frames)

    def separate(self, encoded: Tensor) -> MaskSet:
        return separate(encoded, self.params, self.config)

    @staticmethod
    def apply_masks(encoded: Tensor, masks: MaskSet) -> tuple[Tensor, Tensor, Tensor]:
        """E_c = M_c ⊙ E"""
        return (
            ops.mul(masks.trend, encoded),
            ops.mul(masks.seasonal, encoded),
            ops.mul(masks.remainder, encoded),
        )

    def decode(self, encoded: Tensor, length: int) -> Tensor:
        """프레임 = E_cᵀ·V (K, L) → overlap-add 로 길이 P 시리즈"""
        axes = (1, 0) if encoded.ndim == 2 else (0, 2, 1)
        frames = ops.matmul(ops.transpose(encoded, axes), self.params[DECODER])
        return overlap_add(ops.transpose(frames, axes), self.config.stride, length)

    def decompose_batch(self, blocks: Tensor) -> Decomposition:
        """(B, P) 정규화된 블록 → 예측 성분 (Tape 기록 대상)"""
        length = blocks.shape[-1]
        encoded = self.encode(frame(blocks, self.config.frame_length, self.config.stride))
        if not self.config.separator_enabled:
            trend = self.decode(encoded, length)
            zeros = Tensor.zeros(trend.shape)
            return Decomposition(trend, zeros, Tensor.zeros(trend.shape))

        e_trend, e_seasonal, e_remainder = self.apply_masks(encoded, self.separate(encoded))
        return Decomposition(
            self.decode(e_trend, length),
            self.decode(e_seasonal, length),
            self.decode(e_remainder, length),
        )

    # ------------------------------------------------------------------
    # 추론
    # ------------------------------------------------------------------
    def decompose(self, series: NDArray[np.float64]) -> tuple[NDArray[np.float64], ...]:
        """단일 블록 (P,) → (τ̂, ŝ, r̂) NumPy 배열"""
        with no_grad():
            out = self.decompose_batch(Tensor.constant(np.asarray(series, dtype=np.float64)[None, :]))
        return out.trend.data[0].copy(), out.seasonal.data[0].copy(), out.remainder.data[0].copy()

    def decompose_series(
        self, values: NDArray[np.float64], block_length: int, batch_size: int = 8
    ) -> tuple[NDArray[np.float64], NDArray[np.float64], NDArray[np.float64]]:
        """
        정규화된 (T, D) 입력을 채널별로 독립 분해합니다.

        Returns:
            (τ̂, ŝ, r̂) 각각 (T, D)
        """
        # 지연 import로 순환 참조 제거
        from src.training.preprocess import segment

        data = np.asarray(values, dtype=np.float64)
        if data.ndim == 1:
            data = data[:, None]
        blocks = segment(data, block_length)
        outputs = [np.zeros(blocks.values.shape) for _ in range(3)]
        with no_grad():
            for start in range(0, len(blocks), batch_size):
                batch = Tensor.constant(blocks.values[start:start + batch_size])
                parts = self.decompose_batch(batch)
                for out, part in zip(outputs, (parts.trend, parts.seasonal, parts.remainder)):
                    out[start:start + batch_size] = part.data
        trend, seasonal, remainder = (blocks.restore(out) for out in outputs)
        return trend, seasonal, remainder
