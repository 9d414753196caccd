"""
Dual-path 순환 분리기 (마스크 생성기)
E(B, N, K) → 병목 N→F → 청크 분할 → [청크 내부 BiLSTM → 청크 사이 BiLSTM] × block_count
→ 청크 overlap-add → 출력 투영 F→3N → 성분 축(3) softmax
"""
from __future__ import annotations

import logging
from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator

from src.numerics import Tensor, ops, uniform_init
from src.shared.schemas import ModelConfig

from .framing import frame_indices, overlap_counts, pad_right, padded_length

logger = logging.getLogger(__name__)

PREFIX = "separator"
COMPONENTS = 3


class UninitializedSeparatorError(RuntimeError):
    """분리기 파라미터가 없거나 shape 가 맞지 않습니다"""


@dataclass(slots=True)
class MaskSet:
    """추세/계절/잔차 마스크, 각각 (B, N, K)"""

    trend: Tensor
    seasonal: Tensor
    remainder: Tensor

    def as_tuple(self) -> tuple[Tensor, Tensor, Tensor]:
        return self.trend, self.seasonal, self.remainder


# ---------------------------------------------------------------------------
# 파라미터 이름 / 초기화
# ---------------------------------------------------------------------------
def _lstm_shapes(prefix: str, in_dim: int, hidden: int) -> dict[str, tuple[int, ...]]:
    return {
        f"{prefix}.Wx": (in_dim, 4 * hidden),
        f"{prefix}.Wh": (hidden, 4 * hidden),
        f"{prefix}.b": (4 * hidden,),
    }


def separator_shapes(config: ModelConfig) -> dict[str, tuple[int, ...]]:
    """분리기 파라미터 이름 → shape (등록 순서 고정)"""
    n, f, h = config.basis_count, config.bottleneck_dim, config.hidden_dim
    shapes: dict[str, tuple[int, ...]] = {
        f"{PREFIX}.bottleneck.W": (n, f),
        f"{PREFIX}.bottleneck.b": (f,),
    }
    for i in range(config.block_count):
        for path in ("intra", "inter"):
            base = f"{PREFIX}.block{i}.{path}"
            shapes.update(_lstm_shapes(f"{base}.fwd", f, h))
            shapes.update(_lstm_shapes(f"{base}.bwd", f, h))
            shapes[f"{base}.proj.W"] = (2 * h, f)
            shapes[f"{base}.proj.b"] = (f,)
    shapes[f"{PREFIX}.output.W"] = (f, COMPONENTS * n)
    shapes[f"{PREFIX}.output.b"] = (COMPONENTS * n,)
    return shapes


def _fan_in(name: str, shape: tuple[int, ...], config: ModelConfig) -> int:
    if len(shape) == 2:
        return shape[0]
    # 편향은 같은 층 가중치의 fan-in 을 따릅니다
    if name.endswith("bottleneck.b"):
        return config.basis_count
    if name.endswith("proj.b"):
        return 2 * config.hidden_dim
    if name.endswith("output.b"):
        return config.bottleneck_dim
    return config.hidden_dim


def init_separator(config: ModelConfig, rng: Generator) -> dict[str, Tensor]:
    return {
        name: Tensor.parameter(uniform_init(shape, _fan_in(name, shape, config), rng), name=name)
        for name, shape in separator_shapes(config).items()
    }


# ---------------------------------------------------------------------------
# 순방향 계산
# ---------------------------------------------------------------------------
def _affine(x: Tensor, w: Tensor, b: Tensor) -> Tensor:
    """x(..., in) @ W(in, out) + b"""
    y = ops.matmul(x, w)
    return ops.add(y, ops.broadcast_to(b, y.shape))


def lstm(x: Tensor, params: Mapping[str, Tensor], prefix: str, reverse: bool = False) -> Tensor:
    """
    단방향 LSTM. x(M, T, F) → h(M, T, H). 초기 상태는 0.
    게이트 순서: 입력 i, 망각 f, 후보 g, 출력 o
    """
    wx, wh, b = params[f"{prefix}.Wx"], params[f"{prefix}.Wh"], params[f"{prefix}.b"]
    batch, steps, _ = x.shape
    hidden = wh.shape[0]
    projected = _affine(x, wx, b)  # (M, T, 4H)

    h = Tensor.zeros((batch, hidden))
    c = Tensor.zeros((batch, hidden))
    outputs: list[Tensor] = []
    order = range(steps - 1, -1, -1) if reverse else range(steps)
    for t in order:
        xt = ops.reshape(ops.slice_axis(projected, t, t + 1, axis=1), (batch, 4 * hidden))
        gates = ops.add(xt, ops.matmul(h, wh))
        i = ops.sigmoid(ops.slice_axis(gates, 0, hidden))
        f = ops.sigmoid(ops.slice_axis(gates, hidden, 2 * hidden))
        g = ops.tanh(ops.slice_axis(gates, 2 * hidden, 3 * hidden))
        o = ops.sigmoid(ops.slice_axis(gates, 3 * hidden, 4 * hidden))
        c = ops.add(ops.mul(f, c), ops.mul(i, g))
        h = ops.mul(o, ops.tanh(c))
        outputs.append(h)
    if reverse:
        outputs.reverse()
    return ops.stack(outputs, axis=1)


def bidirectional(x: Tensor, params: Mapping[str, Tensor], prefix: str) -> Tensor:
    """(M, T, F) → (M, T, F): 양방향 LSTM 출력을 이어 붙여 F 로 투영"""
    both = ops.concat(
        [lstm(x, params, f"{prefix}.fwd"), lstm(x, params, f"{prefix}.bwd", reverse=True)], axis=-1
    )
    return _affine(both, params[f"{prefix}.proj.W"], params[f"{prefix}.proj.b"])


def _dual_path_block(chunks: Tensor, params: Mapping[str, Tensor], index: int) -> Tensor:
    """chunks(B, J, C, F): 청크 내부(C 축) 처리 후 청크 사이(J 축) 처리, 각각 잔차 연결"""
    b, j, c, f = chunks.shape
    base = f"{PREFIX}.block{index}"

    intra = bidirectional(ops.reshape(chunks, (b * j, c, f)), params, f"{base}.intra")
    chunks = ops.add(chunks, ops.reshape(intra, (b, j, c, f)))

    across = ops.reshape(ops.transpose(chunks, (0, 2, 1, 3)), (b * c, j, f))
    inter = bidirectional(across, params, f"{base}.inter")
    inter = ops.transpose(ops.reshape(inter, (b, c, j, f)), (0, 2, 1, 3))
    return ops.add(chunks, inter)


def chunk_layout(frames: int, chunk_size: int) -> tuple[np.ndarray, int]:
    """청크 인덱스 idx[j, c] = j·hop + c (hop = C/2) 와 패딩 후 길이"""
    size = min(chunk_size, max(frames, 1))
    hop = max(1, size // 2)
    idx = frame_indices(frames, size, hop).T
    return idx, padded_length(frames, size, hop)


def separate(encoded: Tensor, params: Mapping[str, Tensor], config: ModelConfig) -> MaskSet:
    """
    인코딩 E(B, N, K) 에서 세 개의 마스크를 만듭니다. 마스크는 (basis, frame) 칸마다 합이 1 입니다.

    Raises:
        UninitializedSeparatorError: 파라미터가 누락되었거나 shape 가 설정과 다를 때
    """
    for name, shape in separator_shapes(config).items():
        p = params.get(name)
        if p is None or p.shape != shape:
            raise UninitializedSeparatorError(f"분리기 파라미터가 초기화되지 않았습니다: {name}")

    batch, n, frames = encoded.shape
    h = _affine(
        ops.transpose(encoded, (0, 2, 1)),
        params[f"{PREFIX}.bottleneck.W"],
        params[f"{PREFIX}.bottleneck.b"],
    )  # (B, K, F)

    idx, total = chunk_layout(frames, config.chunk_size)
    chunks = ops.take(pad_right(h, total - frames, axis=1), idx, axis=1)  # (B, J, C, F)
    for i in range(config.block_count):
        chunks = _dual_path_block(chunks, params, i)

    merged = ops.scatter_add(chunks, idx, axis=1, size=total)  # (B, K', F)
    inverse = Tensor.constant((1.0 / overlap_counts(idx, total))[:, None])
    merged = ops.mul(merged, ops.broadcast_to(inverse, merged.shape))
    merged = ops.slice_axis(merged, 0, frames, axis=1)

    logits = _affine(merged, params[f"{PREFIX}.output.W"], params[f"{PREFIX}.output.b"])
    weights = ops.softmax(ops.reshape(logits, (batch, frames, COMPONENTS, n)), axis=2)

    def _mask(c: int) -> Tensor:
        m = ops.reshape(ops.slice_axis(weights, c, c + 1, axis=2), (batch, frames, n))
        return ops.transpose(m, (0, 2, 1))

    return MaskSet(_mask(0), _mask(1), _mask(2))
