"""
체크포인트 저장/로드 (YAML 텍스트)
모델 설정 사본 + 이름 붙은 파라미터 배열(이름, shape, row-major 값) + 선택적 정규화 통계.
float 는 repr 로 기록되어 10진 ↔ 2진 변환이 비트 단위로 왕복합니다.
"""
from __future__ import annotations

import logging
import os
from typing import TYPE_CHECKING

import numpy as np
from numpy.typing import NDArray
import yaml
from pydantic import ValidationError

from src.numerics import Tensor
from src.shared.errors import CheckpointError, DataError
from src.shared.schemas import ModelConfig

from .network import DecompositionNet
from .separator import separator_shapes

if TYPE_CHECKING:
    from src.training.preprocess import NormStats

logger = logging.getLogger(__name__)

FORMAT = "loop_tad.checkpoint/v1"


def expected_shapes(config: ModelConfig) -> dict[str, tuple[int, ...]]:
    shapes: dict[str, tuple[int, ...]] = {
        "encoder.U": (config.basis_count, config.frame_length),
        "decoder.V": (config.basis_count, config.frame_length),
    }
    shapes.update(separator_shapes(config))
    return shapes


def save_checkpoint(
    net: DecompositionNet,
    path: str,
    norm_stats: NormStats | None = None,
    extra: dict[str, object] | None = None,
) -> None:
    document: dict[str, object] = {
        "format": FORMAT,
        "model": net.config.model_dump(mode="json"),
        "norm_stats": None if norm_stats is None else norm_stats.to_dict(),
        "extra": extra or {},
        "params": [
            {"name": name, "shape": list(p.shape), "values": [float(v) for v in p.data.reshape(-1)]}
            for name, p in net.params.items()
        ],
    }
    parent = os.path.dirname(path)
    try:
        if parent:
            os.makedirs(parent, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            yaml.safe_dump(document, f, sort_keys=False, default_flow_style=None, width=120)
    except OSError as e:
        raise DataError(f"체크포인트 저장 실패: {path} ({e})") from e
    logger.info(f"💾 체크포인트 저장: {path} (파라미터 {net.parameter_count():,}개)")


def _parse(text: bytes) -> dict[str, object]:
    decoded = text.decode("utf-8", errors="replace")
    try:
        document = yaml.safe_load(decoded)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None) or getattr(e, "context_mark", None)
        offset = None if mark is None else len(decoded[: mark.index].encode("utf-8"))
        raise CheckpointError("체크포인트 파싱 실패", offset) from e
    if not isinstance(document, dict) or document.get("format") != FORMAT:
        raise CheckpointError(f"체크포인트 형식이 아닙니다 (format != {FORMAT})", 0)
    return document


def _entry_offset(raw: bytes, name: object) -> int | None:
    # 항목 이름이 없거나 찾지 못하면 params 블록 시작 위치
    if isinstance(name, str):
        found = raw.find(f"name: {name}".encode("utf-8"))
        if found >= 0:
            return found
    found = raw.find(b"params:")
    return found if found >= 0 else None


def _parse_entry(
    entry: object, raw: bytes, shapes: dict[str, tuple[int, ...]]
) -> tuple[str, NDArray[np.float64]]:
    name = entry.get("name") if isinstance(entry, dict) else None
    try:
        if not isinstance(entry, dict):
            raise TypeError(f"파라미터 항목이 매핑이 아닙니다: {type(entry).__name__}")
        shape = tuple(int(s) for s in entry.get("shape", []))
        values = np.asarray(entry.get("values", []), dtype=np.float64)
    except (ValueError, TypeError, AttributeError) as e:
        raise CheckpointError(f"파라미터 {name} 를 읽을 수 없습니다: {e}", _entry_offset(raw, name)) from e

    key = str(name)
    if shapes.get(key) != shape:
        raise CheckpointError(f"예상하지 못한 파라미터 또는 shape: {key} {shape}", _entry_offset(raw, name))
    if values.size != int(np.prod(shape)):
        raise CheckpointError(
            f"{key}: 값 개수 {values.size} 가 shape {shape} 와 맞지 않습니다", _entry_offset(raw, name)
        )
    return key, values.reshape(shape)


def load_checkpoint(path: str) -> tuple[DecompositionNet, NormStats | None, dict[str, object]]:
    """
    체크포인트를 읽어 (네트워크, 정규화 통계, extra) 를 반환합니다.

    Raises:
        CheckpointError: 파싱 실패(바이트 오프셋 포함), 누락/불일치 파라미터
        DataError: 파일이 없을 때
    """
    # 지연 import로 순환 참조 제거
    from src.training.preprocess import NormStats

    if not os.path.isfile(path):
        raise DataError(f"체크포인트를 찾을 수 없습니다: {path}")
    with open(path, "rb") as f:
        raw = f.read()
    document = _parse(raw)

    try:
        config = ModelConfig.model_validate(document.get("model"))
    except ValidationError as e:
        raise CheckpointError(f"모델 설정이 올바르지 않습니다: {e.errors()[0]['msg']}") from e

    entries = document.get("params")
    if not isinstance(entries, list):
        raise CheckpointError("params 목록이 없습니다")
    shapes = expected_shapes(config)
    params: dict[str, Tensor] = {}
    for entry in entries:
        name, values = _parse_entry(entry, raw, shapes)
        params[name] = Tensor.parameter(values, name=name)
    missing = [name for name in shapes if name not in params]
    if missing:
        raise CheckpointError(f"누락된 파라미터: {', '.join(missing)}")

    # 등록 순서를 설정 기준으로 맞춥니다
    ordered = {name: params[name] for name in shapes}
    raw_stats = document.get("norm_stats")
    stats = NormStats.from_dict(raw_stats) if isinstance(raw_stats, dict) else None
    extra = document.get("extra") or {}
    logger.info(f"📂 체크포인트 로드: {path}")
    return DecompositionNet(config, ordered), stats, dict(extra)
