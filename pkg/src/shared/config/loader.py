"""
YAML 형식의 실행 설정 파일을 로드하고 검증하는 모듈
- 파일 값 위에 `--set section.key=value` 형태의 커맨드라인 값을 덮어씁니다.
- 최종 딕셔너리는 `RunConfig` 로 검증되며, 실패 시 키 경로를 담은 ConfigError 를 던집니다.
"""
from __future__ import annotations

import logging
import os
from collections.abc import Sequence
from typing import cast

import yaml
from pydantic import ValidationError

from src.shared.errors import ConfigError, DataError
from src.shared.schemas import RunConfig

logger = logging.getLogger(__name__)

# --- 상수 정의 ---
CONFIG_DIR = os.path.dirname(__file__)
DEFAULT_CONFIG_PATH = os.path.join(CONFIG_DIR, "default.yml")
FULL_SCALE_CONFIG_PATH = os.path.join(CONFIG_DIR, "full_scale.yml")


def read_config_file(path: str) -> dict[str, object]:
    """YAML 파일을 읽어 딕셔너리로 반환합니다. 비어 있으면 빈 딕셔너리."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
    except FileNotFoundError as e:
        raise DataError(f"설정 파일을 찾을 수 없습니다: {path}") from e
    except yaml.YAMLError as e:
        raise ConfigError("<file>", f"YAML 파싱 오류 ({path}): {e}") from e

    if not isinstance(data, dict):
        raise ConfigError("<root>", f"최상위 항목은 매핑이어야 합니다 ({path})")
    return cast(dict[str, object], data)


def apply_overrides(data: dict[str, object], overrides: Sequence[str]) -> dict[str, object]:
    """
    `section.key=value` 목록을 중첩 딕셔너리에 반영합니다.
    값은 YAML 스칼라로 해석합니다 (예: `1e-3`, `true`, `[1, 2]`).
    """
    merged: dict[str, object] = {k: (dict(v) if isinstance(v, dict) else v) for k, v in data.items()}
    for item in overrides:
        if "=" not in item:
            raise ConfigError(item, "덮어쓰기 형식은 key=value 여야 합니다")
        dotted, raw = item.split("=", 1)
        parts = [p for p in dotted.strip().split(".") if p]
        if not parts:
            raise ConfigError(item, "키가 비어 있습니다")
        try:
            value = yaml.safe_load(raw)
        except yaml.YAMLError as e:
            raise ConfigError(dotted, f"값을 해석할 수 없습니다: {raw}") from e

        node = merged
        for part in parts[:-1]:
            child = node.get(part)
            if child is None:
                child = {}
                node[part] = child
            if not isinstance(child, dict):
                raise ConfigError(dotted, f"'{part}' 는 섹션이 아닙니다")
            node = cast(dict[str, object], child)
        node[parts[-1]] = value
    return merged


def validate_config(data: dict[str, object]) -> RunConfig:
    """딕셔너리를 RunConfig 로 검증합니다. 첫 번째 오류의 키 경로를 메시지에 담습니다."""
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        key = ".".join(str(p) for p in first["loc"]) or "<root>"
        # 모델 단위 검증은 ctx["field"] 로 실제 필드를 알려 줍니다
        field = (first.get("ctx") or {}).get("field")
        if field:
            key = field if key == "<root>" else f"{key}.{field}"
        raise ConfigError(key, first["msg"]) from e


def load_run_config(path: str | None = None, overrides: Sequence[str] = ()) -> RunConfig:
    """
    설정 파일을 로드하고 덮어쓰기를 반영한 뒤 검증된 RunConfig 를 반환합니다.

    Args:
        path: YAML 설정 파일 경로 (None 이면 번들된 desk-scale 기본값)
        overrides: `section.key=value` 문자열 목록

    Returns:
        RunConfig: 검증이 끝난 실행 설정
    """
    data = read_config_file(path or DEFAULT_CONFIG_PATH)
    config = validate_config(apply_overrides(data, overrides))
    logger.debug(f"설정 로드 완료: {path or DEFAULT_CONFIG_PATH}")
    return config


def config_echo(config: RunConfig) -> dict[str, object]:
    """매니페스트에 기록할 설정 사본 (JSON 직렬화 가능한 형태)"""
    return cast(dict[str, object], config.model_dump(mode="json"))
