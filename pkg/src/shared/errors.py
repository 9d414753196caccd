"""
파이프라인 공통 예외 정의
CLI 는 `exit_code` 를 그대로 프로세스 종료 코드로 사용합니다.
"""
from __future__ import annotations

from typing import ClassVar


class TadError(Exception):
    """모든 파이프라인 오류의 기반 클래스"""

    exit_code: ClassVar[int] = 1


class ConfigError(TadError):
    """설정 검증 실패 (종료 코드 1)"""

    exit_code: ClassVar[int] = 1

    def __init__(self, key: str, message: str):
        self.key: str = key
        super().__init__(f"{key}: {message}")


class DataError(TadError):
    """입출력 / 입력 데이터 형식 오류 (종료 코드 2)"""

    exit_code: ClassVar[int] = 2


class CheckpointError(DataError):
    """체크포인트 파싱 실패. `offset` 은 실패 지점의 바이트 오프셋"""

    def __init__(self, message: str, offset: int | None = None):
        self.offset: int | None = offset
        suffix = f" (byte offset {offset})" if offset is not None else ""
        super().__init__(f"{message}{suffix}")


class NumericError(TadError):
    """비유한(non-finite) 손실 등 수치 오류 (종료 코드 3)"""

    exit_code: ClassVar[int] = 3


class CalibrationError(NumericError):
    """POT 임계값 보정 실패"""
