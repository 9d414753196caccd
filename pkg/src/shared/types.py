"""
모듈 사이에서 주고받는 매니페스트/보고서 타입 정의
"""
from typing import TypedDict

# --- 코퍼스 ---


class CorpusSeriesEntry(TypedDict):
    file: str
    index: int
    seed: list[int]
    anomalous: bool
    events: list[dict[str, object]]


class CorpusManifest(TypedDict):
    config: dict[str, object]
    series: list[CorpusSeriesEntry]


# --- 실행 매니페스트 ---


class StageTiming(TypedDict):
    stage: str
    seconds: float


class RunManifest(TypedDict):
    command: str
    config: dict[str, object]
    inputs: dict[str, str]  # 경로 → git-style blob 해시
    timings: list[StageTiming]
    outputs: dict[str, str]


# --- 탐지 ---


class CalibrationReport(TypedDict):
    init_threshold: float
    shape: float
    scale: float
    peaks_count: int
    total_count: int
    risk: float
    init_quantile: float
    threshold: float
    shape_at_grid_bound: bool
    include_remainder: bool
