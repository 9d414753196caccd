"""
공통 Pydantic 설정 모델 정의 모듈
YAML 설정 파일의 각 섹션(synth, model, train, pot, detect, paths)을 검증합니다.
알 수 없는 키는 모두 거부됩니다 (extra="forbid").
"""
from __future__ import annotations

from typing import Literal, TypeAlias

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from pydantic_core import PydanticCustomError

TrendMode: TypeAlias = Literal["deterministic", "stochastic", "mixed"]
SeasonalMode: TypeAlias = Literal["sinusoid", "square", "stochastic_cycle", "mixed"]
AnomalyKind: TypeAlias = Literal["global", "contextual", "shapelet", "seasonal", "trend"]
Phase: TypeAlias = Literal["pretrain", "finetune", "both"]
Ablation: TypeAlias = Literal["none", "no_sep", "no_decomp", "no_augment"]

ANOMALY_KINDS: tuple[AnomalyKind, ...] = ("global", "contextual", "shapelet", "seasonal", "trend")
ABLATIONS: tuple[Ablation, ...] = ("none", "no_sep", "no_decomp", "no_augment")

MIN_EVENT_SLOT = 3


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


def _check_range(lo: float, hi: float) -> None:
    if lo > hi:
        raise ValueError(f"빈 구간입니다 (min {lo} > max {hi})")


def field_error(field: str, message: str) -> PydanticCustomError:
    """모델 단위 검증 오류에 필드 이름을 붙입니다 (ctx["field"])."""
    return PydanticCustomError("field_constraint", message, {"field": field})


# --- synthgen ---
class SynthConfig(_Strict):
    series_count: int = Field(64, ge=1)
    length: int = Field(512, ge=16, description="시리즈 길이 T")
    master_seed: int = Field(0, ge=0)

    trend_mode: TrendMode = "mixed"
    beta0_range: tuple[float, float] = (-1.0, 1.0)
    beta1_range: tuple[float, float] = (-0.02, 0.02)
    trend_noise_sigma: float = Field(0.01, gt=0)

    seasonal_mode: SeasonalMode = "mixed"
    period_range: tuple[int, int] = (8, 64)
    phase_range: tuple[int, int] = (0, 63)
    amplitude_range: tuple[float, float] = (0.5, 2.0)
    wave_count_range: tuple[int, int] = (1, 3)
    jitter: bool = True
    cycle_scale_range: tuple[float, float] = (0.9, 1.1)
    cycle_length_jitter: float = Field(0.1, ge=0, lt=1)

    remainder_sigma_range: tuple[float, float] = (0.05, 0.2)

    anomaly_ratio: float = Field(0.1, ge=0, le=1)
    anomaly_kinds: tuple[AnomalyKind, ...] = ANOMALY_KINDS
    anomaly_events_range: tuple[int, int] = (1, 3)
    anomaly_window_length: tuple[int, int] = (10, 30)

    # gen_target_split 전용
    channels: int = Field(1, ge=1)
    target_train_length: int = Field(2048, ge=16)
    target_test_length: int = Field(2048, ge=16)
    target_anomaly_events: int = Field(5, ge=0)

    workers: int = Field(1, ge=1)

    @field_validator(
        "beta0_range", "beta1_range", "period_range", "phase_range", "amplitude_range",
        "wave_count_range", "cycle_scale_range", "remainder_sigma_range",
        "anomaly_events_range", "anomaly_window_length",
    )
    @classmethod
    def _nonempty(cls, value: tuple[float, float]) -> tuple[float, float]:
        _check_range(value[0], value[1])
        return value

    @field_validator("remainder_sigma_range", "amplitude_range", "cycle_scale_range")
    @classmethod
    def _nonnegative(cls, value: tuple[float, float]) -> tuple[float, float]:
        if value[0] < 0:
            raise ValueError("음수 하한은 허용되지 않습니다")
        return value

    @field_validator("anomaly_kinds")
    @classmethod
    def _kinds_present(cls, value: tuple[AnomalyKind, ...]) -> tuple[AnomalyKind, ...]:
        if not value:
            raise ValueError("최소 한 개의 이상 유형이 필요합니다")
        return value

    @model_validator(mode="after")
    def _periods_within_length(self) -> SynthConfig:
        lo, hi = self.period_range
        if lo <= 1 or hi >= self.length:
            raise ValueError(f"period_range 는 (1, {self.length}) 안에 있어야 합니다: {self.period_range}")
        if self.anomaly_window_length[1] * 4 > self.length:
            raise ValueError("anomaly_window_length 최대값이 length/4 를 넘습니다")
        if self.wave_count_range[0] < 1 or self.anomaly_events_range[0] < 0:
            raise ValueError("wave_count_range / anomaly_events_range 하한이 잘못되었습니다")
        return self

    @model_validator(mode="after")
    def _events_fit_slots(self) -> SynthConfig:
        # event_windows 는 구간을 이벤트 수만큼 나눈 슬롯마다 최소 MIN_EVENT_SLOT 시점이 필요합니다
        corpus_events = max(1, self.anomaly_events_range[1])
        if self.length // corpus_events < MIN_EVENT_SLOT:
            raise field_error(
                "anomaly_events_range",
                f"이벤트 최대 {corpus_events}개를 length {self.length} 에 배치할 수 없습니다 "
                f"(이벤트당 최소 {MIN_EVENT_SLOT} 시점)",
            )
        events = self.target_anomaly_events
        if events and self.target_test_length // events < MIN_EVENT_SLOT:
            raise field_error(
                "target_anomaly_events",
                f"이벤트 {events}개를 target_test_length {self.target_test_length} 에 배치할 수 없습니다 "
                f"(이벤트당 최소 {MIN_EVENT_SLOT} 시점)",
            )
        return self


# --- model ---
class ModelConfig(_Strict):
    frame_length: int = Field(2, ge=1, description="프레임 길이 L (커널 크기 W)")
    stride: int = Field(1, ge=1, description="프레임 간 이동 S")
    basis_count: int = Field(32, ge=1, description="기저 개수 N (인코딩 차원 E)")
    bottleneck_dim: int = Field(16, ge=1, description="F")
    hidden_dim: int = Field(32, ge=1, description="H")
    block_count: int = Field(2, ge=1)
    chunk_size: int = Field(16, ge=1)
    separator_enabled: bool = True
    separator_kind: Literal["dprnn"] = "dprnn"

    @model_validator(mode="after")
    def _stride_within_frame(self) -> ModelConfig:
        if self.stride > self.frame_length:
            raise ValueError(f"stride({self.stride}) 는 frame_length({self.frame_length}) 이하여야 합니다")
        return self


# --- training ---
class TrainConfig(_Strict):
    phase: Phase = "both"
    pretrain_lr: float = Field(1e-3, gt=0)
    finetune_lr: float = Field(5e-4, gt=0)
    pretrain_epochs: int = Field(50, ge=1)
    finetune_epochs: int = Field(15, ge=1)
    batch_size: int = Field(8, ge=1)
    block_length: int = Field(512, ge=1, description="세그먼트 길이 P")
    seed: int = Field(0, ge=0)
    ablation: Ablation = "none"
    progress: bool = True


# --- detection ---
class PotParams(_Strict):
    init_quantile: float = Field(0.98, gt=0, lt=1)
    risk: float = Field(1e-3, gt=0, lt=1)
    min_excesses: int = Field(30, ge=1)


class DetectConfig(_Strict):
    include_remainder: bool = False


class PathsConfig(_Strict):
    corpus_dir: str = "runs/corpus"
    target_dir: str = "runs/corpus/target"
    train_data: str | None = None
    test_data: str | None = None
    checkpoint: str = "runs/model/checkpoint.yml"
    train_dir: str = "runs/model"
    run_dir: str = "runs/detect"


class RunConfig(_Strict):
    """모든 섹션을 병합한 실행 설정. 단일 `seed` 가 모든 난수의 출처입니다."""

    seed: int = Field(0, ge=0)
    synth: SynthConfig = SynthConfig()
    model: ModelConfig = ModelConfig()
    train: TrainConfig = TrainConfig()
    pot: PotParams = PotParams()
    detect: DetectConfig = DetectConfig()
    paths: PathsConfig = PathsConfig()

    @model_validator(mode="before")
    @classmethod
    def _propagate_seed(cls, data: object) -> object:
        # 섹션별 시드가 명시되지 않았다면 최상위 seed 를 사용
        if isinstance(data, dict) and "seed" in data:
            data = dict(data)
            seed = data["seed"]
            for section, key in (("synth", "master_seed"), ("train", "seed")):
                block = data.get(section)
                if block is None:
                    data[section] = {key: seed}
                elif isinstance(block, dict) and key not in block:
                    data[section] = {**block, key: seed}
        return data

    @model_validator(mode="after")
    def _block_covers_frame(self) -> RunConfig:
        if self.train.block_length < self.model.frame_length:
            raise ValueError("train.block_length 는 model.frame_length 이상이어야 합니다")
        return self
