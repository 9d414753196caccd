"""
합성 시계열 성분 생성기
추세(결정적/확률적), 계절성(사인파/사각파/확률적 주기), 잔차(백색잡음) 와
성분 묶음(ComponentSet) 을 정의합니다. 시간 인덱스는 0 부터 시작합니다.
"""
from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Literal, TypeAlias

import numpy as np
from numpy.random import Generator
from numpy.typing import NDArray

Series: TypeAlias = NDArray[np.float64]
WaveKind: TypeAlias = Literal["sine", "square"]


class DegenerateVarianceError(ValueError):
    """분산이 0 인 시리즈는 표준화할 수 없습니다"""


# ---------------------------------------------------------------------------
# 성분 묶음
# ---------------------------------------------------------------------------
@dataclass(slots=True)
class ComponentSet:
    """한 채널의 추세/계절/잔차 성분과 이상 마스크"""

    trend: Series
    seasonal: Series
    remainder: Series
    anomaly_mask: NDArray[np.bool_] = field(default_factory=lambda: np.zeros(0, dtype=bool))

    def __post_init__(self) -> None:
        n = len(self.trend)
        if self.anomaly_mask.size == 0 and n:
            self.anomaly_mask = np.zeros(n, dtype=bool)
        if not (len(self.seasonal) == len(self.remainder) == len(self.anomaly_mask) == n):
            raise ValueError(
                f"성분 길이 불일치: trend={n}, seasonal={len(self.seasonal)}, "
                f"remainder={len(self.remainder)}, mask={len(self.anomaly_mask)}"
            )

    @property
    def length(self) -> int:
        return len(self.trend)

    def copy(self) -> ComponentSet:
        return ComponentSet(
            self.trend.copy(), self.seasonal.copy(), self.remainder.copy(), self.anomaly_mask.copy()
        )

    def compose(self) -> Series:
        return compose_series(self)


def compose_series(components: ComponentSet) -> Series:
    """x_t = τ_t + s_t + r_t"""
    t, s, r = components.trend, components.seasonal, components.remainder
    if not len(t) == len(s) == len(r):
        raise ValueError(f"성분 길이 불일치: {len(t)}, {len(s)}, {len(r)}")
    return t + s + r


# ---------------------------------------------------------------------------
# 추세
# ---------------------------------------------------------------------------
def gen_linear_trend(beta0: float, beta1: float, length: int) -> Series:
    """τ_t = β0 + β1·t"""
    if length < 1:
        raise ValueError(f"length 는 1 이상이어야 합니다: {length}")
    return beta0 + beta1 * np.arange(length, dtype=np.float64)


def integrate_twice(noise: Series) -> Series:
    """이중 누적합. 결과의 2차 차분이 입력과 같습니다 (t ≥ 2)."""
    return np.cumsum(np.cumsum(np.asarray(noise, dtype=np.float64)))


def gen_stochastic_trend(length: int, sigma: float, rng: Generator) -> Series:
    """ARIMA(0,2,0): X_t ~ N(0, σ²) 를 두 번 적분한 추세"""
    if length < 1:
        raise ValueError(f"length 는 1 이상이어야 합니다: {length}")
    if sigma <= 0:
        raise ValueError(f"sigma 는 양수여야 합니다: {sigma}")
    return integrate_twice(rng.normal(0.0, sigma, size=length))


# ---------------------------------------------------------------------------
# 계절성
# ---------------------------------------------------------------------------
@dataclass(frozen=True, slots=True)
class Wave:
    """결정적 주기 신호 하나. phase 는 라디안."""

    kind: WaveKind
    amplitude: float
    period: float
    phase: float = 0.0


def gen_deterministic_seasonal(waves: Sequence[Wave], length: int) -> Series:
    """
    사인파 A·sin(2πt/T0 + φ) 와 사각파 A·sign(sin(2πt/T0 + φ)) 의 합.
    사각파의 영점 교차 지점은 상승 구간(+A)으로 둡니다.
    """
    if not waves:
        raise ValueError("최소 한 개의 파형이 필요합니다")
    t = np.arange(length, dtype=np.float64)
    out = np.zeros(length)
    for wave in waves:
        if wave.period <= 0:
            raise ValueError(f"period 는 양수여야 합니다: {wave.period}")
        if wave.kind == "sine":
            out += wave.amplitude * np.sin(2.0 * np.pi * t / wave.period + wave.phase)
        else:
            cycle = np.mod(t / wave.period + wave.phase / (2.0 * np.pi), 1.0)
            out += np.where(cycle < 0.5, wave.amplitude, -wave.amplitude)
    return out


@dataclass(frozen=True, slots=True)
class CycleJitter:
    """주기별 진폭 배율 구간과 주기 길이 재표본화 비율(±)"""

    scale_range: tuple[float, float] = (0.9, 1.1)
    length_jitter: float = 0.1


def tile_cycle(segment: Series, phase: int, length: int) -> Series:
    """s_t = segment[(t + φ) mod T0]"""
    period = len(segment)
    return segment[(np.arange(length) + phase) % period]


def cycle_boundaries(length: int, period: int, phase: int) -> list[tuple[int, int]]:
    """타일링 좌표 (t+φ)//T0 기준으로 나눈 주기 구간 [start, stop) 목록"""
    cycle_id = (np.arange(length) + phase) // period
    starts = np.flatnonzero(np.diff(cycle_id, prepend=cycle_id[0] - 1))
    stops = np.append(starts[1:], length)
    return [(int(a), int(b)) for a, b in zip(starts, stops)]


def scale_cycles(
    tiled: Series, period: int, phase: int, scale_range: tuple[float, float], rng: Generator
) -> tuple[Series, Series]:
    """주기마다 하나의 배율을 곱합니다. (배율 적용 시리즈, 주기별 배율) 반환"""
    bounds = cycle_boundaries(len(tiled), period, phase)
    factors = rng.uniform(scale_range[0], scale_range[1], size=len(bounds))
    out = tiled.copy()
    for (start, stop), factor in zip(bounds, factors):
        out[start:stop] *= factor
    return out, factors


def resample_cycles(
    series: Series, period: int, phase: int, length_jitter: float, length: int, rng: Generator
) -> Series:
    """각 주기를 선형 보간으로 T0·(1±jitter) 길이로 재표본화한 뒤 length 로 자릅니다."""
    pieces: list[Series] = []
    for start, stop in cycle_boundaries(len(series), period, phase):
        piece = series[start:stop]
        n = len(piece)
        if n < 2:
            pieces.append(piece)
            continue
        new_n = max(2, int(round(n * (1.0 + rng.uniform(-length_jitter, length_jitter)))))
        pieces.append(np.interp(np.linspace(0.0, n - 1, new_n), np.arange(n), piece))
    out = np.concatenate(pieces)
    if len(out) < length:
        raise ValueError("재표본화 결과가 요청 길이보다 짧습니다")
    return out[:length]


def gen_stochastic_seasonal(
    period: int, phase: int, length: int, rng: Generator, jitter: CycleJitter | None = None
) -> Series:
    """
    느리게 변하는 확률적 추세 한 주기(길이 T0)를 표준화해 반복합니다.
    jitter 가 주어지면 주기별 진폭 배율 → 주기 길이 재표본화 순으로 적용합니다.
    """
    if not 1 < period < length:
        raise ValueError(f"period 는 (1, {length}) 범위여야 합니다: {period}")
    segment = standardize(gen_stochastic_trend(period, 1.0, rng))
    if jitter is None:
        return tile_cycle(segment, phase, length)

    # 재표본화로 주기가 줄어들어도 길이가 모자라지 않도록 두 배로 타일링
    tiled = tile_cycle(segment, phase, 2 * length)
    scaled, _ = scale_cycles(tiled, period, phase, jitter.scale_range, rng)
    return resample_cycles(scaled, period, phase, jitter.length_jitter, length, rng)


# ---------------------------------------------------------------------------
# 잔차 / 표준화
# ---------------------------------------------------------------------------
def gen_remainder(length: int, sigma: float, rng: Generator) -> Series:
    """i.i.d. N(0, σ²) 백색잡음"""
    if sigma < 0:
        raise ValueError(f"sigma 는 음수일 수 없습니다: {sigma}")
    return rng.normal(0.0, sigma, size=length)


def standardize(series: Series) -> Series:
    """평균 0, 모표준편차 1 로 변환"""
    x = np.asarray(series, dtype=np.float64)
    if len(x) < 2:
        raise DegenerateVarianceError(f"표준화에는 길이 2 이상이 필요합니다: {len(x)}")
    mu = x.mean()
    sd = x.std()
    if sd <= 1e-12 * max(1.0, math.fabs(mu)):
        raise DegenerateVarianceError("분산이 0 인 시리즈입니다")
    out = (x - mu) / sd
    # 한 번 더 보정해 모멘트 오차를 반올림 수준으로 줄입니다
    return (out - out.mean()) / out.std()
