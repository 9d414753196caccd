"""
이상 주입 모듈
유형별로 정확히 하나의 성분만 수정합니다.
- global / contextual : 잔차 r 에 점 스파이크
- shapelet / seasonal : 계절 성분 s 의 모양/주파수 변경
- trend               : 추세 τ 의 기울기 변경
마스크는 주입 전후 값이 달라진 시점에서만 True 가 됩니다.
추세 이상은 구간 뒤로 누적 오프셋이 이어지므로 Δτ 가 바뀐 구간만 표시합니다.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator

from src.shared.schemas import ANOMALY_KINDS, MIN_EVENT_SLOT, AnomalyKind

from .components import ComponentSet, Series

logger = logging.getLogger(__name__)

POINT_KINDS: frozenset[str] = frozenset({"global", "contextual"})

# --- global 스파이크 상수 ---
GLOBAL_K_MARGIN = 0.95
SPIKE_FLOOR = 1e-3
MAX_SPIKE_ROUNDS = 200


@dataclass(frozen=True, slots=True)
class AnomalyMagnitudes:
    """유형별 이상 강도 구간"""

    global_k: tuple[float, float] = (6.0, 10.0)
    contextual_k: tuple[float, float] = (3.0, 5.0)
    contextual_radius: int = 10
    trend_slope_k: tuple[float, float] = (2.0, 5.0)
    trend_slope_floor: float = 0.02
    seasonal_scales: tuple[float, ...] = (0.5, 2.0)
    shapelet_smoothing: int = 4


@dataclass(frozen=True, slots=True)
class InjectedEvent:
    kind: AnomalyKind
    start: int
    end: int  # 포함 구간 [start, end]


def _check_window(kind: str, window: tuple[int, int], length: int) -> None:
    if kind not in ANOMALY_KINDS:
        raise ValueError(f"알 수 없는 이상 유형: {kind}")
    start, end = window
    if not 0 <= start <= end < length:
        raise ValueError(f"구간 [{start}, {end}] 이 시리즈 범위 [0, {length - 1}] 를 벗어납니다")


def _spike_sign(rng: Generator) -> float:
    return 1.0 if rng.random() < 0.5 else -1.0


def feasible_global_k(length: int) -> float:
    """
    길이 length 인 시리즈에서 한 점이 도달할 수 있는 |r_t − median(r)| / std(r) 상한 (여유 5% 적용).
    나머지 점이 모두 같을 때 상한은 n / sqrt(n − 1) 입니다.
    """
    if length < 2:
        return 0.0
    return GLOBAL_K_MARGIN * length / math.sqrt(length - 1)


def _spike_offset(others: Series, center: float, sign: float, k: float) -> float:
    # v = center + sign·d 일 때 (v − center)² ≥ k²·var(r) 를 만족하는 최소 d (이차식의 양의 근)
    n = len(others) + 1
    total = float(np.sum(others))
    squares = float(np.sum(others * others))
    a = n * n - k * k * (n - 1)
    b = -2.0 * k * k * sign * ((n - 1) * center - total)
    c = -k * k * ((n - 1) * center * center - 2.0 * total * center + n * squares - total * total)
    disc = max(b * b - 4.0 * a * c, 0.0)
    return (-b + math.sqrt(disc)) / (2.0 * a)


def _inject_global(r: Series, start: int, end: int, rng: Generator, mag: AnomalyMagnitudes) -> None:
    # 크기는 주입 후의 median / std 기준으로 맞춥니다
    cap = feasible_global_k(len(r))
    for t in range(start, end + 1):
        k = rng.uniform(*mag.global_k)
        if k > cap:
            logger.warning(f"⚠️ 길이 {len(r)} 시리즈에서 global k={k:.2f} 는 불가능하여 {cap:.2f} 로 낮춥니다")
            k = cap
        sign = _spike_sign(rng)
        others = np.delete(r, t)
        center = float(np.median(np.append(others, sign * np.inf)))
        offset = max(_spike_offset(others, center, sign, k) * (1.0 + 1e-9), k * SPIKE_FLOOR)
        for _ in range(MAX_SPIKE_ROUNDS):
            r[t] = center + sign * offset
            if abs(r[t] - float(np.median(r))) >= k * float(np.std(r)):
                break
            # 이전 스파이크가 같은 방향 극단에 있어 median 이 달라진 경우
            center = float(np.median(r))
            offset *= 1.05


def _inject_contextual(
    x: Series, r: Series, start: int, end: int, rng: Generator, mag: AnomalyMagnitudes
) -> None:
    for t in range(start, end + 1):
        lo, hi = max(0, t - mag.contextual_radius), min(len(x), t + mag.contextual_radius + 1)
        local = max(float(np.std(x[lo:hi])), 1e-3)
        k = rng.uniform(*mag.contextual_k)
        r[t] += _spike_sign(rng) * k * local


def _inject_shapelet(s: Series, start: int, end: int, rng: Generator, mag: AnomalyMagnitudes) -> None:
    n = end - start + 1
    width = max(1, min(mag.shapelet_smoothing, n))
    kernel = np.ones(width) / width
    noise = rng.normal(0.0, 1.0, size=n + width - 1)
    smooth = np.convolve(noise, kernel, mode="valid")
    scale = max(float(np.std(s)), 1e-3)
    smooth = (smooth - smooth.mean()) / max(float(smooth.std()), 1e-12)
    s[start:end + 1] = float(np.mean(s[start:end + 1])) + scale * smooth


def warp_window(s: Series, start: int, end: int, factor: float) -> Series:
    """
    구간 안의 시간축을 factor 배로 늘리거나 줄인 값. factor=2 이면 국소 주파수가 두 배가 됩니다.
    기준점을 구간 시작 반 칸 앞에 두어 첫 시점도 값이 바뀝니다.
    """
    t = np.arange(start, end + 1, dtype=np.float64)
    anchor = start - 0.5
    source = anchor + (t - anchor) * factor
    return np.interp(source, np.arange(len(s), dtype=np.float64), s)


def _inject_seasonal(s: Series, start: int, end: int, rng: Generator, mag: AnomalyMagnitudes) -> None:
    factor = float(rng.choice(np.asarray(mag.seasonal_scales)))
    s[start:end + 1] = warp_window(s, start, end, factor)


def _inject_trend(trend: Series, start: int, end: int, rng: Generator, mag: AnomalyMagnitudes) -> None:
    # 구간 안에서만 Δτ 에 delta 를 더하고, 누적 오프셋은 구간 뒤로 그대로 이어집니다
    base = abs(float(np.mean(np.diff(trend)))) if len(trend) > 1 else 0.0
    delta = _spike_sign(rng) * rng.uniform(*mag.trend_slope_k) * max(base, mag.trend_slope_floor)
    steps = np.arange(1, end - start + 2, dtype=np.float64)
    trend[start:end + 1] += delta * steps
    trend[end + 1:] += delta * steps[-1]


def inject_anomalies(
    components: ComponentSet,
    kind: AnomalyKind,
    window: tuple[int, int],
    rng: Generator,
    magnitudes: AnomalyMagnitudes | None = None,
) -> ComponentSet:
    """
    한 개의 이상 이벤트를 주입한 새 ComponentSet 을 반환합니다 (입력은 변경하지 않음).

    Args:
        components: 주입 전 성분
        kind: global | contextual | shapelet | seasonal | trend
        window: 포함 구간 [start, end]
        rng: 시리즈 전용 난수 생성기
        magnitudes: 강도 설정 (기본값 AnomalyMagnitudes())

    Raises:
        ValueError: 알 수 없는 유형이거나 구간이 범위를 벗어날 때
    """
    _check_window(kind, window, components.length)
    mag = magnitudes or AnomalyMagnitudes()
    before = components
    after = components.copy()
    start, end = window

    match kind:
        case "global":
            _inject_global(after.remainder, start, end, rng, mag)
        case "contextual":
            _inject_contextual(before.compose(), after.remainder, start, end, rng, mag)
        case "shapelet":
            _inject_shapelet(after.seasonal, start, end, rng, mag)
        case "seasonal":
            _inject_seasonal(after.seasonal, start, end, rng, mag)
        case "trend":
            _inject_trend(after.trend, start, end, rng, mag)

    # 추세는 구간 뒤로 평행 이동만 하므로 Δτ 가 바뀐 구간 안에서만 변경으로 봅니다
    trend_changed = np.zeros(components.length, dtype=bool)
    trend_changed[start:end + 1] = after.trend[start:end + 1] != before.trend[start:end + 1]
    changed = (
        trend_changed
        | (after.seasonal != before.seasonal)
        | (after.remainder != before.remainder)
    )
    after.anomaly_mask = before.anomaly_mask | changed
    return after


def event_windows(
    region: tuple[int, int], kinds: list[AnomalyKind], window_length: tuple[int, int], rng: Generator
) -> list[InjectedEvent]:
    """
    region [lo, hi) 을 이벤트 수만큼 균등 슬롯으로 나누고 슬롯마다 하나의 구간을 배치합니다.
    seasonal 이벤트는 시간축 확장(×2)이 슬롯 안에 머물도록 길이를 제한합니다.
    """
    lo, hi = region
    if not kinds:
        return []
    slot = (hi - lo) // len(kinds)
    if slot < MIN_EVENT_SLOT:
        raise ValueError(f"이벤트 {len(kinds)} 개를 배치하기에 구간이 짧습니다: {region}")

    events: list[InjectedEvent] = []
    for i, kind in enumerate(kinds):
        slot_lo = lo + i * slot
        if kind in POINT_KINDS:
            length = 1
        else:
            limit = max(1, (slot - 2) // (3 if kind == "seasonal" else 2))
            length = int(min(rng.integers(window_length[0], window_length[1] + 1), limit))
        margin = 1 if kind in POINT_KINDS else length
        first = slot_lo + margin
        last = slot_lo + slot - (2 * length if kind == "seasonal" else length) - 1
        start = int(rng.integers(first, max(first, last) + 1))
        events.append(InjectedEvent(kind, start, start + length - 1))
    return events
