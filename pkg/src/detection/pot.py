"""
Peaks-Over-Threshold 임계값 보정
초과량(excess)에 일반화 파레토 분포(GPD)를 최대우도로 적합합니다.
- shape γ: [-0.5, 1.0] 전체를 0.001 간격으로 격자 탐색 (이웃 격자점의 σ 로 Newton 을 시작)
- scale σ: γ 마다 우도 방정식 n = (1+γ)·Σ y/(σ+γy) 의 근 (γ = 0 이면 σ = 평균)
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from src.shared.errors import CalibrationError
from src.shared.schemas import PotParams
from src.shared.types import CalibrationReport

logger = logging.getLogger(__name__)

SHAPE_MIN = -0.5
SHAPE_MAX = 1.0
SHAPE_STEP = 1e-3
ZERO_SHAPE = 1e-6

FloatArray = NDArray[np.float64]


@dataclass(frozen=True, slots=True)
class GpdFit:
    shape: float
    scale: float
    peaks_count: int
    total_count: int
    log_likelihood: float
    at_grid_bound: bool


@dataclass(frozen=True, slots=True)
class PotResult:
    threshold: float
    init_threshold: float
    fit: GpdFit
    params: PotParams

    def report(self, include_remainder: bool = False) -> CalibrationReport:
        return CalibrationReport(
            init_threshold=self.init_threshold,
            shape=self.fit.shape,
            scale=self.fit.scale,
            peaks_count=self.fit.peaks_count,
            total_count=self.fit.total_count,
            risk=self.params.risk,
            init_quantile=self.params.init_quantile,
            threshold=self.threshold,
            shape_at_grid_bound=self.fit.at_grid_bound,
            include_remainder=include_remainder,
        )


# ---------------------------------------------------------------------------
# GPD 우도
# ---------------------------------------------------------------------------
def gpd_log_likelihood(y: FloatArray, shape: float, scale: float) -> float:
    if scale <= 0:
        return -math.inf
    n = len(y)
    if abs(shape) < 1e-12:
        return -n * math.log(scale) - float(y.sum()) / scale
    z = 1.0 + shape * y / scale
    if np.any(z <= 0):
        return -math.inf
    return -n * math.log(scale) - (1.0 + 1.0 / shape) * float(np.log(z).sum())


def profile_scale(
    y: FloatArray, shape: float, tol: float = 1e-12, max_iter: int = 200, guess: float | None = None
) -> float:
    """
    고정된 γ 에서 σ 의 최대우도 추정값 (Newton 단계 + 이분법 보호).
    guess 가 구간 안에 있으면 그 값에서 Newton 을 시작합니다.
    """
    if abs(shape) < 1e-12:
        return float(y.mean())
    n = len(y)

    def _h(sigma: float) -> tuple[float, float]:
        d = sigma + shape * y
        value = (1.0 + shape) * float(np.sum(y / d)) - n
        slope = -(1.0 + shape) * float(np.sum(y / (d * d)))
        return value, slope

    lo = max(0.0, -shape * float(y.max()))
    start = guess if guess is not None and guess > lo else float(y.mean())
    hi = max(start, lo) * 2.0 + 1e-12
    while _h(hi)[0] > 0:
        hi *= 2.0

    sigma = start if lo < start < hi else 0.5 * (lo + hi)
    for _ in range(max_iter):
        value, slope = _h(sigma)
        if abs(value) <= tol * n:
            break
        if value > 0:
            lo = sigma
        else:
            hi = sigma
        step = sigma - value / slope
        sigma = step if lo < step < hi else 0.5 * (lo + hi)
        if hi - lo <= tol * hi:
            break
    return sigma


def _best_on_grid(y: FloatArray, grid: FloatArray) -> tuple[float, float, float]:
    best = (float(grid[0]), math.nan, -math.inf)
    scale: float | None = None
    for shape in grid:
        g = float(shape)
        scale = profile_scale(y, g, guess=scale)
        ll = gpd_log_likelihood(y, g, scale)
        if ll > best[2]:
            best = (g, scale, ll)
    return best


def _grid(lo: float, hi: float, step: float) -> FloatArray:
    count = int(round((hi - lo) / step)) + 1
    return np.round(lo + step * np.arange(count), 10)


def fit_gpd(excesses: FloatArray, min_excesses: int = 30, total_count: int | None = None) -> GpdFit:
    """
    초과량에 GPD 를 적합합니다.

    Raises:
        CalibrationError: 초과량이 min_excesses 보다 적거나 값의 퍼짐이 없을 때
    """
    y = np.asarray(excesses, dtype=np.float64)
    if len(y) < min_excesses:
        raise CalibrationError(
            f"초과량이 {len(y)}개로 최소 {min_excesses}개보다 적습니다. pot.init_quantile 을 낮추세요"
        )
    if np.any(y <= 0) or not np.all(np.isfinite(y)):
        raise CalibrationError("초과량은 양의 유한값이어야 합니다")
    if float(np.ptp(y)) <= 0.0:
        raise CalibrationError("초과량의 퍼짐이 없어 GPD 를 적합할 수 없습니다")

    shape, scale, ll = _best_on_grid(y, _grid(SHAPE_MIN, SHAPE_MAX, SHAPE_STEP))

    at_bound = shape <= SHAPE_MIN or shape >= SHAPE_MAX
    if at_bound:
        logger.warning(f"⚠️ GPD shape 추정값이 격자 경계에 걸렸습니다: γ={shape:+.3f}")
    return GpdFit(shape, scale, len(y), total_count or len(y), ll, at_bound)


def tail_quantile(init_threshold: float, fit: GpdFit, risk: float) -> float:
    """z_q = t₀ + (σ/γ)·((q·n/N_t)^(−γ) − 1), |γ| < 1e-6 이면 t₀ + σ·ln(N_t/(q·n))"""
    ratio = risk * fit.total_count / fit.peaks_count
    if abs(fit.shape) < ZERO_SHAPE:
        return init_threshold + fit.scale * math.log(1.0 / ratio)
    return init_threshold + (fit.scale / fit.shape) * (ratio ** (-fit.shape) - 1.0)


def pot_threshold(scores: FloatArray, params: PotParams) -> PotResult:
    """보정 분할 점수에서 최종 임계값 z_q 를 계산합니다."""
    s = np.asarray(scores, dtype=np.float64)
    if s.size == 0 or not np.all(np.isfinite(s)):
        raise CalibrationError("보정 점수가 비어 있거나 비유한 값을 포함합니다")
    t0 = float(np.quantile(s, params.init_quantile))
    peaks = s[s > t0] - t0
    fit = fit_gpd(peaks, params.min_excesses, total_count=s.size)
    threshold = tail_quantile(t0, fit, params.risk)
    logger.info(
        f"📏 POT 보정: t0={t0:.6g}, γ={fit.shape:+.3f}, σ={fit.scale:.6g}, "
        f"N_t={fit.peaks_count}, n={fit.total_count}, 임계값={threshold:.6g}"
    )
    return PotResult(threshold, t0, fit, params)


def label_anomalies(scores: FloatArray, threshold: float) -> NDArray[np.bool_]:
    """label_t = score_t > threshold"""
    if not math.isfinite(threshold):
        raise CalibrationError(f"임계값이 유한하지 않습니다: {threshold}")
    return np.asarray(scores) > threshold
