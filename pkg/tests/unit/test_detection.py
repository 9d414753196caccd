# pyright: reportMissingParameterType=false
import logging
import math

import numpy as np
import pytest

from src.detection import (
    GpdFit,
    calibrate,
    decomposition_frame,
    detect_entity,
    fit_gpd,
    gpd_log_likelihood,
    label_anomalies,
    pot_threshold,
    profile_scale,
    score,
    scores_frame,
    tail_quantile,
)
from src.model import DecompositionNet
from src.shared.errors import CalibrationError, DataError
from src.shared.schemas import PotParams
from src.training import NormStats


# --- 점수 ---
def test_score_examples(rng):
    x = rng.normal(size=(10, 3))
    assert not score(x, x).any()
    residual = np.array([[3.0, 4.0]])
    assert score(residual, np.zeros((1, 2)))[0] == pytest.approx(5.0)
    np.testing.assert_allclose(score(np.array([1.0, -2.0]), np.array([0.5, 0.0])), [0.5, 2.0])


def test_score_channel_permutation_invariant(rng):
    x, y = rng.normal(size=(20, 4)), rng.normal(size=(20, 4))
    perm = [2, 0, 3, 1]
    np.testing.assert_allclose(score(x, y), score(x[:, perm], y[:, perm]))


def test_score_shape_mismatch():
    with pytest.raises(DataError):
        score(np.zeros((4, 2)), np.zeros((4, 3)))


# --- GPD 적합 ---
def test_fit_gpd_exponential():
    y = np.random.default_rng(11).exponential(1.0, size=100_000)
    fit = fit_gpd(y)
    assert abs(fit.shape) <= 0.05
    assert abs(fit.scale - 1.0) <= 0.05
    assert not fit.at_grid_bound


def test_fit_gpd_uniform_pins_grid_minimum(caplog):
    y = np.random.default_rng(12).uniform(0.0, 1.0, size=100_000)
    with caplog.at_level(logging.WARNING):
        fit = fit_gpd(y)
    assert fit.shape == pytest.approx(-0.5)
    assert fit.at_grid_bound
    assert "격자 경계" in caplog.text


def test_fit_gpd_too_few_excesses():
    with pytest.raises(CalibrationError, match="init_quantile"):
        fit_gpd(np.linspace(0.1, 1.0, 10), min_excesses=30)


@pytest.mark.parametrize(("seed", "shape"), [(21, 0.237), (22, -0.183), (23, 0.611)])
def test_fit_gpd_searches_full_fine_grid(seed, shape):
    rng = np.random.default_rng(seed)
    y = 1.7 / shape * (rng.uniform(size=400) ** (-shape) - 1.0)
    fit = fit_gpd(y)
    assert round(fit.shape * 1000) == pytest.approx(fit.shape * 1000, abs=1e-6)

    # 모든 0.001 격자점을 독립적으로 평가한 최댓값과 같아야 합니다
    grid = np.round(-0.5 + 1e-3 * np.arange(1501), 10)
    best = max(gpd_log_likelihood(y, float(g), profile_scale(y, float(g))) for g in grid)
    assert fit.log_likelihood == pytest.approx(best, rel=0, abs=1e-8)
    assert fit.scale == pytest.approx(profile_scale(y, fit.shape), rel=1e-9)


def test_profile_scale_guess_does_not_change_root():
    y = np.random.default_rng(24).exponential(2.0, size=500)
    for shape in (-0.3, 0.2, 0.8):
        cold = profile_scale(y, shape)
        for guess in (1e-3, cold * 0.5, cold * 10.0):
            assert profile_scale(y, shape, guess=guess) == pytest.approx(cold, rel=1e-9)


def test_tail_quantile_zero_shape_limit():
    n, peaks = 1000, 100
    fit = GpdFit(shape=0.0, scale=1.0, peaks_count=peaks, total_count=n, log_likelihood=0.0, at_grid_bound=False)
    risk = peaks / (n * math.e)
    assert tail_quantile(1.0, fit, risk) == pytest.approx(2.0)


def test_tail_quantile_continuous_near_zero_shape():
    base = dict(scale=1.3, peaks_count=200, total_count=10_000, log_likelihood=0.0, at_grid_bound=False)
    zero = tail_quantile(0.5, GpdFit(shape=0.0, **base), 1e-3)
    near = tail_quantile(0.5, GpdFit(shape=1e-4, **base), 1e-3)
    assert near == pytest.approx(zero, rel=1e-3)


def test_pot_threshold_exponential_tail():
    scores = np.random.default_rng(13).exponential(1.0, size=100_000)
    result = pot_threshold(scores, PotParams(init_quantile=0.98, risk=1e-4))
    assert abs(result.threshold - math.log(1e4)) <= 0.15 * math.log(1e4)
    assert result.fit.total_count == 100_000
    assert result.init_threshold == pytest.approx(np.quantile(scores, 0.98))


def test_pot_threshold_scale_equivariant():
    scores = np.random.default_rng(14).gamma(2.0, 1.0, size=20_000)
    params = PotParams()
    base = pot_threshold(scores, params).threshold
    scaled = pot_threshold(3.7 * scores, params).threshold
    assert scaled == pytest.approx(3.7 * base, rel=0.01)


def test_pot_threshold_constant_scores():
    with pytest.raises(CalibrationError):
        pot_threshold(np.full(1000, 0.3), PotParams())


def test_calibration_report_fields():
    scores = np.random.default_rng(15).exponential(1.0, size=5_000)
    report = pot_threshold(scores, PotParams()).report(include_remainder=True)
    assert set(report) >= {"init_threshold", "shape", "scale", "peaks_count", "total_count", "threshold"}
    assert report["include_remainder"] is True
    assert report["scale"] > 0


# --- 라벨 ---
def test_label_examples():
    assert label_anomalies(np.array([0.1, 0.9]), 0.5).tolist() == [False, True]
    assert not label_anomalies(np.array([0.1, 0.9]), 2.0).any()
    assert label_anomalies(np.array([0.0, 0.3]), -1.0).all()


def test_label_monotone_in_threshold(rng):
    s = rng.exponential(size=500)
    low, high = label_anomalies(s, 0.5), label_anomalies(s, 1.5)
    assert not np.any(high & ~low)


def test_label_requires_finite_threshold():
    with pytest.raises(CalibrationError):
        label_anomalies(np.zeros(3), math.nan)


# --- 파이프라인 ---
def test_detect_entity_end_to_end(tiny_run, rng):
    net = DecompositionNet.initialize(tiny_run.model, rng)
    t = np.arange(256)
    train = (np.sin(2 * np.pi * t / 16) + rng.normal(0, 0.1, 256))[:, None]
    test = train.copy()
    test[100] += 5.0
    truth = np.zeros(256, dtype=bool)
    truth[100] = True
    stats = NormStats.fit(train)

    pot = calibrate(net, stats, [train], tiny_run)
    result = detect_entity(net, stats, test, truth, pot, tiny_run, "entity")
    assert result.scores.shape == (256,)
    assert np.all(np.isfinite(result.scores)) and np.all(result.scores >= 0)

    frame = scores_frame(result)
    assert list(frame.columns) == ["t", "score", "label"]
    decomposition = decomposition_frame(result)
    assert list(decomposition.columns) == ["t", "x_0", "trend_0", "seasonal_0", "remainder_0", "truth"]


def test_calibrate_channel_mismatch(tiny_run, rng):
    net = DecompositionNet.initialize(tiny_run.model, rng)
    stats = NormStats(np.zeros(2), np.ones(2))
    with pytest.raises(DataError):
        calibrate(net, stats, [rng.normal(size=(64, 3))], tiny_run)
