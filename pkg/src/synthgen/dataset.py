"""
합성 사전학습 코퍼스 / 대상(target) 분할 생성
- 시리즈 i 의 난수 스트림은 default_rng([master_seed, i]) 로 고정되어 작업자 수와 무관하게 같은 결과를 냅니다.
- 코퍼스 CSV: x,trend,seasonal,remainder,label  +  manifest.yml
- 대상 분할 CSV: dim_0..dim_{D-1}[,label]
"""
from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator
from pandas import DataFrame

from src.shared.errors import DataError
from src.shared.io import ensure_dir, read_csv, read_yaml, target_frame, write_csv, write_yaml
from src.shared.schemas import SynthConfig
from src.shared.types import CorpusManifest, CorpusSeriesEntry

from .anomalies import InjectedEvent, event_windows, inject_anomalies
from .components import (
    ComponentSet,
    CycleJitter,
    DegenerateVarianceError,
    Series,
    Wave,
    gen_deterministic_seasonal,
    gen_linear_trend,
    gen_remainder,
    gen_stochastic_seasonal,
    gen_stochastic_trend,
    standardize,
)

logger = logging.getLogger(__name__)

CORPUS_COLUMNS: tuple[str, ...] = ("x", "trend", "seasonal", "remainder", "label")
MANIFEST_NAME = "manifest.yml"
TARGET_STREAM = 1


@dataclass(slots=True)
class SynthSeries:
    index: int
    components: ComponentSet
    events: list[InjectedEvent]

    @property
    def anomalous(self) -> bool:
        return bool(self.components.anomaly_mask.any())


def _standardize_or_zero(series: Series) -> Series:
    try:
        return standardize(series)
    except DegenerateVarianceError:
        return np.zeros_like(series)


def _gen_trend(config: SynthConfig, length: int, rng: Generator) -> Series:
    mode = config.trend_mode
    if mode == "mixed":
        mode = "deterministic" if rng.random() < 0.5 else "stochastic"
    if mode == "deterministic":
        trend = gen_linear_trend(rng.uniform(*config.beta0_range), rng.uniform(*config.beta1_range), length)
    else:
        trend = gen_stochastic_trend(length, config.trend_noise_sigma, rng)
    return _standardize_or_zero(trend)


def _gen_seasonal(config: SynthConfig, length: int, rng: Generator) -> Series:
    mode = config.seasonal_mode
    if mode == "mixed":
        mode = ("sinusoid", "square", "stochastic_cycle")[int(rng.integers(0, 3))]

    lo, hi = config.period_range
    if mode == "stochastic_cycle":
        period = int(rng.integers(lo, hi + 1))
        phase = int(rng.integers(config.phase_range[0], config.phase_range[1] + 1)) % period
        jitter = (
            CycleJitter(config.cycle_scale_range, config.cycle_length_jitter) if config.jitter else None
        )
        seasonal = gen_stochastic_seasonal(period, phase, length, rng, jitter)
    else:
        kind = "sine" if mode == "sinusoid" else "square"
        count = int(rng.integers(config.wave_count_range[0], config.wave_count_range[1] + 1))
        waves = [
            Wave(
                kind=kind,
                amplitude=float(rng.uniform(*config.amplitude_range)),
                period=float(rng.uniform(lo, hi)),
                phase=float(rng.uniform(0.0, 2.0 * math.pi)),
            )
            for _ in range(count)
        ]
        seasonal = gen_deterministic_seasonal(waves, length)
    return _standardize_or_zero(seasonal)


def generate_components(config: SynthConfig, rng: Generator, length: int | None = None) -> ComponentSet:
    """이상이 없는 한 채널의 추세/계절/잔차 성분"""
    n = length or config.length
    trend = _gen_trend(config, n, rng)
    seasonal = _gen_seasonal(config, n, rng)
    remainder = gen_remainder(n, float(rng.uniform(*config.remainder_sigma_range)), rng)
    return ComponentSet(trend, seasonal, remainder)


def _inject_events(
    components: ComponentSet, events: list[InjectedEvent], rng: Generator
) -> ComponentSet:
    for event in events:
        components = inject_anomalies(components, event.kind, (event.start, event.end), rng)
    return components


def anomalous_indices(config: SynthConfig) -> frozenset[int]:
    """이상을 주입할 시리즈 번호. 개수는 정확히 round(ratio × series_count) 입니다."""
    count = int(math.floor(config.anomaly_ratio * config.series_count + 0.5))
    order = np.random.default_rng(config.master_seed).permutation(config.series_count)
    return frozenset(int(i) for i in order[:count])


def generate_series(config: SynthConfig, index: int, anomalous: bool) -> SynthSeries:
    rng = np.random.default_rng([config.master_seed, index])
    components = generate_components(config, rng)
    if not anomalous:
        return SynthSeries(index, components, [])

    lo, hi = config.anomaly_events_range
    n_events = max(1, int(rng.integers(lo, hi + 1)))
    kinds = [config.anomaly_kinds[int(k)] for k in rng.integers(0, len(config.anomaly_kinds), size=n_events)]
    events = event_windows((0, config.length), kinds, config.anomaly_window_length, rng)
    components = _inject_events(components, events, rng)

    if not components.anomaly_mask.any():
        # 평탄 구간의 계절 변형처럼 값이 바뀌지 않은 경우 전역 스파이크로 대체
        t = int(rng.integers(0, config.length))
        fallback = InjectedEvent("global", t, t)
        components = inject_anomalies(components, "global", (t, t), rng)
        events.append(fallback)
    return SynthSeries(index, components, events)


def corpus_frame(components: ComponentSet) -> DataFrame:
    return DataFrame(
        {
            "x": components.compose(),
            "trend": components.trend,
            "seasonal": components.seasonal,
            "remainder": components.remainder,
            "label": components.anomaly_mask.astype(np.int64),
        }
    )


def series_filename(index: int) -> str:
    return f"series_{index:05d}.csv"


def gen_dataset(config: SynthConfig, out_dir: str) -> CorpusManifest:
    """
    series_count 개의 시리즈 CSV 와 manifest.yml 을 out_dir 에 씁니다.

    Raises:
        DataError: 출력 경로에 쓸 수 없을 때
    """
    ensure_dir(out_dir)
    flagged = anomalous_indices(config)
    logger.info(
        f"🚀 합성 코퍼스 생성 시작: {config.series_count}개 × 길이 {config.length} "
        f"(이상 {len(flagged)}개, workers={config.workers})"
    )

    def _build(index: int) -> CorpusSeriesEntry:
        series = generate_series(config, index, index in flagged)
        name = series_filename(index)
        write_csv(corpus_frame(series.components), os.path.join(out_dir, name))
        return CorpusSeriesEntry(
            file=name,
            index=index,
            seed=[config.master_seed, index],
            anomalous=series.anomalous,
            events=[{"kind": e.kind, "start": e.start, "end": e.end} for e in series.events],
        )

    indices = range(config.series_count)
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            entries = list(pool.map(_build, indices))
    else:
        entries = [_build(i) for i in indices]

    manifest = CorpusManifest(config=config.model_dump(mode="json"), series=entries)
    write_yaml(manifest, os.path.join(out_dir, MANIFEST_NAME))
    logger.info(f"✅ 합성 코퍼스 저장 완료: {out_dir}")
    return manifest


def load_corpus(corpus_dir: str) -> list[ComponentSet]:
    """
    코퍼스 디렉터리의 시리즈를 manifest 순서대로 읽습니다.

    Raises:
        DataError: manifest 가 없거나 성분 컬럼이 빠진 경우
    """
    manifest = read_yaml(os.path.join(corpus_dir, MANIFEST_NAME))
    entries = manifest.get("series")
    if not isinstance(entries, list) or not entries:
        raise DataError(f"{corpus_dir}: manifest 에 시리즈 목록이 없습니다")

    corpus: list[ComponentSet] = []
    for entry in entries:
        frame = read_csv(os.path.join(corpus_dir, str(entry["file"])), required=CORPUS_COLUMNS)
        corpus.append(
            ComponentSet(
                frame["trend"].to_numpy(dtype=np.float64),
                frame["seasonal"].to_numpy(dtype=np.float64),
                frame["remainder"].to_numpy(dtype=np.float64),
                frame["label"].to_numpy().astype(bool),
            )
        )
    logger.info(f"📂 코퍼스 로드 완료: {len(corpus)}개 시리즈 ({corpus_dir})")
    return corpus


# ---------------------------------------------------------------------------
# 대상(target) 분할
# ---------------------------------------------------------------------------
def gen_target_split(config: SynthConfig) -> tuple[DataFrame, DataFrame]:
    """
    채널마다 길이 train+test 의 신호를 만들고, test 구간에만 이상을 주입합니다.
    이상 유형은 anomaly_kinds 를 순환하며 배정되고, test 라벨은 채널 라벨의 OR 입니다.
    """
    n_train, n_test = config.target_train_length, config.target_test_length
    total = n_train + n_test
    kinds = [config.anomaly_kinds[i % len(config.anomaly_kinds)] for i in range(config.target_anomaly_events)]

    values = np.zeros((total, config.channels))
    labels = np.zeros(total, dtype=bool)
    for d in range(config.channels):
        rng = np.random.default_rng([config.master_seed, d, TARGET_STREAM])
        components = generate_components(config, rng, length=total)
        events = event_windows((n_train, total), kinds, config.anomaly_window_length, rng)
        components = _inject_events(components, events, rng)
        values[:, d] = components.compose()
        labels |= components.anomaly_mask

    if labels[:n_train].any():
        raise DataError("학습 구간에 이상이 포함되었습니다")
    train = target_frame(values[:n_train])
    test = target_frame(values[n_train:], labels[n_train:])
    return train, test


def save_target_split(config: SynthConfig, target_dir: str) -> tuple[str, str]:
    train, test = gen_target_split(config)
    train_path = os.path.join(target_dir, "train.csv")
    test_path = os.path.join(target_dir, "test.csv")
    write_csv(train, train_path)
    write_csv(test, test_path)
    ratio = float(test["label"].mean())
    logger.info(
        f"✅ 대상 분할 저장 완료: {target_dir} (train {len(train)}, test {len(test)}, 이상 비율 {ratio:.3f})"
    )
    return train_path, test_path
