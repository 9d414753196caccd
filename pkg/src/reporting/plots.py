"""
탐지 결과 SVG 시각화
시리즈마다 4개 패널: 원본(정답 이상 구간 음영) / 계절 / 추세 / 복원 오차 + 임계값
"""
from __future__ import annotations

import logging
from collections.abc import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from numpy.typing import NDArray  # noqa: E402
from pandas import DataFrame  # noqa: E402

from src.evaluation import segments  # noqa: E402

logger = logging.getLogger(__name__)

# 같은 입력이면 같은 SVG 바이트가 나오도록 고정
plt.rcParams["svg.hashsalt"] = "loop-tad"
plt.rcParams["svg.fonttype"] = "path"

PANELS: tuple[str, ...] = ("raw", "seasonal", "trend", "error")
SPAN_PREFIX = "anomaly_span"


def _channel_columns(frame: DataFrame, prefix: str) -> list[str]:
    return sorted(
        (c for c in frame.columns if c.startswith(f"{prefix}_") and c[len(prefix) + 1:].isdigit()),
        key=lambda c: int(c[len(prefix) + 1:]),
    )


def _plot_channels(ax: plt.Axes, frame: DataFrame, prefix: str) -> None:
    t = frame["t"].to_numpy()
    for col in _channel_columns(frame, prefix):
        ax.plot(t, frame[col].to_numpy(), linewidth=0.8, label=col)


def plot_series(
    decomposition: DataFrame,
    scores: NDArray[np.float64],
    threshold: float,
    title: str,
    path: str,
    truth: Sequence[bool] | None = None,
) -> int:
    """
    4 패널 SVG 를 path 에 저장하고 음영 처리한 이상 구간 수를 반환합니다.
    """
    fig, axes = plt.subplots(len(PANELS), 1, figsize=(12, 8), sharex=True)
    raw, seasonal, trend, error = axes
    for ax, name in zip(axes, PANELS):
        ax.set_gid(f"panel_{name}")

    _plot_channels(raw, decomposition, "x")
    spans = segments(truth) if truth is not None else []
    for i, (start, end) in enumerate(spans):
        raw.axvspan(start - 0.5, end + 0.5, color="tab:red", alpha=0.2, gid=f"{SPAN_PREFIX}_{i}")
    raw.set_ylabel("raw")
    raw.set_title(title)

    _plot_channels(seasonal, decomposition, "seasonal")
    seasonal.set_ylabel("seasonal")
    _plot_channels(trend, decomposition, "trend")
    trend.set_ylabel("trend")

    t = decomposition["t"].to_numpy()
    error.plot(t, scores, color="tab:purple", linewidth=0.8)
    error.axhline(threshold, color="tab:red", linestyle="--", linewidth=1.0, gid="threshold_line")
    error.set_ylabel("error")
    error.set_xlabel("t")

    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    logger.debug(f"🖼️ SVG 저장: {path} (음영 {len(spans)}개)")
    return len(spans)
