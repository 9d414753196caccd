"""
Point-adjust 평가
정답 이상 구간 안에서 한 점이라도 탐지되면 그 구간 전체를 탐지한 것으로 보고,
조정된 라벨로 시점 단위 precision / recall / F1 을 계산합니다.
"""
from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import asdict, dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pandas import DataFrame

logger = logging.getLogger(__name__)

BoolArray = NDArray[np.bool_]
POOLED = "pooled"


def _labels(values: ArrayLike) -> BoolArray:
    return np.asarray(values).astype(bool).reshape(-1)


def _same_length(pred: BoolArray, truth: BoolArray) -> None:
    if len(pred) != len(truth):
        raise ValueError(f"라벨 길이 불일치: pred {len(pred)}, truth {len(truth)}")


def segments(truth: ArrayLike) -> list[tuple[int, int]]:
    """연속된 True 구간 [start, end] (양 끝 포함) 목록"""
    y = _labels(truth).astype(np.int8)
    edges = np.diff(np.concatenate(([0], y, [0])))
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1) - 1
    return [(int(s), int(e)) for s, e in zip(starts, ends)]


def point_adjust(pred: ArrayLike, truth: ArrayLike) -> BoolArray:
    """정답 구간 안에 탐지가 하나라도 있으면 구간 전체를 True 로 채웁니다."""
    p, t = _labels(pred), _labels(truth)
    _same_length(p, t)
    adjusted = p.copy()
    for start, end in segments(t):
        if p[start:end + 1].any():
            adjusted[start:end + 1] = True
    return adjusted


@dataclass(frozen=True, slots=True)
class MetricsReport:
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    fn: int
    tn: int
    adjusted: bool
    precision_zero_division: bool = False
    recall_zero_division: bool = False

    def as_row(self, entity: str) -> dict[str, object]:
        return {"entity": entity, **asdict(self)}


def _ratio(num: int, den: int) -> tuple[float, bool]:
    return (num / den, False) if den > 0 else (0.0, True)


def compute_metrics(pred: ArrayLike, truth: ArrayLike, adjusted: bool = True) -> MetricsReport:
    """
    시점 단위 혼동 행렬과 P/R/F1. 분모가 0 이면 해당 지표는 0 이고 플래그가 켜집니다.
    """
    p, t = _labels(pred), _labels(truth)
    _same_length(p, t)
    if adjusted:
        p = point_adjust(p, t)
    tp = int(np.sum(p & t))
    fp = int(np.sum(p & ~t))
    fn = int(np.sum(~p & t))
    tn = int(np.sum(~p & ~t))
    precision, p_flag = _ratio(tp, tp + fp)
    recall, r_flag = _ratio(tp, tp + fn)
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return MetricsReport(precision, recall, f1, tp, fp, fn, tn, adjusted, p_flag, r_flag)


def evaluate_entities(
    preds: Sequence[ArrayLike], truths: Sequence[ArrayLike], names: Sequence[str], adjusted: bool = True
) -> list[tuple[str, MetricsReport]]:
    """
    엔티티별 지표와, 엔티티별로 조정한 라벨을 이어 붙인 pooled 지표를 반환합니다.
    """
    rows: list[tuple[str, MetricsReport]] = []
    pooled_pred: list[BoolArray] = []
    pooled_truth: list[BoolArray] = []
    for name, pred, truth in zip(names, preds, truths):
        p, t = _labels(pred), _labels(truth)
        _same_length(p, t)
        rows.append((name, compute_metrics(p, t, adjusted)))
        # 구간이 엔티티 경계를 넘지 않도록 조정은 엔티티마다 먼저 적용
        pooled_pred.append(point_adjust(p, t) if adjusted else p)
        pooled_truth.append(t)
    if rows:
        pooled = compute_metrics(np.concatenate(pooled_pred), np.concatenate(pooled_truth), adjusted=False)
        rows.append((POOLED, _with_adjusted(pooled, adjusted)))
    return rows


def _with_adjusted(report: MetricsReport, adjusted: bool) -> MetricsReport:
    return MetricsReport(**{**asdict(report), "adjusted": adjusted})


def metrics_frame(rows: Sequence[tuple[str, MetricsReport]]) -> DataFrame:
    return DataFrame([report.as_row(name) for name, report in rows])


def metrics_table(rows: Sequence[tuple[str, MetricsReport]]) -> str:
    """사람이 읽는 고정폭 표"""
    frame = metrics_frame(rows)[["entity", "precision", "recall", "f1", "tp", "fp", "fn", "tn"]]
    return frame.to_string(index=False, float_format=lambda v: f"{v:.4f}")
