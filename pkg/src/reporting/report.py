"""
탐지 실행 디렉터리에서 정적 보고서(SVG + index.html) 생성
"""
from __future__ import annotations

import logging
import os
from dataclasses import dataclass

import numpy as np
from jinja2 import Environment, FileSystemLoader, select_autoescape

from src.detection import CALIBRATION_NAME, DECOMPOSITION_SUFFIX, METRICS_CSV, SCORES_SUFFIX
from src.shared.errors import DataError
from src.shared.io import ensure_dir, read_csv, read_yaml

from .plots import plot_series

logger = logging.getLogger(__name__)

# --- 상수 정의 ---
TEMPLATE_DIR = os.path.join(os.path.dirname(__file__), "templates")
INDEX_TEMPLATE = "index.html.j2"
REPORT_DIRNAME = "report"


@dataclass(frozen=True, slots=True)
class ReportItem:
    name: str
    svg: str
    flagged: int
    spans: int


def _entities(run_dir: str) -> list[str]:
    if not os.path.isdir(run_dir):
        raise DataError(f"실행 디렉터리를 찾을 수 없습니다: {run_dir}")
    names = sorted(f[: -len(SCORES_SUFFIX)] for f in os.listdir(run_dir) if f.endswith(SCORES_SUFFIX))
    if not names:
        raise DataError(f"{run_dir}: 탐지 결과(*{SCORES_SUFFIX})가 없습니다. detect 를 먼저 실행하세요")
    return names


def render_index(
    title: str,
    calibration: dict[str, object],
    metrics: list[dict[str, object]],
    items: list[ReportItem],
) -> str:
    env = Environment(loader=FileSystemLoader(TEMPLATE_DIR), autoescape=select_autoescape(["html", "j2"]))
    columns = list(metrics[0].keys()) if metrics else []
    return env.get_template(INDEX_TEMPLATE).render(
        title=title, calibration=calibration, metrics=metrics, metric_columns=columns, series=items
    )


def build_report(run_dir: str, out_dir: str | None = None) -> str:
    """
    시리즈별 4 패널 SVG 와 지표 목록 index.html 을 만들고 index 경로를 반환합니다.

    Raises:
        DataError: 탐지 결과나 보정 보고서가 없을 때
    """
    target = ensure_dir(out_dir or os.path.join(run_dir, REPORT_DIRNAME))
    calibration = read_yaml(os.path.join(run_dir, CALIBRATION_NAME))
    threshold = float(calibration["threshold"])

    items: list[ReportItem] = []
    for name in _entities(run_dir):
        scores = read_csv(os.path.join(run_dir, name + SCORES_SUFFIX), required=("t", "score", "label"))
        decomposition = read_csv(os.path.join(run_dir, name + DECOMPOSITION_SUFFIX), required=("t",))
        truth = decomposition["truth"].to_numpy().astype(bool) if "truth" in decomposition.columns else None
        svg_name = f"{name}.svg"
        spans = plot_series(
            decomposition,
            scores["score"].to_numpy(dtype=np.float64),
            threshold,
            name,
            os.path.join(target, svg_name),
            truth,
        )
        items.append(ReportItem(name, svg_name, int(scores["label"].sum()), spans))

    metrics_path = os.path.join(run_dir, METRICS_CSV)
    metrics = read_csv(metrics_path).to_dict(orient="records") if os.path.isfile(metrics_path) else []
    html = render_index(f"탐지 보고서 - {os.path.basename(os.path.abspath(run_dir))}", calibration, metrics, items)
    index_path = os.path.join(target, "index.html")
    with open(index_path, "w", encoding="utf-8", newline="\n") as f:
        f.write(html)
    logger.info(f"✅ 보고서 생성 완료: {index_path} (시리즈 {len(items)}개)")
    return index_path
