#!/usr/bin/env python3
"""
벤치마크 데이터셋 변환기
임의의 표 형식 시계열(CSV / 공백 구분 텍스트)을 파이프라인 입력 형식
`dim_0,...,dim_{D-1}[,label]` 으로 변환합니다.

라이선스가 있는 공개 벤치마크의 다운로드/파싱은 포함하지 않습니다.
원본 파일을 직접 받은 뒤 값 컬럼과 라벨 컬럼을 지정해 변환하세요.

예:
    python scripts/benchmark_converter.py raw/machine-1-1_test.txt out/machine-1-1.csv \
        --sep ' ' --labels raw/machine-1-1_label.txt
"""
from __future__ import annotations

import argparse
import logging
import os
import sys

import numpy as np
import pandas as pd
from pandas import DataFrame

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from src.shared.errors import DataError  # noqa: E402
from src.shared.io import target_frame, write_csv  # noqa: E402

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)


def load_raw(path: str, sep: str | None, header: bool) -> DataFrame:
    """원본 표를 읽습니다. sep 가 None 이면 쉼표, ' ' 이면 연속 공백."""
    logger.info(f"📂 원본 로딩 중: {path}")
    kwargs: dict[str, object] = {"header": 0 if header else None}
    if sep == " ":
        kwargs["sep"] = r"\s+"
    elif sep:
        kwargs["sep"] = sep
    try:
        df = pd.read_csv(path, **kwargs)
    except (OSError, pd.errors.ParserError) as e:
        raise DataError(f"원본 파일을 읽을 수 없습니다: {path} ({e})") from e
    logger.info(f"✅ 로딩 완료: {len(df):,}행 x {df.shape[1]}열")
    return df


def convert(
    df: DataFrame,
    value_columns: list[str] | None = None,
    label_column: str | None = None,
    labels: np.ndarray | None = None,
) -> DataFrame:
    """값 컬럼을 dim_* 로, 라벨(컬럼 또는 별도 배열)을 0/1 label 로 바꿉니다."""
    columns = value_columns or [str(c) for c in df.columns if str(c) != label_column]
    df.columns = [str(c) for c in df.columns]
    values = df[columns].to_numpy(dtype=np.float64)
    if not np.all(np.isfinite(values)):
        bad = int((~np.isfinite(values)).sum())
        logger.warning(f"⚠️ 비유한 값 {bad}개를 앞 값으로 채웁니다")
        values = pd.DataFrame(values).ffill().bfill().to_numpy(dtype=np.float64)

    truth: np.ndarray | None = None
    if label_column is not None:
        truth = df[label_column].to_numpy() != 0
    elif labels is not None:
        truth = np.asarray(labels).reshape(-1) != 0
    if truth is not None and len(truth) != len(values):
        raise DataError(f"라벨 길이 {len(truth)} 가 값 길이 {len(values)} 와 다릅니다")
    return target_frame(values, truth)


def main() -> None:
    parser = argparse.ArgumentParser(description="벤치마크 시계열 → dim_* CSV 변환")
    parser.add_argument("source", help="원본 파일")
    parser.add_argument("output", help="출력 CSV 경로")
    parser.add_argument("--sep", default=None, help="구분자 (' ' 이면 연속 공백)")
    parser.add_argument("--header", action="store_true", help="원본 첫 행이 헤더인 경우")
    parser.add_argument("--columns", nargs="+", default=None, help="값 컬럼 (기본: 라벨 외 전부)")
    parser.add_argument("--label-column", default=None, help="원본 안의 라벨 컬럼")
    parser.add_argument("--labels", default=None, help="별도 라벨 파일 (한 줄에 0/1)")
    args = parser.parse_args()

    try:
        df = load_raw(args.source, args.sep, args.header)
        labels = load_raw(args.labels, args.sep, False).to_numpy()[:, 0] if args.labels else None
        out = convert(df, args.columns, args.label_column, labels)
        write_csv(out, args.output)
    except DataError as e:
        logger.error(f"❌ 변환 실패: {e}")
        sys.exit(e.exit_code)
    logger.info(f"💾 저장 완료: {args.output} ({out.shape[1] - ('label' in out.columns)}채널)")


if __name__ == "__main__":
    main()
