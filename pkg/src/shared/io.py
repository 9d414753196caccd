"""
파일 입출력 공통 유틸리티
- CSV: pandas (행 인덱스 없이, 줄바꿈 `\\n` 고정)
- YAML: 매니페스트/보고서/체크포인트
- JSON: 실행 매니페스트 (orjson, 원자적 쓰기)
"""
from __future__ import annotations

import hashlib
import logging
import os
import re
import tempfile
from collections.abc import Mapping

import numpy as np
import orjson
import pandas as pd
import yaml
from numpy.typing import NDArray
from pandas import DataFrame

from src.shared.errors import DataError

logger = logging.getLogger(__name__)

_DIM_COLUMN = re.compile(r"^dim_(\d+)$")


def ensure_dir(path: str) -> str:
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as e:
        raise DataError(f"디렉터리를 만들 수 없습니다: {path} ({e})") from e
    return path


def write_csv(frame: DataFrame, path: str) -> None:
    parent = os.path.dirname(path)
    if parent:
        ensure_dir(parent)
    try:
        frame.to_csv(path, index=False, lineterminator="\n")
    except OSError as e:
        raise DataError(f"CSV 쓰기 실패: {path} ({e})") from e


def read_csv(path: str, required: tuple[str, ...] = ()) -> DataFrame:
    """CSV 를 읽고 필수 컬럼을 확인합니다."""
    if not os.path.isfile(path):
        raise DataError(f"파일을 찾을 수 없습니다: {path}")
    try:
        frame = pd.read_csv(path)
    except (OSError, ValueError, pd.errors.ParserError) as e:
        raise DataError(f"CSV 읽기 실패: {path} ({e})") from e
    missing = [c for c in required if c not in frame.columns]
    if missing:
        raise DataError(f"{path}: 필수 컬럼 누락 {missing}")
    return frame


def write_yaml(data: Mapping[str, object], path: str) -> None:
    parent = os.path.dirname(path)
    if parent:
        ensure_dir(parent)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            yaml.safe_dump(dict(data), f, sort_keys=False, allow_unicode=True)
    except OSError as e:
        raise DataError(f"YAML 쓰기 실패: {path} ({e})") from e


def read_yaml(path: str) -> dict[str, object]:
    if not os.path.isfile(path):
        raise DataError(f"파일을 찾을 수 없습니다: {path}")
    with open(path, "r", encoding="utf-8") as f:
        try:
            data = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise DataError(f"YAML 파싱 실패: {path} ({e})") from e
    if not isinstance(data, dict):
        raise DataError(f"{path}: 최상위 항목은 매핑이어야 합니다")
    return data


def write_json_atomic(payload: Mapping[str, object], path: str) -> None:
    """임시 파일에 쓴 뒤 rename 으로 교체합니다."""
    directory = os.path.dirname(os.path.abspath(path))
    ensure_dir(directory)
    body = orjson.dumps(
        dict(payload), option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY
    )
    fd, tmp = tempfile.mkstemp(prefix=".manifest-", suffix=".tmp", dir=directory)
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(body)
            f.write(b"\n")
        os.replace(tmp, path)
    except OSError as e:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise DataError(f"매니페스트 쓰기 실패: {path} ({e})") from e


def read_json(path: str) -> dict[str, object]:
    if not os.path.isfile(path):
        raise DataError(f"파일을 찾을 수 없습니다: {path}")
    with open(path, "rb") as f:
        try:
            return orjson.loads(f.read())
        except orjson.JSONDecodeError as e:
            raise DataError(f"JSON 파싱 실패: {path} ({e})") from e


def git_blob_hash(path: str) -> str:
    """`git hash-object` 와 같은 SHA-1 (헤더 `blob <size>\\0` + 내용)"""
    with open(path, "rb") as f:
        content = f.read()
    digest = hashlib.sha1(f"blob {len(content)}\0".encode() + content)
    return digest.hexdigest()


def hash_inputs(paths: list[str]) -> dict[str, str]:
    """파일 또는 디렉터리(하위 CSV/YAML 전체) 의 해시 목록"""
    hashes: dict[str, str] = {}
    for path in paths:
        if os.path.isdir(path):
            for name in sorted(os.listdir(path)):
                full = os.path.join(path, name)
                if os.path.isfile(full) and name.endswith((".csv", ".yml")):
                    hashes[full] = git_blob_hash(full)
        elif os.path.isfile(path):
            hashes[path] = git_blob_hash(path)
    return hashes


# ---------------------------------------------------------------------------
# 대상(target) 데이터 CSV: dim_0..dim_{D-1}[,label]
# ---------------------------------------------------------------------------
def target_frame(values: NDArray[np.float64], labels: NDArray[np.bool_] | None = None) -> DataFrame:
    data: dict[str, object] = {f"dim_{d}": values[:, d] for d in range(values.shape[1])}
    if labels is not None:
        data["label"] = labels.astype(np.int64)
    return DataFrame(data)


def load_target_csv(path: str) -> tuple[NDArray[np.float64], NDArray[np.bool_] | None]:
    """
    대상 데이터 CSV 를 (T×D 값, 선택적 라벨) 로 읽습니다.

    Raises:
        DataError: dim_* 컬럼이 없거나 번호가 연속적이지 않을 때, 값이 비유한일 때
    """
    frame = read_csv(path)
    dims = sorted(
        (int(m.group(1)), col) for col in frame.columns if (m := _DIM_COLUMN.match(str(col)))
    )
    if not dims:
        raise DataError(f"{path}: dim_0.. 컬럼이 없습니다")
    if [i for i, _ in dims] != list(range(len(dims))):
        raise DataError(f"{path}: dim 컬럼 번호가 연속적이지 않습니다")
    unknown = set(frame.columns) - {col for _, col in dims} - {"label"}
    if unknown:
        raise DataError(f"{path}: 알 수 없는 컬럼 {sorted(unknown)}")
    if frame.empty:
        raise DataError(f"{path}: 데이터 행이 없습니다")

    values = frame[[col for _, col in dims]].to_numpy(dtype=np.float64)
    if not np.all(np.isfinite(values)):
        raise DataError(f"{path}: 비유한 값(NaN/inf)이 포함되어 있습니다")
    labels = frame["label"].to_numpy().astype(bool) if "label" in frame.columns else None
    return values, labels


def entity_files(path: str) -> list[str]:
    """CSV 파일 하나 또는 디렉터리 안의 CSV 목록 (이름순)"""
    if os.path.isdir(path):
        files = sorted(
            os.path.join(path, name) for name in os.listdir(path) if name.endswith(".csv")
        )
        if not files:
            raise DataError(f"{path}: CSV 파일이 없습니다")
        return files
    if not os.path.isfile(path):
        raise DataError(f"파일을 찾을 수 없습니다: {path}")
    return [path]


def entity_name(path: str) -> str:
    return os.path.splitext(os.path.basename(path))[0]
