"""
CLI 명령 구현: synth / train / detect / report / ablate
각 명령은 검증된 RunConfig 를 받아 결과 파일과 실행 매니페스트를 남깁니다.
"""
from __future__ import annotations

import logging
import os
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from src.detection import (
    CALIBRATION_NAME,
    DECOMPOSITION_SUFFIX,
    MANIFEST_NAME,
    METRICS_CSV,
    METRICS_TXT,
    SCORES_SUFFIX,
    calibrate,
    decomposition_frame,
    detect_entity,
    scores_frame,
)
from src.evaluation import POOLED, evaluate_entities, metrics_frame, metrics_table
from src.model import load_checkpoint, save_checkpoint
from src.reporting import build_report
from src.shared.errors import DataError
from src.shared.io import entity_files, entity_name, load_target_csv, read_csv, write_csv, write_yaml
from src.shared.schemas import ABLATIONS, Ablation, RunConfig
from src.synthgen import MANIFEST_NAME as CORPUS_MANIFEST
from src.synthgen import gen_dataset, load_corpus, save_target_split
from src.training import default_loss_log_path, run_training, write_loss_log

from .manifest import ManifestRecorder

logger = logging.getLogger(__name__)

RUN_MANIFEST = "run_manifest.json"
INLINE_LABELS = "inline"


@dataclass(frozen=True, slots=True)
class DetectSummary:
    run_dir: str
    threshold: float
    pooled_f1: float | None


# ---------------------------------------------------------------------------
# synth
# ---------------------------------------------------------------------------
def cmd_synth(run: RunConfig, corpus: bool = True, target: bool = False) -> str:
    """코퍼스(그리고/또는 대상 분할)를 만들고 코퍼스 디렉터리를 반환합니다."""
    recorder = ManifestRecorder("synth", run)
    out_dir = run.paths.corpus_dir
    if corpus:
        with recorder.stage("corpus"):
            gen_dataset(run.synth, out_dir)
        recorder.add_output("corpus_dir", out_dir)
        recorder.add_output("corpus_manifest", os.path.join(out_dir, CORPUS_MANIFEST))
    if target:
        with recorder.stage("target_split"):
            train_path, test_path = save_target_split(run.synth, run.paths.target_dir)
        recorder.add_output("target_train", train_path)
        recorder.add_output("target_test", test_path)
    recorder.write(os.path.join(out_dir, RUN_MANIFEST))
    return out_dir


# ---------------------------------------------------------------------------
# train
# ---------------------------------------------------------------------------
def _load_train_values(path: str | None) -> NDArray[np.float64]:
    if not path:
        raise DataError("paths.train_data 가 설정되지 않았습니다")
    files = entity_files(path)
    if len(files) > 1:
        # 여러 엔티티는 시간 축으로 이어 붙여 하나의 학습 분할로 사용
        parts = [load_target_csv(f)[0] for f in files]
        channels = {p.shape[1] for p in parts}
        if len(channels) != 1:
            raise DataError(f"엔티티 간 채널 수가 다릅니다: {sorted(channels)}")
        return np.concatenate(parts)
    return load_target_csv(files[0])[0]


def cmd_train(run: RunConfig) -> str:
    """phase/ablation 에 따라 학습하고 체크포인트 경로를 반환합니다."""
    recorder = ManifestRecorder("train", run)
    phase, ablation = run.train.phase, run.train.ablation
    needs_corpus = phase in ("pretrain", "both") and ablation != "no_augment"
    needs_target = phase in ("finetune", "both")

    corpus = None
    target = None
    with recorder.stage("load"):
        if needs_corpus:
            corpus = load_corpus(run.paths.corpus_dir)
            recorder.add_inputs(run.paths.corpus_dir)
        if needs_target:
            target = _load_train_values(run.paths.train_data)
            recorder.add_inputs(run.paths.train_data or "")
        if phase == "finetune" and ablation != "no_augment":
            recorder.add_inputs(run.paths.checkpoint)

    with recorder.stage("train"):
        result = run_training(run, corpus, target)

    log_path = default_loss_log_path(run)
    write_loss_log(result.history, log_path)
    save_checkpoint(
        result.net,
        run.paths.checkpoint,
        result.norm_stats,
        extra={"phase": phase, "ablation": ablation, "seed": run.train.seed},
    )
    recorder.add_output("checkpoint", run.paths.checkpoint)
    recorder.add_output("loss_log", log_path)
    recorder.write(os.path.join(run.paths.train_dir, RUN_MANIFEST))
    logger.info(f"✅ 학습 완료: {run.paths.checkpoint}")
    return run.paths.checkpoint


# ---------------------------------------------------------------------------
# detect
# ---------------------------------------------------------------------------
def _label_lookup(labels: str | None, data_files: list[str]) -> dict[str, str | None]:
    """엔티티 이름 → 라벨 CSV 경로 (inline 이면 None: 데이터 파일의 label 컬럼 사용)"""
    if labels is None:
        return {}
    if labels == INLINE_LABELS:
        return {entity_name(f): None for f in data_files}
    label_files = entity_files(labels)
    if len(label_files) == 1 and len(data_files) == 1:
        return {entity_name(data_files[0]): label_files[0]}
    by_name = {entity_name(f): f for f in label_files}
    missing = [entity_name(f) for f in data_files if entity_name(f) not in by_name]
    if missing:
        raise DataError(f"라벨 파일이 없는 엔티티: {missing}")
    return {entity_name(f): by_name[entity_name(f)] for f in data_files}


def _truth_for(
    name: str, inline: NDArray[np.bool_] | None, lookup: dict[str, str | None], length: int
) -> NDArray[np.bool_] | None:
    if name not in lookup:
        return None
    path = lookup[name]
    if path is None:
        if inline is None:
            raise DataError(f"{name}: label 컬럼이 없습니다 (--labels 에 라벨 파일 경로를 지정하세요)")
        truth = inline
    else:
        truth = read_csv(path, required=("label",))["label"].to_numpy().astype(bool)
    if len(truth) != length:
        raise DataError(f"{name}: 라벨 길이 {len(truth)} 가 데이터 길이 {length} 와 다릅니다")
    return truth


def cmd_detect(
    run: RunConfig,
    checkpoint: str | None = None,
    data: str | None = None,
    labels: str | None = None,
    calibration_data: str | None = None,
) -> DetectSummary:
    """
    정규화 → 분할 → 분해 → 점수 → POT → 라벨 (→ 평가).
    labels 가 "inline" 이면 데이터 CSV 의 label 컬럼을, 경로면 해당 CSV 를 정답으로 사용합니다.
    """
    recorder = ManifestRecorder("detect", run)
    run_dir = run.paths.run_dir
    ckpt_path = checkpoint or run.paths.checkpoint
    data_path = data or run.paths.test_data
    calib_path = calibration_data or run.paths.train_data
    if not data_path:
        raise DataError("탐지할 데이터 경로가 없습니다 (--data 또는 paths.test_data)")
    if not calib_path:
        raise DataError("보정용 학습 분할 경로가 없습니다 (--calibration-data 또는 paths.train_data)")

    with recorder.stage("load"):
        net, stats, _ = load_checkpoint(ckpt_path)
        if stats is None:
            raise DataError(f"체크포인트에 정규화 통계가 없습니다 (finetune 을 먼저 실행하세요): {ckpt_path}")
        calib_values = [load_target_csv(f)[0] for f in entity_files(calib_path)]
        data_files = entity_files(data_path)
        lookup = _label_lookup(labels, data_files)
        recorder.add_inputs(ckpt_path, calib_path, data_path)
        if labels not in (None, INLINE_LABELS):
            recorder.add_inputs(labels or "")

    with recorder.stage("calibrate"):
        pot = calibrate(net, stats, calib_values, run)
    calibration_path = os.path.join(run_dir, CALIBRATION_NAME)
    write_yaml(pot.report(run.detect.include_remainder), calibration_path)
    recorder.add_output("calibration", calibration_path)

    names: list[str] = []
    preds: list[NDArray[np.bool_]] = []
    truths: list[NDArray[np.bool_]] = []
    with recorder.stage("detect"):
        for path in data_files:
            name = entity_name(path)
            values, inline = load_target_csv(path)
            truth = _truth_for(name, inline, lookup, len(values))
            result = detect_entity(net, stats, values, truth, pot, run, name)
            write_csv(scores_frame(result), os.path.join(run_dir, name + SCORES_SUFFIX))
            write_csv(decomposition_frame(result), os.path.join(run_dir, name + DECOMPOSITION_SUFFIX))
            recorder.add_output(f"scores/{name}", os.path.join(run_dir, name + SCORES_SUFFIX))
            if truth is not None:
                names.append(name)
                preds.append(result.labels)
                truths.append(truth)

    pooled_f1: float | None = None
    if names:
        with recorder.stage("evaluate"):
            rows = evaluate_entities(preds, truths, names, adjusted=True)
            write_csv(metrics_frame(rows), os.path.join(run_dir, METRICS_CSV))
            table = metrics_table(rows)
            with open(os.path.join(run_dir, METRICS_TXT), "w", encoding="utf-8", newline="\n") as f:
                f.write(table + "\n")
        pooled_f1 = next(r.f1 for n, r in rows if n == POOLED)
        recorder.add_output("metrics", os.path.join(run_dir, METRICS_CSV))
        logger.info(f"📊 point-adjust 지표\n{table}")

    recorder.write(os.path.join(run_dir, MANIFEST_NAME))
    logger.info(f"✅ 탐지 완료: {run_dir} (임계값 {pot.threshold:.6g})")
    return DetectSummary(run_dir, pot.threshold, pooled_f1)


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------
def cmd_report(run: RunConfig, run_dir: str | None = None) -> str:
    return build_report(run_dir or run.paths.run_dir)


# ---------------------------------------------------------------------------
# ablate
# ---------------------------------------------------------------------------
def ablation_config(run: RunConfig, mode: Ablation, root: str) -> RunConfig:
    """mode 별로 학습/탐지 출력 경로를 분리한 설정"""
    base = os.path.join(root, mode)
    return run.model_copy(
        update={
            "train": run.train.model_copy(update={"ablation": mode, "phase": "both"}),
            "paths": run.paths.model_copy(
                update={
                    "checkpoint": os.path.join(base, "model", "checkpoint.yml"),
                    "train_dir": os.path.join(base, "model"),
                    "run_dir": os.path.join(base, "detect"),
                }
            ),
        }
    )


def cmd_ablate(run: RunConfig, modes: tuple[Ablation, ...] = ABLATIONS, root: str | None = None) -> dict[str, float | None]:
    """
    ablation 모드마다 학습 + 탐지(정답 라벨 사용)를 실행하고 pooled F1 을 비교합니다.
    none 의 F1 이 no_augment 보다 낮으면 경고만 남깁니다.
    """
    out_root = root or os.path.join(os.path.dirname(run.paths.run_dir.rstrip("/")) or ".", "ablation")
    scores: dict[str, float | None] = {}
    for mode in modes:
        logger.info(f"🧪 ablation 실행: {mode}")
        config = ablation_config(run, mode, out_root)
        cmd_train(config)
        scores[mode] = cmd_detect(config, labels=INLINE_LABELS).pooled_f1

    summary = [{"ablation": mode, "f1": f1} for mode, f1 in scores.items()]
    write_yaml({"results": summary}, os.path.join(out_root, "summary.yml"))
    full, plain = scores.get("none"), scores.get("no_augment")
    if full is not None and plain is not None and full < plain:
        logger.warning(f"⚠️ ablation 순서 위반: none F1={full:.4f} < no_augment F1={plain:.4f}")
    return scores
