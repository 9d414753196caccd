"""
2단계 학습 루프
1) pretrain : 합성 코퍼스에서 loss_dec 최소화 (lr 1e-3)
2) finetune : 대상 학습 분할에서 loss_rec 최소화 (lr 5e-4), 정규화 통계를 함께 저장
ablation: no_sep(분리기 제외) / no_decomp(사전학습에 loss_rec) / no_augment(사전학습 생략)
"""
from __future__ import annotations

import logging
import os
import sys
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np
from numpy.random import Generator
from numpy.typing import NDArray
from pandas import DataFrame
from tqdm import tqdm

from src.model import Decomposition, DecompositionNet, load_checkpoint
from src.numerics import AdamState, Tensor, adam_step, backward, current_tape
from src.shared.errors import DataError, NumericError
from src.shared.io import write_csv
from src.shared.schemas import Ablation, ModelConfig, RunConfig, TrainConfig
from src.synthgen import ComponentSet

from .losses import loss_dec, loss_rec
from .preprocess import EPS, Blocks, NormStats, normalize, segment, stack_blocks

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]
LOSS_LOG_COLUMNS = ("epoch", "phase", "loss")

# 난수 스트림 번호: default_rng([seed, stream])
INIT_STREAM = 0
SHUFFLE_STREAM = 1


@dataclass(frozen=True, slots=True)
class LossRecord:
    epoch: int
    phase: str
    loss: float


@dataclass(slots=True)
class PretrainData:
    """정규화된 코퍼스 블록과 정답 성분"""

    x: FloatArray
    trend: FloatArray
    seasonal: FloatArray
    remainder: FloatArray
    valid: NDArray[np.bool_]

    def __len__(self) -> int:
        return self.x.shape[0]


@dataclass(slots=True)
class TrainResult:
    net: DecompositionNet
    norm_stats: NormStats | None
    history: list[LossRecord] = field(default_factory=list)


# ---------------------------------------------------------------------------
# 데이터 준비
# ---------------------------------------------------------------------------
def normalize_components(components: ComponentSet) -> tuple[FloatArray, ...]:
    """
    합성 시리즈를 x 의 min/max 로 [0,1) 에 맞추고 같은 affine 변환을 성분에 적용합니다.
    오프셋은 추세가 가져가므로 x' = τ' + s' + r' 가 유지됩니다.
    """
    x = components.compose()
    lo = float(x.min())
    scale = 1.0 / (float(x.max()) - lo + EPS)
    return (
        (x - lo) * scale,
        (components.trend - lo) * scale,
        components.seasonal * scale,
        components.remainder * scale,
    )


def build_pretrain_data(corpus: Sequence[ComponentSet], block_length: int) -> PretrainData:
    if not corpus:
        raise DataError("사전학습 코퍼스가 비어 있습니다")
    parts: list[list[Blocks]] = [[], [], [], []]
    for components in corpus:
        for bucket, series in zip(parts, normalize_components(components)):
            bucket.append(segment(series, block_length))
    (x, valid), (trend, _), (seasonal, _), (remainder, _) = (stack_blocks(p) for p in parts)
    return PretrainData(x, trend, seasonal, remainder, valid)


def apply_ablation(model: ModelConfig, ablation: Ablation) -> ModelConfig:
    if ablation == "no_sep":
        return model.model_copy(update={"separator_enabled": False})
    return model


# ---------------------------------------------------------------------------
# 최적화 루프
# ---------------------------------------------------------------------------
def _batches(count: int, batch_size: int, rng: Generator) -> list[NDArray[np.intp]]:
    order = rng.permutation(count)
    return [order[i:i + batch_size] for i in range(0, count, batch_size)]


def train_step(
    net: DecompositionNet, state: AdamState, lr: float, loss_fn: Callable[[], Tensor]
) -> float:
    """손실 계산 → 역전파 → ADAM 한 스텝. 손실 값을 반환합니다."""
    tape = current_tape()
    tape.reset()
    loss = loss_fn()
    value = loss.item()
    if not np.isfinite(value):
        tape.reset()
        raise NumericError(f"비유한 손실이 발생했습니다: {value}")
    backward(loss)
    adam_step(net.trainable(), state, lr)
    return value


def _run_epochs(
    net: DecompositionNet,
    phase: str,
    epochs: int,
    lr: float,
    count: int,
    config: TrainConfig,
    batch_loss: Callable[[NDArray[np.intp]], Tensor],
) -> list[LossRecord]:
    state = AdamState()
    rng = np.random.default_rng([config.seed, SHUFFLE_STREAM])
    show = config.progress and sys.stderr.isatty()
    history: list[LossRecord] = []

    for epoch in tqdm(range(1, epochs + 1), desc=phase, disable=not show):
        losses = [
            train_step(net, state, lr, lambda rows=rows: batch_loss(rows))
            for rows in _batches(count, config.batch_size, rng)
        ]
        mean = float(np.mean(losses))
        history.append(LossRecord(epoch, phase, mean))
        logger.info(f"📉 [{phase}] epoch {epoch}/{epochs} loss={mean:.6f}")
    return history


def pretrain(net: DecompositionNet, data: PretrainData, config: TrainConfig) -> list[LossRecord]:
    """
    합성 코퍼스로 분해 사전학습. ablation no_decomp 이면 loss_dec 대신 loss_rec 를 씁니다.
    """
    use_rec = config.ablation == "no_decomp"
    logger.info(
        f"🚀 사전학습 시작: 블록 {len(data)}개, {config.pretrain_epochs} epochs, "
        f"손실={'loss_rec' if use_rec else 'loss_dec'}"
    )

    def _loss(rows: NDArray[np.intp]) -> Tensor:
        x = Tensor.constant(data.x[rows])
        pred = net.decompose_batch(x)
        if use_rec:
            return loss_rec(x, pred.trend, pred.seasonal, data.valid[rows])
        truth = Decomposition(
            Tensor.constant(data.trend[rows]),
            Tensor.constant(data.seasonal[rows]),
            Tensor.constant(data.remainder[rows]),
        )
        return loss_dec(truth, pred, data.valid[rows])

    return _run_epochs(net, "pretrain", config.pretrain_epochs, config.pretrain_lr, len(data), config, _loss)


def finetune(
    net: DecompositionNet, values: FloatArray, config: TrainConfig
) -> tuple[NormStats, list[LossRecord]]:
    """
    대상 학습 분할 (T, D) 에서 복원 손실로 미세조정합니다. 모든 파라미터를 갱신합니다.

    Raises:
        DataError: 학습 분할이 비어 있을 때
    """
    data = np.asarray(values, dtype=np.float64)
    if data.size == 0:
        raise DataError("미세조정 학습 분할이 비어 있습니다")
    stats = NormStats.fit(data)
    blocks = segment(normalize(data, stats), config.block_length)
    logger.info(f"🚀 미세조정 시작: 블록 {len(blocks)}개 (채널 {blocks.channels}), {config.finetune_epochs} epochs")

    def _loss(rows: NDArray[np.intp]) -> Tensor:
        x = Tensor.constant(blocks.values[rows])
        pred = net.decompose_batch(x)
        return loss_rec(x, pred.trend, pred.seasonal, blocks.valid[rows])

    history = _run_epochs(
        net, "finetune", config.finetune_epochs, config.finetune_lr, len(blocks), config, _loss
    )
    return stats, history


# ---------------------------------------------------------------------------
# 실행 / 기록
# ---------------------------------------------------------------------------
def loss_log_frame(history: Sequence[LossRecord]) -> DataFrame:
    return DataFrame(
        {
            "epoch": [r.epoch for r in history],
            "phase": [r.phase for r in history],
            "loss": [r.loss for r in history],
        },
        columns=list(LOSS_LOG_COLUMNS),
    )


def write_loss_log(history: Sequence[LossRecord], path: str) -> None:
    write_csv(loss_log_frame(history), path)


def _starting_net(run: RunConfig, model: ModelConfig, pretrained: bool) -> DecompositionNet:
    """finetune 단독 실행이면 기존 체크포인트에서, 아니면 무작위 초기화에서 시작합니다."""
    if pretrained:
        net, _, _ = load_checkpoint(run.paths.checkpoint)
        if net.config != model:
            raise DataError(
                f"체크포인트 모델 설정이 현재 설정과 다릅니다: {run.paths.checkpoint}"
            )
        return net
    return DecompositionNet.initialize(model, np.random.default_rng([run.train.seed, INIT_STREAM]))


def run_training(
    run: RunConfig,
    corpus: Sequence[ComponentSet] | None = None,
    target_train: FloatArray | None = None,
) -> TrainResult:
    """
    train.phase 와 train.ablation 에 따라 단계를 연결합니다.

    Args:
        run: 검증된 실행 설정
        corpus: 사전학습 코퍼스 (pretrain 단계가 있을 때 필요)
        target_train: 대상 학습 분할 (finetune 단계가 있을 때 필요)
    """
    train = run.train
    model = apply_ablation(run.model, train.ablation)
    do_pretrain = train.phase in ("pretrain", "both") and train.ablation != "no_augment"
    do_finetune = train.phase in ("finetune", "both")
    if train.ablation == "no_augment" and train.phase == "pretrain":
        raise DataError("no_augment ablation 은 사전학습을 생략하므로 phase=pretrain 과 함께 쓸 수 없습니다")

    from_checkpoint = train.phase == "finetune" and train.ablation != "no_augment"
    net = _starting_net(run, model, from_checkpoint)
    logger.info(
        f"🧠 모델 준비: 파라미터 {net.parameter_count():,}개 "
        f"(separator={'on' if model.separator_enabled else 'off'}, ablation={train.ablation})"
    )

    result = TrainResult(net, None)
    if do_pretrain:
        if corpus is None:
            raise DataError("사전학습 코퍼스가 주어지지 않았습니다")
        data = build_pretrain_data(corpus, train.block_length)
        result.history.extend(pretrain(net, data, train))
    if do_finetune:
        if target_train is None:
            raise DataError("미세조정 학습 분할이 주어지지 않았습니다")
        result.norm_stats, history = finetune(net, target_train, train)
        result.history.extend(history)
    return result


def default_loss_log_path(run: RunConfig) -> str:
    return os.path.join(run.paths.train_dir, "loss_log.csv")
