"""
training 패키지
정규화/블록 분할, 분해·복원 손실, 2단계 학습 루프
"""

from .losses import loss_dec, loss_rec
from .preprocess import EPS, Blocks, NormStats, normalize, segment
from .trainer import (
    LossRecord,
    TrainResult,
    apply_ablation,
    build_pretrain_data,
    default_loss_log_path,
    finetune,
    loss_log_frame,
    normalize_components,
    pretrain,
    run_training,
    train_step,
    write_loss_log,
)

__all__ = [
    "loss_dec",
    "loss_rec",
    "EPS",
    "Blocks",
    "NormStats",
    "normalize",
    "segment",
    "LossRecord",
    "TrainResult",
    "apply_ablation",
    "build_pretrain_data",
    "default_loss_log_path",
    "finetune",
    "loss_log_frame",
    "normalize_components",
    "pretrain",
    "run_training",
    "train_step",
    "write_loss_log",
]
