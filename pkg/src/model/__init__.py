"""
model 패키지
프레임 분할, 선형 인코더, dual-path 분리기, 공유 디코더, 체크포인트
"""

from .checkpoint import load_checkpoint, save_checkpoint
from .framing import frame, frame_count, frame_indices, overlap_add
from .network import DECODER, ENCODER, Decomposition, DecompositionNet
from .separator import MaskSet, UninitializedSeparatorError, separator_shapes

__all__ = [
    "load_checkpoint",
    "save_checkpoint",
    "frame",
    "frame_count",
    "frame_indices",
    "overlap_add",
    "DECODER",
    "ENCODER",
    "Decomposition",
    "DecompositionNet",
    "MaskSet",
    "UninitializedSeparatorError",
    "separator_shapes",
]
