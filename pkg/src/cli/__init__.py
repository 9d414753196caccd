"""
cli 패키지
"""

from .commands import (
    INLINE_LABELS,
    DetectSummary,
    ablation_config,
    cmd_ablate,
    cmd_detect,
    cmd_report,
    cmd_synth,
    cmd_train,
)
from .manifest import ManifestRecorder

__all__ = [
    "INLINE_LABELS",
    "DetectSummary",
    "ablation_config",
    "cmd_ablate",
    "cmd_detect",
    "cmd_report",
    "cmd_synth",
    "cmd_train",
    "ManifestRecorder",
]
