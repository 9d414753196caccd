"""
detection 패키지
복원 오차 점수, POT 임계값 보정, 라벨링
"""

from .pipeline import (
    CALIBRATION_NAME,
    DECOMPOSITION_SUFFIX,
    MANIFEST_NAME,
    METRICS_CSV,
    METRICS_TXT,
    SCORES_SUFFIX,
    EntityResult,
    Reconstruction,
    calibrate,
    decomposition_frame,
    detect_entity,
    reconstruct,
    scores_frame,
)
from .pot import (
    GpdFit,
    PotResult,
    fit_gpd,
    gpd_log_likelihood,
    label_anomalies,
    pot_threshold,
    profile_scale,
    tail_quantile,
)
from .scoring import score

__all__ = [
    "CALIBRATION_NAME",
    "DECOMPOSITION_SUFFIX",
    "MANIFEST_NAME",
    "METRICS_CSV",
    "METRICS_TXT",
    "SCORES_SUFFIX",
    "EntityResult",
    "Reconstruction",
    "calibrate",
    "decomposition_frame",
    "detect_entity",
    "reconstruct",
    "scores_frame",
    "GpdFit",
    "PotResult",
    "fit_gpd",
    "gpd_log_likelihood",
    "label_anomalies",
    "pot_threshold",
    "profile_scale",
    "tail_quantile",
    "score",
]
