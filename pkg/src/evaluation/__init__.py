"""
evaluation 패키지
"""

from .metrics import (
    POOLED,
    MetricsReport,
    compute_metrics,
    evaluate_entities,
    metrics_frame,
    metrics_table,
    point_adjust,
    segments,
)

__all__ = [
    "POOLED",
    "MetricsReport",
    "compute_metrics",
    "evaluate_entities",
    "metrics_frame",
    "metrics_table",
    "point_adjust",
    "segments",
]
