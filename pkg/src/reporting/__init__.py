"""
reporting 패키지
"""

from .plots import PANELS, SPAN_PREFIX, plot_series
from .report import build_report, render_index

__all__ = ["PANELS", "SPAN_PREFIX", "plot_series", "build_report", "render_index"]
