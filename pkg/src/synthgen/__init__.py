"""
synthgen 패키지
추세 + 계절 + 잔차 합성과 이상 주입, 코퍼스/대상 분할 저장
"""

from .anomalies import (
    AnomalyMagnitudes,
    InjectedEvent,
    event_windows,
    feasible_global_k,
    inject_anomalies,
    warp_window,
)
from .components import (
    ComponentSet,
    CycleJitter,
    DegenerateVarianceError,
    Wave,
    compose_series,
    gen_deterministic_seasonal,
    gen_linear_trend,
    gen_remainder,
    gen_stochastic_seasonal,
    gen_stochastic_trend,
    integrate_twice,
    scale_cycles,
    standardize,
    tile_cycle,
)
from .dataset import (
    CORPUS_COLUMNS,
    MANIFEST_NAME,
    anomalous_indices,
    gen_dataset,
    gen_target_split,
    generate_components,
    generate_series,
    load_corpus,
    save_target_split,
)

__all__ = [
    "AnomalyMagnitudes",
    "InjectedEvent",
    "event_windows",
    "feasible_global_k",
    "inject_anomalies",
    "warp_window",
    "ComponentSet",
    "CycleJitter",
    "DegenerateVarianceError",
    "Wave",
    "compose_series",
    "gen_deterministic_seasonal",
    "gen_linear_trend",
    "gen_remainder",
    "gen_stochastic_seasonal",
    "gen_stochastic_trend",
    "integrate_twice",
    "scale_cycles",
    "standardize",
    "tile_cycle",
    "CORPUS_COLUMNS",
    "MANIFEST_NAME",
    "anomalous_indices",
    "gen_dataset",
    "gen_target_split",
    "generate_components",
    "generate_series",
    "load_corpus",
    "save_target_split",
]
