"""
실행 설정 로딩 모듈
"""

from .loader import (
    DEFAULT_CONFIG_PATH,
    FULL_SCALE_CONFIG_PATH,
    apply_overrides,
    config_echo,
    load_run_config,
    validate_config,
)

__all__ = [
    "DEFAULT_CONFIG_PATH",
    "FULL_SCALE_CONFIG_PATH",
    "apply_overrides",
    "config_echo",
    "load_run_config",
    "validate_config",
]
