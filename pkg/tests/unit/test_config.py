# pyright: reportMissingParameterType=false
import pytest

from src.shared.config import (
    FULL_SCALE_CONFIG_PATH,
    apply_overrides,
    config_echo,
    load_run_config,
    validate_config,
)
from src.shared.errors import ConfigError, DataError


def test_default_config_loads():
    run = load_run_config()
    assert run.model.separator_kind == "dprnn"
    assert run.train.phase == "both"
    assert run.synth.master_seed == run.seed
    assert run.train.seed == run.seed


def test_full_scale_config_loads():
    run = load_run_config(FULL_SCALE_CONFIG_PATH)
    assert run.model.basis_count == 256
    assert run.train.block_length == 8000


def test_overrides_are_applied():
    run = load_run_config(None, ["train.pretrain_epochs=3", "pot.risk=1e-4", "synth.period_range=[4, 9]"])
    assert run.train.pretrain_epochs == 3
    assert run.pot.risk == pytest.approx(1e-4)
    assert run.synth.period_range == (4, 9)


def test_override_creates_missing_section():
    merged = apply_overrides({"seed": 1}, ["detect.include_remainder=true"])
    assert merged == {"seed": 1, "detect": {"include_remainder": True}}


def test_override_without_equals_sign():
    with pytest.raises(ConfigError):
        apply_overrides({}, ["train.phase"])


def test_unknown_key_is_rejected():
    with pytest.raises(ConfigError) as info:
        validate_config({"train": {"learning_rate": 0.1}})
    assert info.value.key == "train.learning_rate"


def test_empty_range_names_the_key():
    with pytest.raises(ConfigError) as info:
        validate_config({"synth": {"beta0_range": [2.0, 1.0]}})
    assert info.value.key == "synth.beta0_range"
    assert "synth.beta0_range" in str(info.value)


def test_only_dprnn_separator_is_accepted():
    with pytest.raises(ConfigError) as info:
        validate_config({"model": {"separator_kind": "transformer"}})
    assert info.value.key == "model.separator_kind"


def test_stride_cannot_exceed_frame_length():
    with pytest.raises(ConfigError):
        validate_config({"model": {"frame_length": 2, "stride": 3}})


def test_explicit_section_seed_wins():
    run = validate_config({"seed": 5, "train": {"seed": 9}})
    assert run.synth.master_seed == 5
    assert run.train.seed == 9


def test_missing_config_file(tmp_path):
    with pytest.raises(DataError):
        load_run_config(str(tmp_path / "missing.yml"))


def test_non_mapping_config_file(tmp_path):
    path = tmp_path / "list.yml"
    path.write_text("- 1\n- 2\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_run_config(str(path))


def test_config_echo_is_json_friendly(tiny_run):
    echo = config_echo(tiny_run)
    assert echo["seed"] == 7
    assert echo["synth"]["period_range"] == [4, 12]


def test_target_events_must_fit_test_length():
    with pytest.raises(ConfigError) as info:
        validate_config({"synth": {"target_anomaly_events": 20, "target_test_length": 32}})
    assert info.value.key == "synth.target_anomaly_events"
    assert "synth.target_anomaly_events" in str(info.value)


def test_corpus_events_must_fit_series_length():
    with pytest.raises(ConfigError) as info:
        validate_config(
            {"synth": {"length": 16, "period_range": [2, 8], "anomaly_window_length": [1, 4],
                       "anomaly_events_range": [1, 6]}}
        )
    assert info.value.key == "synth.anomaly_events_range"


def test_event_capacity_boundary_is_accepted():
    run = validate_config({"synth": {"target_anomaly_events": 10, "target_test_length": 30}})
    assert run.synth.target_anomaly_events == 10
    run = validate_config({"synth": {"target_anomaly_events": 0, "target_test_length": 16}})
    assert run.synth.target_anomaly_events == 0
