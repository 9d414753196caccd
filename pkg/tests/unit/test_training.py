# pyright: reportMissingParameterType=false
import logging

import numpy as np
import pytest

from src.model import Decomposition, DecompositionNet
from src.numerics import AdamState, Tensor, current_tape, gradcheck, no_grad
from src.shared.errors import DataError, NumericError
from src.synthgen import load_corpus
from src.training import (
    EPS,
    NormStats,
    apply_ablation,
    build_pretrain_data,
    loss_dec,
    loss_log_frame,
    loss_rec,
    normalize,
    normalize_components,
    run_training,
    segment,
    train_step,
)


def _decomp(*rows) -> Decomposition:
    return Decomposition(*(Tensor(np.atleast_2d(r)) for r in rows))


# --- 정규화 ---
def test_normalize_examples():
    stats = NormStats(np.array([0.0]), np.array([2.0]))
    assert normalize(np.array([1.0]), stats)[0] == pytest.approx(0.5, abs=1e-8)
    assert normalize(np.array([0.0]), stats)[0] == 0.0
    above = normalize(np.array([5.0]), stats)[0]
    assert above == 1.0 - EPS
    assert above < 1.0
    assert normalize(np.array([-3.0]), stats)[0] == 0.0


def test_normalize_degenerate_channel(caplog):
    with caplog.at_level(logging.WARNING):
        stats = NormStats.fit(np.array([[1.0, 3.0], [2.0, 3.0], [0.0, 3.0]]))
    assert stats.degenerate.tolist() == [False, True]
    assert "채널 1" in caplog.text
    out = normalize(np.array([[1.0, 9.0]]), stats)
    assert out[0, 1] == 0.0


def test_normalize_channel_mismatch():
    with pytest.raises(DataError):
        normalize(np.zeros((4, 3)), NormStats(np.zeros(2), np.ones(2)))


def test_norm_stats_dict_round_trip():
    stats = NormStats(np.array([0.25, -1.0]), np.array([4.0, 2.0]))
    back = NormStats.from_dict(stats.to_dict())
    np.testing.assert_array_equal(back.minimum, stats.minimum)
    np.testing.assert_array_equal(back.maximum, stats.maximum)


# --- 블록 분할 ---
def test_segment_full_blocks():
    blocks = segment(np.arange(16.0), 8)
    assert blocks.values.shape == (2, 8)
    assert blocks.valid.all()


def test_segment_pads_last_block():
    blocks = segment(np.arange(10.0), 8)
    assert blocks.values.shape == (2, 8)
    assert blocks.valid[1].sum() == 2
    np.testing.assert_array_equal(blocks.values[1], [8.0, 9.0, 9.0, 9.0, 9.0, 9.0, 9.0, 9.0])


def test_segment_restore_identity(rng):
    values = rng.normal(size=(21, 3))
    blocks = segment(values, 8)
    assert blocks.per_channel == 3
    np.testing.assert_array_equal(blocks.restore(blocks.values), values)


# --- 손실 ---
def test_loss_dec_examples():
    truth = _decomp([1.0, 0.0], [2.0, 2.0], [0.5, 0.5])
    assert loss_dec(truth, _decomp([1.0, 0.0], [2.0, 2.0], [0.5, 0.5])).item() == 0.0
    assert loss_dec(truth, _decomp([0.0, 0.0], [2.0, 2.0], [0.5, 0.5])).item() == pytest.approx(1.0)
    two = _decomp([[1.0, 0.0], [1.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]])
    pred = _decomp([[0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]])
    assert loss_dec(two, pred).item() == pytest.approx(2.0)


def test_loss_dec_masks_padding():
    truth = _decomp([1.0, 5.0], [0.0, 0.0], [0.0, 0.0])
    pred = _decomp([1.0, 0.0], [0.0, 0.0], [0.0, 0.0])
    assert loss_dec(truth, pred, np.array([[True, False]])).item() == 0.0


def test_loss_rec_examples():
    x = Tensor([[1.0, 1.0]])
    assert loss_rec(x, Tensor([[0.5, 0.5]]), Tensor([[0.5, 0.5]])).item() == 0.0
    assert loss_rec(x, Tensor([[0.0, 0.5]]), Tensor([[0.0, 0.5]])).item() == pytest.approx(1.0)


def _network_case(config, seed):
    rng = np.random.default_rng(seed)
    net = DecompositionNet.initialize(config, rng)
    x = Tensor.constant(rng.uniform(size=(2, 12)))
    truth = Decomposition(*(Tensor.constant(rng.uniform(size=(2, 12))) for _ in range(3)))
    valid = np.ones((2, 12), dtype=bool)
    valid[1, 9:] = False
    return net, x, truth, valid


@pytest.mark.parametrize("seed", range(3))
def test_loss_dec_gradcheck_through_network(tiny_model_config, seed):
    net, x, truth, valid = _network_case(tiny_model_config, seed)

    def _loss() -> Tensor:
        return loss_dec(truth, net.decompose_batch(x), valid)

    assert gradcheck(_loss, list(net.trainable().values())) <= 1e-4


@pytest.mark.parametrize("seed", range(3))
def test_loss_rec_gradcheck_through_network(tiny_model_config, seed):
    net, x, _, valid = _network_case(tiny_model_config, seed)

    def _loss() -> Tensor:
        pred = net.decompose_batch(x)
        return loss_rec(x, pred.trend, pred.seasonal, valid)

    assert gradcheck(_loss, list(net.trainable().values())) <= 1e-4


def test_normalize_components_keeps_sum(tmp_corpus):
    for comps in load_corpus(tmp_corpus):
        x, trend, seasonal, remainder = normalize_components(comps)
        assert 0.0 <= x.min() and x.max() < 1.0
        np.testing.assert_allclose(trend + seasonal + remainder, x, atol=1e-12)


# --- 최적화 ---
def test_single_step_decreases_loss(tiny_model_config, tmp_corpus):
    net = DecompositionNet.initialize(tiny_model_config, np.random.default_rng(3))
    data = build_pretrain_data(load_corpus(tmp_corpus), 16)
    rows = np.arange(4)

    def _loss() -> Tensor:
        x = Tensor.constant(data.x[rows])
        truth = Decomposition(
            Tensor.constant(data.trend[rows]),
            Tensor.constant(data.seasonal[rows]),
            Tensor.constant(data.remainder[rows]),
        )
        return loss_dec(truth, net.decompose_batch(x), data.valid[rows])

    before = train_step(net, AdamState(), 1e-5, _loss)
    with no_grad():
        after = _loss().item()
    assert after < before


def test_train_step_rejects_non_finite(tiny_model_config):
    net = DecompositionNet.initialize(tiny_model_config, np.random.default_rng(0))
    bad = Tensor.parameter([np.nan])
    with pytest.raises(NumericError):
        train_step(net, AdamState(), 1e-3, lambda: bad * 2.0)
    assert len(current_tape()) == 0


def test_apply_ablation_disables_separator(tiny_model_config):
    assert not apply_ablation(tiny_model_config, "no_sep").separator_enabled
    assert apply_ablation(tiny_model_config, "no_decomp") == tiny_model_config


def _target_values(rng) -> np.ndarray:
    t = np.arange(96)
    return np.stack([np.sin(2 * np.pi * t / 12), 0.01 * t], axis=1) + rng.normal(0, 0.05, size=(96, 2))


def test_training_deterministic(tiny_run, tmp_corpus, rng):
    corpus = load_corpus(tmp_corpus)
    values = _target_values(rng)
    a = run_training(tiny_run, corpus, values)
    b = run_training(tiny_run, corpus, values)
    for name, p in a.net.params.items():
        np.testing.assert_array_equal(p.numpy(), b.net.params[name].numpy())
    assert [r.loss for r in a.history] == [r.loss for r in b.history]


def test_both_phases_record_history(tiny_run, tmp_corpus, rng):
    result = run_training(tiny_run, load_corpus(tmp_corpus), _target_values(rng))
    frame = loss_log_frame(result.history)
    assert list(frame.columns) == ["epoch", "phase", "loss"]
    assert frame["phase"].tolist() == ["pretrain", "finetune"]
    assert np.isfinite(frame["loss"]).all()
    assert result.norm_stats is not None and result.norm_stats.channels == 2


def test_no_augment_skips_pretraining(tiny_run, rng):
    run = tiny_run.model_copy(update={"train": tiny_run.train.model_copy(update={"ablation": "no_augment"})})
    result = run_training(run, None, _target_values(rng))
    assert {r.phase for r in result.history} == {"finetune"}


def test_no_augment_with_pretrain_phase_is_rejected(tiny_run):
    train = tiny_run.train.model_copy(update={"ablation": "no_augment", "phase": "pretrain"})
    with pytest.raises(DataError):
        run_training(tiny_run.model_copy(update={"train": train}))


def test_pretrain_requires_corpus(tiny_run, rng):
    with pytest.raises(DataError):
        run_training(tiny_run, None, _target_values(rng))


def test_no_sep_trains_only_codec(tiny_run, tmp_corpus, rng):
    run = tiny_run.model_copy(update={"train": tiny_run.train.model_copy(update={"ablation": "no_sep"})})
    result = run_training(run, load_corpus(tmp_corpus), _target_values(rng))
    assert not result.net.config.separator_enabled
    assert result.net.parameter_count() == 2 * run.model.basis_count * run.model.frame_length
