import numpy as np
import pytest

from cqrnet import (HyperGrid, LossConfig, NetworkConfig, TrainConfig,
                    grid_search, init_network, kfold_split, mc_dropout_predict,
                    train)
from cqrnet.tune import Candidate
from cqrnet.errors import InvalidInputError

from conftest import make_loglinear_data


def test_kfold_shapes():
    folds = kfold_split(10, 5, seed=0)
    assert [len(f) for f in folds] == [2] * 5
    assert sorted(np.concatenate(folds)) == list(range(10))
    folds11 = kfold_split(11, 5, seed=0)
    assert sorted(len(f) for f in folds11) == [2, 2, 2, 2, 3]
    assert sorted(np.concatenate(folds11)) == list(range(11))


def test_kfold_deterministic_and_validated():
    a = kfold_split(20, 4, seed=3)
    b = kfold_split(20, 4, seed=3)
    for fa, fb in zip(a, b):
        np.testing.assert_array_equal(fa, fb)
    with pytest.raises(InvalidInputError):
        kfold_split(3, 5, seed=0)


def _small_grid(**overrides):
    defaults = dict(layers=(1,), nodes=(4,), activation=("relu",),
                    optimizer=("adam",), dropout_rate=(0.0,), epochs=(30,),
                    batch_size=(16,))
    defaults.update(overrides)
    return HyperGrid(**defaults)


def test_singleton_grid_returns_its_candidate():
    data = make_loglinear_data(60, (1.0, 2.0), 0.3, seed=0)
    result = grid_search(data, _small_grid(), LossConfig(tau=0.5), k=3, seed=1)
    assert result.best == _small_grid().candidates()[0]
    assert result.scores[0].n_folds_used == 3


def test_duplicate_candidates_score_identically():
    data = make_loglinear_data(60, (1.0, 2.0), 0.3, seed=0)
    grid = _small_grid(layers=(1, 1))
    result = grid_search(data, grid, LossConfig(tau=0.5), k=3, seed=1)
    # content-derived seeds: duplicated candidates score identically
    assert result.scores[0].mean_ql == result.scores[1].mean_ql
    rerun = grid_search(data, grid, LossConfig(tau=0.5), k=3, seed=1)
    for a, b in zip(result.scores, rerun.scores):
        assert a.mean_ql == b.mean_ql and a.sd_ql == b.sd_ql


def test_learning_beats_frozen_model():
    data = make_loglinear_data(80, (0.5, 2.0), 0.3, seed=2)
    grid = _small_grid(epochs=(1, 200))
    loss = LossConfig(tau=0.5)
    result = grid_search(data, grid, loss, k=4, seed=0, learning_rate=0.05)
    scores = {s.candidate.epochs: s.mean_ql for s in result.scores}
    assert scores[200] < scores[1]
    assert result.best.epochs == 200


def test_parallel_jobs_do_not_change_result():
    data = make_loglinear_data(60, (1.0, 2.0), 0.3, seed=0)
    grid = _small_grid(nodes=(3, 5))
    loss = LossConfig(tau=0.5)
    seq = grid_search(data, grid, loss, k=3, seed=1, jobs=1)
    par = grid_search(data, grid, loss, k=3, seed=1, jobs=4)
    assert seq.best == par.best
    for a, b in zip(seq.scores, par.scores):
        assert a.mean_ql == b.mean_ql


def test_tie_break_prefers_fewer_parameters():
    c_small = Candidate(1, 2, "relu", "adam", 0.0, 10, 8)
    c_big = Candidate(2, 8, "relu", "adam", 0.0, 10, 8)
    assert c_small.n_parameters(3) < c_big.n_parameters(3)


def _trained_dropout_model(dropout, seed=0):
    data = make_loglinear_data(80, (1.0, 2.0), 0.3, seed=5)
    model = init_network(NetworkConfig(1, (8,), dropout_rate=dropout), seed)
    cfg = TrainConfig(loss=LossConfig(tau=0.5), epochs=50, batch_size=16,
                      seed=seed)
    trained, _ = train(model, data, cfg)
    return trained


def test_mc_dropout_zero_rate_degenerates():
    model = _trained_dropout_model(0.0)
    interval = mc_dropout_predict(model, [1.0], n_draws=50, level=0.95, seed=0)
    assert interval.lower == interval.point == interval.upper


def test_mc_dropout_two_draws_min_max():
    model = _trained_dropout_model(0.3)
    interval = mc_dropout_predict(model, [1.0], n_draws=2, level=0.95, seed=4)
    rng = np.random.default_rng(4)
    from cqrnet import forward
    draws, _ = forward(model, np.tile([1.0], (2, 1)), "mc_dropout", rng)
    lo, hi = sorted(np.exp(draws))
    assert interval.lower == pytest.approx(lo)
    assert interval.upper == pytest.approx(hi)


def test_mc_dropout_quantiles_are_order_statistics():
    model = _trained_dropout_model(0.3)
    interval = mc_dropout_predict(model, [0.7], n_draws=40, level=0.9, seed=1)
    rng = np.random.default_rng(1)
    from cqrnet import forward
    draws = np.sort(np.exp(forward(model, np.tile([0.7], (40, 1)),
                                   "mc_dropout", rng)[0]))
    assert interval.lower in draws and interval.upper in draws
    assert interval.lower <= interval.upper


def test_mc_dropout_width_grows_with_rate():
    base = _trained_dropout_model(0.0)
    rng = np.random.default_rng(2)
    xs = rng.uniform(0, 2, 50)
    widths = {}
    for rate in (0.1, 0.4):
        model = base.with_dropout(rate)
        w = [mc_dropout_predict(model, [x], 100, 0.95, seed=i).upper -
             mc_dropout_predict(model, [x], 100, 0.95, seed=i).lower
             for i, x in enumerate(xs)]
        widths[rate] = np.mean(w)
    assert widths[0.4] > widths[0.1]


def test_mc_dropout_validation():
    model = _trained_dropout_model(0.2)
    with pytest.raises(InvalidInputError):
        mc_dropout_predict(model, [1.0], n_draws=1, level=0.95, seed=0)
    with pytest.raises(InvalidInputError):
        mc_dropout_predict(model, [1.0], n_draws=10, level=1.5, seed=0)
