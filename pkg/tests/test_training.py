import numpy as np
import pytest

from cqrnet import (Dataset, LossConfig, NetworkConfig, TrainConfig,
                    init_network, optimizer_step, train)
from cqrnet.training import OPTIMIZERS, init_optimizer_state
from cqrnet.errors import (DegenerateDataError, InvalidConfigError,
                           NumericError)

from conftest import make_loglinear_data


def test_sgd_step():
    state = init_optimizer_state("sgd", [np.array([1.0])])
    new, state = optimizer_step("sgd", state, [np.array([1.0])],
                                [np.array([0.5])], 0.1)
    assert new[0][0] == pytest.approx(0.95)
    assert state.step_count == 1


def test_adam_first_step_bias_correction():
    state = init_optimizer_state("adam", [np.array([0.0])])
    new, _ = optimizer_step("adam", state, [np.array([0.0])],
                            [np.array([1.0])], 0.1)
    # m_hat = v_hat = 1 after the first step
    assert new[0][0] == pytest.approx(-0.1 / (1.0 + 1e-8))


@pytest.mark.parametrize("kind", OPTIMIZERS)
def test_zero_gradient_is_fixed_point(kind):
    params = [np.array([1.0, -2.0]), np.array([[0.5]])]
    state = init_optimizer_state(kind, params)
    new, state = optimizer_step(kind, state, params,
                                [np.zeros(2), np.zeros((1, 1))], 0.1)
    for p, q in zip(params, new):
        np.testing.assert_array_equal(p, q)
    # second step too (accumulators stay benign)
    new, _ = optimizer_step(kind, state, new, [np.zeros(2), np.zeros((1, 1))], 0.1)
    for p, q in zip(params, new):
        np.testing.assert_array_equal(p, q)


def test_non_finite_gradient_names_block():
    state = init_optimizer_state("sgd", [np.zeros(1), np.zeros(1)])
    with pytest.raises(NumericError, match="block 1"):
        optimizer_step("sgd", state, [np.zeros(1), np.zeros(1)],
                       [np.zeros(1), np.array([np.nan])], 0.1)


def test_config_validation():
    loss = LossConfig(tau=0.5)
    with pytest.raises(InvalidConfigError):
        TrainConfig(loss=loss, epochs=0)
    with pytest.raises(InvalidConfigError):
        TrainConfig(loss=loss, optimizer="nadam")
    with pytest.raises(InvalidConfigError):
        TrainConfig(loss=loss, learning_rate=-1.0)


def _linear_data(n=40, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.uniform(-1, 1, n)
    log_t = 2.0 + 3.0 * x
    return Dataset(times=np.exp(log_t), events=np.ones(n, dtype=int),
                   covariates=x.reshape(-1, 1))


def test_train_rejects_zero_events():
    data = Dataset(times=[1, 2], events=[0, 0], covariates=np.zeros((2, 1)))
    model = init_network(NetworkConfig(1, ()), 0)
    with pytest.raises(DegenerateDataError):
        train(model, data, TrainConfig(loss=LossConfig(tau=0.5), epochs=1,
                                       batch_size=2))


def test_train_rejects_oversized_batch():
    data = _linear_data(4)
    model = init_network(NetworkConfig(1, ()), 0)
    with pytest.raises(InvalidConfigError):
        train(model, data, TrainConfig(loss=LossConfig(tau=0.5), epochs=1,
                                       batch_size=10))


def test_zero_learning_rate_keeps_initialization():
    data = _linear_data()
    model = init_network(NetworkConfig(1, (4,)), 0)
    cfg = TrainConfig(loss=LossConfig(tau=0.5), optimizer="sgd",
                      learning_rate=0.0, epochs=1, batch_size=10)
    trained, log = train(model, data, cfg)
    for a, b in zip(model.parameters(), trained.parameters()):
        np.testing.assert_array_equal(a, b)
    assert len(log.epoch_losses) == 1


def test_training_is_deterministic():
    data = _linear_data()
    cfg = TrainConfig(loss=LossConfig(tau=0.5), optimizer="adam",
                      epochs=5, batch_size=8, seed=42)
    runs = []
    for _ in range(2):
        model = init_network(NetworkConfig(1, (6,), dropout_rate=0.2), 7)
        runs.append(train(model, data, cfg))
    np.testing.assert_array_equal(runs[0][1].epoch_losses, runs[1][1].epoch_losses)
    for a, b in zip(runs[0][0].parameters(), runs[1][0].parameters()):
        np.testing.assert_array_equal(a, b)


def test_zero_hidden_recovers_generating_line():
    data = _linear_data(n=50)
    model = init_network(NetworkConfig(1, ()), 1)
    cfg = TrainConfig(loss=LossConfig(tau=0.5), optimizer="adam",
                      learning_rate=0.05, epochs=2000, batch_size=50)
    trained, _ = train(model, data, cfg)
    assert trained.biases[0][0] == pytest.approx(2.0, abs=0.05)
    assert trained.weights[0][0, 0] == pytest.approx(3.0, abs=0.05)


def test_full_batch_sgd_loss_nonincreasing():
    data = _linear_data(n=30)
    model = init_network(NetworkConfig(1, ()), 0)
    cfg = TrainConfig(loss=LossConfig(tau=0.5), optimizer="sgd",
                      learning_rate=1e-3, epochs=60, batch_size=30)
    _, log = train(model, data, cfg)
    diffs = np.diff(log.epoch_losses)
    assert np.all(diffs <= 1e-12)


def test_uncensored_weights_equal_unit_weights():
    # on fully uncensored data the IPCW weights are identically 1, so
    # training equals a run on the same data with weights forced to 1
    data = make_loglinear_data(60, (1.0, 2.0), 0.2, seed=3)
    from cqrnet import ipcw_weights, km_censoring_estimate
    w = ipcw_weights(data, km_censoring_estimate(data))
    np.testing.assert_array_equal(w, np.ones(60))


def test_optimizers_agree_on_convex_problem():
    data = make_loglinear_data(40, (2.0, 3.0), 0.5, seed=2)
    finals = []
    for kind, lr in [("sgd", 0.05), ("adam", 0.05), ("adamax", 0.05),
                     ("adadelta", 1.0)]:
        model = init_network(NetworkConfig(1, ()), 3)
        cfg = TrainConfig(loss=LossConfig(tau=0.5), optimizer=kind,
                          learning_rate=lr, epochs=6000, batch_size=40)
        _, log = train(model, data, cfg)
        finals.append(log.final_loss)
    assert max(finals) - min(finals) <= 0.01 * min(finals)


def test_train_log_csv(tmp_path):
    data = _linear_data(n=10)
    model = init_network(NetworkConfig(1, ()), 0)
    cfg = TrainConfig(loss=LossConfig(tau=0.5), optimizer="sgd",
                      learning_rate=1e-3, epochs=3, batch_size=10)
    _, log = train(model, data, cfg)
    path = tmp_path / "log.csv"
    log.to_csv(path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "epoch,mean_loss"
    assert len(lines) == 4
