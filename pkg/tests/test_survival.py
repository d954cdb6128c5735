import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cqrnet import (Dataset, KmCurve, SurvivalRecord, ipcw_weights,
                    km_censoring_estimate, km_eval_left)
from cqrnet.errors import InvalidInputError

from oracles import ipcw_bruteforce, km_censoring_bruteforce, km_left_limit


def test_record_validation():
    with pytest.raises(InvalidInputError):
        SurvivalRecord(time=0.0, event=1, covariates=(1.0,))
    with pytest.raises(InvalidInputError):
        SurvivalRecord(time=1.0, event=2, covariates=(1.0,))


def test_dataset_rejects_empty():
    with pytest.raises(InvalidInputError):
        Dataset(times=[], events=[], covariates=np.zeros((0, 1)))


def test_km_hand_example(four_record_data):
    curve = km_censoring_estimate(four_record_data)
    np.testing.assert_array_equal(curve.jump_times, [2.0, 4.0])
    np.testing.assert_allclose(curve.survival_values, [2.0 / 3.0, 0.0])
    assert curve.eval(1.5) == 1.0
    assert curve.eval(2.0) == pytest.approx(2.0 / 3.0)
    assert curve.eval(5.0) == 0.0


def test_km_no_censoring():
    data = Dataset(times=[1, 2, 3], events=[1, 1, 1], covariates=np.zeros((3, 1)))
    curve = km_censoring_estimate(data)
    assert len(curve.jump_times) == 0
    assert curve.eval(100.0) == 1.0


def test_km_single_censored_record():
    data = Dataset(times=[5.0], events=[0], covariates=np.zeros((1, 1)))
    curve = km_censoring_estimate(data)
    assert curve.eval(4.9) == 1.0
    assert curve.eval(5.0) == 0.0


def test_km_eval_left(four_record_data):
    curve = km_censoring_estimate(four_record_data)
    assert km_eval_left(curve, 2.0) == 1.0
    assert km_eval_left(curve, 3.0) == pytest.approx(2.0 / 3.0)
    assert km_eval_left(curve, 0.5) == 1.0
    with pytest.raises(InvalidInputError):
        km_eval_left(curve, 0.0)


def test_ipcw_hand_example(four_record_data):
    curve = km_censoring_estimate(four_record_data)
    np.testing.assert_allclose(ipcw_weights(four_record_data, curve),
                               [1.0, 0.0, 1.5, 0.0])


def test_ipcw_all_events():
    data = Dataset(times=[1, 2, 3], events=[1, 1, 1], covariates=np.zeros((3, 1)))
    w = ipcw_weights(data, km_censoring_estimate(data))
    np.testing.assert_array_equal(w, [1.0, 1.0, 1.0])


def test_ipcw_all_censored():
    data = Dataset(times=[1, 2, 3], events=[0, 0, 0], covariates=np.zeros((3, 1)))
    w = ipcw_weights(data, km_censoring_estimate(data))
    np.testing.assert_array_equal(w, [0.0, 0.0, 0.0])


def test_curve_validation():
    with pytest.raises(InvalidInputError):
        KmCurve(jump_times=np.array([2.0, 1.0]), survival_values=np.array([0.5, 0.4]))
    with pytest.raises(InvalidInputError):
        KmCurve(jump_times=np.array([1.0, 2.0]), survival_values=np.array([0.4, 0.5]))


@given(st.lists(st.tuples(st.integers(1, 8), st.integers(0, 1)),
                min_size=1, max_size=10))
@settings(max_examples=200, deadline=None)
def test_km_matches_bruteforce_oracle(rows):
    times = [float(t) for t, _ in rows]
    events = [d for _, d in rows]
    data = Dataset(times=times, events=events, covariates=np.zeros((len(rows), 1)))
    curve = km_censoring_estimate(data)
    jumps, values = km_censoring_bruteforce(times, events)
    np.testing.assert_allclose(curve.jump_times, jumps)
    np.testing.assert_allclose(curve.survival_values, values, atol=1e-15)
    # monotone, bounded
    assert np.all(curve.survival_values >= 0) and np.all(curve.survival_values <= 1)
    assert np.all(np.diff(curve.survival_values) <= 1e-15)
    # left limits and weights agree with the oracle exactly
    for t in times:
        assert curve.eval_left(t) == pytest.approx(km_left_limit(jumps, values, t))
    np.testing.assert_allclose(ipcw_weights(data, curve),
                               ipcw_bruteforce(times, events))


def test_weights_sign_pattern():
    for events in itertools.product((0, 1), repeat=5):
        if sum(events) == 0:
            continue
        times = [1.0, 2.0, 2.0, 3.0, 4.0]
        data = Dataset(times=times, events=list(events),
                       covariates=np.zeros((5, 1)))
        w = ipcw_weights(data, km_censoring_estimate(data))
        for wi, d in zip(w, events):
            assert (wi > 0) == (d == 1)
