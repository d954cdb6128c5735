import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cqrnet import Dataset


@pytest.fixture
def four_record_data():
    """The hand-computed KM/IPCW example: events at 1 and 3, censorings at 2 and 4."""
    return Dataset(times=[1.0, 2.0, 3.0, 4.0], events=[1, 0, 1, 0],
                   covariates=np.zeros((4, 1)))


def make_loglinear_data(n, beta, noise_sd, seed, x_high=2.0):
    """Uncensored log-linear survival data: log T = beta0 + beta1 x + eps."""
    rng = np.random.default_rng(seed)
    x = rng.uniform(0.0, x_high, n)
    log_t = beta[0] + beta[1] * x + rng.normal(0.0, noise_sd, n)
    return Dataset(times=np.exp(log_t), events=np.ones(n, dtype=int),
                   covariates=x.reshape(-1, 1), feature_names=("x",))
