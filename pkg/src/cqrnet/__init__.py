"""Censored quantile regression with feed-forward networks, an IPCW-weighted
Huber check loss, a linear baseline, survival-aware metrics, MC-dropout
prediction intervals, and a simulation-study generator."""

__version__ = "0.1.0"

from .linear import LinearModel, fit_linear_cqr, predict_linear
from .loss import LossConfig, check, huber_check, huber_check_grad, weighted_loss
from .metrics import MetricsReport, c_index, compute_report, mmse, quantile_loss
from .network import (MlpModel, NetworkConfig, backward, forward, init_network,
                      load_model, save_model)
from .simulate import Scenario, SimReplicate, calibrate_censor_bound, simulate, true_quantile
from .survival import (Dataset, KmCurve, SurvivalRecord, ipcw_weights,
                       km_censoring_estimate, km_eval_left)
from .training import OptimizerState, TrainConfig, TrainLog, optimizer_step, train
from .tune import (CvResult, HyperGrid, PredictionInterval, grid_search,
                   kfold_split, mc_dropout_predict)

__all__ = [
    "LinearModel", "fit_linear_cqr", "predict_linear",
    "LossConfig", "check", "huber_check", "huber_check_grad", "weighted_loss",
    "MetricsReport", "c_index", "compute_report", "mmse", "quantile_loss",
    "MlpModel", "NetworkConfig", "backward", "forward", "init_network",
    "load_model", "save_model",
    "Scenario", "SimReplicate", "calibrate_censor_bound", "simulate", "true_quantile",
    "Dataset", "KmCurve", "SurvivalRecord", "ipcw_weights",
    "km_censoring_estimate", "km_eval_left",
    "OptimizerState", "TrainConfig", "TrainLog", "optimizer_step", "train",
    "CvResult", "HyperGrid", "PredictionInterval", "grid_search",
    "kfold_split", "mc_dropout_predict",
]
