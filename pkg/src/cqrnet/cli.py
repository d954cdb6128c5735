"""Command-line front-end: simulate, train, predict, evaluate, tune.

Exit status 0 on success, 2 on malformed input/config, 3 on numeric
failure. Every successful run writes `<out>.manifest.json` recording the
resolved flags, output checksums, and wall-clock duration; re-running with
the manifest's flags reproduces outputs byte for byte.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time

import numpy as np

from . import __version__
from .dataio import read_dataset, read_grid_file, write_dataset, write_predictions
from .errors import CqrnetError, NumericError
from .loss import DEFAULT_XI, LossConfig
from .metrics import compute_report
from .network import ACTIVATIONS, NetworkConfig, forward, init_network, load_model, save_model
from .simulate import CENSOR_TARGETS, GROUP, NO_GROUP, Scenario, calibrate_censor_bound, simulate
from .training import OPTIMIZERS, TrainConfig, train
from .tune import grid_search, mc_dropout_predict


def _sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _write_manifest(args: argparse.Namespace, outputs: list[str], duration: float):
    flags = {k: v for k, v in vars(args).items() if k != "func"}
    manifest = {
        "tool": f"cqrnet {__version__}",
        "command": args.command,
        "flags": flags,
        "outputs": {str(p): _sha256(p) for p in outputs},
        "duration_seconds": duration,
    }
    with open(f"{outputs[0]}.manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=1)
        fh.write("\n")


def _loss_config(tau: float, xi: float) -> LossConfig:
    return LossConfig(tau=tau, xi=xi, use_huber=xi > 0)


def cmd_simulate(args) -> list[str]:
    kind = GROUP if args.scenario == "group" else NO_GROUP
    scenario = Scenario(kind=kind)
    bound = calibrate_censor_bound(scenario, args.censor, seed=args.seed)
    replicate = simulate(scenario.with_censor_bound(bound), args.n, args.seed)
    write_dataset(args.out, replicate.dataset,
                  truth=replicate.truth if args.truth else None)
    return [args.out]


def cmd_train(args) -> list[str]:
    data, _ = read_dataset(args.data)
    loss = _loss_config(args.tau, args.xi)
    hidden = () if args.model == "linear" else (args.nodes,) * args.layers
    dropout = 0.0 if args.model == "linear" else args.dropout
    net_cfg = NetworkConfig(input_dim=data.p, hidden_layers=hidden,
                            activation=args.activation, dropout_rate=dropout)
    batch = data.n if args.model == "linear" else min(args.batch, data.n)
    cfg = TrainConfig(loss=loss, optimizer=args.optimizer,
                      learning_rate=args.lr, epochs=args.epochs,
                      batch_size=batch, seed=args.seed)
    model = init_network(net_cfg, args.seed)
    trained, log = train(model, data, cfg)
    trained.metadata.update({
        "tau": args.tau,
        "xi": args.xi,
        "feature_names": list(data.feature_names),
        "final_loss": log.final_loss,
    })
    save_model(trained, args.out)
    return [args.out]


def cmd_predict(args) -> list[str]:
    model = load_model(args.model)
    data, _ = read_dataset(args.data)
    log_preds, _ = forward(model, data.covariates, "infer")
    preds = np.exp(log_preds)
    intervals = None
    if args.interval is not None:
        intervals = [
            mc_dropout_predict(model, data.covariates[i], args.draws,
                               args.interval, seed=args.seed + i)
            for i in range(data.n)
        ]
    write_predictions(args.out, preds, intervals)
    return [args.out]


def cmd_evaluate(args) -> list[str]:
    model = load_model(args.model)
    data, _ = read_dataset(args.data)
    log_preds, _ = forward(model, data.covariates, "infer")
    report = compute_report(data, log_preds, args.tau, cap_u=args.cap_u)
    report.to_csv(args.out)
    print(f"c_index        {report.c_index:.6f}")
    print(f"mmse           {report.mmse:.6f}")
    print(f"quantile_loss  {report.quantile_loss:.6f}")
    print(f"n_events       {report.n_events}")
    print(f"n_comparable   {report.n_comparable_pairs}")
    return [args.out]


def cmd_tune(args) -> list[str]:
    data, _ = read_dataset(args.data)
    grid = read_grid_file(args.grid)
    loss = _loss_config(args.tau, args.xi)
    result = grid_search(data, grid, loss, k=args.folds, seed=args.seed,
                         jobs=args.jobs)
    result.to_csv(args.out)
    for note in result.warnings:
        print(f"warning: {note}", file=sys.stderr)
    if result.best is not None:
        print(f"best: {result.best}")
    return [args.out]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cqrnet",
        description="Censored quantile regression over CSV survival data.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a simulation-study dataset")
    p.add_argument("--scenario", choices=("none", "group"), default="none")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--censor", type=float, choices=CENSOR_TARGETS, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--truth", action="store_true",
                   help="append the true failure time column")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("train", help="fit a deep or linear quantile model")
    p.add_argument("--data", required=True)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--model", choices=("deep", "linear"), default="deep")
    p.add_argument("--layers", type=int, default=2)
    p.add_argument("--nodes", type=int, default=300)
    p.add_argument("--activation", choices=ACTIVATIONS, default="relu")
    p.add_argument("--optimizer", choices=OPTIMIZERS, default="adam")
    p.add_argument("--dropout", type=float, default=0.0)
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--batch", type=int, default=32)
    p.add_argument("--xi", type=float, default=DEFAULT_XI)
    p.add_argument("--lr", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="predict quantiles for new subjects")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--interval", type=float, default=None,
                   help="coverage level for MC-dropout intervals")
    p.add_argument("--draws", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="survival-aware metrics on a test set")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--cap-u", dest="cap_u", type=float, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("tune", help="cross-validated grid search")
    p.add_argument("--data", required=True)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--grid", required=True)
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--xi", type=float, default=DEFAULT_XI)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_tune)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    start = time.monotonic()
    try:
        outputs = args.func(args)
    except NumericError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except CqrnetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _write_manifest(args, outputs, time.monotonic() - start)
    return 0


if __name__ == "__main__":
    sys.exit(main())
