"""Compare the deep quantile network against the linear baseline on
simulated group-effect data.

Runs R independent replicates (train/test pairs), fits both models at the
requested quantile, and prints per-replicate and median test metrics.

Example:
    python3 scripts/run_sim_comparison.py --replicates 10 --n 750 --censor 0.1
"""

import argparse

import numpy as np

from cqrnet import (LossConfig, NetworkConfig, Scenario, TrainConfig,
                    calibrate_censor_bound, fit_linear_cqr, forward,
                    init_network, mmse, quantile_loss, simulate, train)
from cqrnet.linear import predict_linear_batch
from cqrnet.metrics import default_cap_u


def parse_args():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--replicates", type=int, default=10)
    ap.add_argument("--n", type=int, default=750)
    ap.add_argument("--censor", type=float, default=0.1)
    ap.add_argument("--tau", type=float, default=0.5)
    ap.add_argument("--nodes", type=int, default=300)
    ap.add_argument("--layers", type=int, default=2)
    ap.add_argument("--epochs", type=int, default=100)
    ap.add_argument("--batch", type=int, default=64)
    ap.add_argument("--seed", type=int, default=123)
    return ap.parse_args()


def main():
    args = parse_args()
    scenario = Scenario(kind="group_effect")
    bound = calibrate_censor_bound(scenario, args.censor, seed=args.seed)
    scenario = scenario.with_censor_bound(bound)
    loss = LossConfig(tau=args.tau)

    rows = []
    print(f"censor bound c = {bound:.4f} (target {args.censor})")
    print(f"{'rep':>3} {'deep_mmse':>10} {'lin_mmse':>10} "
          f"{'deep_ql':>10} {'lin_ql':>10}")
    for rep in range(args.replicates):
        train_rep = simulate(scenario, args.n, seed=10_000 + rep)
        test_rep = simulate(scenario, args.n, seed=20_000 + rep)
        test_ds = test_rep.dataset
        cap = default_cap_u(test_ds)

        net = init_network(
            NetworkConfig(2, (args.nodes,) * args.layers, activation="relu"),
            seed=rep)
        cfg = TrainConfig(loss=loss, optimizer="adam", epochs=args.epochs,
                          batch_size=args.batch, seed=rep)
        deep, _ = train(net, train_rep.dataset, cfg)
        deep_preds, _ = forward(deep, test_ds.covariates, "infer")

        linear, _ = fit_linear_cqr(train_rep.dataset, loss)
        lin_preds = np.log(predict_linear_batch(linear, test_ds.covariates))

        row = (mmse(test_ds, deep_preds), mmse(test_ds, lin_preds),
               quantile_loss(test_ds, deep_preds, args.tau, cap),
               quantile_loss(test_ds, lin_preds, args.tau, cap))
        rows.append(row)
        print(f"{rep:>3} " + " ".join(f"{v:>10.4f}" for v in row))

    med = np.median(np.array(rows), axis=0)
    print(f"{'med':>3} " + " ".join(f"{v:>10.4f}" for v in med))


if __name__ == "__main__":
    main()
