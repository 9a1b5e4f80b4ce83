"""Train the least-squares model with and without Byzantine workers and
print the loss gap to the closed-form optimum every 20 iterations."""
import argparse

import numpy as np

from solon.adversary import AttackSpec
from solon.codec import validate_config
from solon.sim import TrainTask, gen_dataset, optimum, run_training


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--P", type=int, default=12)
    ap.add_argument("--s", type=int, default=2)
    ap.add_argument("--r_c", type=int, default=2)
    ap.add_argument("--m", type=int, default=8)
    ap.add_argument("--gamma", type=float, default=0.5)
    ap.add_argument("--iterations", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    cfg = validate_config(args.P, args.s, args.r_c, args.m)
    task = TrainTask(n=64, m=args.m, gamma=args.gamma, iterations=args.iterations, seed=args.seed)
    problem = gen_dataset(task.seed, task.n, task.m)
    _, best = optimum(problem)
    runs = {
        "none": run_training(task, cfg, None, problem=problem),
        "rev-grad": run_training(task, cfg, AttackSpec("rev-grad", -100.0, count=cfg.s), problem=problem),
        "constant": run_training(task, cfg, AttackSpec("constant", -100.0, count=cfg.s), problem=problem),
        "alie": run_training(task, cfg, AttackSpec("alie", 1.0, count=cfg.s), problem=problem),
    }
    print("iter " + " ".join(f"{k:>12}" for k in runs))
    for t in list(range(0, task.iterations, 20)) + [task.iterations - 1]:
        print(f"{t:>4} " + " ".join(f"{r.losses[t] - best:>12.3e}" for r in runs.values()))
    base = runs["none"].losses
    for k, r in runs.items():
        print(f"{k}: max |loss - attack-free loss| = {np.max(np.abs(r.losses - base)):.2e}")


if __name__ == "__main__":
    main()
