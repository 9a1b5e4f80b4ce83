"""Recovery / detection rates over a grid of mechanisms and attacks.

    python scripts/recovery_sweep.py --trials 500
"""
import argparse
import warnings

import numpy as np

from solon.adversary import AttackKind, AttackSpec, inject
from solon.codec import NumericalWarning, build_allocation, encode_all, make_weights, validate_config
from solon.decoder import decode
from solon.errors import DecodeError

GRID = [(4, 1, 2), (12, 2, 2), (20, 5, 10), (40, 5, 10), (24, 5, 14), (28, 7, 14)]
PARAMS = {AttackKind.REVERSE_GRADIENT: -100.0, AttackKind.CONSTANT: -100.0, AttackKind.ALIE: 1.0}


def sweep(P, s, r_c, kind, trials, scheme):
    cfg = validate_config(P, s, r_c, 4 * r_c)
    w = make_weights(cfg, scheme)
    A = build_allocation(cfg)
    exact = located = failed = 0
    for t in range(trials):
        rng = np.random.default_rng([P, s, r_c, t])
        G = rng.standard_normal((cfg.d, P))
        Z = encode_all(G, A, w, cfg)
        adv = tuple(rng.choice(P, size=s, replace=False).tolist())
        R, truth = inject(Z, AttackSpec(kind, PARAMS[kind], adv), cfg)
        try:
            rep = decode(cfg, w, R, seed=t)
        except DecodeError:
            failed += 1
            continue
        target = G.sum(axis=1)
        exact += np.linalg.norm(rep.u - target) <= 1e-6 * np.linalg.norm(target)
        located += rep.located_all == truth
    return exact, located, failed


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--scheme", default="chebyshev", choices=["chebyshev", "equispaced"])
    args = ap.parse_args()
    warnings.simplefilter("ignore", NumericalWarning)
    print(f"{'P':>4} {'s':>3} {'r_c':>4} {'attack':>17} {'exact':>7} {'located':>8} {'failed':>7}")
    for P, s, r_c in GRID:
        for kind in PARAMS:
            e, l, f = sweep(P, s, r_c, kind, args.trials, args.scheme)
            print(f"{P:>4} {s:>3} {r_c:>4} {kind.value:>17} {e:>7} {l:>8} {f:>7}")


if __name__ == "__main__":
    main()
