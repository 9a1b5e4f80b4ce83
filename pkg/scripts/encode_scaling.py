"""Median per-worker encode time as a function of model size d."""
import argparse
import time

import numpy as np

from solon.codec import encode_worker, validate_config


def median_us(cfg, repeats):
    y = np.random.default_rng(cfg.d).standard_normal(cfg.d_pad)
    out = []
    for k in range(repeats):
        t0 = time.perf_counter()
        encode_worker(y, 0.5 + 1e-3 * k, cfg)
        out.append(time.perf_counter() - t0)
    return 1e6 * float(np.median(out))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeats", type=int, default=51)
    ap.add_argument("--r_c", type=int, default=10)
    ap.add_argument("--s", type=int, default=5)
    args = ap.parse_args()
    r = 2 * args.s + args.r_c
    prev = None
    for d in (10**3, 10**4, 5 * 10**4, 10**5, 10**6):
        t = median_us(validate_config(r, args.s, args.r_c, d), args.repeats)
        ratio = "" if prev is None else f"  x{t / prev[1]:.2f} for x{d / prev[0]:g} d"
        print(f"d={d:>8}  {t:10.1f} us{ratio}")
        prev = (d, t)


if __name__ == "__main__":
    main()
