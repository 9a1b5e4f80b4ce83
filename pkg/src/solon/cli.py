"""Command line entry point: ``solon run`` and ``solon check``."""
from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .adversary import DEFAULT_PARAM, AttackSpec, parse_kind
from .codec import WEIGHT_SCHEMES, MechanismConfig, make_weights, validate_config
from .errors import ConfigError, DecodeError, ParseError, TooManyInSpec
from .sim import TrainTask, gen_dataset, optimum, run_training

METRICS_COLUMNS = (
    "iteration",
    "loss",
    "recovery_error",
    "n_located",
    "located_correct",
    "t_encode_us",
    "t_decode_us",
)


@dataclass(frozen=True)
class RunConfig:
    mechanism: MechanismConfig
    task: TrainTask
    attack: AttackSpec
    weight_scheme: str = "chebyshev"


def _require(section, key, name):
    if not isinstance(section, dict):
        raise ParseError(f"section '{name}' must be a JSON object")
    if key not in section:
        raise ParseError(f"missing field '{name}.{key}'")
    return section[key]


def _int(section, key, name, default=None):
    value = section.get(key, default) if default is not None else _require(section, key, name)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"field '{name}.{key}' must be an integer, got {value!r}")
    return value


def _float(section, key, name, default=None):
    value = section.get(key, default) if default is not None else _require(section, key, name)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"field '{name}.{key}' must be a number, got {value!r}")
    return float(value)


def config_from_dict(doc) -> RunConfig:
    if not isinstance(doc, dict):
        raise ParseError("config must be a JSON object")
    mech = _require(doc, "mechanism", "config")
    task_doc = _require(doc, "task", "config")
    P = _int(mech, "P", "mechanism")
    s = _int(mech, "s", "mechanism")
    r_c = _int(mech, "r_c", "mechanism")
    m = _int(task_doc, "m", "task")
    d = _int(mech, "d", "mechanism", default=m)
    if d != m:
        raise ParseError(f"field 'mechanism.d'={d} must equal 'task.m'={m}")
    try:
        cfg = validate_config(P, s, r_c, d)
    except ConfigError as exc:
        raise type(exc)(f"mechanism: {exc}") from exc

    task = TrainTask(
        n=_int(task_doc, "n", "task"),
        m=m,
        noise_sigma=_float(task_doc, "noise_sigma", "task", default=0.0),
        gamma=_float(task_doc, "gamma", "task"),
        iterations=_int(task_doc, "iterations", "task"),
        seed=_int(task_doc, "seed", "task", default=0),
    )
    if task.n < 1 or task.iterations < 0:
        raise ParseError("task.n must be >= 1 and task.iterations >= 0")

    att = doc.get("attack", {"kind": "none"})
    try:
        kind = parse_kind(att.get("kind", "none")) if isinstance(att, dict) else None
    except ValueError:
        raise ParseError(f"field 'attack.kind' has unknown value {att.get('kind')!r}") from None
    if kind is None:
        raise ParseError("section 'attack' must be a JSON object")
    param = _float(att, "param", "attack", default=DEFAULT_PARAM[kind])
    if "adversaries" in att and "count" in att:
        raise ParseError("attack takes either 'adversaries' or 'count', not both")
    adversaries = att.get("adversaries", [])
    if not isinstance(adversaries, list) or not all(
        isinstance(a, int) and not isinstance(a, bool) for a in adversaries
    ):
        raise ParseError("field 'attack.adversaries' must be a list of integers")
    count = _int(att, "count", "attack") if "count" in att else None
    resample = att.get("resample", False)
    if not isinstance(resample, bool):
        raise ParseError("field 'attack.resample' must be true or false")
    attack = AttackSpec(kind, param, tuple(adversaries), count, resample)
    try:
        attack.check(cfg)
    except TooManyInSpec as exc:
        raise ParseError(f"attack: {exc}") from exc

    scheme = doc.get("weights", {}).get("scheme", "chebyshev")
    if scheme not in WEIGHT_SCHEMES:
        raise ParseError(f"field 'weights.scheme' must be one of {WEIGHT_SCHEMES}, got {scheme!r}")
    return RunConfig(cfg, task, attack, scheme)


def parse_config(path) -> RunConfig:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return config_from_dict(doc)


def config_to_dict(rc: RunConfig) -> dict:
    a = rc.attack
    attack = {"kind": a.kind.value, "param": a.param, "resample": a.resample}
    if a.count is not None:
        attack["count"] = a.count
    else:
        attack["adversaries"] = list(a.adversaries)
    return {
        "mechanism": {"P": rc.mechanism.P, "s": rc.mechanism.s, "r_c": rc.mechanism.r_c, "d": rc.mechanism.d},
        "task": asdict(rc.task),
        "attack": attack,
        "weights": {"scheme": rc.weight_scheme},
    }


def _fmt(x):
    return repr(float(x))


def cmd_run(config, out_dir, seed=None, threads=1, timing=True, stream=None):
    stream = stream or sys.stdout
    rc = parse_config(config) if isinstance(config, (str, Path)) else config
    task = rc.task
    if seed is not None:
        task = TrainTask(task.n, task.m, task.noise_sigma, task.gamma, task.iterations, seed)
    cfg = rc.mechanism
    weights = make_weights(cfg, rc.weight_scheme)
    problem = gen_dataset(task.seed, task.n, task.m, task.noise_sigma)
    try:
        metrics = run_training(task, cfg, rc.attack, weights, problem, threads=threads)
    except DecodeError as exc:
        print(f"decode failed: {exc}", file=sys.stderr)
        return 2

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "metrics.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(METRICS_COLUMNS)
        for row in metrics.rows:
            writer.writerow([
                row.iteration,
                _fmt(row.loss),
                _fmt(row.recovery_error),
                row.n_located,
                row.located_correct,
                _fmt(row.t_encode_us if timing else 0.0),
                _fmt(row.t_decode_us if timing else 0.0),
            ])

    tp = sum(len(r.located & r.truth) for r in metrics.rows)
    fp = sum(len(r.located - r.truth) for r in metrics.rows)
    fn = sum(len(r.truth - r.located) for r in metrics.rows)
    _, opt_loss = optimum(problem)

    def mean_us(attr):
        if not timing or not metrics.rows:
            return 0.0
        return float(np.mean([getattr(r, attr) for r in metrics.rows]))

    summary = {
        "config": config_to_dict(RunConfig(cfg, task, rc.attack, rc.weight_scheme)),
        "derived": {"r": cfg.r, "q": cfg.q, "d_c": cfg.d_c, "d_pad": cfg.d_pad},
        "iterations": len(metrics.rows),
        "final_loss": metrics.final_loss,
        "optimum_loss": opt_loss,
        "max_recovery_error": max((r.recovery_error for r in metrics.rows), default=0.0),
        "mean_time_us": {
            "encode": mean_us("t_encode_us"),
            "inject": mean_us("t_inject_us"),
            "decode": mean_us("t_decode_us"),
        },
        "detection": {
            "true_positive": tp,
            "false_positive": fp,
            "false_negative": fn,
            "rounds_exact": sum(r.located_correct for r in metrics.rows),
        },
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    print(f"wrote {out / 'metrics.csv'} ({len(metrics.rows)} rows); final loss {metrics.final_loss:.6g}",
          file=stream)
    return 0


def cmd_check(P, s, r_c, d=None, stream=None):
    """Print the derived block-code parameters, or the violated constraint."""
    stream = stream or sys.stdout
    r = 2 * s + r_c
    try:
        cfg = validate_config(P, s, r_c, d if d is not None else r_c)
    except (ConfigError, ValueError) as exc:
        print(f"infeasible: {exc}", file=stream)
        return 1
    print(f"feasible: P={P} s={s} r_c={r_c}", file=stream)
    print(f"  redundancy r = 2s + r_c = {r}", file=stream)
    print(f"  groups     q = P / r = {cfg.q}", file=stream)
    if d is None:
        print("  compressed d_c = ceil(d / r_c)", file=stream)
    else:
        print(f"  compressed d_c = ceil({d} / {r_c}) = {cfg.d_c} (padded d = {cfg.d_pad})", file=stream)
    print(f"  tolerates s <= (P - r_c)/2 = {(P - r_c) / 2:g}", file=stream)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="solon", description="Coded Byzantine-resilient gradient aggregation")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate training from a JSON config")
    run.add_argument("--config", required=True, type=Path)
    run.add_argument("--out", required=True, type=Path)
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--threads", type=int, default=1)
    run.add_argument("--no-timing", dest="timing", action="store_false",
                     help="write zero timings so outputs are byte-reproducible")

    check = sub.add_parser("check", help="check feasibility of (P, s, r_c)")
    check.add_argument("P", type=int)
    check.add_argument("s", type=int)
    check.add_argument("r_c", type=int)
    check.add_argument("--d", type=int, default=None)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "check":
        return cmd_check(args.P, args.s, args.r_c, args.d)
    if args.threads < 1:
        print("--threads must be >= 1", file=sys.stderr)
        return 2
    try:
        rc = parse_config(args.config)
    except (ParseError, ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    return cmd_run(rc, args.out, seed=args.seed, threads=args.threads, timing=args.timing)


if __name__ == "__main__":
    sys.exit(main())
