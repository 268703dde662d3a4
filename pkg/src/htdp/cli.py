"""Command line entry: ``htdp {curve,sweep-dim,sweep-n,aggregate-demo} [flags]``."""
from __future__ import annotations

import argparse
import logging
import sys

from .errors import ConfigError, DataError, DomainError, ResourceError
from .harness import Algorithm, ExperimentSpec, Task, aggregate_demo, load_spec, run_curve, sweep_dimension, sweep_samplesize

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_RESOURCE = 0, 2, 3, 4

VERBS = {
    "curve": run_curve,
    "sweep-dim": sweep_dimension,
    "sweep-n": sweep_samplesize,
    "aggregate-demo": aggregate_demo,
}

# flag dest -> spec field
_FLAG_FIELDS = {
    "task": "task",
    "alg": "algorithm",
    "eps": "eps",
    "delta": "delta",
    "n": "n",
    "d": "d",
    "kappa": "kappa",
    "reps": "repetitions",
    "seed": "seed",
    "out": "output_dir",
    "adult_path": "adult_path",
    "minibatch": "minibatch",
    "step": "step",
    "T": "T",
    "variance_bound": "v",
    "delta_prime": "delta_prime",
    "radius": "radius",
    "m": "aggregate_m",
    "d_values": "d_values",
    "n_values": "n_values",
    "jobs": "jobs",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="htdp", description="Private learning with heavy-tailed data: experiment runner")
    sub = parser.add_subparsers(dest="verb", required=True)
    for verb in VERBS:
        p = sub.add_parser(verb)
        p.add_argument("--config", help="YAML config, or a previous output CSV whose header is replayed")
        p.add_argument("--task", choices=[t.value for t in Task])
        p.add_argument("--alg", choices=[a.value for a in Algorithm])
        p.add_argument("--eps", type=float, action="append", help="repeatable")
        p.add_argument("--delta", type=float)
        p.add_argument("--n", type=int)
        p.add_argument("--d", type=int)
        p.add_argument("--kappa", type=float, action="append", help="repeatable; known-mean method only")
        p.add_argument("--reps", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--out", help="output directory")
        p.add_argument("--adult-path")
        p.add_argument("--minibatch", type=int)
        p.add_argument("--step", type=float)
        p.add_argument("--T", type=int, help="iteration count (default from the convergence formula)")
        p.add_argument("--variance-bound", type=float, help="gradient second-moment bound v")
        p.add_argument("--delta-prime", type=float)
        p.add_argument("--radius", type=float)
        p.add_argument("--m", type=int, help="subset count for aggregate-demo")
        p.add_argument("--d-values", type=int, nargs="+")
        p.add_argument("--n-values", type=int, nargs="+")
        p.add_argument("--jobs", type=int)
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def spec_from_args(args: argparse.Namespace) -> ExperimentSpec:
    values = load_spec(args.config) if args.config else {}
    if args.verb == "aggregate-demo":
        values.setdefault("algorithm", Algorithm.SAMPLE_AGGREGATE.value)
        values.setdefault("n", 10_000)
        values.setdefault("d", 2)
        values.setdefault("eps", [2.0])
        values.setdefault("delta", 1e-4)
    elif args.verb in ("sweep-dim", "sweep-n"):
        values.setdefault("algorithm", Algorithm.ALG4_STOCHASTIC.value)
        values.setdefault("repetitions", 20)
        if args.verb == "sweep-n":
            values.setdefault("d", 20)
    for flag, name in _FLAG_FIELDS.items():
        value = getattr(args, flag)
        if value is not None:
            values[name] = value
    return ExperimentSpec(**values)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        spec = spec_from_args(args)
        path = VERBS[args.verb](spec)
    except (ConfigError, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ResourceError, MemoryError) as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
