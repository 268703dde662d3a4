"""Excess-risk-vs-iteration curves for every method on one task.

    python scripts/risk_curves.py --task ridge-synthetic --out results/curves
    python scripts/risk_curves.py --task logistic-adult --adult-path adult.data
"""
from __future__ import annotations

import argparse
import dataclasses
import time
from dataclasses import dataclass, field

from htdp.harness import DEFAULT_EPS, ExperimentSpec, run_curve


@dataclass
class CurveConfig:
    task: str = "ridge-synthetic"
    algorithms: list = field(default_factory=lambda: ["alg4", "rgd", "alg3", "alg4-stochastic", "rgd-stochastic"])
    eps: list = field(default_factory=lambda: list(DEFAULT_EPS))
    n: int = 100_000
    d: int = 10
    repetitions: int = 10
    seed: int = 0
    out: str = "results/curves"
    adult_path: str | None = None
    jobs: int = 1


def parse() -> CurveConfig:
    cfg = CurveConfig()
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    for f in dataclasses.fields(cfg):
        default = getattr(cfg, f.name)
        if isinstance(default, list):
            p.add_argument(f"--{f.name.replace('_', '-')}", nargs="+", type=type(default[0]), default=default)
        else:
            p.add_argument(f"--{f.name.replace('_', '-')}", type=int if isinstance(default, int) else str, default=default)
    return CurveConfig(**vars(p.parse_args()))


def main() -> None:
    cfg = parse()
    for alg in cfg.algorithms:
        spec = ExperimentSpec(
            task=cfg.task,
            algorithm=alg,
            eps=cfg.eps,
            n=cfg.n,
            d=cfg.d,
            repetitions=cfg.repetitions,
            seed=cfg.seed,
            output_dir=cfg.out,
            adult_path=cfg.adult_path,
            jobs=cfg.jobs,
        )
        tic = time.perf_counter()
        path = run_curve(spec)
        print(f"{alg:16s} {time.perf_counter() - tic:7.1f}s  {path}")


if __name__ == "__main__":
    main()
