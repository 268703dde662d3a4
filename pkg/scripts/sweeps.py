"""Final estimation error against dimension (n fixed) and sample size (d fixed).

    python scripts/sweeps.py                      # both sweeps, ridge
    python scripts/sweeps.py --task logistic-synthetic --which dim
"""
from __future__ import annotations

import argparse
import csv
import time
from dataclasses import dataclass, field
from pathlib import Path

from htdp.harness import DEFAULT_D_VALUES, DEFAULT_EPS, DEFAULT_N_VALUES, ExperimentSpec, sweep_dimension, sweep_samplesize


@dataclass
class SweepConfig:
    task: str = "ridge-synthetic"
    algorithm: str = "alg4-stochastic"
    which: str = "both"
    eps: list = field(default_factory=lambda: list(DEFAULT_EPS))
    d_values: list = field(default_factory=lambda: list(DEFAULT_D_VALUES))
    n_values: list = field(default_factory=lambda: list(DEFAULT_N_VALUES))
    n_for_dim: int = 100_000
    d_for_n: int = 20
    repetitions: int = 20
    minibatch: int = 1000
    seed: int = 0
    out: str = "results/sweeps"
    jobs: int = 1


def parse() -> SweepConfig:
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--task", default=SweepConfig.task)
    p.add_argument("--algorithm", default=SweepConfig.algorithm)
    p.add_argument("--which", choices=["dim", "n", "both"], default="both")
    p.add_argument("--eps", type=float, nargs="+", default=list(DEFAULT_EPS))
    p.add_argument("--d-values", type=int, nargs="+", default=list(DEFAULT_D_VALUES))
    p.add_argument("--n-values", type=int, nargs="+", default=list(DEFAULT_N_VALUES))
    p.add_argument("--n-for-dim", type=int, default=SweepConfig.n_for_dim)
    p.add_argument("--d-for-n", type=int, default=SweepConfig.d_for_n)
    p.add_argument("--repetitions", type=int, default=SweepConfig.repetitions)
    p.add_argument("--minibatch", type=int, default=SweepConfig.minibatch)
    p.add_argument("--seed", type=int, default=SweepConfig.seed)
    p.add_argument("--out", default=SweepConfig.out)
    p.add_argument("--jobs", type=int, default=SweepConfig.jobs)
    return SweepConfig(**vars(p.parse_args()))


def show(path: Path, axis: str) -> None:
    rows = list(csv.DictReader(ln for ln in path.read_text().splitlines() if not ln.startswith("#")))
    for eps in sorted({r["eps"] for r in rows}, key=float):
        meds = "  ".join(f"{r[axis]}:{float(r['error_median']):.3f}" for r in rows if r["eps"] == eps)
        print(f"  eps={eps:>4s}  {meds}")


def main() -> None:
    cfg = parse()
    common = dict(
        task=cfg.task,
        algorithm=cfg.algorithm,
        eps=cfg.eps,
        repetitions=cfg.repetitions,
        minibatch=cfg.minibatch,
        seed=cfg.seed,
        output_dir=cfg.out,
        jobs=cfg.jobs,
    )
    if cfg.which in ("dim", "both"):
        tic = time.perf_counter()
        path = sweep_dimension(ExperimentSpec(n=cfg.n_for_dim, **common), cfg.d_values)
        print(f"dimension sweep {time.perf_counter() - tic:.1f}s -> {path}")
        show(path, "d")
    if cfg.which in ("n", "both"):
        tic = time.perf_counter()
        path = sweep_samplesize(ExperimentSpec(d=cfg.d_for_n, **common), cfg.n_values)
        print(f"sample-size sweep {time.perf_counter() - tic:.1f}s -> {path}")
        show(path, "n")


if __name__ == "__main__":
    main()
