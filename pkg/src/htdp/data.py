"""Synthetic heavy-tailed regression/classification data and UCI Adult ingestion."""
from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .distributions import NoiseKind, NoiseSpec, centered_noise
from .errors import ConfigError, DataError

WSTAR_SEED = 20200712

LOGNORMAL_DEFAULT = NoiseSpec(NoiseKind.LOGNORMAL, mu=1.0, sigma=1.0)
LOGLOGISTIC_DEFAULT = NoiseSpec(NoiseKind.LOGLOGISTIC, mu=0.2, sigma=0.2)


class Provenance(str, enum.Enum):
    SYNTHETIC_LINEAR = "synthetic_linear"
    SYNTHETIC_LOGISTIC = "synthetic_logistic"
    ADULT_CSV = "adult_csv"


@dataclass(frozen=True)
class Dataset:
    features: np.ndarray
    labels: np.ndarray
    provenance: Provenance
    w_star: Optional[np.ndarray] = None

    def __post_init__(self):
        X = np.array(self.features, dtype=float)
        y = np.array(self.labels, dtype=float)
        if X.ndim != 2 or X.shape[0] < 1:
            raise DataError(f"features must be a non-empty (n, d) matrix, got shape {X.shape}")
        if y.shape != (X.shape[0],):
            raise DataError(f"labels shape {y.shape} does not match {X.shape[0]} rows")
        prov = Provenance(self.provenance)
        if prov is Provenance.SYNTHETIC_LOGISTIC and not np.all(np.abs(y) == 1):
            raise DataError("classification labels must be -1 or +1")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)
        object.__setattr__(self, "provenance", prov)
        if self.w_star is not None:
            object.__setattr__(self, "w_star", np.asarray(self.w_star, dtype=float))

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    def subset(self, idx) -> "Dataset":
        return Dataset(self.features[idx], self.labels[idx], self.provenance, self.w_star)


def default_wstar(d: int, seed: int = WSTAR_SEED) -> np.ndarray:
    """Ground-truth weights, i.i.d. uniform on [-1, 1] from a fixed seed."""
    return np.random.default_rng(seed).uniform(-1.0, 1.0, size=d)


def _features(n: int, d: int, rng: np.random.Generator) -> np.ndarray:
    if n < 1 or d < 1:
        raise ConfigError(f"need n >= 1 and d >= 1, got n={n}, d={d}")
    return rng.standard_normal((n, d))


def gen_linear(n: int, d: int, wstar, noise: NoiseSpec, rng: np.random.Generator) -> Dataset:
    """y = <w*, x> + e with e the centred heavy-tailed noise."""
    wstar = np.asarray(wstar, dtype=float)
    if wstar.shape != (d,):
        raise ConfigError(f"w* must have shape ({d},), got {wstar.shape}")
    X = _features(n, d, rng)
    e = centered_noise(noise, rng, n)
    return Dataset(X, X @ wstar + e, Provenance.SYNTHETIC_LINEAR, wstar)


def gen_logistic(n: int, d: int, wstar, noise: NoiseSpec, rng: np.random.Generator) -> Dataset:
    """y = sign(1 / (1 + exp(<w*, x> + e)) - 1/2), with sign(0) taken as +1."""
    wstar = np.asarray(wstar, dtype=float)
    if wstar.shape != (d,):
        raise ConfigError(f"w* must have shape ({d},), got {wstar.shape}")
    X = _features(n, d, rng)
    e = centered_noise(noise, rng, n)
    # 1/(1+e^z) - 1/2 >= 0 exactly when z <= 0
    y = np.where(X @ wstar + e <= 0, 1.0, -1.0)
    return Dataset(X, y, Provenance.SYNTHETIC_LOGISTIC, wstar)


# UCI Adult: 14 attributes then the income label.
ADULT_COLUMNS = (
    ("age", "num"),
    ("workclass", "cat"),
    ("fnlwgt", "num"),
    ("education", "cat"),
    ("education-num", "num"),
    ("marital-status", "cat"),
    ("occupation", "cat"),
    ("relationship", "cat"),
    ("race", "cat"),
    ("sex", "cat"),
    ("capital-gain", "num"),
    ("capital-loss", "num"),
    ("hours-per-week", "num"),
    ("native-country", "cat"),
    ("income", "label"),
)
ADULT_MISSING = "?"


def _read_adult_rows(path: Path, header: Optional[bool]) -> list[list[str]]:
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise DataError(f"cannot read Adult file {path}: {exc}") from exc
    rows = []
    first = True
    with fh:
        for lineno, raw in enumerate(csv.reader(fh, skipinitialspace=True), start=1):
            if not raw or all(not f.strip() for f in raw):
                continue
            if raw[0].startswith("|"):
                continue  # comment line in the UCI test split
            fields = [f.strip() for f in raw]
            if first:
                first = False
                if fields[0] == "f0":
                    raise DataError(f"{path} is already an encoded dataset; refusing to re-encode")
                if header or (header is None and not _is_number(fields[0])):
                    continue
            if len(fields) != len(ADULT_COLUMNS):
                raise DataError(
                    f"{path}:{lineno}: expected {len(ADULT_COLUMNS)} fields, got {len(fields)}"
                )
            if ADULT_MISSING in fields or "" in fields:
                continue
            for (name, kind), value in zip(ADULT_COLUMNS, fields):
                if kind == "num" and not _is_number(value):
                    raise DataError(f"{path}:{lineno}: column {name!r} is not numeric: {value!r}")
                if kind == "label" and value.rstrip(".") not in (">50K", "<=50K"):
                    raise DataError(f"{path}:{lineno}: unrecognised income label {value!r}")
            rows.append(fields)
    return rows


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def load_adult(path, train_count: int = 28_000, total: int = 30_000, header: Optional[bool] = None):
    """Load, clean and encode the Adult census data.

    Rows with a missing field are dropped, the first ``total`` clean rows
    are kept and the first ``train_count`` of those form the training split.
    Numeric columns are standardised with training statistics; categorical
    columns are one-hot encoded in order of first appearance in the
    training split (unseen test categories encode as all zeros). Label is
    +1 for ">50K" and -1 otherwise.
    """
    rows = _read_adult_rows(Path(path), header)[:total]
    if train_count >= len(rows):
        raise DataError(f"train_count={train_count} leaves no test rows ({len(rows)} clean rows)")
    train_rows, test_rows = rows[:train_count], rows[train_count:]

    num_idx = [i for i, (_, k) in enumerate(ADULT_COLUMNS) if k == "num"]
    cat_idx = [i for i, (_, k) in enumerate(ADULT_COLUMNS) if k == "cat"]
    label_idx = len(ADULT_COLUMNS) - 1

    def numeric(block):
        return np.array([[float(r[i]) for i in num_idx] for r in block])

    train_num = numeric(train_rows)
    mean = train_num.mean(axis=0)
    std = train_num.std(axis=0)
    std[std == 0] = 1.0

    vocab = []
    for i in cat_idx:
        seen = {}
        for r in train_rows:
            seen.setdefault(r[i], len(seen))
        vocab.append(seen)
    width = sum(len(v) for v in vocab)

    def encode(block):
        out = np.zeros((len(block), len(num_idx) + width))
        out[:, : len(num_idx)] = (numeric(block) - mean) / std
        offset = len(num_idx)
        for i, seen in zip(cat_idx, vocab):
            for row, r in enumerate(block):
                col = seen.get(r[i])
                if col is not None:
                    out[row, offset + col] = 1.0
            offset += len(seen)
        labels = np.array([1.0 if r[label_idx].rstrip(".") == ">50K" else -1.0 for r in block])
        return Dataset(out, labels, Provenance.ADULT_CSV)

    return encode(train_rows), encode(test_rows)


def to_csv(data: Dataset, path) -> None:
    """Columnar dump with header f0..f{d-1},label."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"f{j}" for j in range(data.d)] + ["label"])
        for x, y in zip(data.features, data.labels):
            writer.writerow([repr(float(v)) for v in x] + [repr(float(y))])


def from_csv(path, provenance: Provenance = Provenance.SYNTHETIC_LINEAR) -> Dataset:
    arr = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return Dataset(arr[:, :-1], arr[:, -1], provenance)


def default_trim_count(n: int) -> int:
    return math.ceil(0.05 * n)
