"""Monte Carlo comparison of the uniform-scale estimators.

Every (seed, n, run) triple gets its own Philox stream: the key is the seed
and the counter's high words hold ``run`` and ``n``, so cells can be
computed in any order and still reproduce bit for bit.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import BregmanError, InvalidArgumentError
from .uniform_case import (
    GammaPrior,
    Metric,
    Sample,
    bayes_parameter,
    bayes_uniform_restricted,
    bayes_unrestricted,
    mle,
    uniform_sq_error,
    unrestricted_sq_error,
)

log = logging.getLogger(__name__)

DEFAULT_N_VALUES = (1, 2, 3, 5, 7, 10, 15, 22, 33, 47, 68, 100)
DEFAULT_PRIORS = (GammaPrior(1.0, 1.0), GammaPrior(1.0, 3.0), GammaPrior(1.0, 100.0))
ESTIMATORS = ("mle", "bayes_param", "restricted_fisher", "restricted_lebesgue", "unrestricted")
CSV_HEADER = ("n", "estimator", "mean_sq_error", "runs")


@dataclass(frozen=True)
class SimConfig:
    runs: int = 1000
    n_values: tuple = DEFAULT_N_VALUES
    theta_true: float = 1.0
    seed: int = 20070101
    estimators: tuple = ESTIMATORS
    prior_grid: tuple = DEFAULT_PRIORS

    def __post_init__(self):
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))
        object.__setattr__(self, "estimators", tuple(self.estimators))
        object.__setattr__(self, "prior_grid", tuple(self.prior_grid))
        if self.runs < 1:
            raise InvalidArgumentError("runs must be at least 1")
        if not self.n_values or any(n < 1 for n in self.n_values):
            raise InvalidArgumentError("n_values must be a nonempty list of positive integers")
        if list(self.n_values) != sorted(set(self.n_values)):
            raise InvalidArgumentError("n_values must be strictly ascending")
        if not self.theta_true > 0:
            raise InvalidArgumentError("theta_true must be positive")
        if not 0 <= self.seed < 2 ** 64:
            raise InvalidArgumentError("seed must fit in 64 unsigned bits")
        unknown = set(self.estimators) - set(ESTIMATORS)
        if unknown:
            raise InvalidArgumentError(f"unknown estimators: {sorted(unknown)}")
        if "bayes_param" in self.estimators and not self.prior_grid:
            raise InvalidArgumentError("bayes_param needs a nonempty prior grid")


@dataclass(frozen=True)
class SimRecord:
    n: int
    estimator: str
    mean_sq_error: float
    runs: int
    failed: int = 0


def prior_label(prior: GammaPrior) -> str:
    return f"bayes_param[t1={prior.t1:g},t2={prior.t2:g}]"


def draw_sample(seed: int, n: int, run: int, theta: float = 1.0) -> np.ndarray:
    bitgen = np.random.Philox(key=seed, counter=[0, 0, run, n])
    return theta * np.random.Generator(bitgen).random(n)


def _estimator_error(name, sample, theta):
    if name == "mle":
        return uniform_sq_error(mle(sample).scale, theta)
    if name == "restricted_fisher":
        return uniform_sq_error(bayes_uniform_restricted(sample, Metric.FISHER).scale, theta)
    if name == "restricted_lebesgue":
        return uniform_sq_error(bayes_uniform_restricted(sample, Metric.LEBESGUE).scale, theta)
    if name == "unrestricted":
        return unrestricted_sq_error(bayes_unrestricted(sample), theta)
    raise InvalidArgumentError(name)


@dataclass
class _Cell:
    total: float = 0.0
    ok: int = 0
    failed: int = 0

    def add(self, err):
        self.total += err
        self.ok += 1

    def record(self, n, label):
        mean = self.total / self.ok if self.ok else float("nan")
        return SimRecord(n, label, mean, self.ok, self.failed)


def run_simulation(cfg: SimConfig) -> list[SimRecord]:
    """Average each estimator's total squared error over ``cfg.runs`` draws.

    ``bayes_param`` is reported per prior and as the per-n minimum of the
    averaged errors over the prior grid. A run where an estimator raises is
    counted in that cell's ``failed`` field and excluded from its mean.
    """
    records = []
    theta = cfg.theta_true
    for n in cfg.n_values:
        cells: dict[str, _Cell] = {}
        labels = []
        for name in cfg.estimators:
            if name == "bayes_param":
                labels.extend(prior_label(p) for p in cfg.prior_grid)
            else:
                labels.append(name)
        for label in labels:
            cells[label] = _Cell()
        for run in range(cfg.runs):
            sample = Sample(draw_sample(cfg.seed, n, run, theta))
            for name in cfg.estimators:
                if name == "bayes_param":
                    for prior in cfg.prior_grid:
                        cell = cells[prior_label(prior)]
                        try:
                            cell.add(uniform_sq_error(bayes_parameter(sample, prior), theta))
                        except BregmanError as exc:
                            cell.failed += 1
                            log.warning("n=%d run=%d %s failed: %s", n, run, prior_label(prior), exc)
                    continue
                try:
                    cells[name].add(_estimator_error(name, sample, theta))
                except BregmanError as exc:
                    cells[name].failed += 1
                    log.warning("n=%d run=%d %s failed: %s", n, run, name, exc)
        n_records = [cells[label].record(n, label) for label in labels]
        if "bayes_param" in cfg.estimators:
            per_prior = [r for r in n_records if r.estimator.startswith("bayes_param[")]
            usable = [r for r in per_prior if r.runs > 0]
            if usable:
                best = min(usable, key=lambda r: r.mean_sq_error)
                n_records.append(SimRecord(n, "bayes_param", best.mean_sq_error, best.runs, best.failed))
            else:
                n_records.append(SimRecord(n, "bayes_param", float("nan"), 0, cfg.runs))
        records.extend(n_records)
    return sorted(records, key=lambda r: (r.n, r.estimator))


def write_csv(records, path) -> None:
    path = Path(path)
    rows = sorted(records, key=lambda r: (r.n, r.estimator))
    try:
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_HEADER)
            for r in rows:
                writer.writerow((r.n, r.estimator, f"{r.mean_sq_error:.17g}", r.runs))
    except OSError as exc:
        raise OSError(f"cannot write simulation CSV to {path}: {exc}") from exc


def read_csv(path) -> list[SimRecord]:
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        return [SimRecord(int(row["n"]), row["estimator"], float(row["mean_sq_error"]),
                          int(row["runs"])) for row in reader]


def _parse_priors(text):
    priors = []
    for item in text.replace(";", ",").split(","):
        item = item.strip()
        if not item:
            continue
        t1, _, t2 = item.partition(":")
        if not t2:
            raise InvalidArgumentError(f"prior {item!r} should look like t1:t2")
        priors.append(GammaPrior(float(t1), float(t2)))
    return tuple(priors)


def parse_config(text: str) -> SimConfig:
    """Build a :class:`SimConfig` from ``key=value`` lines.

    Keys: ``runs``, ``n_values`` (comma list), ``theta_true``, ``seed``,
    ``estimators`` (comma list) and ``prior_grid`` (``t1:t2`` pairs, comma
    separated). ``#`` starts a comment.
    """
    kwargs = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep:
            raise InvalidArgumentError(f"line {lineno}: expected key=value, got {raw!r}")
        if key == "runs":
            kwargs["runs"] = int(value)
        elif key == "n_values":
            kwargs["n_values"] = tuple(int(v) for v in value.split(",") if v.strip())
        elif key == "theta_true":
            kwargs["theta_true"] = float(value)
        elif key == "seed":
            kwargs["seed"] = int(value, 0)
        elif key == "estimators":
            kwargs["estimators"] = tuple(v.strip() for v in value.split(",") if v.strip())
        elif key == "prior_grid":
            kwargs["prior_grid"] = _parse_priors(value)
        else:
            raise InvalidArgumentError(f"line {lineno}: unknown key {key!r}")
    return SimConfig(**kwargs)


def load_config(path) -> SimConfig:
    return parse_config(Path(path).read_text())
