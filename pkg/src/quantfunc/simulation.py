"""Monte Carlo harness for the consistency and rate claims of the estimators.

Generates linear-model data with known ground truth, runs the rank-based
slope estimator and the averaged two-step process on each replication, and
summarizes errors as per-sample-size RMSEs with a fitted log-log slope.

Reproducibility: the generator is the counter-based Philox engine keyed by
``SeedSequence([seed, n, replicate])``, so every (replicate, n) pair owns an
independent substream and execution order cannot change results.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.stats import norm

from .errors import DomainError
from .model import Dataset, order_index
from .two_step import averaged_two_step_process, centered_process
from . import functionals as fn

ERROR_DISTS = ("standard_normal", "shifted_exponential", "uniform_centered")
DESIGNS = ("iid_uniform_cube", "equispaced", "iid_normal")

# Default sup-deviation threshold c in the coverage fraction
# P(sup-deviation < c / sqrt(n)).
DEFAULT_COVERAGE_C = 5.0


@dataclass(frozen=True)
class ErrorDistribution:
    """Mean-zero error law with an analytic quantile function.

    Kinds: ``standard_normal``; ``shifted_exponential`` (Exp(rate) minus its
    mean 1/rate, param = rate); ``uniform_centered`` (uniform on
    (-width/2, width/2), param = width).  All have continuous positive
    density on their support and finite variance.
    """

    kind: str
    param: float = 1.0

    def __post_init__(self):
        if self.kind not in ERROR_DISTS:
            raise DomainError(f"unknown error distribution {self.kind!r}")
        if self.kind != "standard_normal" and self.param <= 0:
            raise DomainError(f"{self.kind} needs a positive parameter")

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.kind == "standard_normal":
            return rng.standard_normal(n)
        if self.kind == "shifted_exponential":
            return rng.exponential(1.0 / self.param, n) - 1.0 / self.param
        half = self.param / 2.0
        return rng.uniform(-half, half, n)

    def quantile(self, u):
        u = np.asarray(u, dtype=float)
        if self.kind == "standard_normal":
            return norm.ppf(u)
        if self.kind == "shifted_exponential":
            return -np.log1p(-u) / self.param - 1.0 / self.param
        return self.param * (u - 0.5)

    def cdf(self, z):
        z = np.asarray(z, dtype=float)
        if self.kind == "standard_normal":
            return norm.cdf(z)
        if self.kind == "shifted_exponential":
            return 1.0 - np.exp(-self.param * (z + 1.0 / self.param) )
        half = self.param / 2.0
        return np.clip((z + half) / self.param, 0.0, 1.0)

    def true_functional(self, kind: str, level: float) -> float:
        """Population value of a functional, by quadrature on the quantile function."""
        if kind == "cvar":
            integral, _ = quad(lambda u: self.quantile(u), level, 1.0,
                               epsrel=1e-10, limit=500)
            return integral / (1.0 - level)
        if kind == "mean_excess":
            u0 = float(self.cdf(level))
            if u0 >= 1.0:
                raise DomainError("threshold beyond the support")
            integral, _ = quad(lambda u: self.quantile(u) - level, u0, 1.0,
                               epsrel=1e-10, limit=500)
            return integral / (1.0 - u0)
        raise DomainError(f"no analytic truth for functional {kind!r}")


@dataclass(frozen=True)
class SimulationConfig:
    """Full description of one Monte Carlo study; identical configs give
    bit-identical results."""

    n_grid: tuple[int, ...]
    p: int
    beta0: float
    beta: tuple[float, ...]
    error_dist: ErrorDistribution
    design: str
    lam: float = 0.5
    alphas: tuple[float, ...] = tuple(round(0.05 * k, 3) for k in range(1, 20))
    replications: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.design not in DESIGNS:
            raise DomainError(f"unknown design {self.design!r}")
        if len(self.beta) != self.p:
            raise DomainError(f"beta must have length p={self.p}")
        if not all(0.0 < a < 1.0 for a in self.alphas):
            raise DomainError("alpha grid must lie inside (0, 1)")
        if not 0.0 < self.lam < 1.0:
            raise DomainError("lambda must be in (0, 1)")
        if self.replications < 1 or min(self.n_grid, default=0) < self.p + 2:
            raise DomainError("invalid replications or n_grid")


@dataclass(frozen=True)
class RateReport:
    """Per-n RMSE summary of one error metric with its log-log slope."""

    metric: str
    n_grid: tuple[int, ...]
    rmse: tuple[float, ...]
    fitted_slope: float
    coverage: tuple[float, ...]
    mean_error: tuple[float, ...] = ()

    def to_rows(self) -> list[dict]:
        rows = []
        for i, n in enumerate(self.n_grid):
            rows.append({
                "metric": self.metric,
                "n": n,
                "rmse": self.rmse[i],
                "coverage": self.coverage[i],
                "fitted_slope": self.fitted_slope,
            })
        return rows

    def to_json(self) -> str:
        return json.dumps({
            "metric": self.metric,
            "n_grid": list(self.n_grid),
            "rmse": list(self.rmse),
            "fitted_slope": self.fitted_slope,
            "coverage": list(self.coverage),
            "mean_error": list(self.mean_error),
        }, sort_keys=True)


def reports_to_csv(reports, path) -> None:
    """One CSV row per (metric, n), deterministic ordering."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("metric,n,rmse,coverage,fitted_slope\n")
        for rep in reports:
            for row in rep.to_rows():
                fh.write(f"{row['metric']},{row['n']},{row['rmse']!r},"
                         f"{row['coverage']!r},{row['fitted_slope']!r}\n")


def _substream(seed: int, n: int, replicate: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, n, replicate])))


def _design_matrix(config: SimulationConfig, n: int, rng: np.random.Generator) -> np.ndarray:
    p = config.p
    if p == 0:
        return np.zeros((n, 0))
    if config.design == "equispaced":
        if p != 1:
            raise DomainError("equispaced design is defined for p = 1")
        return (np.arange(n) / (n - 1)).reshape(-1, 1)
    if config.design == "iid_uniform_cube":
        return rng.uniform(0.0, 1.0, (n, p))
    return rng.standard_normal((n, p))


def generate(config: SimulationConfig, n: int, replicate: int) -> tuple[Dataset, np.ndarray]:
    """One replication: observable dataset plus the hidden errors.

    Deterministic in (seed, n, replicate).  The design substream is drawn
    before the error substream, both from the same Philox key.
    """
    rng = _substream(config.seed, n, replicate)
    x = _design_matrix(config, n, rng)
    z = config.error_dist.sample(rng, n)
    beta = np.asarray(config.beta, dtype=float)
    y = config.beta0 + (x @ beta if config.p else 0.0) + z
    return Dataset(y=y, x=x), z


def _fit_slope(n_grid, rmse) -> float:
    logs_n = np.log(np.asarray(n_grid, dtype=float))
    logs_r = np.log(np.maximum(np.asarray(rmse, dtype=float), 1e-300))
    a = np.vstack([logs_n, np.ones_like(logs_n)]).T
    slope, _ = np.linalg.lstsq(a, logs_r, rcond=None)[0]
    return float(slope)


def _summarize(metric, n_grid, errors_by_n, coverage_c) -> RateReport:
    rmse, coverage, mean_err = [], [], []
    for n, errs in zip(n_grid, errors_by_n):
        errs = np.asarray(errs, dtype=float)
        rmse.append(float(np.sqrt(np.mean(errs ** 2))))
        coverage.append(float(np.mean(np.abs(errs) < coverage_c / math.sqrt(n))))
        mean_err.append(float(np.mean(errs)))
    return RateReport(metric=metric, n_grid=tuple(n_grid), rmse=tuple(rmse),
                      fitted_slope=_fit_slope(n_grid, rmse),
                      coverage=tuple(coverage), mean_error=tuple(mean_err))


def _slopes_for(ds: Dataset, lam: float) -> np.ndarray:
    if ds.p == 0:
        return np.zeros(0)
    from .ranks import fit_r_estimator
    return fit_r_estimator(ds, lam).beta_tilde


def rate_study_two_step(config: SimulationConfig,
                        coverage_c: float = DEFAULT_COVERAGE_C) -> list[RateReport]:
    """Sup-over-alpha closeness of the averaged two-step process to the error
    order statistics.

    Returns two reports: deviations after removing the true nuisance
    ``beta0 + x_bar'beta`` and after removing the response-mean estimate.
    """
    if len(config.n_grid) < 2:
        raise DomainError("need at least two sample sizes for a rate study")
    beta = np.asarray(config.beta, dtype=float)
    sup_true, sup_mean = [], []
    for n in config.n_grid:
        d_true, d_mean = [], []
        idx = np.array([order_index(a, n).index for a in config.alphas])
        for rep in range(config.replications):
            ds, z = generate(config, n, rep)
            slopes = _slopes_for(ds, config.lam)
            proc = averaged_two_step_process(ds, config.lam, slopes=slopes)
            b_vals = proc.sorted_adjusted[idx - 1]
            z_sorted = np.sort(z)[idx - 1]
            nuisance_true = config.beta0 + (ds.x_mean @ beta if config.p else 0.0)
            d_true.append(np.max(np.abs(b_vals - nuisance_true - z_sorted)))
            d_mean.append(np.max(np.abs(b_vals - ds.y_mean - z_sorted)))
        sup_true.append(d_true)
        sup_mean.append(d_mean)
    return [
        _summarize("two_step_sup_dev_true_nuisance", config.n_grid, sup_true, coverage_c),
        _summarize("two_step_sup_dev_mean_centered", config.n_grid, sup_mean, coverage_c),
    ]


def rate_study_r_estimator(config: SimulationConfig,
                           coverage_c: float = DEFAULT_COVERAGE_C) -> RateReport:
    """RMSE of the slope-estimate error norm across the sample-size grid."""
    if config.p < 1:
        raise DomainError("slope rate study needs p >= 1")
    beta = np.asarray(config.beta, dtype=float)
    errors_by_n = []
    for n in config.n_grid:
        errs = []
        for rep in range(config.replications):
            ds, _ = generate(config, n, rep)
            slopes = _slopes_for(ds, config.lam)
            errs.append(float(np.linalg.norm(slopes - beta)))
        errors_by_n.append(errs)
    return _summarize("r_estimator_norm_error", config.n_grid, errors_by_n, coverage_c)


def functional_consistency_study(config: SimulationConfig, kind: str, level: float,
                                 coverage_c: float = DEFAULT_COVERAGE_C) -> RateReport:
    """Error of a functional of the centered two-step process against its
    population value for the configured error law."""
    truth = config.error_dist.true_functional(kind, level)
    estimator = {"cvar": fn.cvar, "mean_excess": fn.mean_excess}[kind]
    errors_by_n = []
    for n in config.n_grid:
        errs = []
        for rep in range(config.replications):
            ds, _ = generate(config, n, rep)
            slopes = _slopes_for(ds, config.lam)
            proc = centered_process(averaged_two_step_process(ds, config.lam, slopes=slopes))
            errs.append(estimator(proc, level).value - truth)
        errors_by_n.append(errs)
    return _summarize(f"functional_{kind}_{level}", config.n_grid, errors_by_n, coverage_c)
