"""Two-step regression quantiles and the averaged two-step process.

Slopes come from the rank-based estimator at a single fixed level; the
intercept at level alpha is the corresponding order statistic of the
residuals.  The averaged process is the sorted vector of slope-adjusted
responses ``y_i - (x_i - x_bar)' slopes``; subtracting the response mean
gives the estimator of the error quantile function on which all functionals
operate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Dataset, StepQuantileProcess, order_index
from .ranks import fit_r_estimator


@dataclass(frozen=True)
class TwoStepQuantile:
    """Intercept-at-alpha plus rank-estimated slopes."""

    alpha: float
    lam: float
    intercept: float
    slopes: np.ndarray


@dataclass(frozen=True)
class AveragedTwoStepProcess:
    """Nondecreasing step process of slope-adjusted responses.

    Evaluation at alpha returns the ``order_index(alpha, n)``-th entry of
    ``sorted_adjusted``; ``nuisance_estimate`` is the response mean used to
    center the process.
    """

    sorted_adjusted: np.ndarray
    lam: float
    nuisance_estimate: float
    slopes: np.ndarray

    @property
    def n(self) -> int:
        return self.sorted_adjusted.shape[0]

    def __call__(self, alpha: float) -> float:
        return float(self.sorted_adjusted[order_index(alpha, self.n).index - 1])


def _slopes(ds: Dataset, lam: float) -> np.ndarray:
    if ds.p == 0:
        return np.zeros(0)
    return fit_r_estimator(ds, lam).beta_tilde


def two_step_quantile(ds: Dataset, alpha: float, lam: float = 0.5,
                      slopes: np.ndarray | None = None) -> TwoStepQuantile:
    """Two-step regression quantile at a single level.

    ``slopes`` may be supplied to reuse one rank-estimation across many
    alpha levels (the slopes do not depend on alpha).
    """
    if slopes is None:
        slopes = _slopes(ds, lam)
    residuals = ds.y - (ds.x @ slopes if ds.p else 0.0)
    k = order_index(alpha, ds.n).index
    intercept = float(np.sort(residuals)[k - 1])
    return TwoStepQuantile(alpha=alpha, lam=lam, intercept=intercept,
                           slopes=np.asarray(slopes, dtype=float))


def averaged_two_step_process(ds: Dataset, lam: float = 0.5,
                              slopes: np.ndarray | None = None) -> AveragedTwoStepProcess:
    """Averaged two-step quantile process of a dataset.

    Equals, at every alpha, the two-step intercept plus ``x_bar' slopes``;
    both sides are order statistics of the same adjusted values, so the
    identity is exact in floating point.
    """
    if slopes is None:
        slopes = _slopes(ds, lam)
    slopes = np.asarray(slopes, dtype=float)
    # Same arithmetic path as intercept + x_bar'slopes, so the order-statistic
    # identity between the two holds exactly in floating point.
    residuals = ds.y - (ds.x @ slopes if ds.p else 0.0)
    adjusted = residuals + (ds.x_mean @ slopes if ds.p else 0.0)
    return AveragedTwoStepProcess(
        sorted_adjusted=np.sort(adjusted),
        lam=lam,
        nuisance_estimate=ds.y_mean,
        slopes=slopes,
    )


def centered_process(proc: AveragedTwoStepProcess,
                     nuisance: float | None = None) -> StepQuantileProcess:
    """Estimator of the error quantile function: process minus the nuisance.

    By default subtracts the response-mean estimate stored in the process;
    pass ``nuisance`` to subtract a known true value instead (simulation
    oracles).
    """
    if nuisance is None:
        nuisance = proc.nuisance_estimate
    return StepQuantileProcess(values=proc.sorted_adjusted - nuisance)
