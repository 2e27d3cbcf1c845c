"""Univariate binary logistic regression by maximum likelihood.

The model is ``pi(x) = exp(a + b*x) / (1 + exp(a + b*x))`` with intercept
``a`` and coefficient ``b``.  Fitting runs Newton-Raphson on an internally
standardized predictor (raw scales here span three orders of magnitude and
make the Hessian ill-conditioned), then back-transforms coefficients and
standard errors.  Model significance is a likelihood-ratio chi-square against
the intercept-only fit, one degree of freedom.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import SeparationError

__all__ = [
    "LogisticFit",
    "ClassificationReport",
    "predict",
    "fit_logistic",
    "lr_p_value",
    "classify",
    "threshold_x",
]

# Standardized slopes beyond this are MLE divergence, not signal.
_SEPARATION_BOUND = 50.0


@dataclass(frozen=True)
class LogisticFit:
    a: float
    b: float
    se_a: float
    se_b: float
    ll_full: float
    ll_null: float
    chi2: float
    p_value: float
    converged: bool
    iterations: int


@dataclass(frozen=True)
class ClassificationReport:
    cutoff: float
    tp: int
    fp: int
    tn: int
    fn: int
    sensitivity: float
    specificity: float


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=float)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def predict(fit: LogisticFit, x: float) -> float:
    """Predicted success probability at ``x``; stable for large |a + b*x|."""
    z = fit.a + fit.b * x
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    ez = math.exp(z)
    return ez / (1.0 + ez)


def lr_p_value(chi2: float) -> float:
    """Survival function of the chi-square distribution with 1 df."""
    if chi2 < 0:
        raise ValueError("chi2 must be non-negative")
    return math.erfc(math.sqrt(chi2 / 2.0))


def _log_likelihood(z: np.ndarray, y: np.ndarray) -> float:
    # sum(y*log(p) + (1-y)*log(1-p)) written via logaddexp for stability
    return float(-(np.logaddexp(0.0, -z) * y + np.logaddexp(0.0, z) * (1.0 - y)).sum())


def fit_logistic(
    xs: Sequence[float],
    ys: Sequence[int],
    max_iter: int = 100,
    tol: float = 1e-10,
) -> LogisticFit:
    """Maximum-likelihood fit of the univariate logistic model.

    Raises SeparationError when the standardized slope runs past the
    divergence guard (complete or quasi-complete separation: the MLE does
    not exist).  Returns ``converged=False`` if Newton-Raphson failed to
    reach ``tol`` within ``max_iter`` iterations.
    """
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.ndim != 1 or x.shape != y.shape:
        raise ValueError("xs and ys must be equal-length 1-d sequences")
    if len(x) < 10:
        raise ValueError("need at least 10 observations")
    if not np.all((y == 0.0) | (y == 1.0)):
        raise ValueError("ys must be 0/1")
    if y.min() == y.max():
        raise ValueError("ys must contain both classes")
    mean = float(x.mean())
    scale = float(x.std())
    if scale == 0.0:
        raise ValueError("constant predictor")
    z = (x - mean) / scale

    ybar = float(y.mean())
    a_std = math.log(ybar / (1.0 - ybar))
    b_std = 0.0
    ll = _log_likelihood(np.full_like(z, a_std), y)
    ll_null = ll
    converged = False
    iterations = 0
    hess = np.eye(2)
    for iterations in range(1, max_iter + 1):
        eta = a_std + b_std * z
        p = _sigmoid(eta)
        w = p * (1.0 - p)
        grad = np.array([float((y - p).sum()), float(((y - p) * z).sum())])
        hess = np.array(
            [
                [float(w.sum()), float((w * z).sum())],
                [float((w * z).sum()), float((w * z * z).sum())],
            ]
        )
        try:
            step = np.linalg.solve(hess, grad)
        except np.linalg.LinAlgError:
            break
        # step-halving keeps the likelihood monotone on awkward samples
        factor = 1.0
        for _ in range(30):
            na, nb = a_std + factor * step[0], b_std + factor * step[1]
            ll_new = _log_likelihood(na + nb * z, y)
            if ll_new >= ll - 1e-12:
                break
            factor /= 2.0
        a_std, b_std = a_std + factor * step[0], b_std + factor * step[1]
        if abs(b_std) > _SEPARATION_BOUND:
            raise SeparationError(
                f"standardized slope {b_std:.1f} exceeds {_SEPARATION_BOUND}: "
                "classes are separated, the MLE does not exist"
            )
        ll_new = _log_likelihood(a_std + b_std * z, y)
        if abs(ll_new - ll) < tol:
            ll = ll_new
            converged = True
            break
        ll = ll_new

    # back-transform: x_std = (x - mean)/scale  =>  b = b_std/scale,
    # a = a_std - b_std*mean/scale; covariance via the Jacobian of that map.
    jac = np.array([[1.0, -mean / scale], [0.0, 1.0 / scale]])
    try:
        cov_std = np.linalg.inv(hess)
        cov = jac @ cov_std @ jac.T
        se_a = math.sqrt(max(cov[0, 0], 0.0))
        se_b = math.sqrt(max(cov[1, 1], 0.0))
    except np.linalg.LinAlgError:
        se_a = se_b = float("nan")
    chi2 = max(2.0 * (ll - ll_null), 0.0)
    return LogisticFit(
        a=a_std - b_std * mean / scale,
        b=b_std / scale,
        se_a=se_a,
        se_b=se_b,
        ll_full=ll,
        ll_null=ll_null,
        chi2=chi2,
        p_value=lr_p_value(chi2),
        converged=converged,
        iterations=iterations,
    )


def classify(
    fit: LogisticFit,
    xs: Sequence[float],
    ys: Sequence[int],
    cutoff: float = 0.5,
) -> ClassificationReport:
    """Confusion counts and rates at a probability cutoff (default 0.5;
    the natural choice for balanced 50/50 samples)."""
    tp = fp = tn = fn = 0
    for x, y in zip(xs, ys):
        predicted = 1 if predict(fit, x) >= cutoff else 0
        if predicted == 1 and y == 1:
            tp += 1
        elif predicted == 1 and y == 0:
            fp += 1
        elif predicted == 0 and y == 0:
            tn += 1
        else:
            fn += 1
    sensitivity = tp / (tp + fn) if tp + fn else float("nan")
    specificity = tn / (tn + fp) if tn + fp else float("nan")
    return ClassificationReport(cutoff, tp, fp, tn, fn, sensitivity, specificity)


def threshold_x(fit: LogisticFit, p: float = 0.5) -> float:
    """The predictor value where the model crosses probability ``p``."""
    if fit.b == 0:
        raise ValueError("no threshold: coefficient b is zero")
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie strictly between 0 and 1")
    return (math.log(p / (1.0 - p)) - fit.a) / fit.b
