"""Gaussian and curve-adapted Gaussian densities with closed-form cross-entropies.

The curve-adapted density factors as a Gaussian over the explanatory
coordinates times a 1-D Gaussian of the residual x_j - f(x_others); the map
(x_j -> x_j - f) has unit Jacobian, so the product is a genuine density.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .curves import explanatory
from .errors import DegenerateCluster, NotPositiveDefinite, ZeroResidualWarning

LOG_2PI = math.log(2.0 * math.pi)
RESID_VAR_FLOOR = 1e-12
# regularization ladder: try exact first, then escalate eps relative to
# mean diagonal until Cholesky succeeds
REG_BASE = 1e-9
REG_MAX = 1e-3


@dataclass(frozen=True)
class GaussianParams:
    mean: np.ndarray = field(repr=False)
    cov: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "mean", np.asarray(self.mean, dtype=float).reshape(-1))
        object.__setattr__(self, "cov", np.asarray(self.cov, dtype=float))
        if self.cov.shape != (self.mean.size, self.mean.size):
            raise ValueError("cov shape does not match mean")

    @property
    def dim(self):
        return self.mean.size


@dataclass(frozen=True)
class FAdaptedParams:
    """One cluster's curved-Gaussian parameters.

    dependent_axis j is modeled as curve(x_others) plus N(mean_dep, resid_var)
    noise; the other coordinates follow N(mean_exp, cov_exp). mean_dep stays 0
    because the curve's intercept absorbs it (families always contain the
    constant function).
    """

    dependent_axis: int
    mean_exp: np.ndarray = field(repr=False)
    cov_exp: np.ndarray = field(repr=False)
    resid_var: float = 1.0
    curve: object = None
    mean_dep: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "mean_exp", np.asarray(self.mean_exp, dtype=float).reshape(-1))
        object.__setattr__(self, "cov_exp", np.asarray(self.cov_exp, dtype=float))
        if self.resid_var <= 0:
            raise ValueError("resid_var must be positive")

    @property
    def dim(self):
        return self.mean_exp.size + 1


def _cholesky_reg(cov):
    """Cholesky of cov, adding eps*I only if needed. Returns (L, cov_used).

    eps starts at REG_BASE*(trace/d) and escalates by 10x up to REG_MAX*(trace/d);
    raises DegenerateCluster when nothing works (e.g. zero trace).
    """
    cov = np.asarray(cov, dtype=float)
    try:
        return np.linalg.cholesky(cov), cov
    except np.linalg.LinAlgError:
        pass
    scale = np.trace(cov) / cov.shape[0]
    if scale > 0:
        eps = REG_BASE * scale
        while eps <= REG_MAX * scale:
            reg = cov + eps * np.eye(cov.shape[0])
            try:
                return np.linalg.cholesky(reg), reg
            except np.linalg.LinAlgError:
                eps *= 10.0
    raise DegenerateCluster("covariance not positive definite after regularization")


def _gauss_logpdf(mean, cov, x, strict=True):
    """Log N(mean, cov) at x; x is (d,) or (n, d). strict -> NotPositiveDefinite."""
    mean = np.asarray(mean, dtype=float).reshape(-1)
    d = mean.size
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    pts = x.reshape(-1, d)
    if strict:
        try:
            low = np.linalg.cholesky(np.asarray(cov, dtype=float))
        except np.linalg.LinAlgError as e:
            raise NotPositiveDefinite(str(e)) from e
    else:
        low, _ = _cholesky_reg(cov)
    logdet = 2.0 * float(np.sum(np.log(np.diag(low))))
    diff = pts - mean
    sol = scipy.linalg.solve_triangular(low, diff.T, lower=True)
    out = -0.5 * d * LOG_2PI - 0.5 * logdet - 0.5 * np.sum(sol * sol, axis=0)
    return float(out[0]) if single else out


def gaussian_log_density(p, x):
    """Log density of N(p.mean, p.cov) at x ((d,) or (n,d))."""
    return _gauss_logpdf(p.mean, p.cov, x)


def fadapted_log_density(p, x):
    """Log density of the curve-adapted Gaussian at x ((d,) or (n,d))."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    pts = x.reshape(-1, p.dim)
    j = p.dependent_axis
    xe = explanatory(pts, j)
    ge = _gauss_logpdf(p.mean_exp, p.cov_exp, xe)
    resid = pts[:, j] - p.curve.evaluate(xe) - p.mean_dep
    gd = -0.5 * (LOG_2PI + math.log(p.resid_var)) - 0.5 * resid * resid / p.resid_var
    out = np.atleast_1d(ge) + gd
    return float(out[0]) if single else out


def mean_and_cov(x):
    """Mean and 1/n covariance (the estimator used throughout)."""
    x = np.asarray(x, dtype=float).reshape(len(x), -1)
    mean = x.mean(axis=0)
    diff = x - mean
    return mean, (diff.T @ diff) / x.shape[0]


def gaussian_cross_entropy(x):
    """Empirical cross-entropy of sample x against its MLE Gaussian.

    Returns (H, params) with H = d/2*ln(2*pi*e) + 0.5*ln det(cov); this equals
    the empirical mean negative log-density at the returned params.
    """
    x = np.asarray(x, dtype=float).reshape(len(x), -1)
    d = x.shape[1]
    if x.shape[0] < d + 1:
        raise DegenerateCluster(f"need at least {d + 1} points, got {x.shape[0]}")
    mean, cov = mean_and_cov(x)
    low, cov_used = _cholesky_reg(cov)
    logdet = 2.0 * float(np.sum(np.log(np.diag(low))))
    h = 0.5 * d * (LOG_2PI + 1.0) + 0.5 * logdet
    return h, GaussianParams(mean, cov_used)


def fadapted_cross_entropy(x, j, curve):
    """Empirical cross-entropy of x against the curve-adapted family member
    with dependent axis j and the given curve.

    Returns (H, params): H = d/2*ln(2*pi*e) + 0.5*ln det(cov_exp)
    + 0.5*ln(resid_var) with resid_var = mean squared residual of the curve
    (its intercept absorbs the dependent mean, so mean_dep is 0). Residual
    variance below RESID_VAR_FLOOR is floored and flagged ZeroResidualWarning.
    """
    x = np.asarray(x, dtype=float)
    n, d = x.shape
    if n < d + 1:
        raise DegenerateCluster(f"need at least {d + 1} points, got {n}")
    xe = explanatory(x, j)
    mean_exp, cov_exp = mean_and_cov(xe)
    low, cov_used = _cholesky_reg(cov_exp)
    logdet = 2.0 * float(np.sum(np.log(np.diag(low))))
    resid = x[:, j] - curve.evaluate(xe)
    resid_var = float(resid @ resid) / n
    if resid_var < RESID_VAR_FLOOR:
        warnings.warn("residual variance floored", ZeroResidualWarning, stacklevel=2)
        resid_var = RESID_VAR_FLOOR
    h = 0.5 * d * (LOG_2PI + 1.0) + 0.5 * logdet + 0.5 * math.log(resid_var)
    params = FAdaptedParams(j, mean_exp, cov_used, resid_var, curve)
    return h, params
