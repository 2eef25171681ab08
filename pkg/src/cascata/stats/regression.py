"""Pearson correlation and ordinary least squares with t-test p-values."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import linalg
from scipy.stats import t as student_t

from ..errors import CollinearityError, DegenerateDataError, DataError


def pearson(x, y) -> float:
    """Product-moment correlation of two equal-length vectors."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise DataError("pearson needs two 1-d vectors of equal length")
    if x.size < 3:
        raise DataError("pearson needs at least 3 points")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = np.dot(dx, dx)
    syy = np.dot(dy, dy)
    if sxx == 0 or syy == 0:
        raise DegenerateDataError("zero variance")
    r = np.dot(dx, dy) / math.sqrt(sxx * syy)
    return float(min(1.0, max(-1.0, r)))


def zscore(a, axis=0):
    a = np.asarray(a, dtype=float)
    sd = a.std(axis=axis)
    if np.any(sd == 0):
        raise DegenerateDataError("cannot z-score a constant column")
    return (a - a.mean(axis=axis)) / sd


@dataclass(frozen=True)
class RegressionResult:
    weights: dict
    p_values: dict
    r_squared: float
    std_errors: dict = field(default_factory=dict)
    n: int = 0

    def stars(self, name: str) -> str:
        p = self.p_values[name]
        return "***" if p < 0.001 else "**" if p < 0.01 else "*" if p < 0.05 else ""

    def row(self, digits: int = 3) -> dict:
        """Formatted ``weight + stars`` per regressor, as in regression tables."""
        return {k: f"{w:.{digits}f}{self.stars(k)}" for k, w in self.weights.items()}


def ols(y, X, zscore_vars: bool = True, names: Optional[Sequence[str]] = None) -> RegressionResult:
    """Least squares fit of ``y`` on the columns of ``X``.

    With ``zscore_vars`` every variable is standardised first and no
    intercept is fitted. Coefficients come from a pivoted QR decomposition;
    p-values are two-sided t-tests with ``n - p`` degrees of freedom.

    Raises
    ------
    CollinearityError
        If ``X`` is rank deficient; ``exc.columns`` names the dependent
        columns.
    """
    y = np.asarray(y, dtype=float).ravel()
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n, p = X.shape
    names = list(names) if names is not None else [f"x{i}" for i in range(p)]
    if len(names) != p:
        raise DataError("one name per regressor required")
    if y.size != n:
        raise DataError("y and X have different numbers of rows")
    if n < p + 1:
        raise DataError("need more rows than regressors")
    if zscore_vars:
        const = [names[j] for j in range(p) if np.ptp(X[:, j]) == 0]
        if const:
            raise CollinearityError(f"constant columns: {', '.join(const)}", const)
        X = zscore(X)
        y = zscore(y)

    Q, R, piv = linalg.qr(X, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    tol = diag.max() * max(n, p) * np.finfo(float).eps if diag.size else 0.0
    rank = int(np.sum(diag > tol))
    if rank < p:
        bad = [names[j] for j in piv[rank:]]
        raise CollinearityError(f"rank-deficient regressors: {', '.join(bad)}", bad)
    beta_piv = linalg.solve_triangular(R, Q.T @ y)
    beta = np.empty(p)
    beta[piv] = beta_piv

    resid = y - X @ beta
    ssr = float(resid @ resid)
    yc = y - y.mean() if not zscore_vars else y
    sst = float(yc @ yc)
    r2 = 1.0 - ssr / sst if sst > 0 else 0.0
    r2 = min(1.0, max(0.0, r2))
    df = n - p
    sigma2 = ssr / df
    rinv = linalg.solve_triangular(R, np.eye(p))
    cov_piv = sigma2 * (rinv @ rinv.T)
    se = np.empty(p)
    se[piv] = np.sqrt(np.diag(cov_piv))
    with np.errstate(divide="ignore", invalid="ignore"):
        tvals = np.where(se > 0, beta / se, np.inf * np.sign(beta))
    pvals = 2.0 * student_t.sf(np.abs(tvals), df)
    pvals = np.where(np.isnan(pvals), 1.0, pvals)
    return RegressionResult(
        weights=dict(zip(names, beta.tolist())),
        p_values=dict(zip(names, pvals.tolist())),
        r_squared=float(r2),
        std_errors=dict(zip(names, se.tolist())),
        n=n,
    )


def predict(result: RegressionResult, X, names: Sequence[str]):
    return np.asarray(X, dtype=float) @ np.array([result.weights[k] for k in names])
