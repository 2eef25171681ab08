"""Discrete heavy-tail fitting: CCDF, power-law MLE and lognormal comparison.

The power law has mass ``x**-alpha / zeta(alpha, x_min)`` on the integers
``x >= x_min``. The lognormal alternative places on each integer ``x`` the
continuous lognormal mass of ``[x - 0.5, x + 0.5)``, renormalised to the same
tail. All fits work on the distinct values of the tail and their counts.
"""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
from scipy import optimize, special
from scipy.stats import norm

from ..errors import DataError, DegenerateDataError

logger = logging.getLogger(__name__)

ALPHA_MAX = 50.0
MIN_TAIL = 10


def _positive_ints(values) -> np.ndarray:
    x = np.asarray(values)
    if x.size == 0:
        raise DataError("empty sample")
    if not np.all(np.isfinite(x)) or np.any(x != np.round(x)) or np.any(x < 1):
        raise DataError("sample must contain positive integers")
    return np.sort(x.astype(np.int64), kind="stable")


def ccdf(values):
    """Empirical ``P(X > x)`` at every distinct value.

    Returns
    -------
    x : ndarray of distinct values, ascending
    p : ndarray, strictly decreasing, ``p[-1] == 0``
    """
    x = np.sort(np.asarray(values))
    if x.size == 0:
        raise DataError("ccdf of an empty sample")
    uniq, counts = np.unique(x, return_counts=True)
    le = np.cumsum(counts)
    return uniq, (x.size - le) / x.size


# ---------------------------------------------------------------------------
# Power law
# ---------------------------------------------------------------------------

def powerlaw_logpmf(x, alpha, x_min):
    x = np.asarray(x, dtype=float)
    return -alpha * np.log(x) - np.log(special.zeta(alpha, x_min))


def powerlaw_sf(x, alpha, x_min):
    """``P(X >= x)`` for integer ``x >= x_min``."""
    return special.zeta(alpha, np.asarray(x, dtype=float)) / special.zeta(alpha, x_min)


def hill_alpha(values, x_min) -> float:
    """Continuous-approximation estimate ``1 + n / sum(log(x / (x_min - 1/2)))``.

    Only meant as a cross-check of :func:`fit_power_law`.
    """
    x = _positive_ints(values)
    tail = x[x >= x_min]
    return 1.0 + tail.size / np.sum(np.log(tail / (x_min - 0.5)))


@dataclass(frozen=True)
class PowerLawFit:
    alpha: float
    x_min: int
    sigma_alpha: float
    n_tail: int
    D: float
    n: int

    def to_dict(self):
        return asdict(self)

    def report(self, digits: int = 2) -> str:
        return f"α={self.alpha:.{digits}f}±{self.sigma_alpha:.{digits}f}"


def _ks_distance(uniq, counts, alpha, x_min):
    """Max CDF gap between a tail and its fitted power law.

    Both CDFs are step functions on the integers, so the gap is checked at
    each observed value and just before the next one.
    """
    n = counts.sum()
    emp = np.cumsum(counts) / n
    z0 = special.zeta(alpha, x_min)
    model_at = 1.0 - special.zeta(alpha, uniq + 1.0) / z0
    model_before_next = 1.0 - special.zeta(alpha, uniq[1:].astype(float)) / z0
    d = np.abs(emp - model_at).max()
    if model_before_next.size:
        d = max(d, np.abs(emp[:-1] - model_before_next).max())
    return float(d)


def _mle_alpha(mean_log, x_min, start=None) -> float:
    """Maximise ``-alpha * mean_log - log zeta(alpha, x_min)`` over alpha > 1."""
    def nll(a):
        return a * mean_log + math.log(special.zeta(a, x_min))
    lo, hi = 1.0 + 1e-9, ALPHA_MAX
    if start is not None:
        lo, hi = max(lo, start - 0.2), min(hi, start + 0.2)
    res = optimize.minimize_scalar(nll, bounds=(lo, hi), method="bounded",
                                   options={"xatol": 1e-13, "maxiter": 500})
    a = float(res.x)
    if start is not None and (a - lo < 1e-6 or hi - a < 1e-6) and (lo, hi) != (1.0 + 1e-9, ALPHA_MAX):
        return _mle_alpha(mean_log, x_min)
    return a


def _newton_alpha(mean_log, x_min, iters=30):
    """Vectorised Newton solve of the likelihood equation for many ``x_min``."""
    x_min = np.asarray(x_min, dtype=float)
    a = 1.0 + 1.0 / np.maximum(mean_log - np.log(x_min - 0.5), 1e-3)
    a = np.clip(a, 1.01, ALPHA_MAX)
    h = 1e-5
    for _ in range(iters):
        gp = np.log(special.zeta(a + h, x_min))
        g0 = np.log(special.zeta(a, x_min))
        gm = np.log(special.zeta(a - h, x_min))
        d1 = (gp - gm) / (2 * h)
        d2 = np.maximum((gp - 2 * g0 + gm) / (h * h), 1e-12)
        step = (-mean_log - d1) / d2
        a_new = np.clip(a + step, 1.0 + 1e-4, ALPHA_MAX)
        if np.all(np.abs(a_new - a) < 1e-10):
            a = a_new
            break
        a = a_new
    return a


def fit_power_law(values, x_min: Optional[int] = None, xmin_quantile: float = 0.9) -> PowerLawFit:
    """Discrete power-law fit by maximum likelihood.

    Parameters
    ----------
    values : array_like of positive integers
    x_min : int, optional
        Fixed lower bound of the tail. When omitted, every distinct value up
        to the ``xmin_quantile`` quantile of the distinct values is tried and
        the one minimising the KS distance between tail and fit is kept.

    Notes
    -----
    ``sigma_alpha`` is the large-sample standard error ``(alpha-1)/sqrt(n)``
    of the continuous estimator.
    """
    x = _positive_ints(values)
    uniq, counts = np.unique(x, return_counts=True)
    if uniq.size < 2:
        raise DegenerateDataError("degenerate tail: all values are equal")
    logs = np.log(uniq.astype(float))
    # suffix sums over distinct values -> tail size and log-sum for each candidate
    n_suffix = np.cumsum(counts[::-1])[::-1]
    log_suffix = np.cumsum((counts * logs)[::-1])[::-1]

    if x_min is not None:
        k = int(np.searchsorted(uniq, x_min))
        if k >= uniq.size or n_suffix[k] < MIN_TAIL:
            raise DataError(f"fewer than {MIN_TAIL} samples >= x_min={x_min}")
        if k == uniq.size - 1:
            raise DegenerateDataError("degenerate tail: one distinct value above x_min")
        candidates = np.array([k])
        x_mins = np.array([int(x_min)])
    else:
        cap = uniq[int(np.floor(xmin_quantile * (uniq.size - 1)))]
        candidates = np.flatnonzero((uniq <= cap) & (n_suffix >= MIN_TAIL))
        candidates = candidates[candidates < uniq.size - 1]
        if candidates.size == 0:
            raise DataError(f"no x_min candidate leaves {MIN_TAIL} tail samples")
        x_mins = uniq[candidates]

    mean_logs = log_suffix[candidates] / n_suffix[candidates]
    alphas = _newton_alpha(mean_logs, x_mins)
    dists = np.array([_ks_distance(uniq[k:], counts[k:], a, xm)
                      for k, a, xm in zip(candidates, alphas, x_mins)])
    best = int(np.argmin(dists))
    k = int(candidates[best])
    xm = int(x_mins[best])
    alpha = _mle_alpha(float(mean_logs[best]), xm, start=float(alphas[best]))
    n_tail = int(n_suffix[k])
    return PowerLawFit(alpha=alpha, x_min=xm, sigma_alpha=(alpha - 1.0) / math.sqrt(n_tail),
                       n_tail=n_tail, D=_ks_distance(uniq[k:], counts[k:], alpha, xm), n=int(x.size))


def power_law_ccdf_line(fit: PowerLawFit, x_max: int, points: int = 50):
    """Sample points ``(x, P(X > x))`` of a fitted tail, scaled to the full sample."""
    xs = np.unique(np.round(np.geomspace(fit.x_min, max(x_max, fit.x_min + 1), points)).astype(np.int64))
    frac = fit.n_tail / fit.n
    return xs, frac * powerlaw_sf(xs + 1, fit.alpha, fit.x_min)


# ---------------------------------------------------------------------------
# Lognormal alternative
# ---------------------------------------------------------------------------

def _log_norm_interval(a, b):
    """``log(Phi(b) - Phi(a))`` for ``a < b``, accurate in both tails."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        upper = norm.logsf(a) + np.log1p(-np.exp(norm.logsf(b) - norm.logsf(a)))
        lower = norm.logcdf(b) + np.log1p(-np.exp(norm.logcdf(a) - norm.logcdf(b)))
        mid = np.log(special.ndtr(b) - special.ndtr(a))
    return np.where(a >= 0, upper, np.where(b <= 0, lower, mid))


def lognormal_logpmf(x, mu, sigma, x_min):
    x = np.asarray(x, dtype=float)
    lo = (np.log(x - 0.5) - mu) / sigma
    hi = (np.log(x + 0.5) - mu) / sigma
    norm_const = norm.logsf((math.log(x_min - 0.5) - mu) / sigma)
    return _log_norm_interval(lo, hi) - norm_const


@dataclass(frozen=True)
class LognormalFit:
    mu: float
    sigma: float
    x_min: int
    loglik: float


def fit_lognormal(values, x_min: int, positive_mean: bool = True) -> LognormalFit:
    """Maximum-likelihood discretised lognormal on ``values >= x_min``."""
    x = _positive_ints(values)
    tail = x[x >= x_min]
    if tail.size < MIN_TAIL:
        raise DataError(f"fewer than {MIN_TAIL} tail points")
    uniq, counts = np.unique(tail, return_counts=True)
    w = counts.astype(float)

    def nll(theta):
        mu, log_sigma = theta
        if positive_mean and mu < 0:
            return np.inf
        lp = lognormal_logpmf(uniq, mu, math.exp(log_sigma), x_min)
        val = -np.dot(w, lp)
        return val if np.isfinite(val) else np.inf

    logs = np.log(tail)
    mu0 = float(logs.mean())
    s0 = float(max(logs.std(), 0.1))
    best = None
    for start in ((mu0, math.log(s0)), (mu0 - 2 * s0, math.log(2 * s0))):
        if positive_mean:
            start = (max(start[0], 0.0), start[1])
        res = optimize.minimize(nll, start, method="Nelder-Mead",
                                options={"xatol": 1e-9, "fatol": 1e-10, "maxiter": 4000, "maxfev": 8000})
        if best is None or res.fun < best.fun:
            best = res
    mu, log_sigma = best.x
    return LognormalFit(mu=float(mu), sigma=float(math.exp(log_sigma)), x_min=int(x_min), loglik=float(-best.fun))


@dataclass(frozen=True)
class LRTResult:
    R: float
    p: float
    lognormal: LognormalFit

    @property
    def favors_power_law(self) -> bool:
        return self.R > 0

    def evidence(self, level: float = 0.05) -> str:
        """``"power law"``, ``"lognormal"``, or a moderated verdict if ``p`` exceeds ``level``."""
        side = "power law" if self.R > 0 else "lognormal"
        return side if self.p <= level else f"{side} (moderated)"


def vuong(loglik_a, loglik_b, weights=None):
    """Summed log-likelihood ratio and two-sided normalised-ratio p-value."""
    d = np.asarray(loglik_a, dtype=float) - np.asarray(loglik_b, dtype=float)
    w = np.ones_like(d) if weights is None else np.asarray(weights, dtype=float)
    n = w.sum()
    R = float(np.dot(w, d))
    mean = R / n
    sd = math.sqrt(float(np.dot(w, (d - mean) ** 2)) / n)
    if sd == 0.0:
        return R, 1.0 if R == 0 else 0.0
    p = float(special.erfc(abs(R) / (math.sqrt(2.0 * n) * sd)))
    return R, min(max(p, 0.0), 1.0)


def lrt_vs_lognormal(values, fit: PowerLawFit, positive_mean: bool = True) -> LRTResult:
    """Compare the power-law fit with a lognormal fitted on the same tail.

    ``R > 0`` favours the power law.
    """
    x = _positive_ints(values)
    tail = x[x >= fit.x_min]
    if tail.size < MIN_TAIL:
        raise DataError(f"fewer than {MIN_TAIL} tail points")
    ln = fit_lognormal(tail, fit.x_min, positive_mean=positive_mean)
    uniq, counts = np.unique(tail, return_counts=True)
    R, p = vuong(powerlaw_logpmf(uniq, fit.alpha, fit.x_min),
                 lognormal_logpmf(uniq, ln.mu, ln.sigma, fit.x_min), counts)
    return LRTResult(R=R, p=p, lognormal=ln)


def fit_report(values, x_min: Optional[int] = None, positive_mean: bool = True) -> dict:
    """JSON-ready summary ``{alpha, xmin, sigma, ntail, D, R, p_R}``."""
    fit = fit_power_law(values, x_min)
    lrt = lrt_vs_lognormal(values, fit, positive_mean=positive_mean)
    return {"alpha": fit.alpha, "xmin": fit.x_min, "sigma": fit.sigma_alpha, "ntail": fit.n_tail,
            "D": fit.D, "R": lrt.R, "p_R": lrt.p}
