"""Self-contained statistical kernels.

Pearson correlation, the dominant principal direction of a small matrix via
power iteration, a ridge-penalized binomial GLM fitted with IRLS, and seeded
percentile-bootstrap confidence intervals.  Everything here is a pure function
of its arguments; randomness always flows through :func:`substream_rng` so
results are reproducible from a single integer seed.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DegenerateDataError
from .validation import as_matrix, as_vector

logger = logging.getLogger(__name__)

__all__ = [
    "BootstrapCI",
    "FitResult",
    "average_ranks",
    "binomial_log_likelihood",
    "binomial_log_likelihood_gradient",
    "bootstrap_ci",
    "bootstrap_fit_cis",
    "first_principal_component",
    "fit_binomial",
    "pearson",
    "substream_rng",
]


def substream_rng(seed: int, *path: int) -> np.random.Generator:
    """Deterministic counter-based generator for the substream at (seed, *path).

    Distinct paths give statistically independent streams, so parallel workers
    can draw from ``substream_rng(seed, i)`` without coordinating.
    """
    ss = np.random.SeedSequence([int(seed), *(int(p) & 0xFFFFFFFF for p in path)])
    return np.random.Generator(np.random.Philox(ss))


# ---------------------------------------------------------------------------
# Correlation and ranks
# ---------------------------------------------------------------------------


def pearson(x, y) -> float:
    """Pearson product-moment correlation of two equal-length sequences.

    Requires at least 3 observations and nonzero variance on both sides; a
    constant input raises :class:`DegenerateDataError` rather than returning a
    number, because it signals a degenerate dimension rather than agreement.
    """
    xv = as_vector(x, "x")
    yv = as_vector(y, "y")
    if xv.size != yv.size:
        raise ValueError(f"length mismatch: {xv.size} != {yv.size}")
    if xv.size < 3:
        raise ValueError(f"need at least 3 observations, got {xv.size}")
    xc = xv - xv.mean()
    yc = yv - yv.mean()
    sxx = float(xc @ xc)
    syy = float(yc @ yc)
    if sxx == 0.0:
        raise DegenerateDataError("x has zero variance")
    if syy == 0.0:
        raise DegenerateDataError("y has zero variance")
    r = float(xc @ yc) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def average_ranks(values) -> np.ndarray:
    """Ranks starting at 1, with tied values sharing their average rank."""
    v = as_vector(values, "values")
    order = np.argsort(v, kind="mergesort")
    ranks = np.empty(v.size, dtype=np.float64)
    sorted_v = v[order]
    i = 0
    while i < v.size:
        j = i
        while j + 1 < v.size and sorted_v[j + 1] == sorted_v[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


# ---------------------------------------------------------------------------
# Dominant principal direction
# ---------------------------------------------------------------------------


def first_principal_component(
    rows, *, tol: float = 1e-10, max_iter: int = 10000, seed: int = 0
) -> np.ndarray:
    """Unit vector spanning the dominant direction of a small row matrix.

    Computes the leading right singular vector of ``rows`` by power iteration
    on whichever of the covariance-shaped (d x d) or Gram (n x n) matrix is
    smaller.  Rows are used exactly as given: callers wanting covariance-style
    PCA must center the rows themselves.  The sign of the returned vector is
    deterministic for a fixed seed but otherwise arbitrary; callers impose
    their own orientation convention.
    """
    a = as_matrix(rows, "rows")
    n, d = a.shape
    scale = float(np.abs(a).max())
    if scale == 0.0:
        raise DegenerateDataError("all-zero matrix has no principal direction")

    use_gram = n < d
    m = a @ a.T if use_gram else a.T @ a
    k = m.shape[0]

    rng = substream_rng(seed)
    x = rng.standard_normal(k)
    x /= np.linalg.norm(x)
    for _ in range(max_iter):
        y = m @ x
        ny = float(np.linalg.norm(y))
        if ny == 0.0:
            # started in the nullspace; re-draw
            x = rng.standard_normal(k)
            x /= np.linalg.norm(x)
            continue
        x_new = y / ny
        lam = float(x_new @ (m @ x_new))
        residual = float(np.linalg.norm(m @ x_new - lam * x_new))
        x = x_new
        if residual <= tol * max(lam, 1e-30):
            break

    if use_gram:
        v = a.T @ x
        nv = float(np.linalg.norm(v))
        if nv == 0.0:
            raise DegenerateDataError("matrix has no principal direction")
        v /= nv
    else:
        v = x / float(np.linalg.norm(x))
    return v


# ---------------------------------------------------------------------------
# Binomial GLM via IRLS
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FitResult:
    """Outcome of one binomial-GLM fit.

    ``log_likelihood`` is the unpenalized weighted binomial log-likelihood at
    the solution, up to the additive binomial-coefficient constant.
    """

    coefficients: np.ndarray
    intercept: float
    converged: bool
    iterations: int
    log_likelihood: float


def _stable_expit(eta: np.ndarray) -> np.ndarray:
    out = np.empty_like(eta)
    pos = eta >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-eta[pos]))
    ex = np.exp(eta[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def _as_successes_trials(outcomes, n_obs: int) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(outcomes, tuple) and len(outcomes) == 2:
        successes = as_vector(outcomes[0], "successes")
        trials = as_vector(outcomes[1], "trials")
    else:
        arr = np.asarray(outcomes, dtype=np.float64)
        if arr.ndim == 2 and arr.shape[1] == 2:
            successes, trials = arr[:, 0].copy(), arr[:, 1].copy()
        elif arr.ndim == 1:
            if not np.all((arr == 0.0) | (arr == 1.0)):
                raise ValueError("binary outcomes must be 0 or 1")
            successes, trials = arr, np.ones_like(arr)
        else:
            raise ValueError("outcomes must be a 0/1 vector or (successes, trials)")
    if successes.size != n_obs or trials.size != n_obs:
        raise ValueError("outcomes length does not match feature rows")
    if np.any(successes < 0) or np.any(trials < successes):
        raise ValueError("need trials >= successes >= 0 for every observation")
    return successes, trials


def binomial_log_likelihood(
    params, features, successes, trials, weights=None, ridge: float = 0.0
) -> float:
    """Ridge-penalized weighted binomial log-likelihood.

    ``params[0]`` is the intercept and is never penalized; the ridge term is
    ``-ridge/2 * ||params[1:]||^2``.
    """
    theta = as_vector(params, "params")
    x = as_matrix(features, "features")
    s = as_vector(successes, "successes")
    t = as_vector(trials, "trials")
    w = np.ones_like(s) if weights is None else as_vector(weights, "weights")
    eta = theta[0] + x @ theta[1:]
    # log p = -softplus(-eta), log(1-p) = -softplus(eta); stable at extreme eta
    ll = -(s * np.logaddexp(0.0, -eta) + (t - s) * np.logaddexp(0.0, eta))
    return float(w @ ll) - 0.5 * ridge * float(theta[1:] @ theta[1:])


def binomial_log_likelihood_gradient(
    params, features, successes, trials, weights=None, ridge: float = 0.0
) -> np.ndarray:
    """Gradient of :func:`binomial_log_likelihood` with respect to ``params``."""
    theta = as_vector(params, "params")
    x = as_matrix(features, "features")
    s = as_vector(successes, "successes")
    t = as_vector(trials, "trials")
    w = np.ones_like(s) if weights is None else as_vector(weights, "weights")
    eta = theta[0] + x @ theta[1:]
    resid = w * (s - t * _stable_expit(eta))
    grad = np.empty_like(theta)
    grad[0] = resid.sum()
    grad[1:] = x.T @ resid - ridge * theta[1:]
    return grad


def fit_binomial(
    features,
    outcomes,
    weights=None,
    ridge: float = 1e-6,
    *,
    max_iter: int = 100,
    tol: float = 1e-8,
) -> FitResult:
    """Fit a binomial GLM (logit link) by iteratively reweighted least squares.

    ``outcomes`` is either a 0/1 vector or a ``(successes, trials)`` pair; in
    the latter form each observation already carries weight ``trials``.
    Optional nonnegative ``weights`` multiply each observation's contribution.
    The intercept is unpenalized.  Convergence is declared when the largest
    absolute parameter change drops below ``tol``; running out of iterations
    is reported through ``converged=False``, not an exception.
    """
    x = as_matrix(features, "features")
    n_obs, n_feat = x.shape
    s, t = _as_successes_trials(outcomes, n_obs)
    if weights is None:
        w = np.ones(n_obs)
    else:
        w = as_vector(weights, "weights")
        if w.size != n_obs:
            raise ValueError("weights length does not match feature rows")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
    if ridge < 0:
        raise ValueError("ridge must be nonnegative")

    design = np.column_stack([np.ones(n_obs), x])
    penalty = np.zeros(n_feat + 1)
    penalty[1:] = ridge
    theta = np.zeros(n_feat + 1)

    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        eta = design @ theta
        p = _stable_expit(eta)
        resid = w * (s - t * p)
        grad = design.T @ resid
        grad[1:] -= ridge * theta[1:]
        irls_w = w * t * p * (1.0 - p)
        hess = design.T @ (design * irls_w[:, None]) + np.diag(penalty)
        try:
            delta = np.linalg.solve(hess, grad)
        except np.linalg.LinAlgError:
            if ridge == 0.0:
                raise DegenerateDataError(
                    "singular weighted normal equations; refit with ridge > 0"
                ) from None
            break
        if not np.all(np.isfinite(delta)):
            break
        theta = theta + delta
        if float(np.max(np.abs(delta))) < tol:
            converged = True
            break

    ll = binomial_log_likelihood(theta, x, s, t, w, ridge=0.0)
    if not converged:
        logger.warning("binomial GLM did not converge in %d iterations", iterations)
    return FitResult(
        coefficients=theta[1:].copy(),
        intercept=float(theta[0]),
        converged=converged,
        iterations=iterations,
        log_likelihood=ll,
    )


# ---------------------------------------------------------------------------
# Bootstrap
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BootstrapCI:
    """Percentile bootstrap interval for one statistic."""

    point: float
    lower: float
    upper: float
    level: float
    resamples: int
    seed: int


def bootstrap_ci(
    values,
    statistic: Callable[[np.ndarray], float] | None = None,
    *,
    level: float = 0.95,
    resamples: int = 1000,
    seed: int = 0,
) -> BootstrapCI:
    """Seeded percentile bootstrap interval for a statistic of one sample.

    The default statistic is the mean.  Resample ``i`` draws its indices from
    the substream at (seed, i), so identical inputs give identical intervals
    and resamples may safely be computed in parallel.
    """
    v = as_vector(values, "values")
    if v.size == 0:
        raise ValueError("empty input")
    if v.size < 2:
        raise ValueError("need at least 2 values")
    if resamples < 100:
        raise ValueError("need at least 100 resamples")
    if not 0.0 < level < 1.0:
        raise ValueError("level must be in (0, 1)")
    stat = statistic if statistic is not None else (lambda a: float(np.mean(a)))

    point = float(stat(v))
    boots = np.empty(resamples)
    for i in range(resamples):
        idx = substream_rng(seed, i).integers(0, v.size, v.size)
        boots[i] = float(stat(v[idx]))
    alpha = 0.5 * (1.0 - level)
    lower, upper = np.percentile(boots, [100.0 * alpha, 100.0 * (1.0 - alpha)])
    return BootstrapCI(point, float(lower), float(upper), level, resamples, seed)


def bootstrap_fit_cis(
    fit_params: Callable[[np.ndarray], np.ndarray],
    n_obs: int,
    *,
    level: float = 0.95,
    resamples: int = 200,
    seed: int = 0,
) -> list[BootstrapCI]:
    """Percentile bootstrap intervals for a parameter vector fitted from ``n_obs`` rows.

    ``fit_params`` maps an index array (rows to use, with repetition) to a 1-d
    parameter vector.  Resamples that raise :class:`DegenerateDataError` are
    skipped; at least half must survive.
    """
    if resamples < 100:
        raise ValueError("need at least 100 resamples")
    point = np.asarray(fit_params(np.arange(n_obs)), dtype=np.float64)
    draws: list[np.ndarray] = []
    for i in range(resamples):
        idx = substream_rng(seed, i).integers(0, n_obs, n_obs)
        try:
            draws.append(np.asarray(fit_params(idx), dtype=np.float64))
        except DegenerateDataError:
            continue
    if len(draws) < resamples // 2:
        raise DegenerateDataError(
            f"only {len(draws)} of {resamples} bootstrap refits succeeded"
        )
    stacked = np.vstack(draws)
    alpha = 0.5 * (1.0 - level)
    lo = np.percentile(stacked, 100.0 * alpha, axis=0)
    hi = np.percentile(stacked, 100.0 * (1.0 - alpha), axis=0)
    return [
        BootstrapCI(float(point[j]), float(lo[j]), float(hi[j]), level, resamples, seed)
        for j in range(point.size)
    ]
