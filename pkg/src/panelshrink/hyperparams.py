"""Empirical-Bayes estimates of the prior on the AR coefficients.

The alternative coefficients are modelled as ``N(mu, tau2)`` (two-sided) or
that normal truncated to ``(-inf, phi0)`` (left one-sided), mixed with a
point mass at ``phi0`` of weight ``1 - theta1``.  ``mu`` and ``tau2`` come
from moment equations given ``theta1``; ``theta1`` maximises a pseudo
likelihood over a fixed grid.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.special import log_ndtr

from .errors import NoConvergenceError, NonFiniteLikelihoodError
from .estimators import SeriesStats, floor_variances

THETA_GRID = np.arange(1, 101) / 100.0
TOL = 1e-6
MAX_ITER = 200
MIN_VAR_FACTOR = 1e-8
TIE_RTOL = 1e-12
_LOG_SQRT_2PI = 0.5 * np.log(2 * np.pi)
_ASYMPTOTIC_BELOW = -30.0


class Family(str, enum.Enum):
    NORMAL = "normal"
    TRUNC_NORMAL = "truncnormal"


class VarianceMode(str, enum.Enum):
    RAW = "raw"
    SHRUNK = "shrunk"


@dataclass(frozen=True)
class HyperParams:
    mu: float
    tau2: float
    theta1: float
    family: Family = Family.NORMAL
    variance_mode: VarianceMode = VarianceMode.RAW
    iterations: int = 0
    converged: bool = True

    @property
    def tau(self) -> float:
        return float(np.sqrt(self.tau2))

    def to_dict(self) -> dict:
        return {
            "mu": self.mu,
            "tau2": self.tau2,
            "theta1": self.theta1,
            "family": self.family.value,
            "variance_mode": self.variance_mode.value,
            "iterations": self.iterations,
            "converged": self.converged,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "HyperParams":
        return cls(
            float(d["mu"]),
            float(d["tau2"]),
            float(d["theta1"]),
            Family(d["family"]),
            VarianceMode(d["variance_mode"]),
            int(d.get("iterations", 0)),
            bool(d.get("converged", True)),
        )


@dataclass(frozen=True)
class TruncNormMoments:
    alpha: float
    lam: float
    delta: float


@dataclass(frozen=True)
class MomentSummary:
    m1: float
    m2: float
    mean_var_over_S: float


def truncnorm_lambda_delta(alpha: float) -> TruncNormMoments:
    """``lambda = pdf(alpha) / cdf(alpha)`` and ``delta = lambda (alpha + lambda)``.

    Below ``alpha = -30`` both come from the asymptotic expansion of the
    inverse Mills ratio, which avoids the cancellation in ``alpha + lambda``.
    """
    alpha = float(alpha)
    if alpha < _ASYMPTOTIC_BELOW:
        x = -alpha
        x2 = x * x
        # alpha + lambda = 1/x - 2/x^3 + 10/x^5 - 74/x^7 + 706/x^9 - 8162/x^11
        gap = (1 - (2 - (10 - (74 - (706 - 8162 / x2) / x2) / x2) / x2) / x2) / x
        lam = x + gap
        return TruncNormMoments(alpha, lam, lam * gap)
    lam = float(np.exp(-0.5 * alpha * alpha - _LOG_SQRT_2PI - log_ndtr(alpha)))
    return TruncNormMoments(alpha, lam, lam * (alpha + lam))


def mode_variances(stats: SeriesStats, mode, sigma2_E=None):
    if VarianceMode(mode) is VarianceMode.SHRUNK:
        if sigma2_E is None:
            raise ValueError("shrunk variance mode needs sigma2_E")
        return np.asarray(sigma2_E, dtype=float)
    return floor_variances(np.atleast_1d(stats.sigma2_hat))


def moments(stats: SeriesStats, variances) -> MomentSummary:
    ph = np.atleast_1d(stats.phi_hat)
    return MomentSummary(
        float(ph.mean()),
        float(np.mean(ph**2)),
        float(np.mean(np.asarray(variances) / np.atleast_1d(stats.S))),
    )


def solve_two_sided(ms: MomentSummary, theta1, phi0: float):
    """Moment solution for ``(mu, tau2)`` given ``theta1``; ``tau2`` clamps at 0.

    ``theta1`` may be an array, in which case arrays are returned.
    """
    theta1 = np.asarray(theta1, dtype=float)
    mu = (ms.m1 - (1 - theta1) * phi0) / theta1
    tau2 = (ms.m2 - (1 - theta1) * phi0**2 - ms.mean_var_over_S) / theta1 - mu**2
    tau2 = np.maximum(tau2, 0.0)
    if mu.ndim == 0:
        return float(mu), float(tau2)
    return mu, tau2


def _mixture_loglik(theta1, log_alt, log_null):
    theta1 = np.asarray(theta1, dtype=float)[..., None]
    with np.errstate(divide="ignore"):
        terms = np.logaddexp(np.log(theta1) + log_alt, np.log1p(-theta1) + log_null)
    total = terms.sum(axis=-1)
    if not np.all(np.isfinite(total)):
        raise NonFiniteLikelihoodError("pseudo likelihood is not finite")
    return total


def _log_null_component(stats, v, phi0):
    ph, S = np.atleast_1d(stats.phi_hat), np.atleast_1d(stats.S)
    return -0.5 * S * (ph - phi0) ** 2 / v


def profile_loglik_two_sided(theta1, stats: SeriesStats, phi0: float, variances):
    """Pseudo log-likelihood with ``(mu, tau2)`` profiled out by the moment
    equations; additive constants dropped.  Vectorised over ``theta1``."""
    v = np.asarray(variances, dtype=float)
    ph, S = np.atleast_1d(stats.phi_hat), np.atleast_1d(stats.S)
    ms = moments(stats, v)
    mu, tau2 = solve_two_sided(ms, np.atleast_1d(theta1), phi0)
    denom = S * tau2[:, None] + v
    log_alt = 0.5 * np.log(v / denom) - 0.5 * S * (ph - mu[:, None]) ** 2 / denom
    out = _mixture_loglik(theta1, log_alt, _log_null_component(stats, v, phi0))
    return float(out[0]) if np.ndim(theta1) == 0 else out


def truncated_loglik(theta1, stats: SeriesStats, phi0: float, variances, mu, tau2):
    """Pseudo log-likelihood under the truncated prior at fixed ``(mu, tau2)``.

    At ``tau2 == 0`` the truncation terms vanish (point mass at ``mu``).
    """
    v = np.asarray(variances, dtype=float)
    ph, S = np.atleast_1d(stats.phi_hat), np.atleast_1d(stats.S)
    denom = S * tau2 + v
    log_alt = 0.5 * np.log(v / denom) - 0.5 * S * (ph - mu) ** 2 / denom
    if tau2 > 0:
        beta = tau2 * S / denom
        phi_star = beta * ph + (1 - beta) * mu
        t_o = (phi_star - phi0) * np.sqrt(S / (v * beta))
        log_alt = log_alt + log_ndtr(-t_o) - log_ndtr((phi0 - mu) / np.sqrt(tau2))
    out = _mixture_loglik(np.atleast_1d(theta1), log_alt, _log_null_component(stats, v, phi0))
    return float(out[0]) if np.ndim(theta1) == 0 else out


def _grid_argmax(values) -> float:
    """Smallest grid ``theta1`` whose value is within rounding of the maximum."""
    values = np.asarray(values)
    best = values.max()
    tied = values >= best - TIE_RTOL * max(1.0, abs(best))
    return float(THETA_GRID[int(np.argmax(tied))])


def estimate_two_sided(stats: SeriesStats, phi0: float, variances, mode=VarianceMode.RAW) -> HyperParams:
    ll = profile_loglik_two_sided(THETA_GRID, stats, phi0, variances)
    theta1 = _grid_argmax(ll)
    mu, tau2 = solve_two_sided(moments(stats, variances), theta1, phi0)
    return HyperParams(mu, tau2, theta1, Family.NORMAL, VarianceMode(mode))


def estimate_one_sided(stats: SeriesStats, phi0: float, variances, mode=VarianceMode.RAW) -> HyperParams:
    """Alternate a grid search for ``theta1`` with the truncated-normal
    moment update of ``(mu, tau2)``, starting from the two-sided estimate.

    Raises :class:`NoConvergenceError` (carrying the last iterate) after
    ``MAX_ITER`` rounds.
    """
    mode = VarianceMode(mode)
    start = estimate_two_sided(stats, phi0, variances, mode)
    mu, tau2, theta1 = start.mu, start.tau2, start.theta1
    if tau2 <= 0:
        return HyperParams(mu, 0.0, theta1, Family.TRUNC_NORMAL, mode, 0, True)
    ms = moments(stats, variances)
    for it in range(1, MAX_ITER + 1):
        theta_new = _grid_argmax(truncated_loglik(THETA_GRID, stats, phi0, variances, mu, tau2))
        tau = np.sqrt(tau2)
        tm = truncnorm_lambda_delta((phi0 - mu) / tau)
        untruncated_mean = (ms.m1 - (1 - theta_new) * phi0) / theta_new
        mu_new = untruncated_mean + tm.lam * tau
        second = (ms.m2 - (1 - theta_new) * phi0**2 - ms.mean_var_over_S) / theta_new
        tau2_new = max(0.0, (second - untruncated_mean**2) / max(1.0 - tm.delta, MIN_VAR_FACTOR))
        step = max(abs(mu_new - mu), abs(tau2_new - tau2), abs(theta_new - theta1))
        mu, tau2, theta1 = float(mu_new), float(tau2_new), theta_new
        # a collapsed spread is final: iterating on from a point mass drifts off
        if tau2 == 0.0 or step < TOL:
            return HyperParams(mu, tau2, theta1, Family.TRUNC_NORMAL, mode, it, True)
    last = HyperParams(mu, tau2, theta1, Family.TRUNC_NORMAL, mode, MAX_ITER, False)
    raise NoConvergenceError(last, MAX_ITER)
