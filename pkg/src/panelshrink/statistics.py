"""t statistic and its shrinkage variants.

All six shrinkage statistics are the same kernel,

    (phi* - phi0) * sqrt(S / (v * beta)),   beta = tau2 S / (tau2 S + v),

evaluated with ``v`` either the per-series residual variance or its
shrunk counterpart, and with ``phi*`` either the OLS slope (beta = 1) or
its precision-weighted pull toward ``mu``.  Two-sided tests square the
kernel and reject large values; left one-sided tests keep its sign and
reject small values.

When the prior spread is estimated as zero the kernel is undefined and the
un-reduced likelihood-ratio form is used instead (``fallback_used``); that
form rejects large values on both sides.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import log_ndtr

from .errors import (
    DegenerateSeriesError,
    InvalidTauError,
    MissingHyperParamsError,
    MissingShrunkVarianceError,
)
from .estimators import SeriesStats, floor_variances
from .panel import Side, TestKind

# exp() of anything above this overflows a double
_MAX_LOG = 700.0


@dataclass(frozen=True)
class ShrunkMean:
    beta: np.ndarray
    phi_star: np.ndarray


@dataclass(frozen=True)
class TestStatistic:
    kind: TestKind
    value: np.ndarray
    fallback_used: bool = False
    tail: str = "upper"

    __test__ = False

    def rejects(self, crit) -> np.ndarray:
        if self.tail == "upper":
            return self.value > crit
        return self.value < crit


def _positive(variance):
    variance = np.asarray(variance, dtype=float)
    if np.any(variance <= 0):
        raise DegenerateSeriesError(reason="variance estimate is zero")
    return variance


def t_stat(stats: SeriesStats, phi0: float | None = None):
    """Classical ``(phi_hat - phi0) * sqrt(S / sigma2_hat)``."""
    phi0 = stats.phi0 if phi0 is None else phi0
    v = _positive(stats.sigma2_hat)
    return (stats.phi_hat - phi0) * np.sqrt(stats.S / v)


def shrink_mean(stats: SeriesStats, variance, mu: float, tau2: float) -> ShrunkMean:
    if tau2 <= 0:
        raise InvalidTauError(f"tau2 must be positive here, got {tau2}")
    ts = tau2 * stats.S
    beta = ts / (ts + variance)
    return ShrunkMean(beta, beta * stats.phi_hat + (1.0 - beta) * mu)


def shrunk_t(stats: SeriesStats, variance, mean_params=None, phi0: float | None = None):
    """Return ``(value, ShrunkMean or None)``.

    ``mean_params`` is an optional ``(mu, tau2)`` pair with ``tau2 > 0``.
    """
    phi0 = stats.phi0 if phi0 is None else phi0
    v = _positive(variance)
    if mean_params is None:
        return (stats.phi_hat - phi0) * np.sqrt(stats.S / v), None
    mu, tau2 = mean_params
    sm = shrink_mean(stats, v, mu, tau2)
    return (sm.phi_star - phi0) * np.sqrt(stats.S / (v * sm.beta)), sm


def log_full_form(stats: SeriesStats, variance, mu, tau2, phi0=None):
    """Log of the un-reduced two-sided ratio (square-root factor kept).

    ``0.5 log(v / (S tau2 + v)) + S (phi_hat - phi0)^2 / (2 v)
    - (phi_hat - mu)^2 S / (2 (S tau2 + v))``; valid for ``tau2 >= 0``.
    """
    phi0 = stats.phi0 if phi0 is None else phi0
    v = np.asarray(variance, dtype=float)
    S, ph = stats.S, stats.phi_hat
    denom = S * tau2 + v
    return (
        0.5 * np.log(v / denom)
        + 0.5 * S * (ph - phi0) ** 2 / v
        - 0.5 * (ph - mu) ** 2 * S / denom
    )


def log_full_form_left(stats: SeriesStats, variance, mu, tau2, phi0=None, exact_ratio=False):
    """Log of the un-reduced one-sided ratio under a prior truncated at ``phi0``.

    With ``exact_ratio`` the null-variance factor
    ``(sigma2_null / sigma2_hat)^((T-1)/2)`` is used as is; otherwise it is
    replaced by its exponential approximation.  At ``tau2 == 0`` the
    truncation terms reduce to constants and are dropped.
    """
    phi0 = stats.phi0 if phi0 is None else phi0
    v = np.asarray(variance, dtype=float)
    S, ph = stats.S, stats.phi_hat
    if exact_ratio:
        ratio = 0.5 * (stats.T - 1) * np.log1p(S * (ph - phi0) ** 2 / ((stats.T - 1) * v))
    else:
        ratio = 0.5 * S * (ph - phi0) ** 2 / v
    denom = S * tau2 + v
    out = ratio + 0.5 * np.log(v / denom) - 0.5 * (ph - mu) ** 2 * S / denom
    if tau2 > 0:
        value, _ = shrunk_t(stats, v, (mu, tau2), phi0)
        out = out + log_ndtr(-value) - log_ndtr((phi0 - mu) / np.sqrt(tau2))
    return out


def _variance_for(kind: TestKind, stats: SeriesStats, sigma2_E):
    if kind.shrinks_variance:
        if sigma2_E is None:
            raise MissingShrunkVarianceError(f"{kind.value} needs shrunk variances")
        return np.asarray(sigma2_E, dtype=float)
    return floor_variances(np.atleast_1d(stats.sigma2_hat)).reshape(np.shape(stats.sigma2_hat))


def _mean_params(kind: TestKind, hp):
    if not kind.shrinks_mean:
        return None
    if hp is None:
        raise MissingHyperParamsError(f"{kind.value} needs hyper-parameters")
    return hp.mu, hp.tau2


def two_sided_stat(kind, stats, sigma2_E=None, hp=None, phi0=None) -> TestStatistic:
    kind = TestKind(kind)
    if not kind.compatible_with(Side.TWO_SIDED):
        raise ValueError(f"{kind.value} is not a two-sided statistic")
    v = _variance_for(kind, stats, sigma2_E)
    mp = _mean_params(kind, hp)
    if mp is not None and mp[1] <= 0:
        return two_sided_fallback_stat(kind, stats, v, mp[0], phi0)
    value, _ = shrunk_t(stats, v, mp, phi0)
    return TestStatistic(kind, value**2)


def two_sided_fallback_stat(kind, stats, sigma2_E, mu, phi0=None) -> TestStatistic:
    """Full-form statistic at zero prior spread; large values reject."""
    kind = TestKind(kind)
    if kind not in (TestKind.FSM, TestKind.FSS):
        raise ValueError(f"no fallback form for {kind.value}")
    v = _positive(sigma2_E)
    log_value = log_full_form(stats, v, mu, 0.0, phi0)
    return TestStatistic(kind, np.exp(np.minimum(log_value, _MAX_LOG)), True, "upper")


def one_sided_stat(kind, stats, sigma2_E=None, hp=None, phi0=None) -> TestStatistic:
    kind = TestKind(kind)
    if not kind.compatible_with(Side.LEFT):
        raise ValueError(f"{kind.value} is not a one-sided statistic")
    v = _variance_for(kind, stats, sigma2_E)
    mp = _mean_params(kind, hp)
    if mp is not None and mp[1] <= 0:
        return one_sided_fallback_stat(kind, stats, v, mp[0], phi0)
    value, _ = shrunk_t(stats, v, mp, phi0)
    return TestStatistic(kind, value, False, "lower")


def one_sided_fallback_stat(kind, stats, sigma2_E, mu, phi0=None) -> TestStatistic:
    """Full one-sided form at zero prior spread; large values reject.

    The prior mean is capped at ``phi0`` since a point mass above the null
    carries no alternative.
    """
    kind = TestKind(kind)
    if kind not in (TestKind.RFSM, TestKind.RFSS):
        raise ValueError(f"no fallback form for {kind.value}")
    phi0 = stats.phi0 if phi0 is None else phi0
    v = _positive(sigma2_E)
    log_value = log_full_form_left(
        stats, v, min(mu, phi0), 0.0, phi0, exact_ratio=kind is TestKind.RFSM
    )
    return TestStatistic(kind, np.exp(np.minimum(log_value, _MAX_LOG)), True, "upper")


def compute_stat(kind, stats, side, sigma2_E=None, hp=None, phi0=None) -> TestStatistic:
    if Side(side) is Side.TWO_SIDED:
        return two_sided_stat(kind, stats, sigma2_E, hp, phi0)
    return one_sided_stat(kind, stats, sigma2_E, hp, phi0)
