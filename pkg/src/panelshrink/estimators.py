"""Per-series sufficient statistics and log-scale James-Stein variance shrinkage.

Every function accepts arrays whose last axis is time (``fit_series``) or
the series index (``shrink_variances``); leading axes are treated as
independent batches, which is how bootstrap replicates are processed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import digamma, polygamma

from .errors import DegenerateSeriesError, InvalidDfError, TooShortError

FLOOR_REL = 1e-12


@dataclass(frozen=True)
class SeriesStats:
    """OLS slope, residual variance, lagged sum of squares and null variance.

    Fields are floats for a single series and arrays for a batch.
    """

    phi_hat: np.ndarray
    sigma2_hat: np.ndarray
    S: np.ndarray
    sigma2_null: np.ndarray
    T: int
    phi0: float

    def __len__(self):
        return np.shape(self.phi_hat)[-1] if np.ndim(self.phi_hat) else 1

    def take(self, index):
        """Subset along the series axis."""
        return SeriesStats(
            self.phi_hat[..., index],
            self.sigma2_hat[..., index],
            self.S[..., index],
            self.sigma2_null[..., index],
            self.T,
            self.phi0,
        )


@dataclass(frozen=True)
class LjsMoments:
    mean_offset: float
    variance: float


@dataclass(frozen=True)
class ShrunkVariances:
    sigma2_E: np.ndarray
    shrink_factor: np.ndarray
    x_bar: np.ndarray


def fit_series(y, phi0: float, *, check: bool = True) -> SeriesStats:
    """Regress ``y[..., t]`` on ``y[..., t-1]`` without intercept.

    With ``check=False`` degenerate series (all lagged values zero) yield
    NaN slopes instead of raising; the bootstrap relies on this.
    """
    y = np.asarray(y, dtype=float)
    T = y.shape[-1]
    if T < 3:
        raise TooShortError(T)
    lag, cur = y[..., :-1], y[..., 1:]
    S = np.einsum("...t,...t->...", lag, lag)
    if check and np.any(S == 0):
        idx = np.flatnonzero(np.atleast_1d(S == 0))
        raise DegenerateSeriesError(int(idx[0]) if y.ndim > 1 else None)
    with np.errstate(invalid="ignore", divide="ignore"):
        phi_hat = np.einsum("...t,...t->...", cur, lag) / S
    resid = cur - phi_hat[..., None] * lag
    resid0 = cur - phi0 * lag
    sigma2_hat = np.einsum("...t,...t->...", resid, resid) / (T - 1)
    sigma2_null = np.einsum("...t,...t->...", resid0, resid0) / (T - 1)
    if y.ndim == 1:
        phi_hat, sigma2_hat, S, sigma2_null = (
            float(v) for v in (phi_hat, sigma2_hat, S, sigma2_null)
        )
    return SeriesStats(phi_hat, sigma2_hat, S, sigma2_null, T, float(phi0))


def ljs_moments(T: int) -> LjsMoments:
    """Mean and variance of ``log(chi2_df / df)`` with ``df = T - 2``."""
    if T < 3:
        raise InvalidDfError(T)
    half = (T - 2) / 2.0
    mean_offset = float(digamma(half) + np.log(2.0) - np.log(T - 2))
    return LjsMoments(mean_offset, float(polygamma(1, half)))


def floor_variances(sigma2):
    """Replace exact zeros by ``1e-12 * max(1, mean of the nonzero entries)``.

    Reduction is over the last axis, so each batch row is floored on its own.
    """
    s2 = np.asarray(sigma2, dtype=float)
    zero = s2 <= 0
    if not zero.any():
        return s2
    nz = np.where(zero, 0.0, s2)
    count = np.maximum((~zero).sum(axis=-1, keepdims=True), 1)
    eps = FLOOR_REL * np.maximum(1.0, nz.sum(axis=-1, keepdims=True) / count)
    return np.where(zero, eps, s2)


def shrink_variances(sigma2_hats, T: int) -> ShrunkVariances:
    """Exponential Lindley-James-Stein estimate of each series' variance.

    The positive-part multiplier is additionally capped at 1, which only
    matters for N < 3, and is 0 when all log variances coincide.
    """
    s2 = floor_variances(sigma2_hats)
    m = ljs_moments(T)
    N = s2.shape[-1]
    X = np.log(s2) - m.mean_offset
    x_bar = X.mean(axis=-1, keepdims=True)
    dev = X - x_bar
    ss = np.einsum("...n,...n->...", dev, dev)[..., None]
    with np.errstate(divide="ignore", invalid="ignore"):
        raw = 1.0 - (N - 3) * m.variance / ss
    factor = np.where(ss > 0, np.clip(raw, 0.0, 1.0), 0.0)
    sigma2_E = np.exp(x_bar + factor * dev)
    return ShrunkVariances(sigma2_E, factor[..., 0], x_bar[..., 0])
