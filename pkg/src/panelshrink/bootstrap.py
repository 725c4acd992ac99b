"""Residual bootstrap under the null and the end-to-end test runner."""

from __future__ import annotations

import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError, NoConvergenceError, PanelShrinkError
from .estimators import SeriesStats, fit_series, shrink_variances
from .hyperparams import (
    HyperParams,
    VarianceMode,
    estimate_one_sided,
    estimate_two_sided,
    mode_variances,
)
from .panel import HypothesisSpec, Panel, Side, TestKind
from .rng import stream
from .statistics import compute_stat

log = logging.getLogger(__name__)


class KindFailedWarning(UserWarning):
    pass


class HyperParamWarning(UserWarning):
    pass


@dataclass(frozen=True)
class BootstrapConfig:
    replicates: int = 500
    seed: int = 0
    threads: int = 1
    chunk: int = 50
    center_residuals: bool = True

    def __post_init__(self):
        if self.replicates < 100:
            raise ConfigError(f"need at least 100 bootstrap replicates, got {self.replicates}")
        if self.threads < 1 or self.chunk < 1:
            raise ConfigError("threads and chunk must be positive")


@dataclass(frozen=True)
class TestResult:
    series_id: str
    kind: TestKind
    statistic: float
    critical_value: float
    reject: bool
    tail: str = "upper"
    fallback_used: bool = False
    hyperparams_used: HyperParams | None = None

    __test__ = False

    def to_dict(self) -> dict:
        return {
            "series_id": self.series_id,
            "kind": self.kind.value,
            "statistic": self.statistic,
            "critical_value": self.critical_value,
            "reject": self.reject,
            "tail": self.tail,
            "fallback_used": self.fallback_used,
            "hyperparams_used": None if self.hyperparams_used is None else self.hyperparams_used.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TestResult":
        hp = d.get("hyperparams_used")
        return cls(
            str(d["series_id"]),
            TestKind(d["kind"]),
            float(d["statistic"]),
            float(d["critical_value"]),
            bool(d["reject"]),
            d.get("tail", "upper"),
            bool(d.get("fallback_used", False)),
            None if hp is None else HyperParams.from_dict(hp),
        )


def residuals(y, phi_hat):
    """Fitted residuals ``y[t] - phi_hat * y[t-1]`` for ``t = 2..T``."""
    y = np.asarray(y, dtype=float)
    return y[..., 1:] - np.asarray(phi_hat)[..., None] * y[..., :-1]


def _rebuild(first, shocks, phi0):
    out = np.empty(shocks.shape[:-1] + (shocks.shape[-1] + 1,))
    out[..., 0] = first
    for t in range(shocks.shape[-1]):
        out[..., t + 1] = phi0 * out[..., t] + shocks[..., t]
    return out


def _resampling_pool(y, phi_hats, center):
    resid = residuals(y, phi_hats)
    if center:
        resid = resid - resid.mean(axis=-1, keepdims=True)
    return resid


def _draw_shocks(resid, rng):
    N, m = resid.shape
    idx = rng.integers(0, m, size=(N, m))
    return np.take_along_axis(resid, idx, axis=1)


def bootstrap_panel(panel: Panel, phi_hats, phi0: float, rng, center: bool = True) -> Panel:
    """One null-hypothesis resample of ``panel``.

    Shocks are drawn with replacement from each series' own residuals
    (demeaned when ``center``) and the series is rebuilt from its observed
    first value with slope ``phi0``.
    """
    resid = _resampling_pool(panel.data, phi_hats, center)
    data = _rebuild(panel.data[:, 0], _draw_shocks(resid, rng), phi0)
    return Panel(data, panel.series_ids)


def pooled_quantile(values, q: float) -> float:
    """``k``-th order statistic with ``k = ceil(q * M)`` (at least 1)."""
    v = np.sort(np.asarray(values, dtype=float).ravel())
    if v.size == 0:
        raise PanelShrinkError("no finite bootstrap statistics to take a quantile of")
    k = min(max(math.ceil(q * v.size - 1e-9), 1), v.size)
    return float(v[k - 1])


def _tail_level(tail: str, alpha: float) -> float:
    return 1.0 - alpha if tail == "upper" else alpha


def _kind_inputs(kind, hp_by_kind, stats, sigma2_E):
    return (sigma2_E if kind.shrinks_variance else None), hp_by_kind.get(kind)


def _batch_statistics(data, spec, kinds, hp_by_kind):
    """Statistic values for a (replicates, N, T) batch; one flat array per kind."""
    stats = fit_series(data, spec.phi0, check=False)
    with np.errstate(invalid="ignore", divide="ignore"):
        sigma2_E = shrink_variances(stats.sigma2_hat, stats.T).sigma2_E
        out = {}
        for kind in kinds:
            s2e, hp = _kind_inputs(kind, hp_by_kind, stats, sigma2_E)
            out[kind] = compute_stat(kind, stats, spec.side, s2e, hp, spec.phi0).value.ravel()
    return out


def bootstrap_pools(panel, spec, kinds, hp_by_kind, cfg: BootstrapConfig, phi_hats=None):
    """Pooled bootstrap statistics for every kind, sharing the resamples.

    Replicate ``r`` always uses stream ``(cfg.seed, r)``, so the pools do
    not depend on ``cfg.threads`` or ``cfg.chunk``.  Non-finite values
    (series whose resample is identically zero) are dropped.
    """
    if phi_hats is None:
        phi_hats = fit_series(panel.data, spec.phi0).phi_hat
    resid = _resampling_pool(panel.data, phi_hats, cfg.center_residuals)
    first = panel.data[:, 0]

    def run_chunk(start):
        stop = min(start + cfg.chunk, cfg.replicates)
        shocks = np.stack([_draw_shocks(resid, stream(cfg.seed, r)) for r in range(start, stop)])
        return _batch_statistics(_rebuild(first, shocks, spec.phi0), spec, kinds, hp_by_kind)

    starts = range(0, cfg.replicates, cfg.chunk)
    if cfg.threads > 1:
        with ThreadPoolExecutor(cfg.threads) as ex:
            parts = list(ex.map(run_chunk, starts))
    else:
        parts = [run_chunk(s) for s in starts]
    pools = {}
    for kind in kinds:
        v = np.concatenate([p[kind] for p in parts])
        pools[kind] = v[np.isfinite(v)]
    return pools


def critical_value(panel: Panel, spec: HypothesisSpec, kind, hp: HyperParams | None, cfg: BootstrapConfig) -> float:
    """Bootstrap critical value for one test kind.

    ``hp`` must come from the observed panel; it is held fixed across
    replicates while shrunk variances are recomputed on each resample.
    """
    kind = TestKind(kind)
    spec.check_kinds([kind])
    hp_by_kind = {kind: hp} if hp is not None else {}
    pool = bootstrap_pools(panel, spec, [kind], hp_by_kind, cfg)[kind]
    tail = _statistic_tail(kind, spec, hp)
    return pooled_quantile(pool, _tail_level(tail, spec.alpha))


def _statistic_tail(kind, spec, hp):
    if spec.side is Side.TWO_SIDED:
        return "upper"
    if kind.shrinks_mean and hp is not None and hp.tau2 <= 0:
        return "upper"
    return "lower"


def estimate_hyperparams(stats: SeriesStats, spec: HypothesisSpec, mode, sigma2_E) -> HyperParams:
    """Two-sided normal or one-sided truncated-normal estimate for ``mode``.

    Non-convergence of the one-sided iteration is downgraded to a warning
    and the last iterate is used.
    """
    v = mode_variances(stats, mode, sigma2_E)
    if spec.side is Side.TWO_SIDED:
        return estimate_two_sided(stats, spec.phi0, v, mode)
    try:
        return estimate_one_sided(stats, spec.phi0, v, mode)
    except NoConvergenceError as exc:
        warnings.warn(f"one-sided hyper-parameters: {exc}; using last iterate", HyperParamWarning)
        return exc.hyperparams


def run_tests(panel: Panel, spec: HypothesisSpec, kinds: Sequence, cfg: BootstrapConfig) -> list[TestResult]:
    """Statistics, bootstrap critical values and decisions for every series.

    Results are ordered by kind, then by series.  A kind whose computation
    fails is skipped with a :class:`KindFailedWarning`; the others proceed.
    """
    kinds = [TestKind(k) for k in kinds]
    spec.check_kinds(kinds)
    if not kinds:
        return []
    stats = fit_series(panel.data, spec.phi0)
    sigma2_E = shrink_variances(stats.sigma2_hat, stats.T).sigma2_E

    hp_cache: dict[VarianceMode, HyperParams] = {}
    hp_by_kind: dict[TestKind, HyperParams] = {}
    observed = {}
    for kind in kinds:
        try:
            hp = None
            if kind.shrinks_mean:
                mode = VarianceMode.SHRUNK if kind.shrinks_variance else VarianceMode.RAW
                if mode not in hp_cache:
                    hp_cache[mode] = estimate_hyperparams(stats, spec, mode, sigma2_E)
                hp = hp_by_kind[kind] = hp_cache[mode]
            s2e, _ = _kind_inputs(kind, hp_by_kind, stats, sigma2_E)
            observed[kind] = compute_stat(kind, stats, spec.side, s2e, hp, spec.phi0)
        except PanelShrinkError as exc:
            warnings.warn(f"{kind.value}: {exc}", KindFailedWarning)

    good = list(observed)
    pools = bootstrap_pools(panel, spec, good, hp_by_kind, cfg, stats.phi_hat) if good else {}
    results = []
    for kind in good:
        st = observed[kind]
        try:
            crit = pooled_quantile(pools[kind], _tail_level(st.tail, spec.alpha))
        except PanelShrinkError as exc:
            warnings.warn(f"{kind.value}: {exc}", KindFailedWarning)
            continue
        reject = st.rejects(crit)
        for j, sid in enumerate(panel.series_ids):
            results.append(
                TestResult(
                    sid,
                    kind,
                    float(st.value[j]),
                    crit,
                    bool(reject[j]),
                    st.tail,
                    st.fallback_used,
                    hp_by_kind.get(kind),
                )
            )
    return results
