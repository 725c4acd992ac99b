"""Monte Carlo data-generating processes and average power / size metrics."""

from __future__ import annotations

import enum
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy import stats as sps

from .bootstrap import BootstrapConfig, run_tests
from .errors import ConfigError, InvalidPriorError
from .panel import HypothesisSpec, Panel, Side, TestKind
from .rng import child_seed, stream

GARCH_CONST, GARCH_PERSIST, GARCH_SHOCK = 1.0, 0.8, 0.15
GARCH_BURN_IN = 50
GARCH_UNCOND = GARCH_CONST / (1.0 - GARCH_PERSIST - GARCH_SHOCK)
FIXED_EFFECT_GAP = 0.01


class PhiPriorKind(str, enum.Enum):
    NORMAL = "normal"
    TRUNC_NORMAL = "truncnormal"
    UNIFORM = "uniform"
    FIXED_EFFECT = "fixed"


class SigmaPriorKind(str, enum.Enum):
    LOGNORMAL = "lognormal"
    UNIFORM = "uniform"
    CONSTANT = "constant"


class Dependence(str, enum.Enum):
    INDEPENDENT = "independent"
    TWO_FACTOR = "two_factor"


class ErrorModel(str, enum.Enum):
    GAUSSIAN = "gaussian"
    GARCH11 = "garch11"


@dataclass(frozen=True)
class PhiPrior:
    kind: PhiPriorKind = PhiPriorKind.NORMAL
    mu: float = 0.0
    tau: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", PhiPriorKind(self.kind))
        if self.tau < 0:
            raise ConfigError("tau must be non-negative")


@dataclass(frozen=True)
class SigmaPrior:
    """Prior on the innovation variance.

    ``lognormal``: ``log sigma^2 ~ N(mu_v, tau_v^2)``; ``uniform``:
    ``log sigma^2 ~ U(2 - 2 sqrt(3) tau_v, 2 + 2 sqrt(3) tau_v)``;
    ``constant``: ``sigma^2 = sigma**2``.
    """

    kind: SigmaPriorKind = SigmaPriorKind.CONSTANT
    mu_v: float = 2.0
    tau_v: float = 0.0
    sigma: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", SigmaPriorKind(self.kind))

    @property
    def cv(self) -> float:
        if self.kind is SigmaPriorKind.LOGNORMAL:
            return self.tau_v / self.mu_v
        if self.kind is SigmaPriorKind.UNIFORM:
            return self.tau_v
        return 0.0


@dataclass(frozen=True)
class DgpConfig:
    N: int = 80
    N1: int = 40
    T: int = 10
    phi0: float = 0.0
    side: Side = Side.TWO_SIDED
    prior_phi: PhiPrior = field(default_factory=PhiPrior)
    prior_sigma: SigmaPrior = field(default_factory=SigmaPrior)
    dependence: Dependence = Dependence.INDEPENDENT
    error_model: ErrorModel = ErrorModel.GAUSSIAN
    seed: int = 0

    def __post_init__(self):
        for name, typ in (("side", Side), ("dependence", Dependence), ("error_model", ErrorModel)):
            object.__setattr__(self, name, typ(getattr(self, name)))
        if isinstance(self.prior_phi, dict):
            object.__setattr__(self, "prior_phi", PhiPrior(**self.prior_phi))
        if isinstance(self.prior_sigma, dict):
            object.__setattr__(self, "prior_sigma", SigmaPrior(**self.prior_sigma))
        if not 0 <= self.N1 <= self.N or self.N < 1:
            raise ConfigError(f"need 0 <= N1 <= N and N >= 1, got N={self.N}, N1={self.N1}")
        if self.T < 3:
            raise ConfigError(f"need T >= 3, got {self.T}")

    def with_mu(self, mu: float) -> "DgpConfig":
        return replace(self, prior_phi=replace(self.prior_phi, mu=float(mu)))

    def to_dict(self) -> dict:
        d = asdict(self)
        return _plain(d)

    @classmethod
    def from_dict(cls, d: dict) -> "DgpConfig":
        known = {f for f in cls.__dataclass_fields__}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown DGP fields: {sorted(extra)}")
        return cls(**d)


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, enum.Enum):
        return obj.value
    return obj


@dataclass(frozen=True)
class PowerPoint:
    """Average power and average type-one error of one test at one ``mu``.

    Standard errors are computed across replications of the per-panel
    fractions, so they account for within-panel dependence.
    """

    kind: TestKind
    mu: float
    avg_power: float
    avg_type1: float
    reps: int
    power_se: float = float("nan")
    type1_se: float = float("nan")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["kind"] = self.kind.value
        return d


def _draw_phi(cfg: DgpConfig, rng) -> np.ndarray:
    p, n1, phi0 = cfg.prior_phi, cfg.N1, cfg.phi0
    left = cfg.side is Side.LEFT
    if p.kind is PhiPriorKind.NORMAL:
        return rng.normal(p.mu, p.tau, n1)
    if p.kind is PhiPriorKind.TRUNC_NORMAL:
        if p.tau == 0:
            if p.mu >= phi0:
                raise InvalidPriorError("point-mass prior at or above phi0 has no alternative mass")
            return np.full(n1, p.mu)
        upper = (phi0 - p.mu) / p.tau
        if sps.norm.cdf(upper) == 0.0:
            raise InvalidPriorError("truncated prior has no mass below phi0")
        return sps.truncnorm.rvs(-np.inf, upper, loc=p.mu, scale=p.tau, size=n1, random_state=rng)
    lo, hi = p.mu - 2 * p.tau, p.mu + 2 * p.tau
    if p.kind is PhiPriorKind.UNIFORM:
        if left:
            if lo >= phi0:
                raise InvalidPriorError("uniform prior lies entirely above phi0")
            hi = min(hi, phi0)
        return rng.uniform(lo, hi, n1)
    # fixed effects: lower half at mu - 2 tau, upper half at mu + 2 tau
    if left:
        if lo >= phi0:
            raise InvalidPriorError("fixed-effect alternatives must lie below phi0")
        hi = min(phi0 - FIXED_EFFECT_GAP, hi)
    half = n1 // 2
    return np.concatenate([np.full(half, lo), np.full(n1 - half, hi)])


def _draw_sigma2(cfg: DgpConfig, rng) -> np.ndarray:
    s, N = cfg.prior_sigma, cfg.N
    if s.kind is SigmaPriorKind.LOGNORMAL:
        return np.exp(rng.normal(s.mu_v, s.tau_v, N))
    if s.kind is SigmaPriorKind.UNIFORM:
        h = 2 * np.sqrt(3) * s.tau_v
        return np.exp(rng.uniform(2 - h, 2 + h, N))
    return np.full(N, float(s.sigma) ** 2)


def draw_parameters(cfg: DgpConfig, rng):
    """Return ``(phi, sigma2, truth)``; the first ``N1`` series are alternatives."""
    phi = np.full(cfg.N, float(cfg.phi0))
    phi[: cfg.N1] = _draw_phi(cfg, rng)
    sigma2 = _draw_sigma2(cfg, rng)
    truth = np.arange(cfg.N) < cfg.N1
    return phi, sigma2, truth


def garch11_shocks(z):
    """Unit-scale GARCH(1,1) path driven by standard normal ``z`` (last axis time).

    Starts at the unconditional variance; the caller discards burn-in.
    """
    eps = np.empty_like(z)
    omega2 = np.full(z.shape[:-1], GARCH_UNCOND)
    for t in range(z.shape[-1]):
        if t:
            omega2 = GARCH_CONST + GARCH_PERSIST * omega2 + GARCH_SHOCK * eps[..., t - 1] ** 2
        eps[..., t] = np.sqrt(omega2) * z[..., t]
    return eps


def generate_errors(cfg: DgpConfig, sigma2, rng, loadings=None) -> np.ndarray:
    """N x T innovations: optional two-factor component plus idiosyncratic noise.

    ``loadings`` (an N x 2 array) overrides the drawn factor loadings.
    Idiosyncratic draws come first, so forcing zero loadings reproduces the
    independent model exactly.
    """
    N, T = cfg.N, cfg.T
    sigma = np.sqrt(np.asarray(sigma2, dtype=float))[:, None]
    if cfg.error_model is ErrorModel.GARCH11:
        eps = garch11_shocks(rng.standard_normal((N, GARCH_BURN_IN + T)))[:, GARCH_BURN_IN:]
    else:
        eps = rng.standard_normal((N, T))
    e = sigma * eps
    if cfg.dependence is Dependence.TWO_FACTOR:
        c = np.column_stack([rng.uniform(0, 1, N), rng.uniform(0, 2, N)])
        f = rng.standard_normal((2, T))
        if loadings is not None:
            c = np.asarray(loadings, dtype=float)
        e = e + c @ f
    return e


def generate_panel(cfg: DgpConfig, rng):
    """Simulate ``y[t] = phi * y[t-1] + e[t]`` from ``y[0] = 0``; returns ``(Panel, truth)``."""
    phi, sigma2, truth = draw_parameters(cfg, rng)
    e = generate_errors(cfg, sigma2, rng)
    y = np.empty_like(e)
    prev = np.zeros(cfg.N)
    for t in range(cfg.T):
        prev = phi * prev + e[:, t]
        y[:, t] = prev
    return Panel(y), truth


def _one_rep(args):
    cfg, spec, kinds, bcfg, r = args
    panel, truth = generate_panel(cfg, stream(cfg.seed, r))
    bcfg = replace(bcfg, seed=child_seed(bcfg.seed, r), threads=1)
    decisions = {k: [] for k in kinds}
    for res in run_tests(panel, spec, kinds, bcfg):
        decisions[res.kind].append(res.reject)
    counts = {}
    for k, rej in decisions.items():
        rej = np.array(rej, dtype=bool)
        counts[k] = (int(np.sum(rej & truth)), int(np.sum(rej & ~truth))) if rej.size else None
    return counts


def evaluate(cfg: DgpConfig, spec: HypothesisSpec, kinds: Sequence, bootstrap_cfg: BootstrapConfig, reps: int, threads: int = 1) -> list[PowerPoint]:
    """Average power and type-one error over ``reps`` simulated panels.

    Replication ``r`` draws its panel from stream ``(cfg.seed, r)`` and its
    bootstrap from a seed derived from ``(bootstrap_cfg.seed, r)``, so the
    output does not depend on ``threads``.
    """
    if reps < 1:
        raise ConfigError("reps must be at least 1")
    if cfg.side is not spec.side or cfg.phi0 != spec.phi0:
        raise ConfigError("DGP side/phi0 disagree with the hypothesis")
    kinds = [TestKind(k) for k in kinds]
    spec.check_kinds(kinds)
    jobs = [(cfg, spec, kinds, bootstrap_cfg, r) for r in range(reps)]
    if threads > 1:
        with ProcessPoolExecutor(threads) as ex:
            per_rep = list(ex.map(_one_rep, jobs, chunksize=max(1, reps // (4 * threads))))
    else:
        per_rep = [_one_rep(j) for j in jobs]
    n1, n0 = cfg.N1, cfg.N - cfg.N1
    points = []
    for k in kinds:
        rows = np.array([c[k] for c in per_rep if c[k] is not None], dtype=float).reshape(-1, 2)
        used = len(rows)
        if used < reps:
            warnings.warn(f"{k.value}: {reps - used} of {reps} replications failed")
        if used == 0:
            points.append(PowerPoint(k, cfg.prior_phi.mu, float("nan"), float("nan"), 0))
            continue
        power = rows[:, 0] / n1 if n1 else np.full(used, np.nan)
        type1 = rows[:, 1] / n0 if n0 else np.full(used, np.nan)
        points.append(
            PowerPoint(
                k,
                cfg.prior_phi.mu,
                float(rows[:, 0].sum() / (used * n1)) if n1 else float("nan"),
                float(rows[:, 1].sum() / (used * n0)) if n0 else float("nan"),
                used,
                _se(power),
                _se(type1),
            )
        )
    return points


def _se(x) -> float:
    if len(x) < 2 or np.isnan(x).all():
        return float("nan")
    return float(np.std(x, ddof=1) / np.sqrt(len(x)))


def power_curve(cfg_template: DgpConfig, mu_grid, spec, kinds, bootstrap_cfg, reps, threads: int = 1) -> list[PowerPoint]:
    """:func:`evaluate` at each ``mu`` in ``mu_grid`` with every other setting fixed."""
    mu_grid = list(mu_grid)
    if not mu_grid:
        raise ConfigError("mu grid is empty")
    out = []
    for mu in mu_grid:
        out.extend(evaluate(cfg_template.with_mu(mu), spec, kinds, bootstrap_cfg, reps, threads))
    return out
