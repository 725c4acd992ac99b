import numpy as np
import pytest

import panelshrink.hyperparams as hpmod
from oracles import lambda_delta_mp, profile_loglik_mp
from panelshrink.errors import NoConvergenceError
from panelshrink.estimators import SeriesStats, fit_series
from panelshrink.hyperparams import (
    Family,
    HyperParams,
    MomentSummary,
    VarianceMode,
    estimate_one_sided,
    estimate_two_sided,
    moments,
    profile_loglik_two_sided,
    solve_two_sided,
    truncnorm_lambda_delta,
)
from panelshrink.simulation import DgpConfig, PhiPrior, SigmaPrior, generate_panel

REL = 1e-9

# Frozen from oracles.py (mpmath at 40 digits).
LAMBDA_DELTA = {
    0.0: (0.7978845608028654, 0.6366197723675814),
    -1.0: (1.525135276160981, 0.8009023344296512),
    -30.0: (30.033259667433676, 0.9988962284881099),
    -31.0: (31.032191276777723, 0.9989658584100466),
    -50.0: (50.019984031905636, 0.999600956813196),
    5.0: (1.4867199409049056e-06, 7.433601914860711e-06),
}
PROFILE_SINGLE = -9.000000000000002
PROFILE_THREE = -0.7505784808274988


def stats_of(phi, v, S, phi0, T=10):
    phi, v, S = (np.asarray(x, dtype=float) for x in (phi, v, S))
    return SeriesStats(phi, v, S, v + (phi - phi0) ** 2 * S / (T - 1), T, phi0)


@pytest.mark.parametrize("alpha", sorted(LAMBDA_DELTA))
def test_lambda_delta_frozen(alpha):
    tm = truncnorm_lambda_delta(alpha)
    assert (tm.lam, tm.delta) == pytest.approx(LAMBDA_DELTA[alpha], rel=1e-9)
    assert (tm.lam, tm.delta) == pytest.approx(lambda_delta_mp(alpha), rel=1e-9)


def test_lambda_delta_rounded_examples():
    assert truncnorm_lambda_delta(0.0).lam == pytest.approx(0.7978846, abs=5e-8)
    assert truncnorm_lambda_delta(0.0).delta == pytest.approx(0.6366198, abs=5e-8)
    assert truncnorm_lambda_delta(-1.0).lam == pytest.approx(1.5251353, abs=5e-8)
    # published rounding of delta(-1) disagrees with lambda(lambda + alpha) in the fifth digit
    assert truncnorm_lambda_delta(-1.0).delta == pytest.approx(0.8009023, abs=5e-8)


def test_lambda_delta_untruncated_limit():
    tm = truncnorm_lambda_delta(30.0)
    assert tm.lam < 1e-190 and tm.delta < 1e-190


def test_asymptotic_branch_is_continuous():
    inner = truncnorm_lambda_delta(-30.0)
    outer = truncnorm_lambda_delta(-30.0 - 1e-9)
    assert outer.delta == pytest.approx(inner.delta, rel=1e-9)
    assert outer.lam == pytest.approx(inner.lam, rel=1e-9)


def test_moments_examples():
    ms = moments(stats_of([1.6], [0.1], [5.0], 1.0), np.array([0.1]))
    assert (ms.m1, ms.m2, ms.mean_var_over_S) == pytest.approx((1.6, 2.56, 0.02), rel=REL)
    ms = moments(stats_of([0.3] * 4, [1.0] * 4, [2.0] * 4, 0.0), np.ones(4))
    assert (ms.m1, ms.m2) == pytest.approx((0.3, 0.09), rel=REL)
    ms = moments(stats_of([0.0, 1.0], [1.0, 1.0], [1.0, 1.0], 0.0), np.ones(2))
    assert (ms.m1, ms.m2) == (0.5, 0.5)


@pytest.mark.parametrize(
    "theta1, m1, m2",
    [(1.0, 0.5, 0.35), (0.5, 0.25, 0.20)],
)
def test_solve_two_sided_examples(theta1, m1, m2):
    mu, tau2 = solve_two_sided(MomentSummary(m1, m2, 0.05), theta1, 0.0)
    assert mu == pytest.approx(0.5, rel=REL)
    assert tau2 == pytest.approx(0.05, rel=1e-9)


def test_solve_two_sided_clamps():
    mu, tau2 = solve_two_sided(MomentSummary(0.5, 0.2, 0.05), 1.0, 0.0)
    assert mu == 0.5 and tau2 == 0.0


def test_profile_single_series_oracle():
    st = stats_of([1.6], [0.1], [5.0], 1.0)
    assert profile_loglik_two_sided(0.5, st, 1.0, np.array([0.1])) == pytest.approx(PROFILE_SINGLE, rel=REL)
    assert PROFILE_SINGLE == pytest.approx(profile_loglik_mp(0.5, [1.6], [0.1], [5.0], 1.0), rel=1e-12)


def test_profile_three_series_oracle():
    st = stats_of([0.2, -0.1, 0.5], [1.0, 0.5, 2.0], [4.0, 3.0, 6.0], 0.0)
    v = np.array([1.0, 0.5, 2.0])
    assert profile_loglik_two_sided(0.3, st, 0.0, v) == pytest.approx(PROFILE_THREE, rel=REL)
    for theta in (0.01, 0.37, 0.99, 1.0):
        ref = profile_loglik_mp(theta, [0.2, -0.1, 0.5], [1.0, 0.5, 2.0], [4.0, 3.0, 6.0], 0.0)
        assert profile_loglik_two_sided(theta, st, 0.0, v) == pytest.approx(ref, rel=1e-9)


def test_profile_theta_one_drops_null_component(rng):
    ph, v, S = rng.normal(0.3, 0.2, 12), rng.lognormal(size=12), rng.uniform(1, 9, 12)
    st = stats_of(ph, v, S, 0.0)
    mu, tau2 = solve_two_sided(moments(st, v), 1.0, 0.0)
    d = S * tau2 + v
    ref = np.sum(0.5 * np.log(v / d) - 0.5 * S * (ph - mu) ** 2 / d)
    assert profile_loglik_two_sided(1.0, st, 0.0, v) == pytest.approx(ref, rel=1e-12)


def test_profile_vectorised_matches_scalar(rng):
    st = stats_of(rng.normal(0.2, 0.3, 9), rng.lognormal(size=9), rng.uniform(1, 5, 9), 0.0)
    v = st.sigma2_hat
    grid = profile_loglik_two_sided(hpmod.THETA_GRID, st, 0.0, v)
    for i in (0, 17, 99):
        assert grid[i] == pytest.approx(profile_loglik_two_sided(hpmod.THETA_GRID[i], st, 0.0, v), rel=1e-13)


def test_all_null_panel_gives_zero_tau_and_smallest_theta():
    st = stats_of([0.0] * 5, [1.0] * 5, [3.0] * 5, 0.0)
    ll = profile_loglik_two_sided(hpmod.THETA_GRID, st, 0.0, np.ones(5))
    assert np.ptp(ll) == pytest.approx(0.0, abs=1e-12)
    hp = estimate_two_sided(st, 0.0, np.ones(5))
    assert hp.tau2 == 0.0
    assert hp.theta1 == 0.01
    assert hp.family is Family.NORMAL


def test_near_null_simulated_panel_has_zero_tau():
    y = np.random.default_rng(3).normal(0, 1e-3, (200, 50))
    st = fit_series(y, 0.0)
    assert estimate_two_sided(st, 0.0, st.sigma2_hat).tau2 == 0.0


def test_one_sided_degenerate_start_returns_immediately():
    st = stats_of([1.0] * 6, [1.0] * 6, [2.0] * 6, 1.0)
    hp = estimate_one_sided(st, 1.0, np.ones(6), VarianceMode.SHRUNK)
    assert hp.tau2 == 0.0 and hp.iterations == 0
    assert hp.family is Family.TRUNC_NORMAL and hp.variance_mode is VarianceMode.SHRUNK


def test_one_sided_far_truncation_matches_two_sided():
    rng = np.random.default_rng(11)
    cfg = DgpConfig(N=4000, N1=4000, T=200, phi0=1.0, side="left",
                    prior_phi=PhiPrior("truncnormal", -2.0, 0.05), seed=1)
    # draw far below phi0 so truncation is irrelevant
    panel, _ = generate_panel(cfg, rng)
    st = fit_series(panel.data, 1.0)
    two = estimate_two_sided(st, 1.0, st.sigma2_hat)
    one = estimate_one_sided(st, 1.0, st.sigma2_hat)
    assert one.mu == pytest.approx(two.mu, abs=1e-6)
    assert one.tau2 == pytest.approx(two.tau2, abs=1e-6)


def test_one_sided_iterates_stay_feasible(monkeypatch):
    seen = []
    original = hpmod.truncated_loglik

    def spy(theta1, stats, phi0, variances, mu, tau2):
        seen.append(tau2)
        return original(theta1, stats, phi0, variances, mu, tau2)

    monkeypatch.setattr(hpmod, "truncated_loglik", spy)
    cfg = DgpConfig(N=400, N1=200, T=30, phi0=1.0, side="left",
                    prior_phi=PhiPrior("truncnormal", 0.8, 0.1), seed=2)
    panel, _ = generate_panel(cfg, np.random.default_rng(2))
    st = fit_series(panel.data, 1.0)
    hp = estimate_one_sided(st, 1.0, st.sigma2_hat)
    assert seen and all(t >= 0 for t in seen)
    assert 0 < hp.theta1 <= 1 and hp.tau2 >= 0


def _long_one_sided_stats():
    cfg = DgpConfig(N=2000, N1=1500, T=500, phi0=1.0, side="left",
                    prior_phi=PhiPrior("truncnormal", 0.9, 0.05), seed=2)
    panel, _ = generate_panel(cfg, np.random.default_rng(2))
    return fit_series(panel.data, 1.0)


def test_one_sided_no_convergence_carries_last_iterate(monkeypatch):
    st = _long_one_sided_stats()
    monkeypatch.setattr(hpmod, "MAX_ITER", 1)
    with pytest.raises(NoConvergenceError) as info:
        estimate_one_sided(st, 1.0, st.sigma2_hat)
    last = info.value.hyperparams
    assert not last.converged and last.iterations == 1 and last.tau2 > 0


def test_one_sided_recovery_long_series():
    st = _long_one_sided_stats()
    hp = estimate_one_sided(st, 1.0, st.sigma2_hat)
    assert hp.converged and hp.family is Family.TRUNC_NORMAL
    assert abs(hp.mu - 0.9) <= 0.1
    assert abs(hp.tau - 0.05) <= 0.1
    assert abs(hp.theta1 - 0.75) <= 0.1


def test_two_sided_recovery_long_series():
    # moment equations are unbiased once the OLS small-sample bias is negligible
    cfg = DgpConfig(N=2000, N1=1000, T=100, phi0=0.0,
                    prior_phi=PhiPrior("normal", 0.5, 0.2),
                    prior_sigma=SigmaPrior("lognormal", 2.0, 0.6), seed=5)
    panel, _ = generate_panel(cfg, np.random.default_rng(5))
    st = fit_series(panel.data, 0.0)
    hp = estimate_two_sided(st, 0.0, st.sigma2_hat)
    assert abs(hp.mu - 0.5) <= 0.05
    assert abs(hp.tau - 0.2) <= 0.05
    assert abs(hp.theta1 - 0.5) <= 0.1


def test_hyperparams_dict_round_trip():
    hp = HyperParams(0.9, 0.01, 0.42, Family.TRUNC_NORMAL, VarianceMode.SHRUNK, 7, False)
    assert HyperParams.from_dict(hp.to_dict()) == hp
    assert hp.tau == pytest.approx(0.1)
