"""Independent reference computations used to freeze expected test values.

Nothing here imports panelshrink; each quantity is computed by a different
route (plain loops, a least-squares solver, mpmath, enumeration or Monte
Carlo) from the one the package takes.
"""

import itertools
import math

import mpmath as mp
import numpy as np

mp.mp.dps = 40


def ols_by_lstsq(y, phi0):
    y = np.asarray(y, dtype=float)
    X, z = y[:-1, None], y[1:]
    coef, rss, *_ = np.linalg.lstsq(X, z, rcond=None)
    phi = float(coef[0])
    n = len(z)
    S = sum(v * v for v in y[:-1])
    s2 = sum((z[i] - phi * y[i]) ** 2 for i in range(n)) / n
    s20 = sum((z[i] - phi0 * y[i]) ** 2 for i in range(n)) / n
    return phi, s2, S, s20


def log_chi2_moments(df):
    """E and Var of log(chi2_df / df) by high-precision polygamma."""
    k = mp.mpf(df) / 2
    mean = mp.digamma(k) + mp.log(2) - mp.log(df)
    return float(mean), float(mp.polygamma(1, k))


def log_chi2_moments_mc(df, draws=10_000_000, seed=12345):
    rng = np.random.default_rng(seed)
    x = np.log(rng.chisquare(df, draws) / df)
    return float(x.mean()), float(x.var())


def ljs_loop(sigma2, T):
    off, V = log_chi2_moments(T - 2)
    X = [math.log(s) - off for s in sigma2]
    N = len(X)
    xb = sum(X) / N
    ss = sum((x - xb) ** 2 for x in X)
    mult = 0.0 if ss == 0 else min(1.0, max(0.0, 1 - (N - 3) * V / ss))
    return [math.exp(xb + mult * (x - xb)) for x in X], mult


def shrunk_t_loop(phi_hat, S, v, mu, tau2, phi0):
    beta = tau2 * S / (tau2 * S + v)
    star = beta * phi_hat + (1 - beta) * mu
    return (star - phi0) * math.sqrt(S / (v * beta)), beta, star


def full_form_mp(phi_hat, S, v, mu, tau2, phi0):
    phi_hat, S, v, mu, tau2, phi0 = map(mp.mpf, (phi_hat, S, v, mu, tau2, phi0))
    d = S * tau2 + v
    return mp.sqrt(v / d) * mp.exp(S / (2 * v) * (phi_hat - phi0) ** 2 - (phi_hat - mu) ** 2 * S / (2 * d))


def lambda_delta_mp(alpha):
    a = mp.mpf(alpha)
    lam = mp.npdf(a) / mp.ncdf(a)
    return float(lam), float(lam * (a + lam))


def profile_loglik_mp(theta1, phis, v, S, phi0):
    """Pseudo log-likelihood from scratch: moments, clamp, mixture sum."""
    N = len(phis)
    m1 = mp.fsum(phis) / N
    m2 = mp.fsum(p * p for p in phis) / N
    e = mp.fsum(mp.mpf(a) / b for a, b in zip(v, S)) / N
    th = mp.mpf(theta1)
    mu = (m1 - (1 - th) * phi0) / th
    tau2 = max((m2 - (1 - th) * phi0**2 - e) / th - mu**2, 0)
    total = mp.mpf(0)
    for p, s2, s in zip(phis, v, S):
        d = s * tau2 + s2
        alt = mp.sqrt(s2 / d) * mp.exp(-mp.mpf(1) / 2 * s * (p - mu) ** 2 / d)
        null = mp.exp(-s * (p - phi0) ** 2 / (2 * s2))
        total += mp.log(th * alt + (1 - th) * null)
    return float(total)


def enumerate_bootstrap_paths(y, phi_hat, phi0, center=False):
    """Every equally likely resampled path for a single short series."""
    resid = [y[t] - phi_hat * y[t - 1] for t in range(1, len(y))]
    if center:
        m = sum(resid) / len(resid)
        resid = [e - m for e in resid]
    paths = []
    for draw in itertools.product(resid, repeat=len(resid)):
        path = [y[0]]
        for e in draw:
            path.append(phi0 * path[-1] + e)
        paths.append(tuple(path))
    return paths


def chi2_1_quantile(q):
    return float(mp.findroot(lambda x: mp.gammainc(0.5, 0, x / 2, regularized=True) - q, 3.8))


def garch_unconditional_variance(const=1.0, persist=0.8, shock=0.15):
    return const / (1 - persist - shock)


def log_phi_minus_t_plus_half_t2(t):
    t = mp.mpf(t)
    return float(mp.log(mp.ncdf(-t)) + t * t / 2)


if __name__ == "__main__":
    print("ols [1,2,3], phi0=1:", ols_by_lstsq([1, 2, 3], 1.0))
    print("ols [1,2,3], phi0=0:", ols_by_lstsq([1, 2, 3], 0.0))
    for T in (3, 4, 10, 100):
        print("log chi2 moments T=%d:" % T, log_chi2_moments(T - 2))
    print("MC T=10:", log_chi2_moments_mc(8))
    print("MC T=4:", log_chi2_moments_mc(2))
    off, _ = log_chi2_moments(8)
    sig = [math.exp(x + off) for x in (1, 2, 3, 6)]
    print("ljs X=[1,2,3,6] T=10:", ljs_loop(sig, 10), "sigma2 inputs", sig)
    print("t [1,2,3] phi0=1:", 0.6 * math.sqrt(50), "phi0=0:", 1.6 * math.sqrt(50))
    print("shrunk t:", shrunk_t_loop(1.6, 5.0, 0.1, 0.9, 0.04, 1.0))
    print("full form tau=0:", full_form_mp(1.6, 5, 0.1, 0.9, 0, 1.0))
    print("full form tau=1e-8:", full_form_mp(1.6, 5, 0.1, 0.9, 1e-16, 1.0))
    for a in (0, -1, -30, -31, -50, 5, 30):
        print("lambda/delta", a, lambda_delta_mp(a))
    print("profile single series theta=0.5:", profile_loglik_mp(0.5, [1.6], [0.1], [5.0], 1.0))
    print("profile 3 series theta=0.3:",
          profile_loglik_mp(0.3, [0.2, -0.1, 0.5], [1.0, 0.5, 2.0], [4.0, 3.0, 6.0], 0.0))
    print("boot paths:", sorted(set(enumerate_bootstrap_paths([1, 2, 3], 1.6, 1.0))))
    print("chi2_1 95%:", chi2_1_quantile(0.95))


def np_power_bound(phi_alt, phi_null, T=10, alpha=0.05, draws=400_000, seed=0):
    """Power of the most powerful level-alpha test of phi_null against phi_alt
    for one series with known unit innovation variance and y_0 = 0.

    No test of that series can exceed it, whatever else is in the panel
    (the other series are independent of it)."""
    rng = np.random.default_rng(seed)

    def paths(phi):
        e = rng.normal(size=(draws, T))
        y = np.zeros((draws, T))
        prev = np.zeros(draws)
        for t in range(T):
            prev = phi * prev + e[:, t]
            y[:, t] = prev
        return y

    def llr(y):
        lag, cur = y[:, :-1], y[:, 1:]
        return -0.5 * (((cur - phi_alt * lag) ** 2).sum(1) - ((cur - phi_null * lag) ** 2).sum(1))

    crit = np.quantile(llr(paths(phi_null)), 1 - alpha)
    return float((llr(paths(phi_alt)) > crit).mean())
