"""How well the mixture hyper-parameters are recovered as the series lengthen.

    python scripts/hyperparam_recovery.py --side two --T 10 30 100
    python scripts/hyperparam_recovery.py --side left --T 10 50 200 500 --panels 5
"""

import argparse

import numpy as np

from panelshrink import DgpConfig, PhiPrior, SigmaPrior, estimate_one_sided, estimate_two_sided, fit_series
from panelshrink.simulation import generate_panel


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--side", choices=("two", "left"), default="two")
    ap.add_argument("--T", type=int, nargs="+", default=[10, 30, 100])
    ap.add_argument("--N", type=int, default=2000)
    ap.add_argument("--panels", type=int, default=3)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args(argv)

    if args.side == "two":
        phi0, truth = 0.0, (0.5, 0.2, 0.5)
        prior = PhiPrior("normal", 0.5, 0.2)
        estimate = estimate_two_sided
    else:
        phi0, truth = 1.0, (0.9, 0.05, 0.75)
        prior = PhiPrior("truncnormal", 0.9, 0.05)
        estimate = estimate_one_sided
    N1 = int(round(truth[2] * args.N))
    print(f"truth mu={truth[0]} tau={truth[1]} theta1={truth[2]}")
    for T in args.T:
        cfg = DgpConfig(N=args.N, N1=N1, T=T, phi0=phi0, side=args.side, prior_phi=prior,
                        prior_sigma=SigmaPrior("lognormal", 2.0, 0.6))
        rng = np.random.default_rng([args.seed, T])
        for _ in range(args.panels):
            panel, _ = generate_panel(cfg, rng)
            st = fit_series(panel.data, phi0)
            hp = estimate(st, phi0, st.sigma2_hat)
            print(f"T={T:4d}  mu={hp.mu:7.3f}  tau={hp.tau:6.3f}  theta1={hp.theta1:4.2f}  iterations={hp.iterations}")


if __name__ == "__main__":
    main()
