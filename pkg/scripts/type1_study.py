"""Average type-one error when every series satisfies the null.

    python scripts/type1_study.py --side two --reps 500
    python scripts/type1_study.py --side left --N 40 --boot 500 --threads 4
"""

import argparse
import time

from panelshrink import BootstrapConfig, DgpConfig, HypothesisSpec, SigmaPrior, evaluate


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--side", choices=("two", "left"), default="two")
    ap.add_argument("--N", type=int, default=40)
    ap.add_argument("--T", type=int, default=10)
    ap.add_argument("--cv", type=float, default=0.3, help="cross-sectional CV of the variances")
    ap.add_argument("--reps", type=int, default=500)
    ap.add_argument("--boot", type=int, default=500)
    ap.add_argument("--alpha", type=float, default=0.05)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args(argv)

    phi0 = 0.0 if args.side == "two" else 1.0
    kinds = ["t", "fsv", "fsm", "fss"] if args.side == "two" else ["t", "rfsv", "rfsm", "rfss"]
    cfg = DgpConfig(N=args.N, N1=0, T=args.T, phi0=phi0, side=args.side,
                    prior_sigma=SigmaPrior("lognormal", 2.0, 2.0 * args.cv), seed=args.seed)
    spec = HypothesisSpec(phi0, args.side, args.alpha)

    t0 = time.perf_counter()
    pts = evaluate(cfg, spec, kinds, BootstrapConfig(args.boot, seed=args.seed), args.reps, args.threads)
    print(f"N={args.N} T={args.T} side={args.side} panels={args.reps} R={args.boot} "
          f"({time.perf_counter() - t0:.1f} s)")
    for p in pts:
        print(f"  {p.kind.value:5s} type-I {p.avg_type1:.4f}  (se {p.type1_se:.4f})")


if __name__ == "__main__":
    main()
