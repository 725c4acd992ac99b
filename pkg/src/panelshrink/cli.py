"""Command-line interface: ``test``, ``simulate`` and ``power-curve``."""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import warnings
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .bootstrap import BootstrapConfig, run_tests
from .dataio import Report, load_panel_csv, write_atomic
from .errors import ConfigError, DataError, PanelShrinkError
from .panel import HypothesisSpec, Side, parse_kinds
from .simulation import DgpConfig, evaluate, power_curve

log = logging.getLogger("panelshrink")

COMMANDS = ("test", "simulate", "power-curve")


@dataclass
class RunConfig:
    command: str
    spec: HypothesisSpec
    kinds: list
    bootstrap: BootstrapConfig
    output_path: Path | None = None
    output_format: str = "json"
    input_path: Path | None = None
    dgp: DgpConfig | None = None
    mu_grid: list | None = None
    mc_reps: int = 100
    threads: int = 1

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.command == "test" and self.input_path is None:
            raise ConfigError("test needs --input")
        if self.command != "test" and self.dgp is None:
            raise ConfigError(f"{self.command} needs --dgp")
        if self.command == "power-curve" and not self.mu_grid:
            raise ConfigError("power-curve needs --mu-grid")
        if self.output_format not in ("json", "csv"):
            raise ConfigError(f"unknown format {self.output_format!r}")

    def echo(self) -> dict:
        """Everything needed to rerun this command; thread count excluded
        since it does not affect results."""
        return {
            "command": self.command,
            "input": None if self.input_path is None else str(self.input_path),
            "phi0": self.spec.phi0,
            "side": self.spec.side.value,
            "alpha": self.spec.alpha,
            "kinds": [k.value for k in self.kinds],
            "bootstrap": {
                "replicates": self.bootstrap.replicates,
                "seed": self.bootstrap.seed,
                "center_residuals": self.bootstrap.center_residuals,
            },
            "dgp": None if self.dgp is None else self.dgp.to_dict(),
            "mu_grid": self.mu_grid,
            "mc_reps": self.mc_reps if self.command != "test" else None,
        }


def parse_mu_grid(text: str) -> list[float]:
    """``start:end:step`` (end included when step divides the range) or a comma list."""
    if ":" not in text:
        try:
            return [float(x) for x in text.split(",") if x.strip()]
        except ValueError as exc:
            raise ConfigError(f"bad mu grid {text!r}") from exc
    try:
        start, end, step = (float(x) for x in text.split(":"))
    except ValueError as exc:
        raise ConfigError(f"bad mu grid {text!r}; expected start:end:step") from exc
    if step <= 0 or end < start:
        raise ConfigError(f"bad mu grid {text!r}")
    n = math.floor((end - start) / step + 1e-9)
    return [round(start + i * step, 12) for i in range(n + 1)]


def load_dgp(path) -> DgpConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
    try:
        return DgpConfig.from_dict(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid DGP in {path}: {exc}") from exc


def _hyperparams_by_kind(results) -> dict | None:
    out = {}
    for r in results:
        if r.hyperparams_used is not None and r.kind.value not in out:
            out[r.kind.value] = r.hyperparams_used.to_dict()
    return out or None


def run(config: RunConfig) -> Report:
    """Execute ``config`` and write its output; returns the in-memory report."""
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        if config.command == "test":
            panel = load_panel_csv(config.input_path)
            results = run_tests(panel, config.spec, config.kinds, config.bootstrap)
            hp = _hyperparams_by_kind(results)
        elif config.command == "simulate":
            results = evaluate(config.dgp, config.spec, config.kinds, config.bootstrap, config.mc_reps, config.threads)
            hp = None
        else:
            results = power_curve(
                config.dgp, config.mu_grid, config.spec, config.kinds, config.bootstrap, config.mc_reps, config.threads
            )
            hp = None
    notes = sorted({str(w.message) for w in caught})
    report = Report(config.command, __version__, config.bootstrap.seed, config.echo(), results, hp, notes)
    if config.output_path is not None:
        text = report.to_json() if config.output_format == "json" else report.to_csv()
        write_atomic(config.output_path, text)
    return report


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", "-o", type=Path, help="output file (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"), help="output format")
    common.add_argument("--phi0", type=float, help="null value of the AR coefficient")
    common.add_argument("--side", choices=[s.value for s in Side], help="two-sided or left one-sided")
    common.add_argument("--alpha", type=float, default=0.05, help="average type-one error level")
    common.add_argument("--kinds", default="t", help="comma list from t,fsv,fsm,fss,rfsv,rfsm,rfss")
    common.add_argument("--reps", type=int, default=500, help="bootstrap replicates R")
    common.add_argument("--seed", type=int, help="master seed (default: the DGP seed, else 0)")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    common.add_argument("--no-center", action="store_true", help="resample raw (uncentered) residuals")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="panelshrink", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    t = sub.add_parser("test", parents=[common], help="test every series of a CSV panel")
    t.add_argument("--input", "-i", type=Path, required=True)
    for name in ("simulate", "power-curve"):
        p = sub.add_parser(name, parents=[common], help=f"Monte Carlo {name.replace('-', ' ')}")
        p.add_argument("--dgp", type=Path, required=True, help="JSON data-generating process")
        p.add_argument("--mc-reps", type=int, default=100, help="simulated panels per point")
        if name == "power-curve":
            p.add_argument("--mu-grid", required=True, help="start:end:step or comma list")
    return parser


def config_from_args(args) -> RunConfig:
    dgp = None
    if args.command != "test":
        dgp = load_dgp(args.dgp)
        if args.seed is not None:
            dgp = DgpConfig.from_dict({**dgp.to_dict(), "seed": args.seed})
    seed = args.seed if args.seed is not None else (dgp.seed if dgp else 0)
    phi0 = args.phi0 if args.phi0 is not None else (dgp.phi0 if dgp else None)
    side = args.side if args.side is not None else (dgp.side.value if dgp else Side.TWO_SIDED.value)
    if phi0 is None:
        raise ConfigError("--phi0 is required")
    spec = HypothesisSpec(phi0, Side(side), args.alpha)
    kinds = parse_kinds(args.kinds)
    spec.check_kinds(kinds)
    fmt = args.format or ("csv" if args.command == "power-curve" else "json")
    return RunConfig(
        command=args.command,
        spec=spec,
        kinds=kinds,
        bootstrap=BootstrapConfig(args.reps, seed, max(1, args.threads), center_residuals=not args.no_center),
        output_path=args.output,
        output_format=fmt,
        input_path=getattr(args, "input", None),
        dgp=dgp,
        mu_grid=parse_mu_grid(args.mu_grid) if args.command == "power-curve" else None,
        mc_reps=getattr(args, "mc_reps", 100),
        threads=max(1, args.threads),
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        config = config_from_args(args)
        report = run(config)
    except PanelShrinkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except FloatingPointError as exc:
        print(f"error: numeric failure: {exc}", file=sys.stderr)
        return 4
    if config.output_path is None:
        sys.stdout.write(report.to_json() if config.output_format == "json" else report.to_csv())
    for note in report.warnings:
        log.warning("warning: %s", note)
    return 0


if __name__ == "__main__":
    sys.exit(main())
