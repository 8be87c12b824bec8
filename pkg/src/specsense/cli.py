"""Command-line entry point.

Subcommands: pf, pd, compare, gitc, calibrate, tw-check.
Exit codes: 0 success, 1 configuration error, 2 runtime error.
"""
from __future__ import annotations

import argparse
import logging
import sys

from . import analytics, harness, tracy_widom
from .errors import ConfigError, SpecSenseError

EXPERIMENTS = {
    "pf": harness.run_pf_experiment,
    "pd": harness.run_pd_experiment,
    "compare": harness.run_comparison,
    "gitc": harness.run_gitc_threshold_experiment,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _experiment_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="JSON experiment config (schema 1)")
    for name in ("M", "K", "L", "N", "trials", "seed", "workers"):
        sub.add_argument(f"--{name}", type=int)
    sub.add_argument("--snr", help="SNR grid in dB, start:step:stop or a single value")
    sub.add_argument("--detectors", help="comma-separated detector list")
    sub.add_argument("--targets", help="comma-separated P_f targets (gitc)")
    sub.add_argument("--analytic-bias", type=float)
    sub.add_argument("--mode", choices=["multi-antenna", "over-sampling"])
    sub.add_argument("--out", help="report path (default: stdout)")
    sub.add_argument("--format", choices=["csv", "json"])


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="specsense", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    subs = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in EXPERIMENTS:
        _experiment_flags(subs.add_parser(name, help=f"run the {name} experiment"))
    cal = subs.add_parser("calibrate", help="GITC threshold for a target P_f")
    cal.add_argument("--p", type=int)
    cal.add_argument("--M", type=int)
    cal.add_argument("--K", type=int)
    cal.add_argument("--N", type=int, required=True)
    cal.add_argument("--target-pf", type=float, required=True)
    subs.add_parser("tw-check", help="print Tracy-Widom table checksum and spot values")
    return parser


def _load_config(args) -> harness.ExperimentConfig:
    base = harness.ExperimentConfig.from_json_file(args.config).to_dict() if args.config else {}
    overrides = {
        "M": args.M, "K": args.K, "L": args.L, "N": args.N, "trials": args.trials,
        "seed": args.seed, "workers": args.workers, "snr_db": args.snr,
        "analytic_bias": args.analytic_bias, "mode": args.mode, "out": args.out,
        "format": args.format,
    }
    if args.detectors:
        overrides["detectors"] = [d for d in args.detectors.split(",") if d]
    if args.targets:
        try:
            overrides["targets"] = [float(t) for t in args.targets.split(",")]
        except ValueError:
            raise ConfigError(f"targets: cannot parse {args.targets!r}") from None
    base.update({k: v for k, v in overrides.items() if v is not None})
    if args.command in ("compare",) and "detectors" not in base:
        base["detectors"] = ["sitc-aic", "sitc-mdl", "ed", "ev-mme", "ev-eme", "ev-bced",
                             "ev-agm", "ed-unc:1", "ed-unc:1.5", "ed-unc:2"]
    if args.command == "pd" and "snr_db" not in base:
        base["snr_db"] = "-24:2:-8"
    return harness.ExperimentConfig.from_dict(base)


def _calibrate(args) -> int:
    if args.p is not None:
        p = args.p
    elif args.M is not None and args.K is not None:
        p = args.M * args.K
    else:
        raise ConfigError("p: give --p or both --M and --K")
    gamma = analytics.calibrate_gamma(args.target_pf, p, args.N)
    print(f"{gamma:.10f}")
    return 0


def _tw_check() -> int:
    path = tracy_widom.table_path()
    digest = tracy_widom.table_checksum(path)
    status = "ok" if digest == tracy_widom.TABLE_SHA256 else "MISMATCH"
    print(f"table: {path}")
    print(f"sha256: {digest} ({status})")
    for s in (-3.0, -2.0, -1.0, 0.0, 1.0, 2.0):
        print(f"F2({s:+.1f}) = {tracy_widom.tw2_cdf(s):.10f}")
    return 0 if status == "ok" else 2


def _join_ranges(argv: list[str]) -> list[str]:
    # "--snr -24:2:-8" would otherwise be read as an unknown option
    out = []
    it = iter(argv)
    for tok in it:
        if tok == "--snr":
            nxt = next(it, None)
            out.append(tok if nxt is None else f"--snr={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    argv = _join_ranges(sys.argv[1:] if argv is None else list(argv))
    try:
        args = build_parser().parse_args(argv)
    except ConfigError as exc:
        print(f"specsense: error: {exc}", file=sys.stderr)
        return 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "calibrate":
            return _calibrate(args)
        if args.command == "tw-check":
            return _tw_check()
        cfg = _load_config(args)
        report = EXPERIMENTS[args.command](cfg)
        text = report.write(cfg.out, cfg.format)
        if cfg.out is None:
            sys.stdout.write(text)
        return 0
    except ConfigError as exc:
        print(f"specsense: config error: {exc}", file=sys.stderr)
        return 1
    except (SpecSenseError, OSError, ValueError) as exc:
        print(f"specsense: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
