"""Command-line front end.

Exit codes: 0 success, 1 validation failure, 2 usage error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import replace

import numpy as np

from . import analytics as an
from .channel import ChannelKind, SystemConfig
from .experiments import ExperimentSpec, fig1_af_sweep, fig2_cdf, validate_suite
from .rng import ParameterDomainError, noise_from_name
from .samplers import Route, run_monte_carlo
from .spectra import ALPHA0

EXIT_OK, EXIT_VALIDATION, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

DEFAULT_FIG1_N = (16, 32, 64, 128, 256, 512)
DEFAULT_FIG1_EPS = (0.0, 0.2, 0.5, 1.0)


class UsageError(Exception):
    pass


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _system_parent(n_default: int | None, noise_default: str, eps_default: float | None) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("system")
    g.add_argument("--channel", choices=[k.value for k in ChannelKind], default="rr")
    g.add_argument("--n", type=int, default=n_default, required=n_default is None, help="number of RIS elements")
    g.add_argument("--nt", type=int, default=4, help="transmit antennas")
    g.add_argument("--nr", type=int, default=4, help="receive antennas")
    g.add_argument("--gamma0", type=float, default=1.0, help="transmit SNR")
    g.add_argument("--noise", choices=["zero", "uniform", "uniform-scaled", "von-mises"], default=noise_default)
    g.add_argument("--eps", type=float, default=eps_default, help="width of uniform-scaled noise, as a fraction of pi")
    g.add_argument("--kappa", type=float, default=None, help="von Mises concentration")
    return p


def _run_parent(samples: int, seed: int) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--samples", type=int, default=samples)
    p.add_argument("--seed", type=int, default=seed)
    p.add_argument("--workers", type=int, default=1)
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="risnr", description="SNR statistics of RIS-aided MIMO links with phase noise")
    sub = parser.add_subparsers(dest="command", required=True)
    out = argparse.ArgumentParser(add_help=False)
    out.add_argument("--out", default=None, help="output path (stdout when omitted)")

    sub.add_parser("moments", parents=[_system_parent(None, "zero", None), out],
                   help="closed-form mean, variance, AF and scaling coefficients")

    p = sub.add_parser("simulate", parents=[_system_parent(None, "zero", None), _run_parent(10_000, 0), out],
                       help="Monte Carlo SNR samples as CSV")
    p.add_argument("--route", choices=[r.value for r in Route], default="exact")

    p = sub.add_parser("analytic", parents=[_system_parent(None, "zero", None), out],
                       help="large-N and gamma-fit CDFs on a grid as CSV")
    p.add_argument("--points", type=int, default=256)
    p.add_argument("--xmax", type=float, default=None, help="grid end (default mean + 6 standard deviations)")

    p = sub.add_parser("fig1", parents=[_system_parent(4, "zero", None), _run_parent(10_000, 2020), out],
                       help="AF versus N sweep")
    p.add_argument("--n-values", type=_int_list, default=list(DEFAULT_FIG1_N))
    p.add_argument("--eps-values", type=_float_list, default=list(DEFAULT_FIG1_EPS))
    p.add_argument("--channels", default="rr,lr")
    p.add_argument("--no-mc", action="store_true", help="skip the Monte Carlo column")
    p.add_argument("--svg", default=None, help="also write an SVG chart")

    p = sub.add_parser("fig2", parents=[_system_parent(128, "uniform-scaled", 0.2), _run_parent(10_000, 2020), out],
                       help="exact, large-N and gamma-fit CDFs at one N")
    p.add_argument("--points", type=int, default=256)
    p.add_argument("--svg", default=None)

    p = sub.add_parser("validate", help="run the built-in consistency checks")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out", default=None, help="also write the report to this path")
    p.add_argument("--alpha0", type=float, default=ALPHA0, help=argparse.SUPPRESS)
    return parser


def config_from_args(args) -> SystemConfig:
    noise = noise_from_name(args.noise, args.eps, args.kappa)
    return SystemConfig(args.n, args.nt, args.nr, args.gamma0, ChannelKind(args.channel), noise)


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="\n", encoding="ascii") as fh:
            fh.write(text)


def cmd_moments(args) -> int:
    cfg = config_from_args(args)
    m, terms = an.snr_mean_var(cfg)
    p = an.pair_params(cfg)
    rows = [
        ("mean", m.mean), ("variance", m.variance), ("af", m.af),
        ("m1_re", p.m1_re), ("m1_im", p.m1_im), ("m2_re", p.m2_re), ("m2_im", p.m2_im),
        ("lambda_g_mean", terms.M_G), ("lambda_h_mean", terms.M_H),
    ]
    try:
        a = an.asymptotic_moments(cfg)
        o = an.scaling_coefficients(cfg)
        rows += [("mean_scaling", a.mean), ("variance_scaling", a.variance), ("af_scaling", a.af),
                 ("o_e0", o.o_e0), ("o_e1", o.o_e1), ("o_v0", o.o_v0), ("o_v1", o.o_v1)]
    except an.UnsupportedRegimeError:
        pass
    _emit("quantity,value\n" + "".join(f"{k},{float(v)!r}\n" for k, v in rows), args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = config_from_args(args)
    if args.samples < 1 or args.workers < 1:
        raise UsageError("--samples and --workers must be positive")
    s = run_monte_carlo(cfg, Route(args.route), args.samples, args.seed, args.workers)
    if args.out is None:
        s.to_csv(sys.stdout)
    else:
        s.to_csv(args.out)
    return EXIT_OK


def cmd_analytic(args) -> int:
    cfg = config_from_args(args)
    if args.points < 2:
        raise UsageError("--points must be at least 2")
    m = an.snr_mean_var(cfg)[0]
    xmax = args.xmax if args.xmax is not None else m.mean + 6.0 * math.sqrt(m.variance)
    x = np.linspace(0.0, xmax, args.points)
    f_large = np.maximum.accumulate(an.snr_largen_cdf(x, cfg))
    f_gamma = an.gamma_fit_cdf(x, cfg)
    lines = ["x,cdf_largen,cdf_gamma"] + [f"{a!r},{b!r},{c!r}" for a, b, c in zip(x.tolist(), f_large.tolist(), f_gamma.tolist())]
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _spec(args, n_values, routes, **kw) -> ExperimentSpec:
    cfg = config_from_args(args)
    return ExperimentSpec(cfg, n_values, frozenset(routes), args.samples, args.seed, args.out,
                          workers=args.workers, svg_path=args.svg, **kw)


def cmd_fig1(args) -> int:
    if args.out is None:
        raise UsageError("fig1 needs --out")
    channels = [ChannelKind(c.strip()) for c in args.channels.split(",") if c.strip()]
    routes = {"analytic", "scaling"} | (set() if args.no_mc else {"exact"})
    args.n = max(args.n, args.nt, args.nr)  # placeholder N; every row overrides it
    spec = _spec(args, args.n_values, routes, eps_values=tuple(args.eps_values), channels=tuple(channels))
    if min(spec.n_values) < max(args.nt, args.nr):
        raise UsageError("every N must be at least max(nt, nr)")
    fig1_af_sweep(spec)
    return EXIT_OK


def cmd_fig2(args) -> int:
    if args.out is None:
        raise UsageError("fig2 needs --out")
    fig2_cdf(_spec(args, [args.n], {"exact", "large_n", "analytic"}), grid_points=args.points)
    return EXIT_OK


def cmd_validate(args) -> int:
    report, ok = validate_suite(n_samples=args.samples, master_seed=args.seed, alpha0=args.alpha0)
    sys.stdout.write(report + "\n")
    if args.out is not None:
        _emit(report + "\n", args.out)
    return EXIT_OK if ok else EXIT_VALIDATION


COMMANDS = {
    "moments": cmd_moments,
    "simulate": cmd_simulate,
    "analytic": cmd_analytic,
    "fig1": cmd_fig1,
    "fig2": cmd_fig2,
    "validate": cmd_validate,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except OSError as exc:
        print(f"risnr: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (UsageError, ParameterDomainError, ValueError) as exc:
        print(f"risnr: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
