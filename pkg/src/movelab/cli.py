"""Command-line interface: ``movelab <command> ...``.

Exit codes: 0 computed, 1 negative verdict, 2 usage error, 3 numeric/size error.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .determinantal import GRAMMAR, KernelFunction, geometric_mean, harmonic_mean, ones_probability, window_measure
from .domination import dominates, p_max, rigidity, sup_eps_down, sup_eps_up
from .errors import (
    DuplicateConfiguration,
    FormatError,
    GroundMismatch,
    ModeMismatch,
    MovelabError,
    NegativeMass,
    NonInvertibleChannel,
    NotDominated,
    NotNormalized,
    NumericallyInvalid,
    ParameterOutOfRange,
    SizeExceeded,
    ToleranceTooLow,
    ZeroProbabilityEvent,
)
from .extraction import extract_both, extract_down, extract_up, max_extract_eps
from .families import (
    conditioned_binomial,
    hajek_block,
    mixture_example,
    nonrigid_block,
    paired_doubling,
)
from .io import _json_value, certificate_to_dict, dumps, dumps_measure, format_scalar, loads_measure, measure_to_dict, tolerance_to_dict
from .measure import EXACT, FLOAT, Measure, NoiseChannel, apply_channel, exchangeable_measure, format_bits, support_is_up_set
from .tolerance import format_witness, holley_lower_bound_check, insertion_tolerance

EXIT_OK, EXIT_FALSE, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
USAGE_ERRORS = (FormatError, ParameterOutOfRange, GroundMismatch, ModeMismatch, NotDominated, OSError, ValueError)
NUMERIC_ERRORS = (
    SizeExceeded,
    NumericallyInvalid,
    NotNormalized,
    NegativeMass,
    NonInvertibleChannel,
    ZeroProbabilityEvent,
    ToleranceTooLow,
    DuplicateConfiguration,
)


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# helpers


def _fmt(v):
    if v is None:
        return "-"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (Fraction, float)):
        return format_scalar(v)
    return str(v)


def _param(text, mode):
    """Parse a numeric flag in the requested mode ("1/4" or "0.25")."""
    try:
        v = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad number {text!r}") from None
    return v if mode == EXACT else float(v)


def _load(path, mode):
    if path == "-":
        text = sys.stdin.read()
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    mu = loads_measure(text)
    if mode is None or mode == mu.mode:
        return mu
    if mode == FLOAT:
        return mu.to_float()
    raise ModeMismatch("an exact computation was requested for a float-mode file")


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, str):
        return v
    return _json_value(v)


def _emit_report(args, report):
    if args.output == "json":
        print(dumps(_jsonable(report)))
        return
    width = max(len(k) for k in report)
    for k, v in report.items():
        if isinstance(v, dict):
            print(f"{k.ljust(width)}  " + ", ".join(f"{a}={_fmt(b)}" for a, b in v.items()))
        elif isinstance(v, list):
            print(f"{k.ljust(width)}  " + "; ".join(_fmt(x) if not isinstance(x, list) else " ".join(map(_fmt, x)) for x in v))
        else:
            print(f"{k.ljust(width)}  {_fmt(v)}")


def _emit_measure(args, mu, title=None):
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(dumps_measure(mu))
        return
    if args.output == "json":
        sys.stdout.write(dumps_measure(mu))
        return
    if title:
        print(f"# {title}")
    for x, v in enumerate(mu.probs):
        if v != 0:
            print(f"{format_bits(x, mu.n)}  {format_scalar(v)}")


# --------------------------------------------------------------------------
# commands


def cmd_analyze(args):
    mu = _load(args.file, args.mode)
    tol = args.tol
    rep = insertion_tolerance(mu)
    up = support_is_up_set(mu)
    res = rigidity(mu, tol=tol, eps_tol=max(tol, 1e-6))
    if mu.mode == EXACT:
        ext = {d: max_extract_eps(mu, d, tol=tol) for d in ("up", "down", "both")}
    else:
        ext = {d: None for d in ("up", "down", "both")}
    holley = holley_lower_bound_check(mu) if rep.insertion > 0 else None
    props = {
        "I": ext["up"] > 0 if ext["up"] is not None else up,
        "II": rep.insertion > 0,
        "III": res.rigid,
        "IV": res.p_max > 0,
    }
    report = {
        "n": mu.n,
        "mode": mu.mode,
        "support_up_set": up,
        "insertion": rep.insertion,
        "insertion_witness": format_witness(rep, "insertion"),
        "deletion": rep.deletion,
        "deletion_witness": format_witness(rep, "deletion"),
        "finite_energy": rep.finite_energy,
        "all_ones_mass": mu.all_ones,
        "p_max": res.p_max,
        "rigid": res.rigid,
        "movability_radius_near_p_max": res.sup_eps_down,
        "max_extract_up": ext["up"],
        "max_extract_down": ext["down"],
        "max_extract_both": ext["both"],
        "product_below_at_insertion_level": holley,
        "properties": props,
        "finite_equivalences": ["I <=> II <=> support is an up-set", "III <=> IV <=> all-ones mass > 0"],
    }
    if args.output == "json":
        report["tolerance"] = tolerance_to_dict(rep)
    _emit_report(args, report)
    return EXIT_OK


def cmd_dominate(args):
    mu1 = _load(args.file1, args.mode)
    mu2 = _load(args.file2, args.mode)
    cert = dominates(mu1, mu2, certificate=True)
    report = {"dominated": cert.dominated}
    if cert.dominated:
        if args.sup_eps_down:
            report["sup_eps_down"] = sup_eps_down(mu1, mu2, tol=args.tol)
        if args.sup_eps_up:
            report["sup_eps_up"] = sup_eps_up(mu1, mu2, tol=args.tol)
    else:
        report["violator"] = cert.violator.bitstrings()
        report["gap"] = cert.gap
    if args.certificate:
        report["certificate"] = certificate_to_dict(cert)
    _emit_report(args, report)
    return EXIT_OK if cert.dominated else EXIT_FALSE


def cmd_noise(args):
    mu = _load(args.file, args.mode)
    ch = NoiseChannel(_param(args.down, mu.mode), _param(args.up, mu.mode))
    _emit_measure(args, apply_channel(mu, ch))
    return EXIT_OK


def _extract(mu, direction, eps, delta):
    if direction == "up":
        return extract_up(mu, eps)
    if direction == "down":
        return extract_down(mu, eps)
    return extract_both(mu, eps, eps if delta is None else delta)


def _as_measure_if_possible(nu):
    return Measure(nu.ground, nu.probs, nu.mode) if nu.is_nonnegative() else nu


def cmd_extract(args):
    mu = _load(args.file, args.mode)
    if args.max:
        star = max_extract_eps(mu, args.direction, tol=args.tol)
        eps = star / 2
        nu = _as_measure_if_possible(_extract(mu, args.direction, eps, None))
        if args.output == "json" and not args.out:
            print(dumps({"eps_star": _json_value(star), "eps_used": _json_value(eps), "measure": measure_to_dict(nu)}))
            return EXIT_OK
        print(f"# eps* = {format_scalar(star)}; extraction shown at eps*/2 = {format_scalar(eps)}")
        _emit_measure(args, nu)
        return EXIT_OK
    if args.eps is None:
        raise UsageError("extract needs --eps or --max")
    eps = _param(args.eps, mu.mode)
    delta = _param(args.delta, mu.mode) if args.delta is not None else None
    nu = _as_measure_if_possible(_extract(mu, args.direction, eps, delta))
    _emit_measure(args, nu)
    return EXIT_OK


def cmd_family(args):
    kind = args.kind
    if kind == "hajek":
        mu = hajek_block(args.k)
    elif kind == "blocks":
        mu = nonrigid_block(args.k, Fraction(args.base))
    elif kind == "mixture":
        nu, mu = mixture_example(Fraction(args.p), Fraction(args.q), args.n)
        mu = nu if args.which == "nu" else mu
    elif kind == "pairs":
        e, o, m = paired_doubling(args.n)
        mu = {"e": e, "o": o, "mix": m}[args.which]
    else:
        c = conditioned_binomial(args.k, Fraction(args.p), args.m)
        if args.as_measure:
            mu = exchangeable_measure(c)
        else:
            report = {"k": c.n, "counts": [format_scalar(x) for x in c.probs]}
            _emit_report(args, report)
            return EXIT_OK
    if args.mode == FLOAT:
        mu = mu.to_float()
    _emit_measure(args, mu)
    return EXIT_OK


def cmd_det(args):
    try:
        f = KernelFunction.parse(args.f)
    except ValueError as e:
        raise UsageError(str(e)) from None
    if args.points:
        pts = [int(x) for x in args.points.split(",")]
        report = {"ones_probability": ones_probability(f, pts)}
        if args.means:
            report.update(gm=geometric_mean(f), hm=harmonic_mean(f))
        _emit_report(args, report)
        return EXIT_OK
    if args.means and not args.window:
        _emit_report(args, {"gm": geometric_mean(f), "hm": harmonic_mean(f)})
        return EXIT_OK
    if not args.window:
        raise UsageError("det needs --window, --points or --means")
    mu = window_measure(f, args.window)
    if args.means:
        print(f"# GM = {geometric_mean(f)!r}  HM = {harmonic_mean(f)!r}", file=sys.stderr)
    if args.pmax:
        print(f"# p_max = {p_max(mu, tol=args.tol)!r}", file=sys.stderr)
    _emit_measure(args, mu)
    return EXIT_OK


# --------------------------------------------------------------------------
# parser


def _positive(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return v


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mode", choices=[EXACT, FLOAT], default=None, help="arithmetic mode (default: the file's own)")
    common.add_argument("--tol", type=_positive, default=1e-9, help="bisection tolerance (default 1e-9)")
    common.add_argument("--output", choices=["table", "json"], default="table")
    common.add_argument("--json", dest="output", action="store_const", const="json", help="same as --output json")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized sweeps (default 0)")
    common.add_argument("--ncap", type=int, default=None, help="override size caps (same as MOVELAB_NCAP)")

    p = argparse.ArgumentParser(prog="movelab", description="Stochastic domination, noise channels and extraction on {0,1}^n.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", parents=[common], help="tolerance, p_max, rigidity and extraction report")
    a.add_argument("file")
    a.set_defaults(func=cmd_analyze)

    d = sub.add_parser("dominate", parents=[common], help="decide mu1 <= mu2 with a certificate")
    d.add_argument("file1")
    d.add_argument("file2")
    d.add_argument("--sup-eps-down", action="store_true", help="also compute sup{eps: mu1 <= mu2^(-,eps)}")
    d.add_argument("--sup-eps-up", action="store_true", help="also compute sup{eps: mu1^(+,eps) <= mu2}")
    d.add_argument("--certificate", action="store_true", help="include the coupling or violating up-set")
    d.set_defaults(func=cmd_dominate)

    n = sub.add_parser("noise", parents=[common], help="apply a noise channel")
    n.add_argument("file")
    n.add_argument("--down", default="0", help="probability that a 1 flips to 0")
    n.add_argument("--up", default="0", help="probability that a 0 flips to 1")
    n.add_argument("-o", "--out", help="write the measure file here")
    n.set_defaults(func=cmd_noise)

    e = sub.add_parser("extract", parents=[common], help="invert a noise channel")
    e.add_argument("file")
    e.add_argument("--direction", choices=["up", "down", "both"], default="up")
    e.add_argument("--eps")
    e.add_argument("--delta", help="up-rate for --direction both (default: eps)")
    e.add_argument("--max", action="store_true", help="find eps* and show the extraction at eps*/2")
    e.add_argument("-o", "--out")
    e.set_defaults(func=cmd_extract)

    f = sub.add_parser("family", parents=[common], help="emit an example family member")
    f.add_argument("kind", choices=["hajek", "blocks", "mixture", "pairs", "condbin"])
    f.add_argument("--k", type=int, default=2)
    f.add_argument("--base", default="1/2")
    f.add_argument("--p", default="1/2")
    f.add_argument("--q", default="1/4")
    f.add_argument("--n", type=int, default=4)
    f.add_argument("--m", type=int, default=0)
    f.add_argument("--which", default=None, help="mixture: nu|mu (default mu); pairs: e|o|mix (default mix)")
    f.add_argument("--as-measure", action="store_true", help="condbin: emit the exchangeable measure")
    f.add_argument("-o", "--out")
    f.set_defaults(func=cmd_family)

    t = sub.add_parser(
        "det",
        parents=[common],
        help="determinantal window measures",
        description=GRAMMAR,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    t.add_argument("--f", required=True, help="kernel spec, e.g. 'const:0.5' or '[0,0.9]indicator:0,0.9:0.75'")
    t.add_argument("--window", type=int, help="window size n (sites 0..n-1)")
    t.add_argument("--points", help="comma-separated integers: print the all-ones probability")
    t.add_argument("--means", action="store_true", help="report GM and HM of f")
    t.add_argument("--pmax", action="store_true", help="report p_max of the window measure")
    t.add_argument("-o", "--out")
    t.set_defaults(func=cmd_det)
    return p


def _validate_family(args):
    if args.command != "family":
        return
    if args.kind == "mixture":
        args.which = args.which or "mu"
        if args.which not in ("nu", "mu"):
            raise UsageError("--which must be nu or mu for mixture")
    elif args.kind == "pairs":
        args.which = args.which or "mix"
        if args.which not in ("e", "o", "mix"):
            raise UsageError("--which must be e, o or mix for pairs")


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.ncap is not None:
        os.environ["MOVELAB_NCAP"] = str(args.ncap)
    try:
        _validate_family(args)
        return args.func(args)
    except NUMERIC_ERRORS as e:
        print(f"movelab: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except (UsageError, *USAGE_ERRORS) as e:
        print(f"movelab: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except MovelabError as e:
        print(f"movelab: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except ZeroDivisionError as e:
        print(f"movelab: numeric error: {e}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
