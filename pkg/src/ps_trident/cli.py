"""Command-line entry point wiring all modules.

Subcommands: primes, kernel, sums, moments, gamma, solve, convergents,
verify.  Outputs are CSV or JSON with LF line endings and floats printed
to 17 significant digits; a run manifest (command echo, version, timings)
goes to stderr so the payload on stdout / in --out files is byte-stable
across runs and thread counts.

Exit codes: 0 success, 1 verification failure, 2 usage, 3 config errors,
4 size/budget limits, 5 internal invariant violations.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
import time

import mpmath as mp
import numpy as np

from . import __version__
from .errors import (
    BudgetExceeded,
    ConfigError,
    PrecisionExhausted,
    RationalTerminated,
    SizeLimit,
    TridentError,
)
from .core import cf_convergents
from .expsums import ExpSumSpec, eval_I, eval_sum
from .moments import PrimeSet, exact_moment, spectrum_b, spectrum_c
from .primes import GammaType, sieve_ps_table
from .smoothing import SmoothingKernel, theta, theta_fourier, theta_fourier_bound
from .solver import (
    ProblemSpec,
    derive_params,
    find_triples,
    gamma_direct,
    gamma_via_integral,
)


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", newline="\n"), True


def _emit(path, text: str):
    fh, close = _open_out(path)
    try:
        fh.write(text)
    finally:
        if close:
            fh.close()


def parse_value(s: str):
    """Parse a config scalar: decimal string or 'sqrt:D'.

    Decimal strings go through 50-digit arithmetic before any float
    conversion; returns (float, echo_string).
    """
    s = s.strip()
    try:
        with mp.workdps(50):
            if s.lower().startswith("sqrt:"):
                d = int(s[5:])
                return float(mp.sqrt(d)), s
            return float(mp.mpf(s)), s
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"cannot parse value {s!r}") from exc


def load_config(path: str) -> dict:
    """Flat key=value file; '#' starts a comment; keys are lowercase."""
    out = {}
    try:
        with open(path) as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected key=value")
                key, val = line.split("=", 1)
                out[key.strip().lower()] = val.strip()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return out


def spec_from_config(cfg: dict) -> tuple:
    required = ("lambda1", "lambda2", "lambda3", "eta", "gamma", "theta", "lambda0", "q0")
    missing = [k for k in required if k not in cfg]
    if missing:
        raise ConfigError(f"missing config keys: {', '.join(missing)}")
    vals = {}
    for key in ("lambda1", "lambda2", "lambda3", "eta", "theta", "lambda0"):
        vals[key], _ = parse_value(cfg[key])
    try:
        gamma = GammaType(cfg["gamma"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    try:
        q0 = int(cfg["q0"])
    except ValueError as exc:
        raise ConfigError(f"q0 must be an integer: {cfg['q0']!r}") from exc
    try:
        spec = ProblemSpec(
            lambda1=vals["lambda1"],
            lambda2=vals["lambda2"],
            lambda3=vals["lambda3"],
            eta=vals["eta"],
            gamma=gamma,
            theta_exp=vals["theta"],
            lambda0=vals["lambda0"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return spec, q0


def _manifest(args, timings):
    manifest = {
        "command": " ".join(sys.argv[1:]),
        "version": __version__,
        "seed_free": True,
        "config_echo": {k: str(v) for k, v in sorted(vars(args).items()) if k != "func"},
        "timings": timings,
    }
    print(json.dumps(manifest, sort_keys=True), file=sys.stderr)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_primes(args):
    gamma = GammaType(args.gamma)
    table = sieve_ps_table(args.x, args.lambda0, args.power, gamma, threads=args.threads)
    buf = io.StringIO()
    buf.write("p,weight\n")
    for p, w in zip(table.primes.tolist(), table.weights.tolist()):
        buf.write(f"{p},{_fmt(w)}\n")
    _emit(args.out, buf.getvalue())
    return 0


def cmd_kernel(args):
    kernel = SmoothingKernel(args.eps, args.k)
    n = args.sample
    buf = io.StringIO()
    buf.write("table,arg,value,bound\n")
    ys = np.linspace(-1.2 * args.eps, 1.2 * args.eps, n)
    for y in ys:
        buf.write(f"theta,{_fmt(float(y))},{_fmt(theta(float(y), kernel))},\n")
    xs = np.linspace(-60.0 / args.eps, 60.0 / args.eps, n)
    for x in xs:
        v = theta_fourier(float(x), kernel)
        b = theta_fourier_bound(float(x), kernel)
        buf.write(f"fourier,{_fmt(float(x))},{_fmt(v)},{_fmt(b)}\n")
    _emit(args.out, buf.getvalue())
    return 0


def cmd_sums(args):
    gamma = GammaType(args.gamma) if args.gamma is not None else None
    ts = np.linspace(args.tmin, args.tmax, args.samples)
    buf = io.StringIO()
    buf.write("t,re,im,abs\n")
    if args.kind == "i":
        for t in ts:
            v = eval_I(args.k, float(t), args.x, args.lambda0)
            buf.write(f"{_fmt(float(t))},{_fmt(v.real)},{_fmt(v.imag)},{_fmt(abs(v))}\n")
    else:
        spec = ExpSumSpec(
            kind=args.kind,
            X=args.x,
            lambda0=args.lambda0,
            k=args.k if args.kind == "s" else 4,
            gamma=gamma if args.kind in ("s", "omega") else None,
        )
        for t in ts:
            v = eval_sum(spec, float(t))
            buf.write(f"{_fmt(float(t))},{_fmt(v.real)},{_fmt(v.imag)},{_fmt(abs(v))}\n")
    _emit(args.out, buf.getvalue())
    return 0


def cmd_moments(args):
    gamma = GammaType(args.gamma)
    P = PrimeSet.up_to(args.x, gamma)
    moment = exact_moment(P, args.m)
    payload = {
        "size": len(P),
        "m": args.m,
        "moment": moment,
        "spectra_summary": {},
    }
    if len(P) >= 1 and args.m in (1, 2):
        b = spectrum_b(P, args.m)
        payload["spectra_summary"] = {
            "order": b.order,
            "keys": len(b),
            "diagonal": b[0],
            "mass": b.total(),
        }
    _emit(args.out, json.dumps(payload, sort_keys=True) + "\n")
    if args.dump_spectrum:
        b = spectrum_c(P) if args.m == 1 else spectrum_b(P, args.m)
        buf = io.StringIO()
        buf.write("j,count\n")
        for j in sorted(b.keys()):
            buf.write(f"{j},{b[j]}\n")
        _emit(args.dump_spectrum, buf.getvalue())
    return 0


def cmd_convergents(args):
    try:
        convs = cf_convergents(args.value, args.n)
        note = ""
    except RationalTerminated as exc:
        convs = exc.convergents
        note = "rational expansion terminated\n"
    except PrecisionExhausted as exc:
        convs = exc.convergents
        note = "precision exhausted; prefix certified only\n"
    buf = io.StringIO()
    for c in convs:
        buf.write(f"{c.a}/{c.q}\n")
    buf.write(note)
    _emit(args.out, buf.getvalue())
    return 0


def cmd_gamma(args):
    spec, q0 = spec_from_config(load_config(args.config))
    params = derive_params(q0, spec)
    direct = gamma_direct(spec, params, threads=args.threads)
    dec = gamma_via_integral(
        spec, params, quad_budget=args.quad_budget, threads=args.threads
    )
    payload = {
        "params": {
            "q0": params.q0,
            "X": _fmt(params.X),
            "Delta": _fmt(params.Delta),
            "eps": _fmt(params.eps),
            "H": _fmt(params.H),
            "smoothing_k": params.smoothing_k,
        },
        "gamma_direct": _fmt(direct),
        "gamma1": [_fmt(dec.gamma1.real), _fmt(dec.gamma1.imag)],
        "gamma2": [_fmt(dec.gamma2.real), _fmt(dec.gamma2.imag)],
        "gamma3_bound": _fmt(dec.gamma3_bound),
        "total": _fmt(dec.total),
        "interval": [_fmt(dec.interval[0]), _fmt(dec.interval[1])],
        "im_diagnostic": _fmt(dec.im_diagnostic),
        "nodes_used": dec.nodes_used,
    }
    _emit(args.out, json.dumps(payload, sort_keys=True, indent=2) + "\n")
    return 0


def cmd_solve(args):
    spec, q0 = spec_from_config(load_config(args.config))
    params = derive_params(q0, spec)
    tol = args.tol if args.tol is not None else params.eps
    sols = find_triples(spec, params.X, tol, limit=args.limit, threads=args.threads)
    payload = {
        "params": {
            "q0": params.q0,
            "X": _fmt(params.X),
            "Delta": _fmt(params.Delta),
            "eps": _fmt(params.eps),
            "H": _fmt(params.H),
            "smoothing_k": params.smoothing_k,
        },
        "tol": _fmt(tol),
        "count": len(sols),
        "solutions": [
            {"p1": s.p1, "p2": s.p2, "p3": s.p3, "value": _fmt(s.value)} for s in sols
        ],
    }
    _emit(args.out, json.dumps(payload, sort_keys=True, indent=2) + "\n")
    return 0


def cmd_verify(args):
    from .verify import run_verify

    criteria = None
    if args.criteria:
        criteria = [int(c) for c in args.criteria.split(",")]
    report, all_pass = run_verify(criteria=criteria, threads=args.threads)
    _emit(args.out, report)
    return 0 if all_pass else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ps-trident",
        description="Numerics for a three-prime Diophantine inequality over "
        "Piatetski-Shapiro primes.",
    )
    ap.add_argument("--threads", type=int, default=1, help="worker threads (results are thread-count independent)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("primes", help="sieve a PS prime table to CSV")
    p.add_argument("--gamma", required=True)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--lambda0", type=float, required=True)
    p.add_argument("--power", type=int, default=1, choices=(1, 2, 3, 4))
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_primes)

    p = sub.add_parser("kernel", help="sample the smoothing kernel and its transform")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--sample", type=int, default=512)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("sums", help="sample an exponential sum or integral")
    p.add_argument("--kind", required=True, choices=("s", "sigma", "u", "omega", "i"))
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--gamma", default=None)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--lambda0", type=float, required=True)
    p.add_argument("--tmin", type=float, required=True)
    p.add_argument("--tmax", type=float, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_sums)

    p = sub.add_parser("moments", help="exact moments and spectra of the unweighted sum")
    p.add_argument("--gamma", required=True)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--m", type=int, required=True, choices=(1, 2, 4, 8))
    p.add_argument("--out", default="-")
    p.add_argument("--dump-spectrum", default=None)
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("convergents", help="certified continued-fraction convergents")
    p.add_argument("--value", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_convergents)

    p = sub.add_parser("gamma", help="Gamma(X) directly and via the integral decomposition")
    p.add_argument("--config", required=True)
    p.add_argument("--quad-budget", type=int, default=10_000_000)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_gamma)

    p = sub.add_parser("solve", help="exhibit solution triples")
    p.add_argument("--config", required=True)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--limit", type=int, default=None)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="run the acceptance suite")
    p.add_argument("--criteria", default=None, help="comma-separated subset, e.g. 3,4,8")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_verify)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    started = time.time()
    try:
        code = args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 3
    except (SizeLimit, BudgetExceeded) as exc:
        print(f"limit exceeded: {exc}", file=sys.stderr)
        return 4
    except TridentError as exc:
        print(f"internal invariant violation: {exc}", file=sys.stderr)
        return 5
    _manifest(args, {"total_s": round(time.time() - started, 3)})
    return code


if __name__ == "__main__":
    sys.exit(main())
