"""Command-line entry point ``hardedge``.

Exit codes: 0 on success, 2 for invalid input (bad flags or a violated
precondition), 3 for a numerical failure.  Errors are written to stderr as a
JSON object ``{"error": {"kind", "message"}}``.  Floats are printed with 17
significant digits so that outputs are diff-stable.
"""

import argparse
import json
import math
import sys

import numpy as np

from .errors import ConvergenceError, DomainError, NumericalError

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 2, 3


class ValidationError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(message)


def fmt(x):
    """Format a real or complex number with 17 significant digits."""
    if isinstance(x, complex) or np.iscomplexobj(x):
        x = complex(x)
        if x.imag != 0:
            return f"{x.real:.17g}{x.imag:+.17g}j"
        x = x.real
    if x is None:
        return "nan"
    return f"{float(x):.17g}"


def _json_value(v):
    if isinstance(v, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_json_value(x)}" for k, x in v.items()) + "}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_json_value(x) for x in v) + "]"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if v is None:
        return "null"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}" if math.isfinite(v) else "null"
    return json.dumps(v)


def dumps(obj):
    """JSON text with every float written as ``%.17g`` (non-finite floats become null)."""
    return _json_value(obj)


def _write_csv(stream, header, rows):
    stream.write(",".join(header) + "\n")
    for row in rows:
        stream.write(",".join(fmt(v) for v in row) + "\n")


def _note(message):
    sys.stderr.write(dumps({"note": message}) + "\n")


def _positive(name, v):
    if not v > 0:
        raise ValidationError(f"--{name} must be positive")


def _complex_arg(text):
    parts = text.split(",")
    if len(parts) not in (1, 2):
        raise argparse.ArgumentTypeError("expected RE or RE,IM")
    try:
        vals = [float(p) for p in parts]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc
    return complex(vals[0], vals[1] if len(vals) == 2 else 0.0)


def _float_list(text):
    try:
        return [float(p) for p in text.split(",") if p]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


# subcommands ---------------------------------------------------------------

def cmd_check_parametrix(args, out):
    from .parametrix import check_parametrix

    if not args.alpha > -1:
        raise ValidationError("--alpha must exceed -1")
    if args.samples < 1:
        raise ValidationError("--samples must be at least 1")
    rep = check_parametrix(args.alpha, samples=args.samples, seed=args.seed)
    out.write(dumps({"alpha": args.alpha, "samples": args.samples, "seed": args.seed, **rep}) + "\n")


def cmd_painleve(args, out):
    from .painleve import solve_hm

    if not args.nu > -0.5:
        raise ValidationError("--nu must exceed -1/2")
    if args.L < 10 or args.nodes < 200 or args.degree < 2:
        raise ValidationError("need --L >= 10, --nodes >= 200 and --degree >= 2")
    sol = solve_hm(args.nu, L=args.L, n_nodes=args.nodes, degree=args.degree)
    if args.emit == "json":
        out.write(dumps({"nu": sol.nu, "L": sol.L, "residual": sol.residual, "iterations": sol.iterations,
                         "q0": sol.q_at(0.0)}) + "\n")
        return
    _write_csv(out, ["x", "q", "qprime", "u"], zip(sol.x, sol.q, sol.qprime, sol.u))


def _load_state(path):
    from .laxham import PhaseState

    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read --init file: {exc}") from exc

    def cvec(key):
        vals = data.get(key)
        if not isinstance(vals, list) or len(vals) != 12:
            raise ValidationError(f"init file needs '{key}' with 12 entries")
        return np.array([complex(*v) if isinstance(v, list) else complex(v) for v in vals])

    s0 = float(data.get("s0", 1.0))
    overrides = {}
    for k in ("m11", "m12", "m13", "m14", "m33", "m34"):
        if k in data:
            v = data[k]
            overrides[k] = complex(*v) if isinstance(v, list) else complex(v)
    return PhaseState(s=s0, p=cvec("p"), q=cvec("q")), overrides


def cmd_laxham(args, out):
    from .laxham import ModelConstants, hamiltonian, identity_residuals_at, integrate
    from .painleve import m1_entries, solve_hm

    if not args.nu > -0.5:
        raise ValidationError("--nu must exceed -1/2")
    if args.points < 2:
        raise ValidationError("--points must be at least 2")
    state, overrides = _load_state(args.init)
    m1 = m1_entries(args.nu, args.stilde, args.tau, solve_hm(args.nu))
    consts = ModelConstants.from_m1(m1, **overrides)
    traj = integrate(state, consts, args.s_end, tol=args.tol)
    h = args.h
    if traj.s1 - traj.s0 <= 6 * h:
        raise ValidationError("--s-end too close to the initial s for the difference step")
    c14 = np.dot(state.p[:4], state.q[:4])
    c512 = np.dot(state.p[4:], state.q[4:])
    rows = []
    for s in np.linspace(traj.s0 + 2.5 * h, traj.s1 - 2.5 * h, args.points):
        st = traj(s)
        hv = hamiltonian(st, consts)
        res = identity_residuals_at(traj, consts, s, h)
        rows.append([s, hv.real, hv.imag, abs(np.dot(st.p[:4], st.q[:4]) - c14),
                     abs(np.dot(st.p[4:], st.q[4:]) - c512), res["dH"], res["H1"], res["A1"], res["A2"]])
    _write_csv(out, ["s", "H_re", "H_im", "sum14_drift", "sum512_drift", "dH", "H1", "A1", "A2"], rows)


def cmd_gap(args, out):
    from . import fredholm as fr

    if not args.alpha > -1:
        raise ValidationError("--alpha must exceed -1")
    _positive("s", args.s)
    if not 0 <= args.gamma <= 1:
        raise ValidationError("--gamma must lie in [0, 1]")
    kernel = fr.bessel_reference_kernel(args.alpha)
    res = fr.log_det(kernel, args.gamma, args.s, map=args.map, tol=args.tol)
    doc = {"log_det": res.value, "n_used": res.n_used}
    if args.resolvent:
        doc["resolvent_diag"] = fr.resolvent_diag_at_s(kernel, args.gamma, args.s, map=args.map,
                                                       tol=args.tol).value
    if args.gen_fn is not None:
        if args.gen_fn < 0:
            raise ValidationError("--gen-fn must be non-negative")
        val, n = fr.generating_function(kernel, args.s, args.gen_fn, map=args.map, tol=args.tol)
        doc["gen_fn"] = {"x": args.gen_fn, "value": val, "n_used": n}
    out.write(dumps(doc) + "\n")


def cmd_asymptotics(args, out):
    from . import asymptotics as asy
    from .painleve import m1_entries, solve_hm

    if not 0 <= args.gamma <= 1:
        raise ValidationError("--gamma must lie in [0, 1]")
    if not args.nu > -0.5:
        raise ValidationError("--nu must exceed -1/2")
    if not args.s or any(not s > 0 for s in args.s):
        raise ValidationError("--s needs positive values")
    m1 = None
    if args.gamma < 1 and args.m31 is not None and args.tau == 0:
        m1 = m1_entries(args.nu, args.stilde, args.tau, solve_hm(args.nu))
    params = asy.AsymptoticParams(nu=args.nu, gamma=args.gamma, stilde=args.stilde, tau=args.tau,
                                  m1=m1, m31=args.m31)
    nan = float("nan")
    if params.full:
        _note(f"F_asym includes the undetermined constant C = {fmt(args.C)}")
    elif params.beta != 0 and m1 is None:
        _note("F_asym needs --m31 and --tau 0; written as nan")
    rows = []
    for s in args.s:
        h = asy.h_asymptotic(s, params)
        try:
            f = asy.f_asymptotic(s, params, C=args.C)
        except DomainError:
            f = nan
        if s > 1:
            stats = asy.counting_stats(s, params)
            mu, sigma2 = stats["mu"], stats["sigma2"]
        else:
            mu = sigma2 = nan
        try:
            th = asy.theta(s, params)
        except DomainError:
            th = nan
        rows.append([s, h, f, mu, sigma2, th, args.C if params.full else nan])
    _write_csv(out, ["s", "H_asym", "F_asym", "mu", "sigma2", "theta", "C"], rows)


def cmd_simulate(args, out):
    from .pathsim import MAX_PATHS, sample_nonintersecting

    if not 1 <= args.n <= MAX_PATHS:
        raise ValidationError(f"--n must lie in 1..{MAX_PATHS}")
    if args.steps < 2:
        raise ValidationError("--steps must be at least 2")
    if args.a < 0 or args.b < 0:
        raise ValidationError("--a and --b must be non-negative")
    if not args.alpha > -1:
        raise ValidationError("--alpha must exceed -1")
    _positive("T", args.T)
    ens = sample_nonintersecting(args.n, args.alpha, args.a, args.b, steps=args.steps, T=args.T,
                                 seed=args.seed)
    rows = [[t, i, ens.X[i, k]] for i in range(ens.n) for k, t in enumerate(ens.times)]
    if args.out == "-":
        _write_csv(out, ["time", "path_index", "value"], rows)
        return
    with open(args.out, "w") as fh:
        _write_csv(fh, ["time", "path_index", "value"], rows)
    out.write(dumps({"out": args.out, "n": ens.n, "steps": args.steps, "seed": args.seed,
                     "acceptance_rate": ens.acceptance_rate, "attempts": ens.attempts}) + "\n")


def cmd_selftest(args, out):
    from .acceptance import run_all

    results = run_all(None if args.json else (lambda line: out.write(line + "\n")))
    passed = all(r.passed for r in results)
    if args.json:
        out.write(dumps({"passed": passed, "criteria": [
            {"number": r.number, "name": r.name, "passed": r.passed, "runtime": r.runtime,
             "limit": r.limit, "failures": r.failures} for r in results]}) + "\n")
    else:
        out.write(f"{sum(r.passed for r in results)}/{len(results)} criteria passed\n")
    return EXIT_OK if passed else EXIT_NUMERICAL


def build_parser():
    p = _Parser(prog="hardedge", description="Hard-edge tacnode numerics")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check-parametrix", help="numerical report for the Bessel model problem")
    c.add_argument("--alpha", type=float, required=True)
    c.add_argument("--samples", type=int, default=100)
    c.add_argument("--seed", type=int, default=0)
    c.set_defaults(func=cmd_check_parametrix)

    c = sub.add_parser("painleve", help="Hastings-McLeod solution on [-L, L]")
    c.add_argument("--nu", type=float, required=True)
    c.add_argument("--L", type=float, default=30.0)
    c.add_argument("--nodes", type=int, default=801)
    c.add_argument("--degree", type=int, default=20)
    c.add_argument("--emit", choices=["csv", "json"], default="csv")
    c.set_defaults(func=cmd_painleve)

    c = sub.add_parser("laxham", help="integrate the 24-function system and report identities")
    c.add_argument("--init", required=True, help="JSON with s0, p (12), q (12); entries RE or [RE, IM]")
    c.add_argument("--nu", type=float, required=True)
    c.add_argument("--stilde", type=float, default=0.0)
    c.add_argument("--tau", type=float, default=0.0)
    c.add_argument("--s-end", type=float, required=True)
    c.add_argument("--points", type=int, default=21)
    c.add_argument("--tol", type=float, default=1e-12)
    c.add_argument("--h", type=float, default=1e-3)
    c.add_argument("--emit", choices=["csv"], default="csv")
    c.set_defaults(func=cmd_laxham)

    c = sub.add_parser("gap", help="thinned Fredholm determinant of a reference kernel")
    c.add_argument("--kernel", choices=["bessel"], default="bessel")
    c.add_argument("--alpha", type=float, required=True)
    c.add_argument("--s", type=float, required=True)
    c.add_argument("--gamma", type=float, default=1.0)
    c.add_argument("--resolvent", action="store_true")
    c.add_argument("--gen-fn", type=float, default=None, metavar="X")
    c.add_argument("--map", choices=["gauss_legendre_sqrt", "gauss_legendre_linear"],
                   default="gauss_legendre_sqrt")
    c.add_argument("--tol", type=float, default=1e-10)
    c.set_defaults(func=cmd_gap)

    c = sub.add_parser("asymptotics", help="large-s expansions and counting statistics")
    c.add_argument("--gamma", type=float, required=True)
    c.add_argument("--nu", type=float, required=True)
    c.add_argument("--stilde", type=float, default=0.0)
    c.add_argument("--tau", type=float, default=0.0)
    c.add_argument("--s", type=_float_list, required=True, help="comma-separated values")
    c.add_argument("--m31", type=_complex_arg, default=None, help="RE,IM")
    c.add_argument("--C", type=float, default=0.0, help="constant term for gamma = 1")
    c.set_defaults(func=cmd_asymptotics)

    c = sub.add_parser("simulate", help="non-intersecting squared Bessel paths")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--alpha", type=float, default=0.0)
    c.add_argument("--a", type=float, required=True)
    c.add_argument("--b", type=float, required=True)
    c.add_argument("--steps", type=int, default=200)
    c.add_argument("--T", type=float, default=1.0)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out", default="-")
    c.set_defaults(func=cmd_simulate)

    c = sub.add_parser("selftest", help="run the acceptance criteria")
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_selftest)
    return p


def _fail(kind, exc, code):
    err = {"kind": kind, "message": str(exc)}
    residual = getattr(exc, "residual", None)
    if residual is not None:
        err["residual"] = float(residual)
    sys.stderr.write(dumps({"error": err}) + "\n")
    return code


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    try:
        args = build_parser().parse_args(argv)
        code = args.func(args, out)
        return EXIT_OK if code is None else code
    except ValidationError as exc:
        return _fail("validation", exc, EXIT_VALIDATION)
    except DomainError as exc:
        return _fail("domain", exc, EXIT_VALIDATION)
    except (NumericalError, ConvergenceError) as exc:
        return _fail("numerical", exc, EXIT_NUMERICAL)


if __name__ == "__main__":
    sys.exit(main())
