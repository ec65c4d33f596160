"""Command-line front end.

Exit status: 0 on success, 1 on a domain error raised by the library,
2 on a usage or input-format error.
"""

from __future__ import annotations

import argparse
import math
import sys
from fractions import Fraction
from typing import Callable

from . import chains, lr, measure, metric, padic, scalar_fields
from .exact import as_fraction

EXIT_DOMAIN = 1
EXIT_PARSE = 2


class InputError(Exception):
    """Unparseable input text or flag value."""


def _parsed(fn: Callable, *args):
    try:
        return fn(*args)
    except InputError:
        raise
    except (ValueError, TypeError, ZeroDivisionError, KeyError) as exc:
        raise InputError(str(exc)) from None


def rational(text: str) -> Fraction:
    try:
        return as_fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from exc


def rational_or_inf(text: str):
    if text.strip().lower() in ("inf", "infinity", "∞"):
        return math.inf
    return rational(text)


def rational_list(text: str) -> list[Fraction]:
    return [rational(t) for t in text.replace(";", ",").split(",") if t.strip()]


def absval(text: str) -> scalar_fields.AbsoluteValue:
    try:
        return scalar_fields.parse_absval(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _read(path: str | None) -> str:
    if path is None or path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(str(exc)) from None


def _fmt(x) -> str:
    if x == math.inf:
        return "inf"
    return str(x)


# absval ---------------------------------------------------------------------


def cmd_absval_eval(args, out):
    out(f"|{args.value}| = {args.abs(args.value)}")


def cmd_absval_audit(args, out):
    pairs = [tuple(p) for p in args.pair] if args.pair else []
    bad = scalar_fields.check_q_subadditive(args.abs, pairs, args.q)
    out(f"q={args.q} violations={len(bad)}")
    for x, y in bad:
        out(f"violation {x} {y}")
    verdict = scalar_fields.is_archimedean(args.abs, args.n_max)
    if isinstance(verdict, scalar_fields.Archimedean):
        out(f"archimedean witness={verdict.witness}")
    else:
        out(f"non-archimedean up to {verdict.n_max}")


def cmd_absval_equiv(args, out):
    a = scalar_fields.equivalence_exponent(args.v1, args.v2, args.samples)
    out(f"a={'absent' if a is None else a}")


# padic ----------------------------------------------------------------------


def _report_padic(x: padic.PadicApprox, out, name="residue"):
    out(f"{name}={x.residue} digits={','.join(map(str, x.digits()))}")


def cmd_padic_embed(args, out):
    _report_padic(padic.from_rational(args.value, args.p, args.prec), out)


def cmd_padic_arith(args, out):
    x = padic.from_rational(args.x, args.p, args.prec)
    if args.op == "neg":
        res = -x
    elif args.op == "inv":
        res = x.invert()
    else:
        if args.y is None:
            raise InputError(f"--y is required for {args.op}")
        y = padic.from_rational(args.y, args.p, args.prec)
        res = {"add": x + y, "sub": x - y, "mul": x * y}[args.op]
    _report_padic(res, out)


def cmd_padic_geom(args, out):
    x = padic.from_rational(args.x, args.p, args.prec)
    if args.n is not None:
        _report_padic(padic.geometric_sum(x, args.n), out, "sum")
    _report_padic(padic.geometric_limit(x), out, "limit")


def cmd_padic_digits(args, out):
    _report_padic(padic.PadicApprox(args.p, args.prec, args.residue), out)


# metric ---------------------------------------------------------------------


def _matrix(args) -> metric.DistMatrix:
    return _parsed(metric.parse_distmatrix, _read(args.input), args.tol)


def cmd_metric_verify(args, out):
    D = _matrix(args)
    if args.q is None:
        bad = metric.verify_ultrametric(D)
        out(f"ultrametric violations={len(bad)}")
    else:
        bad = metric.verify_qmetric(D, args.q)
        out(f"q={args.q} violations={len(bad)}")
    for t in bad:
        out("violation " + " ".join(t))


def cmd_metric_maxq(args, out):
    out(f"q*={_fmt(metric.max_metric_exponent(_matrix(args)))}")


def cmd_metric_power(args, out):
    out(metric.format_distmatrix(metric.power_transform(_matrix(args), args.a)), end="")


def cmd_metric_isoceles(args, out):
    bad = metric.isoceles_audit(_matrix(args))
    out(f"non-isoceles={len(bad)}")
    for t in bad:
        out("triple " + " ".join(t))


def cmd_metric_ball(args, out):
    D = _matrix(args)
    members = metric.ball(D, args.x, args.r, args.closed)
    out(" ".join(sorted(members, key=D.index)))


# chain ----------------------------------------------------------------------


def cmd_chain_partition(args, out):
    out(chains.format_partition(chains.eta_partition(_matrix(args), args.eta)), end="")


def cmd_chain_subdominant(args, out):
    out(metric.format_distmatrix(chains.subdominant_ultrametric(_matrix(args))), end="")


def cmd_chain_thresholds(args, out):
    out(" ".join(_fmt(t) for t in chains.critical_thresholds(_matrix(args))))


def cmd_chain_length(args, out):
    D = _matrix(args)
    if args.chain:
        points = [p for p in args.chain.split(",") if p]
        out(f"length={chains.chain_a_length(D, points, args.a)}")
        return
    if args.source is None or args.target is None:
        raise InputError("give --chain, or both --from and --to")
    if args.a == math.inf:
        u = chains.subdominant_ultrametric(D)
        out(f"length={u(args.source, args.target)}")
        return
    value, witness = chains.min_a_length(D, args.source, args.target, args.a)
    out(f"length={value} chain={','.join(witness.points)}")


def cmd_chain_profile(args, out):
    eta = chains.zero_dim_profile(_matrix(args), args.x, args.r)
    out(f"eta*={'absent' if eta is None else _fmt(eta)}")


def cmd_chain_quantize(args, out):
    out(metric.format_distmatrix(chains.quantize_metric(_matrix(args), args.base)), end="")


# lr -------------------------------------------------------------------------


def _vector(path) -> lr.FiniteVec:
    return _parsed(lr.parse_finitevec, _read(path))


def _space(args, f: lr.FiniteVec | None = None) -> lr.NormedSpace:
    return lr.NormedSpace(args.scalar, (f.dim if f is not None and f.dim else args.dim))


def cmd_lr_norm(args, out):
    f = _vector(args.input)
    n = lr.lr_norm(_space(args, f), f, args.r)
    out(f"norm={n.value}" + ("" if n.power is None else f" power={n.power}"))


def cmd_lr_tail(args, out):
    f = _vector(args.input)
    keys = lr.tail_support(_space(args, f), f, args.eps, args.r)
    out(" ".join(str(k) for k in sorted(keys, key=lr._key_order)))


def cmd_lr_erdos(args, out):
    space = lr.NormedSpace(args.scalar, len(args.value) if args.value else args.dim)
    if args.target is not None:
        if args.eta is None:
            raise InputError("--target needs --eta")
        cert = lr.unboundedness_certificate(space, args.eta, args.target, args.r)
        out(f"v_eta={','.join(map(str, cert.v_eta))} step={cert.step_norm} length={cert.length} "
            f"endpoint_power={cert.endpoint_power()}")
        return
    if not args.value or args.n is None:
        raise InputError("give --value and --n, or --eta and --target")
    for l, f in enumerate(lr.erdos_chain(space, range(1, args.n + 1), tuple(args.value))):
        n = lr.lr_norm(space, f, args.r)
        out(f"l={l} norm={n.value} power={n.power}")


def cmd_lr_sphere(args, out):
    f, g = _vector(args.f), _vector(args.g)
    res = lr.sphere_tail_bound(_space(args, f), f, g, args.eps, args.r, args.t)
    keys = " ".join(str(k) for k in sorted(res.support, key=lr._key_order))
    out(f"A={keys} tail={res.tail} bound={res.bound} holds={str(res.holds).lower()}")


# measure --------------------------------------------------------------------


def _mu(args) -> measure.FAMeasure:
    if args.measure is None:
        return measure.FAMeasure.lebesgue()
    return _parsed(measure.parse_measure, _read(args.measure))


def _simple(path) -> measure.SimpleFn:
    return _parsed(measure.parse_simplefn, _read(path))


def _iset(text) -> measure.IntervalSet:
    return _parsed(measure.parse_intervalset, text)


def cmd_measure_integrate(args, out):
    out(f"integral={measure.integrate_simple(_mu(args), _simple(args.input))}")


def cmd_measure_norm(args, out):
    f = _simple(args.input)
    n = measure.lr_norm_simple(_mu(args), f, args.r, lr.NormedSpace(args.scalar, f.dim))
    out(f"norm={n.value}" + ("" if n.power is None else f" power={n.power}"))


def cmd_measure_dmu(args, out):
    out(f"d={measure.sym_diff_metric(_mu(args), _iset(args.a), _iset(args.b))}")


def cmd_measure_decompose(args, out):
    for piece in measure.chain_decompose(_mu(args), _iset(args.set), args.eps):
        out(str(piece))


def cmd_measure_path(args, out):
    f = _simple(args.input)
    res = measure.path_modulus(_mu(args), f, args.t1, args.t2, args.r, lr.NormedSpace(args.scalar, f.dim))
    out(f"lhs={res.lhs} rhs={res.rhs} holds={str(res.holds).lower()}")


def cmd_measure_push(args, out):
    space, phi = _parsed(measure.parse_atoms, _read(args.atoms))
    lhs, rhs = measure.pushforward_check(space, phi, _simple(args.f))
    out(f"pullback={lhs} pushforward={rhs} equal={str(lhs == rhs).lower()}")


# parser ---------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InputError(message)


def _matrix_args(p):
    p.add_argument("input", nargs="?", help="distance-matrix file (default: stdin)")
    p.add_argument("--tol", type=float, default=0.0, help="relative tolerance; >0 reads entries as floats")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nonarch", description=__doc__)
    top = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def group(name, help):
        g = top.add_parser(name, help=help)
        return g.add_subparsers(dest="action", required=True, parser_class=_Parser)

    # absval
    sub = group("absval", "absolute values on Q")
    p = sub.add_parser("eval")
    p.add_argument("--abs", type=absval, required=True, help="trivial | real | padic:P, optional ^E")
    p.add_argument("--value", type=rational, required=True)
    p.set_defaults(func=cmd_absval_eval)
    p = sub.add_parser("audit")
    p.add_argument("--abs", type=absval, required=True)
    p.add_argument("--q", type=rational, default=Fraction(1))
    p.add_argument("--pair", type=rational_list, action="append", help="x,y (repeatable)")
    p.add_argument("--n-max", type=int, default=100)
    p.set_defaults(func=cmd_absval_audit)
    p = sub.add_parser("equiv")
    p.add_argument("--v1", type=absval, required=True)
    p.add_argument("--v2", type=absval, required=True)
    p.add_argument("--samples", type=rational_list, required=True)
    p.set_defaults(func=cmd_absval_equiv)

    # padic
    sub = group("padic", "p-adic integers at finite precision")

    def padic_common(p):
        p.add_argument("--p", type=int, required=True)
        p.add_argument("--prec", type=int, required=True)

    p = sub.add_parser("embed")
    padic_common(p)
    p.add_argument("--value", type=rational, required=True)
    p.set_defaults(func=cmd_padic_embed)
    p = sub.add_parser("arith")
    padic_common(p)
    p.add_argument("--op", choices=["add", "sub", "mul", "neg", "inv"], required=True)
    p.add_argument("--x", type=rational, required=True)
    p.add_argument("--y", type=rational)
    p.set_defaults(func=cmd_padic_arith)
    p = sub.add_parser("geom")
    padic_common(p)
    p.add_argument("--x", type=rational, required=True)
    p.add_argument("--n", type=int)
    p.set_defaults(func=cmd_padic_geom)
    p = sub.add_parser("digits")
    padic_common(p)
    p.add_argument("--residue", type=int, required=True)
    p.set_defaults(func=cmd_padic_digits)

    # metric
    sub = group("metric", "distance-matrix audits")
    p = sub.add_parser("verify")
    _matrix_args(p)
    p.add_argument("--q", type=rational, help="check the q-metric inequality (default: ultrametric)")
    p.set_defaults(func=cmd_metric_verify)
    p = sub.add_parser("maxq")
    _matrix_args(p)
    p.set_defaults(func=cmd_metric_maxq)
    p = sub.add_parser("power")
    _matrix_args(p)
    p.add_argument("--a", type=rational, required=True)
    p.set_defaults(func=cmd_metric_power)
    p = sub.add_parser("isoceles")
    _matrix_args(p)
    p.set_defaults(func=cmd_metric_isoceles)
    p = sub.add_parser("ball")
    _matrix_args(p)
    p.add_argument("--x", required=True)
    p.add_argument("--r", type=rational, required=True)
    p.add_argument("--closed", action="store_true")
    p.set_defaults(func=cmd_metric_ball)

    # chain
    sub = group("chain", "eta-chains, subdominant ultrametric, chain lengths")
    p = sub.add_parser("partition")
    _matrix_args(p)
    p.add_argument("--eta", type=rational_or_inf, required=True)
    p.set_defaults(func=cmd_chain_partition)
    p = sub.add_parser("subdominant")
    _matrix_args(p)
    p.set_defaults(func=cmd_chain_subdominant)
    p = sub.add_parser("thresholds")
    _matrix_args(p)
    p.set_defaults(func=cmd_chain_thresholds)
    p = sub.add_parser("length")
    _matrix_args(p)
    p.add_argument("--a", type=rational_or_inf, required=True)
    p.add_argument("--chain", help="comma-separated labels")
    p.add_argument("--from", dest="source")
    p.add_argument("--to", dest="target")
    p.set_defaults(func=cmd_chain_length)
    p = sub.add_parser("profile")
    _matrix_args(p)
    p.add_argument("--x", required=True)
    p.add_argument("--r", type=rational, required=True)
    p.set_defaults(func=cmd_chain_profile)
    p = sub.add_parser("quantize")
    _matrix_args(p)
    p.add_argument("--base", type=rational, required=True)
    p.set_defaults(func=cmd_chain_quantize)

    # lr
    sub = group("lr", "l^r norms of finitely supported vectors")

    def lr_common(p, needs_input=True):
        if needs_input:
            p.add_argument("input", nargs="?", help="vector file (default: stdin)")
        p.add_argument("--scalar", type=absval, default=scalar_fields.RealStd())
        p.add_argument("--dim", type=int, default=1)
        p.add_argument("--r", type=rational_or_inf, required=True)

    p = sub.add_parser("norm")
    lr_common(p)
    p.set_defaults(func=cmd_lr_norm)
    p = sub.add_parser("tail")
    lr_common(p)
    p.add_argument("--eps", type=rational, required=True)
    p.set_defaults(func=cmd_lr_tail)
    p = sub.add_parser("erdos")
    lr_common(p, needs_input=False)
    p.add_argument("--value", type=rational_list, help="coordinates of v_eta")
    p.add_argument("--n", type=int)
    p.add_argument("--eta", type=rational)
    p.add_argument("--target", type=rational)
    p.set_defaults(func=cmd_lr_erdos)
    p = sub.add_parser("sphere")
    lr_common(p, needs_input=False)
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)
    p.add_argument("--eps", type=rational, required=True)
    p.add_argument("--t", type=rational)
    p.set_defaults(func=cmd_lr_sphere)

    # measure
    sub = group("measure", "simple functions and finitely-additive measures on [0,1)")

    def measure_common(p):
        p.add_argument("--measure", help="distribution-function file (default: Lebesgue)")

    p = sub.add_parser("integrate")
    p.add_argument("input", nargs="?")
    measure_common(p)
    p.set_defaults(func=cmd_measure_integrate)
    p = sub.add_parser("norm")
    p.add_argument("input", nargs="?")
    measure_common(p)
    p.add_argument("--r", type=rational_or_inf, required=True)
    p.add_argument("--scalar", type=absval, default=scalar_fields.RealStd())
    p.set_defaults(func=cmd_measure_norm)
    p = sub.add_parser("dmu")
    measure_common(p)
    p.add_argument("--a", required=True, help="interval set, e.g. '[0,1/2) [3/4,1)'")
    p.add_argument("--b", required=True)
    p.set_defaults(func=cmd_measure_dmu)
    p = sub.add_parser("decompose")
    measure_common(p)
    p.add_argument("--set", required=True)
    p.add_argument("--eps", type=rational, required=True)
    p.set_defaults(func=cmd_measure_decompose)
    p = sub.add_parser("path")
    p.add_argument("input", nargs="?")
    measure_common(p)
    p.add_argument("--t1", type=rational, required=True)
    p.add_argument("--t2", type=rational, required=True)
    p.add_argument("--r", type=rational, required=True)
    p.add_argument("--scalar", type=absval, default=scalar_fields.RealStd())
    p.set_defaults(func=cmd_measure_path)
    p = sub.add_parser("push")
    p.add_argument("--atoms", required=True, help="lines 'label weight phi'")
    p.add_argument("--f", required=True, help="simple-function file")
    p.set_defaults(func=cmd_measure_push)

    return parser


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr

    def out(text="", end="\n"):
        stdout.write(text + end)

    try:
        args = build_parser().parse_args(argv)
        args.func(args, out)
    except InputError as exc:
        stderr.write(f"nonarch: input error: {exc}\n")
        return EXIT_PARSE
    except (ValueError, ArithmeticError, KeyError) as exc:
        stderr.write(f"nonarch: {exc}\n")
        return EXIT_DOMAIN
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
