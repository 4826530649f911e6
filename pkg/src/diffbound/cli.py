"""Command-line interface.

Exit status: 0 success, 1 usage error, 2 domain error, 3 budget exceeded.
Budget defaults can be overridden with DIFFBOUND_BIT_GUARD, DIFFBOUND_STEP_GUARD,
DIFFBOUND_TIME_GUARD, DIFFBOUND_ENUM_GUARD, DIFFBOUND_EVAL_BITS and
DIFFBOUND_TERM_GUARD, and per call with the matching flags.
"""

from __future__ import annotations

import argparse
import contextlib
import decimal
import json
import sys
from pathlib import Path

from . import bounds as B
from .acceptance import run_all
from .budget import Budget
from .chainbound import T_bound, t_bound
from .diffpoly.parse import parse_point, parse_polys, parse_system
from .errors import BudgetExceeded, DiffBoundError, DomainError
from .multiindex import alpha, enumerate_gamma
from .oracle import check_case1, max_strict_chain, validate_witness, verify_prolong_on_points, verify_t_soundness
from .prolong import integrability_conditions, nabla_point, prolong_epsilon, prolong_substitution
from .sequences import parse_sequence

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_help(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    out = p.add_argument_group("output")
    out.add_argument("--json", action="store_true", help="emit one JSON object")
    fmt = out.add_mutually_exclusive_group()
    fmt.add_argument("--hex", action="store_true", help="print integers in hexadecimal")
    fmt.add_argument("--bits", action="store_true", help="print only the bit length of integers")
    g = p.add_argument_group("budget")
    g.add_argument("--bit-guard", type=int, help="largest integer (bits) to materialize")
    g.add_argument("--step-guard", type=int, help="recursion/iteration step limit")
    g.add_argument("--time-guard", type=float, help="wall-clock limit in seconds")
    g.add_argument("--enum-guard", type=int, help="largest enumeration")
    g.add_argument("--eval-bits", type=int, help="exact-evaluation threshold for bounds")
    g.add_argument("--term-guard", type=int, help="largest intermediate polynomial (terms)")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    return p


def _budget(args) -> Budget:
    try:
        base = Budget.from_env()
    except ValueError as exc:
        raise UsageError(f"bad budget environment variable: {exc}") from exc
    try:
        return base.with_(
            bits=args.bit_guard,
            steps=args.step_guard,
            seconds=args.time_guard,
            enumeration=args.enum_guard,
            eval_bits=args.eval_bits,
            terms=args.term_guard,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


FAST_DECIMAL_BITS = 1 << 16


def decimal_str(value: int) -> str:
    """str(value), via libmpdec for huge values (int -> str is quadratic before 3.12)."""
    if abs(value) < 1 << FAST_DECIMAL_BITS:
        return str(value)
    ctx = decimal.Context(prec=decimal.MAX_PREC, Emax=decimal.MAX_EMAX)
    powers: dict = {}

    def pow2(k: int) -> decimal.Decimal:
        if k not in powers:
            powers[k] = ctx.power(decimal.Decimal(2), k)
        return powers[k]

    def convert(n: int, bits: int) -> decimal.Decimal:
        if bits <= FAST_DECIMAL_BITS:
            return decimal.Decimal(n)
        half = bits // 2
        hi, lo = n >> half, n & ((1 << half) - 1)
        return ctx.add(ctx.multiply(convert(hi, bits - half), pow2(half)), convert(lo, half))

    out = convert(abs(value), abs(value).bit_length())
    return ("-" if value < 0 else "") + format(out, "f")


def _fmt_int(value: int, args) -> str:
    if args.bits:
        return str(value.bit_length())
    if args.hex:
        return hex(value)
    return decimal_str(value)


def _int_json(value: int, args):
    if args.bits:
        return {"bit_length": value.bit_length()}
    return hex(value) if args.hex else decimal_str(value)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DomainError(f"cannot read {path}: {exc.strerror}") from exc


# handlers return (json_object, text)


def cmd_alpha(args, budget):
    v = alpha(args.m, args.ell)
    return {"m": args.m, "ell": args.ell, "alpha": _int_json(v, args)}, _fmt_int(v, args)


def cmd_gamma(args, budget):
    idx = enumerate_gamma(args.m, args.ell, budget.enumeration)
    rows = [list(xi) for xi in idx]
    text = "\n".join("(" + ",".join(map(str, r)) + ")" for r in rows)
    return {"m": args.m, "ell": args.ell, "count": len(rows), "indices": rows}, text


def cmd_tbound(args, budget):
    seq = parse_sequence(args.seq)
    v = t_bound(args.m, args.n, seq, budget)
    return {"m": args.m, "n": args.n, "seq": args.seq, "t": _int_json(v, args)}, _fmt_int(v, args)


def cmd_Tbound(args, budget):
    v = T_bound(args.m, args.n, args.r, budget)
    return {"m": args.m, "n": args.n, "r": args.r, "T": _int_json(v, args)}, _fmt_int(v, args)


def _equation_lines(out):
    return "\n".join(f"[{eq.generator}] {tuple(eq.xi)}: {eq.poly}" for eq in out.equations)


def cmd_prolong(args, budget):
    gens = parse_polys(_read(args.input), args.m)
    if args.method == "subst":
        out = prolong_substitution(gens, args.ell)
    elif args.method == "epsilon":
        out = prolong_epsilon(gens, args.ell, budget=budget)
    else:
        out = prolong_substitution(gens, args.ell)
        other = prolong_epsilon(gens, args.ell, budget=budget)
        if out.to_json() != other.to_json():
            raise DomainError("substitution and exponential prolongations disagree")
    return out.to_json(), _equation_lines(out)


def cmd_nabla(args, budget):
    if not args.point:
        raise UsageError("nabla needs at least one --point xj=<poly in t>")
    pt = parse_point(args.point, args.m)
    values = nabla_point(pt, args.ell, args.m)
    coords = [
        f"x{j}" + ("" if not any(xi) else "_[" + ",".join(map(str, xi)) + "]")
        for xi in enumerate_gamma(args.m, args.ell)
        for j in sorted(pt)
    ]
    text = "\n".join(f"{c} = {v}" for c, v in zip(coords, values))
    return {"ell": args.ell, "coords": coords, "values": [str(v) for v in values]}, text


def cmd_integrability(args, budget):
    system = parse_system(_read(args.input), args.m)
    conds = integrability_conditions(system)
    return {"conditions": [str(c) for c in conds]}, "\n".join(str(c) for c in conds)


def _bound_output(expr, args, budget):
    value = B.eval_bound(expr, budget)
    meta = {k: v for k, v in expr.meta.items() if k != "T"}
    if "T" in expr.meta:
        T = expr.meta["T"]
        meta["T"] = str(T) if T.bit_length() <= 64 else {"bit_length": T.bit_length()}
    if isinstance(value, B.Magnitude):
        value_json, text = value.to_json(), str(value)
    else:
        value_json, text = _int_json(value, args), _fmt_int(value, args)
    obj = {"expr": B.to_json(expr), "value": value_json, "meta": meta}
    if args.show_expr:
        text = f"{text}\n{B.to_str(expr)}"
    return obj, text


def cmd_bound(args, budget):
    kind = args.bound_kind
    if kind == "first-order":
        expr = B.uniform_bound_first_order(args.m, args.n, args.d, args.degV, args.degW, budget)
    elif kind == "positive-dim":
        expr = B.bound_positive_dim(args.m, args.n, args.d, args.d0, args.degV, args.degW, budget)
    elif kind == "higher-order":
        expr = B.bound_higher_order(args.m, args.n, args.ell, args.d, args.degV, args.degW, budget)
    elif kind == "generators":
        expr = B.bound_generator_degrees(args.m, args.n, args.D, args.r, args.s, budget)
    else:
        expr = B.isogeny_bound(args.degV, args.d)
    return _bound_output(expr, args, budget)


def cmd_oracle(args, budget):
    kind = args.oracle_kind
    if kind == "chain":
        seq = parse_sequence(args.seq)
        rep = max_strict_chain(args.m, args.n, seq, args.depth_cap, budget, args.method)
        validate_witness(rep, seq, budget)
        lines = [f"max strict steps {rep.max_strict_steps} ({'exhaustive' if rep.exhaustive else 'non-exhaustive'}, {rep.method})"]
        lines += [f"S_{j} = {s.to_json()}" for j, s in enumerate(rep.witness)]
        return rep.to_json(), "\n".join(lines)
    if kind == "case1":
        try:
            sigma = tuple(int(v) for v in args.sigma.split(","))
        except ValueError as exc:
            raise DomainError(f"sigma must look like 1,2, got {args.sigma!r}") from exc
        rep = check_case1(sigma, args.box, budget)
        text = f"max size {rep.max_size} <= {rep.bound}: {rep.ok}\nwitness {rep.witness}"
        return rep.to_json(), text
    if kind == "tsound":
        seq = parse_sequence(args.seq)
        rep = verify_t_soundness(args.m, args.n, seq, args.depth_cap, budget, args.method)
        verdict = "pass" if rep.passed else "fail"
        return rep.to_json(), f"{verdict}: {rep.max_strict_steps} <= {rep.t} - 1"
    gens = parse_polys(_read(args.input), args.m)
    m = gens[0].m if gens else 1
    points = [parse_point([c for c in p.split(";") if c.strip()], m) for p in args.point or []]
    if not points:
        raise UsageError("prolong-points needs at least one --point")
    rep = verify_prolong_on_points(gens, points, args.ell)
    return rep.to_json(), f"{'ok' if rep.ok else 'violations'}: {rep.checked} equations checked" + "".join(
        f"\n  {v}" for v in rep.violations
    )


def cmd_selftest(args, budget):
    numbers = [int(x) for x in args.criteria.split(",")] if args.criteria else None
    results = run_all(numbers, seed=args.seed)
    obj = {
        "passed": all(r.passed for r in results),
        "criteria": [
            {"number": r.number, "name": r.name, "passed": r.passed, "detail": r.detail, "seconds": round(r.seconds, 3)}
            for r in results
        ],
    }
    return obj, "\n".join(r.line() for r in results)


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="diffbound", description="Effective bounds and prolongations for differential polynomial systems.")
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True

    def leaf(subparsers, name, helptext, fn):
        p = subparsers.add_parser(name, help=helptext, description=helptext, parents=[common])
        p.set_defaults(handler=fn)
        return p

    p = leaf(sub, "alpha", "alpha_ell = binom(ell + m, m)", cmd_alpha)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--ell", type=int, required=True)

    p = leaf(sub, "gamma", "multi-indices of order <= ell in canonical order", cmd_gamma)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--ell", type=int, required=True)

    p = leaf(sub, "tbound", "antichain chain bound t(m, n, seq)", cmd_tbound)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seq", required=True, help="geometric:r=1, linear:start=1,step=1, explicit:[1,2]:then=geometric")

    p = leaf(sub, "Tbound", "prolongation depth T_r^{m,n}", cmd_Tbound)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, default=1)

    p = leaf(sub, "prolong", "prolongation equations of a generator file", cmd_prolong)
    p.add_argument("--input", required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--method", choices=("subst", "epsilon", "both"), default="subst")
    p.add_argument("--m", type=int, help="number of derivations (inferred when omitted)")

    p = leaf(sub, "nabla", "all derivatives up to order ell of a polynomial point", cmd_nabla)
    p.add_argument("--point", action="append", help="xj=<poly in t>, repeat per coordinate")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--m", type=int, default=1)

    p = leaf(sub, "integrability", "integrability conditions of a first-order system file", cmd_integrability)
    p.add_argument("--input", required=True)
    p.add_argument("--m", type=int, help="number of derivations (inferred when omitted)")

    bound = sub.add_parser("bound", help="degree and cardinality bounds")
    bsub = bound.add_subparsers(dest="bound_kind", metavar="kind", parser_class=_Parser)
    bsub.required = True
    specs = {
        "first-order": ("m", "n", "d", "degV", "degW"),
        "positive-dim": ("m", "n", "d", "d0", "degV", "degW"),
        "higher-order": ("m", "n", "ell", "d", "degV", "degW"),
        "generators": ("m", "n", "D", "r", "s"),
        "isogeny": ("degV", "d"),
    }
    for name, fields in specs.items():
        p = leaf(bsub, name, f"{name} bound", cmd_bound)
        for f in fields:
            p.add_argument(f"--{f}", type=int, required=True)
        p.add_argument("--show-expr", action="store_true", help="also print the symbolic expression")

    oracle = sub.add_parser("oracle", help="brute-force verifiers")
    osub = oracle.add_subparsers(dest="oracle_kind", metavar="kind", parser_class=_Parser)
    osub.required = True
    for name in ("chain", "tsound"):
        p = leaf(osub, name, "longest constrained antichain chain" if name == "chain" else "check t against the oracle", cmd_oracle)
        p.add_argument("--m", type=int, required=True)
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--seq", required=True)
        p.add_argument("--depth-cap", type=int)
        p.add_argument("--method", choices=("auto", "explicit", "levels"), default="auto")
    p = leaf(osub, "case1", "largest antichain of [0,B]^2 through sigma", cmd_oracle)
    p.add_argument("--sigma", required=True, help="two entries, e.g. 1,2")
    p.add_argument("--box", type=int, required=True)
    p = leaf(osub, "prolong-points", "prolongation equations vanish on nabla of points", cmd_oracle)
    p.add_argument("--input", required=True)
    p.add_argument("--point", action="append", help="x1=t1;x2=t1^2, repeat per point")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--m", type=int)

    p = leaf(sub, "selftest", "run the acceptance checks", cmd_selftest)
    p.add_argument("--criteria", help="comma-separated criterion numbers (default: all)")
    return parser


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    if hasattr(sys, "set_int_max_str_digits"):
        sys.set_int_max_str_digits(0)
    parser = build_parser()
    try:
        with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(stderr):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    want_json = getattr(args, "json", False)

    def fail(code, kind, message):
        if want_json:
            print(json.dumps({"error": kind, "message": message}), file=stdout)
        else:
            print(f"error: {message}", file=stderr)
        return code

    try:
        budget = _budget(args)
        obj, text = args.handler(args, budget)
    except UsageError as exc:
        parser.print_usage(stderr)
        return fail(EXIT_USAGE, "usage", str(exc))
    except BudgetExceeded as exc:
        return fail(EXIT_BUDGET, "budget", str(exc))
    except (DiffBoundError, ValueError) as exc:
        return fail(EXIT_DOMAIN, "domain", str(exc))
    if want_json:
        print(json.dumps(obj, sort_keys=True), file=stdout)
    elif text:
        print(text, file=stdout)
    if args.command == "selftest" and not obj["passed"]:
        return EXIT_USAGE
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
