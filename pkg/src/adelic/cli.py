"""``adelic`` command line.

Exit codes: 0 on success, 1 on usage errors (bad flags or literals), 2 on
domain errors, with the error's class name on stderr.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import asdict
from fractions import Fraction

from .adeles import Idele, canonicalize_idele, class_equal, is_principal
from .blocks import (
    AdelicBlock,
    BlockMorphism,
    block_dual,
    block_ptorsion,
    morphism_kernel,
    sequence_exactness,
)
from .errors import AdelicError, BudgetExceeded, LiteralError
from .ktheory import (
    NOT_MODELED,
    K0Class,
    hilbert_symbol,
    k0_class_of_block,
    k1_class_of_automorphism,
    k_lcaF_class,
    k_lcaF_equal,
    k_lcaF_trivial,
    mu_group,
    reciprocity_product,
    tate_index,
)
from .localfield import DEFAULT_PRECISION
from .numberfield import (
    FieldDesc,
    FracIdeal,
    embed_global,
    minkowski,
    parse_element,
    parse_place,
    split_prime,
    splitting_type,
)
from .oracle import (
    compare,
    oracle_hilbert_symbol,
    oracle_mu_order,
    oracle_snf_int,
    oracle_splitting,
)

MIN_PRECISION = 8
MAX_SWEEP = 200


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _precision(text):
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"precision must be an integer, got {text!r}") from None
    if n < MIN_PRECISION:
        raise argparse.ArgumentTypeError(f"precision must be at least {MIN_PRECISION}")
    return n


def _default_precision():
    env = os.environ.get("ADELIC_PRECISION")
    if env is None:
        return DEFAULT_PRECISION
    try:
        return _precision(env)
    except argparse.ArgumentTypeError as exc:
        raise UsageError(f"ADELIC_PRECISION: {exc}") from None


def _json_arg(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise LiteralError(f"not valid JSON ({exc.msg}): {text!r}") from None


# output


class Output:
    """A result: named fields, optional table rows, and the plain-text form."""

    def __init__(self, data, text=None, rows=None, header=None, ok=True):
        self.data = data
        self.text = text
        self.rows = rows
        self.header = header
        self.ok = ok

    def render(self, fmt):
        if fmt == "json":
            return json.dumps(self.data, sort_keys=False)
        if fmt == "csv":
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            if self.rows is not None:
                w.writerow(self.header)
                w.writerows(self.rows)
            else:
                w.writerow(["key", "value"])
                for k, v in self.data.items():
                    w.writerow([k, v if isinstance(v, (str, int)) else json.dumps(v)])
            return buf.getvalue().rstrip("\n")
        if self.text is not None:
            return self.text
        lines = [f"{k}: {_plain(v)}" for k, v in self.data.items()]
        if self.rows is not None:
            widths = [max(len(str(x)) for x in col) for col in zip(self.header, *self.rows)]
            fmt_row = "  ".join("{:>%d}" % w for w in widths)
            lines += [fmt_row.format(*self.header)] + [fmt_row.format(*map(str, r)) for r in self.rows]
        return "\n".join(lines)


def _plain(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (dict, list)):
        return json.dumps(v)
    return str(v)


def _bool(v):
    return "true" if v else "false"


# commands


def cmd_split(args):
    F = args.field
    places = split_prime(F, args.p)
    kind = splitting_type(F, args.p)
    P = places[0]
    data = {"p": args.p, "type": kind, "e": P.e, "f": P.f,
            "places": [{"label": Q.label(), "e": Q.e, "f": Q.f} for Q in places]}
    if kind == "inert":
        text = f"inert f={P.f}"
    elif kind == "ramified":
        text = f"ramified e={P.e}"
    else:
        text = "split e=1 f=1 places=" + ",".join(Q.label() for Q in places)
    if args.verify and args.p != 2 and not F.is_rational and F.d % args.p:
        rep = compare("split", f"d={F.d} p={args.p}", oracle_splitting(F.d, args.p), kind)
        data["verify"] = rep.verdict
        text += f"\nverify: {rep.verdict}"
        if not rep.agrees:
            return Output(data, text, ok=False)
    return Output(data, text)


def cmd_embed(args):
    F = args.field
    x = parse_element(F, _maybe_json(args.x))
    P = parse_place(F, args.place)
    y = embed_global(F, x, P, args.precision)
    if not P.is_finite:
        data = {"place": P.label(), "value": str(y)}
        return Output(data, str(y))
    data = {"place": P.label(), "value": y.render(), "valuation": y.valuation}
    return Output(data, y.render())


def _maybe_json(text):
    t = text.strip()
    if t.startswith("[") or t.startswith("{"):
        return _json_arg(t)
    return t


def cmd_minkowski(args):
    F = args.field
    J = FracIdeal.from_json(F, _json_arg(args.ideal)) if args.ideal else FracIdeal.unit(F)
    md = minkowski(F, J)
    basis = [[str(x) for x in row] for row in md.basis]
    data = {"ideal": J.to_json(), "basis": basis, "covolume_squared": str(md.covolume_squared),
            "torus_rank": md.torus_rank}
    return Output(data)


def _parse_idele(args, text):
    return Idele.from_json(_json_arg(text), args.field, args.precision)


def cmd_idele_reduce(args):
    alpha = _parse_idele(args, args.idele)
    q, unit = canonicalize_idele(alpha)
    principal = is_principal(alpha)
    data = {"q": q.literal(), "unitpart": unit.to_json(), "principal": principal}
    unit_text = "identity" if unit.is_identity() else str(unit)
    text = f"q={q}\nunit part: {unit_text}\nprincipal: {_bool(principal)}"
    return Output(data, text)


def cmd_class_equal(args):
    a = _parse_idele(args, args.alpha)
    b = _parse_idele(args, args.beta)
    eq = class_equal(a, b)
    return Output({"equal": eq}, _bool(eq))


def _parse_block(args, text):
    return AdelicBlock.from_json(_json_arg(text), args.field, args.precision)


def cmd_block_dual(args):
    B = _parse_block(args, args.block)
    D = block_dual(B)
    return Output(D.to_json(), json.dumps(D.to_json()))


def cmd_block_ptorsion(args):
    B = _parse_block(args, args.block)
    P = parse_place(B.field, args.place)
    comp = block_ptorsion(B, P)
    if not P.is_finite:
        return Output({"place": P.label(), "multiplicity": comp}, str(comp))
    dim, L = comp
    data = {"place": P.label(), "dim": dim, "lattice": L.to_json(), "standard": L.is_standard()}
    return Output(data)


def _parse_morphism(args, text):
    return BlockMorphism.from_json(_json_arg(text), F=args.field, precision=args.precision)


def cmd_exact_check(args):
    f = _parse_morphism(args, args.f)
    g = _parse_morphism(args, args.g)
    v = sequence_exactness(f, g)
    return Output({"exact": v.exact, "failures": list(v.failures)}, str(v))


def cmd_kernel(args):
    f = _parse_morphism(args, args.morphism)
    K, inc = morphism_kernel(f)
    data = {"kernel": K.to_json(), "inclusion": inc.to_json()}
    return Output(data)


def cmd_k0(args):
    c = k0_class_of_block(_parse_block(args, args.block))
    return Output(c.to_json(), str(c))


def cmd_k1(args):
    idele = k1_class_of_automorphism(_parse_morphism(args, args.morphism))
    return Output(idele.to_json(), str(idele))


def _parse_kclass(args, kind, text):
    doc = _json_arg(text)
    if kind == "k0":
        if args.field_given and "field" not in doc:
            doc["field"] = args.field.literal()
        return K0Class.from_json(doc)
    return Idele.from_json(doc, args.field, args.precision)


def cmd_k_class(args):
    a = _parse_kclass(args, args.kind, args.a)
    rep = k_lcaF_class(a)
    data = {"representative": rep.to_json(), "trivial": k_lcaF_trivial(a)}
    if args.b is not None:
        b = _parse_kclass(args, args.kind, args.b)
        data["equal"] = k_lcaF_equal(a, b)
    return Output(data)


def _rational(text):
    try:
        x = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise LiteralError(f"expected a nonzero rational, got {text!r}") from None
    if x == 0:
        raise LiteralError("Hilbert symbol arguments must be nonzero")
    return x


def cmd_hilbert(args):
    a, b = _rational(args.a), _rational(args.b)
    if args.place is None:
        prod, table = reciprocity_product(a, b)
        data = {"a": str(a), "b": str(b), "product": prod, "table": {str(k): v for k, v in table.items()}}
        rows = [[str(k), v] for k, v in table.items()]
        return Output(data, rows=rows, header=["place", "symbol"])
    v = args.place if args.place in ("inf", "oo") else int(args.place)
    s = hilbert_symbol(a, b, v)
    data = {"a": str(a), "b": str(b), "place": str(v), "symbol": s}
    text = str(s)
    if args.verify and v != "inf" and a.denominator == b.denominator == 1:
        rep = compare("hilbert", f"({a},{b})_{v}", oracle_hilbert_symbol(int(a), int(b), v), s)
        data["verify"] = rep.verdict
        text += f"\nverify: {rep.verdict}"
        if not rep.agrees:
            return Output(data, text, ok=False)
    return Output(data, text)


def cmd_reciprocity_table(args):
    n = args.max
    if n < 1:
        raise UsageError("--max must be at least 1")
    if n > MAX_SWEEP:
        raise BudgetExceeded(f"--max {n} exceeds the sweep budget {MAX_SWEEP}")
    vals = [x for x in range(-n, n + 1) if x]
    rows, failures = [], 0
    for a in vals:
        for b in vals:
            prod, table = reciprocity_product(a, b)
            if prod != 1:
                failures += 1
            cells = " ".join(f"{k}:{'+' if s > 0 else '-'}1" for k, s in table.items())
            rows.append([a, b, cells, prod])
    data = {"max": n, "pairs": len(rows), "failures": failures}
    if args.format == "json":
        data["rows"] = [{"a": a, "b": b, "table": t, "product": p} for a, b, t, p in rows]
    out = Output(data, rows=rows, header=["a", "b", "symbols", "product"], ok=failures == 0)
    return out


def cmd_mu(args):
    F = args.field
    P = parse_place(F, args.place)
    order, gen = mu_group(P, args.precision)
    data = {"place": P.label(), "order": order, "generator": gen.render(),
            "normalization": "teichmuller lift of the smallest residue generator", "k2_note": NOT_MODELED}
    text = f"order: {order}\ngenerator: {gen.render()}\nnormalization: {data['normalization']}"
    if args.verify and F.is_rational:
        rep = compare("mu", f"Q_{P.p}", oracle_mu_order(P.p), order)
        data["verify"] = rep.verdict
        text += f"\nverify: {rep.verdict}"
        if not rep.agrees:
            return Output(data, text, ok=False)
    return Output(data, text)


def cmd_tate_index(args):
    i = tate_index(args.a, args.b)
    return Output({"a": args.a, "b": args.b, "index": i}, str(i))


def cmd_oracle(args):
    name, rest = args.name, args.args
    try:
        if name == "hilbert":
            a, b, p = (int(x) for x in rest[:3])
            k = int(rest[3]) if len(rest) > 3 else None
            if len(rest) not in (3, 4):
                raise ValueError
            rep = compare("hilbert_symbol", f"a={a} b={b} p={p}", oracle_hilbert_symbol(a, b, p, k),
                          hilbert_symbol(a, b, p))
        elif name == "snf":
            if len(rest) != 1:
                raise ValueError
            M = _json_arg(rest[0])
            divs = oracle_snf_int(M)
            return Output({"subject": "snf", "matrix": M, "divisors": divs}, json.dumps({"divisors": divs}))
        elif name == "splitting":
            d, p = (int(x) for x in rest)
            F = FieldDesc(d)
            rep = compare("split_prime", f"d={d} p={p}", oracle_splitting(d, p), splitting_type(F, p))
        elif name == "mu":
            (p,) = (int(x) for x in rest)
            F = FieldDesc.rational()
            rep = compare("mu_group", f"Q_{p}", oracle_mu_order(p), mu_group(parse_place(F, p))[0])
        else:
            raise UsageError(f"unknown oracle {name!r}; expected hilbert, snf, splitting or mu")
    except ValueError:
        raise UsageError(f"bad arguments for oracle {name}: {' '.join(rest)}") from None
    return Output(asdict(rep), rep.to_json_line(), ok=rep.agrees)


# parser


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--field", default=None, help="q or quad:<d> (default q)")
    common.add_argument("--precision", type=_precision, default=None, help="p-adic digits (>= 8)")
    common.add_argument("--format", choices=["table", "json", "csv"], default="table")
    common.add_argument("--verify", action="store_true", help="cross-check with brute-force oracles")

    parser = _Parser(prog="adelic", description="Adelic blocks, idele classes and their K-theory.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=func)
        return p

    p = add("split", cmd_split, "splitting of a prime")
    p.add_argument("p", type=int)
    p = add("embed", cmd_embed, "image of a field element in a completion")
    p.add_argument("x")
    p.add_argument("place")
    p = add("minkowski", cmd_minkowski, "Minkowski lattice of an integral ideal")
    p.add_argument("ideal", nargs="?")
    p = add("idele-reduce", cmd_idele_reduce, "canonical idele class representative")
    p.add_argument("idele")
    p = add("class-equal", cmd_class_equal, "equality in the idele class group")
    p.add_argument("alpha")
    p.add_argument("beta")
    p = add("block-dual", cmd_block_dual, "Pontryagin dual of a block")
    p.add_argument("block")
    p = add("block-ptorsion", cmd_block_ptorsion, "P-torsion component of a block")
    p.add_argument("block")
    p.add_argument("place")
    p = add("exact-check", cmd_exact_check, "exactness of 0 -> A -f-> B -g-> C -> 0")
    p.add_argument("f")
    p.add_argument("g")
    p = add("kernel", cmd_kernel, "kernel of a block morphism")
    p.add_argument("morphism")
    p = add("k0", cmd_k0, "K0 class of a block")
    p.add_argument("block")
    p = add("k1", cmd_k1, "K1 class of a block automorphism")
    p.add_argument("morphism")
    p = add("k-class", cmd_k_class, "class in K0 or K1 of LCA_F")
    p.add_argument("kind", choices=["k0", "k1"])
    p.add_argument("a")
    p.add_argument("b", nargs="?")
    p = add("hilbert", cmd_hilbert, "Hilbert symbol over Q")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("place", nargs="?")
    p = add("reciprocity-table", cmd_reciprocity_table, "Hilbert reciprocity sweep")
    p.add_argument("--max", type=int, default=30)
    p = add("mu", cmd_mu, "roots of unity of a completion")
    p.add_argument("place")
    p = add("tate-index", cmd_tate_index, "relative index of t^a L0 and t^b L0")
    p.add_argument("a", type=int)
    p.add_argument("b", type=int)
    p = add("oracle", cmd_oracle, "run a brute-force oracle (hilbert, snf, splitting, mu)")
    p.add_argument("name")
    p.add_argument("args", nargs="*")
    return parser


def run(argv, stdout=None, stderr=None):
    """Run one command; returns the exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    try:
        args.field_given = args.field is not None
        args.field = FieldDesc.parse(args.field or "q")
        if args.precision is None:
            args.precision = _default_precision()
        out = args.func(args)
    except (UsageError, LiteralError) as exc:
        print(f"adelic: usage error: {exc}", file=stderr)
        return 1
    except AdelicError as exc:
        print(f"{exc.name}: {exc}", file=stderr)
        return 2
    print(out.render(args.format), file=stdout)
    return 0 if out.ok else 2


def main(argv=None):
    sys.exit(run(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    main()
