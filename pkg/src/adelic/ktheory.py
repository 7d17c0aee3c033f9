"""K-groups of adelic blocks and of LCA_F on the finitely presented fragment.

K0 classes are eventually constant integer vectors indexed by places, K1
classes are ideles, and K2 torsion is modelled by vectors of local roots of
unity modulo the diagonal image of mu(F).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from sympy import factorint, isprime

from . import linalg
from .adeles import Idele, canonicalize_idele, class_equal, is_principal
from .blocks import AdelicBlock, BlockMorphism
from .errors import (
    FieldMismatch,
    NotInvertible,
    NotPrime,
    SingularToPrecision,
    UnsupportedPlace,
    ZeroElement,
)
from .localfield import DEFAULT_PRECISION, LocalElement, is_square, local_model, sqrt, teichmuller
from .numberfield import FieldDesc, embed_global

# K2 carries a uniquely divisible summand that is not computed here
NOT_MODELED = "uniquely divisible part: not modeled"


# K0


@dataclass(frozen=True)
class K0Class:
    field: FieldDesc
    arch: tuple
    tail: int
    exceptions: tuple = ()

    @classmethod
    def make(cls, F, tail=0, exceptions=None, arch=None):
        given = {} if arch is None else dict(arch)
        av = tuple((s, int(given.pop(s, tail))) for s in F.arch_places())
        if given:
            raise FieldMismatch(f"unknown archimedean places {list(given)}")
        exc = tuple(sorted(((P, int(v)) for P, v in dict(exceptions or {}).items() if v != tail),
                           key=lambda t: t[0].sort_key()))
        return cls(F, av, int(tail), exc)

    @classmethod
    def constant(cls, F, n):
        return cls.make(F, n)

    def value_at(self, place):
        if not place.is_finite:
            return dict(self.arch)[place]
        return dict(self.exceptions).get(place, self.tail)

    def _places(self, other):
        return {P for P, _ in self.exceptions} | {P for P, _ in other.exceptions}

    def _combine(self, other, op):
        if other.field != self.field:
            raise FieldMismatch(f"{self.field} vs {other.field}")
        exc = {P: op(self.value_at(P), other.value_at(P)) for P in self._places(other)}
        oa = dict(other.arch)
        arch = {s: op(v, oa[s]) for s, v in self.arch}
        return K0Class.make(self.field, op(self.tail, other.tail), exc, arch)

    def __add__(self, other):
        return self._combine(other, lambda x, y: x + y)

    def __sub__(self, other):
        return self._combine(other, lambda x, y: x - y)

    def __neg__(self):
        return K0Class.make(self.field, -self.tail, {P: -v for P, v in self.exceptions},
                            {s: -v for s, v in self.arch})

    def shift(self, n):
        return self + K0Class.constant(self.field, n)

    def is_constant(self):
        return not self.exceptions and all(v == self.tail for _, v in self.arch)

    def is_zero(self):
        return self.tail == 0 and self.is_constant()

    def to_json(self):
        return {
            "field": self.field.literal(),
            "arch": {s.label(): v for s, v in self.arch},
            "tail": self.tail,
            "exceptions": [[P.label(), v] for P, v in self.exceptions],
        }

    @classmethod
    def from_json(cls, doc):
        from .numberfield import parse_place

        F = FieldDesc.parse(doc.get("field", "q"))
        arch = {parse_place(F, k): v for k, v in doc.get("arch", {}).items()}
        exc = {parse_place(F, P): v for P, v in doc.get("exceptions", [])}
        return cls.make(F, doc.get("tail", 0), exc, arch or None)

    def __str__(self):
        arch = ", ".join(f"{s}: {v}" for s, v in self.arch)
        exc = ", ".join(f"{P}: {v}" for P, v in self.exceptions)
        return f"K0[arch {{{arch}}}; tail {self.tail}; exceptions {{{exc}}}]"


def k0_class_of_block(B: AdelicBlock) -> K0Class:
    return K0Class.make(B.field, B.tail_dim, {P: d for P, d, _ in B.exceptions}, B.arch_dict)


def k0_image_of_free(n, F=None):
    if n < 0:
        raise ValueError("rank must be non-negative")
    return K0Class.constant(F or FieldDesc.rational(), n)


def k0_is_bounded_deviation(c: K0Class):
    """Uniform bound of the entries and the places where ``c`` leaves its tail."""
    values = [c.tail] + [v for _, v in c.arch] + [v for _, v in c.exceptions]
    deviation = [s for s, v in c.arch if v != c.tail] + [P for P, _ in c.exceptions]
    return max(abs(v) for v in values), deviation


# K1


def k1_det(M, one=None):
    """Determinant of a square matrix over F or over a completion."""
    if not M:
        return 1 if one is None else one
    if one is None:
        x = M[0][0]
        one = LocalElement.one(x.place, x.precision or DEFAULT_PRECISION) if isinstance(x, LocalElement) else 1
        if not isinstance(x, LocalElement) and hasattr(x, "field"):
            one = x.field.one
    d = linalg.det([list(r) for r in M], one)
    if linalg.is_zero(d):
        raise SingularToPrecision("matrix is singular")
    return d


def whitehead_reduce(M):
    """Reduce an invertible local matrix to ``diag(det, 1, ..., 1)`` by transvections.

    Returns ``(D, ops)``; each op ``(i, j, c)`` means ``row_i += c * row_j``.

    The ops are computed on a zero-padded lift of ``M`` so that divisions by
    pivots do not eat the digits of the unit entries; ``D[0][0]`` is then cut
    back to the precision the determinant of ``M`` actually has.
    """
    n = len(M)
    local = n and isinstance(M[0][0], LocalElement)
    if local:
        N = max(x.precision for r in M for x in r if not x.is_zero()) if any(
            not x.is_zero() for r in M for x in r) else DEFAULT_PRECISION
        A = [[x if x.is_zero() else LocalElement(x.place, x.valuation, x.unit, 3 * N) for x in r] for r in M]
    else:
        A = [list(r) for r in M]
    ops = []

    def addrow(i, j, c):
        A[i] = [a + c * b for a, b in zip(A[i], A[j])]
        ops.append((i, j, c))

    for c in range(n):
        cands = [i for i in range(c, n) if not linalg.is_zero(A[i][c])]
        if not cands:
            raise SingularToPrecision("matrix is singular to precision")
        i = min(cands, key=lambda i: linalg._pivot_key(A[i][c]))
        if i != c:
            addrow(c, i, 1)
        for k in range(c + 1, n):
            if not linalg.is_zero(A[k][c]):
                addrow(k, c, -(A[k][c] / A[c][c]))
    for c in range(n - 1, -1, -1):
        for k in range(c):
            if not linalg.is_zero(A[k][c]):
                addrow(k, c, -(A[k][c] / A[c][c]))
    # diag(y, ..., x, ...) -> diag(x*y, ..., 1, ...) via four transvections
    for j in range(1, n):
        x, y = A[j][j], A[0][0]
        addrow(0, j, 1 / x)
        addrow(j, 0, 1 - x)
        addrow(0, j, -1)
        addrow(j, 0, -((1 - x) * y) / (x * y))
    if local:
        d = k1_det(M)
        A = [[x if x.is_zero() else x.with_precision(min(x.precision, N)) for x in r] for r in A]
        A[0][0] = A[0][0].with_precision(min(A[0][0].precision, d.precision))
    return A, ops


def k1_class_of_automorphism(f: BlockMorphism) -> Idele:
    if f.source != f.target:
        raise NotInvertible("source and target differ")
    F = f.field
    try:
        g = k1_det(f.tail, F.one) if f.tail else F.one
        exc = {}
        for P, M in f.overrides:
            d = k1_det(M) if M else LocalElement.one(P, f.precision)
            exc[P] = d / embed_global(F, g, P, f.precision)
        arch = {}
        for s, A in f.arch:
            d = k1_det(A, F.one) if A else F.one
            arch[s] = d / g
    except (SingularToPrecision, ZeroElement) as exc_:
        raise NotInvertible(str(exc_)) from None
    return Idele.make(F, g, exc, arch)


# quotients by the diagonal image of K(F)


def k_lcaF_class(c):
    """Canonical representative of the image in K0(LCA_F) or K1(LCA_F)."""
    if isinstance(c, K0Class):
        return c.shift(-c.tail)
    if isinstance(c, Idele):
        return canonicalize_idele(c)[1]
    raise TypeError(f"not a K-class: {c!r}")


def k_lcaF_equal(a, b):
    if isinstance(a, K0Class) and isinstance(b, K0Class):
        return (a - b).is_constant()
    if isinstance(a, Idele) and isinstance(b, Idele):
        return class_equal(a, b)
    raise TypeError("both classes must be K0 classes or both ideles")


def k_lcaF_trivial(c):
    if isinstance(c, K0Class):
        return c.is_constant()
    return is_principal(c)


def alpha0(n, F=None):
    """K0(F) = Z -> K0(LCA_F,ab): rank n to the constant vector."""
    return K0Class.constant(F or FieldDesc.rational(), n)


def alpha1(q, F=None):
    """K1(F) = F^x -> K1(LCA_F,ab): the diagonal idele."""
    return Idele.principal(q, F)


def alpha0_injective_on(ns, F=None):
    return all(alpha0(n, F).is_zero() == (n == 0) for n in ns)


def alpha1_injective_on(qs, F=None):
    return all(alpha1(q, F).is_identity() == (q == 1) for q in qs)


# roots of unity and K2 torsion


def _residue_mul(model, x, y):
    p = model.p
    if model.f == 1:
        return x * y % p
    r = model.mul((x[0], x[1]), (y[0], y[1]))
    return (r[0] % p, r[1] % p)


def _residue_generator(model):
    q = model.p ** model.f
    one = (1, 0) if model.f == 2 else 1
    primes = list(factorint(q - 1))
    for r in model.residue_field():
        if model.is_residue_zero(r):
            continue
        ok = True
        for ell in primes:
            x, k = one, (q - 1) // ell
            base = r
            while k:
                if k & 1:
                    x = _residue_mul(model, x, base)
                base = _residue_mul(model, base, base)
                k >>= 1
            if x == one:
                ok = False
                break
        if ok:
            return r
    raise UnsupportedPlace("no residue generator")


def _wild_roots(place, precision):
    """The p-power roots of unity: order and a generator."""
    p = place.p
    one = LocalElement.one(place, precision + 4)
    if p == 2:
        m1 = -one
        if is_square(m1):
            return 4, sqrt(m1).with_precision(precision)
        return 2, m1.with_precision(precision)
    if p == 3:
        m3 = LocalElement.from_rational(place, -3, precision + 4)
        if is_square(m3):
            return 3, ((sqrt(m3) - 1) / 2).with_precision(precision)
    return 1, one.with_precision(precision)


def mu_group(place, precision=DEFAULT_PRECISION):
    """``(|mu(F_P)|, generator)``; the generator is Teichmuller(smallest residue generator) times the wild part."""
    if not place.is_finite:
        raise UnsupportedPlace("roots of unity are only tabulated at finite places")
    model = local_model(place)
    q = model.p ** model.f
    r = _residue_generator(model)
    t = teichmuller(r, place, precision)
    w, z = _wild_roots(place, precision)
    return (q - 1) * w, (t * z).with_precision(precision)


def mu_order_of_field(F):
    return len(F.roots_of_unity())


@dataclass(frozen=True)
class MuVector:
    """Local roots of unity ``gen_P^k_P`` at finitely many places, times a global root ``zeta_F^e``."""

    field: FieldDesc
    entries: tuple = ()
    global_exp: int = 0

    @classmethod
    def make(cls, F, entries=None, global_exp=0):
        out = []
        for P, k in dict(entries or {}).items():
            if P.field != F or not P.is_finite:
                raise FieldMismatch(f"{P} is not a finite place of {F}")
            k %= mu_order(P)
            if k:
                out.append((P, k))
        out.sort(key=lambda t: t[0].sort_key())
        return cls(F, tuple(out), global_exp % mu_order_of_field(F))

    def __mul__(self, other):
        if other.field != self.field:
            raise FieldMismatch(f"{self.field} vs {other.field}")
        e = dict(self.entries)
        for P, k in other.entries:
            e[P] = e.get(P, 0) + k
        return MuVector.make(self.field, e, self.global_exp + other.global_exp)

    def inverse(self):
        return MuVector.make(self.field, {P: -k for P, k in self.entries}, -self.global_exp)

    def tame(self):
        """Per entry: is the local root of order prime to the residue characteristic?"""
        out = {}
        for P, k in self.entries:
            n = mu_order(P)
            order = n // gcd(n, k)
            out[P] = order % P.p != 0
        return out

    def is_diagonal(self):
        return not self.entries

    def __str__(self):
        ents = ", ".join(f"{P}: {k}" for P, k in self.entries)
        return f"MuVector({{{ents}}}; global {self.global_exp})"


def mu_order(place):
    model = local_model(place)
    q = model.p ** model.f
    return (q - 1) * _wild_roots(place, 8)[0]


def k2_torsion_class_equal(u: MuVector, w: MuVector) -> bool:
    if u.field != w.field:
        raise FieldMismatch(f"{u.field} vs {w.field}")
    return (u * w.inverse()).is_diagonal()


# Hilbert symbols over Q


def _square_class(x):
    x = Fraction(x)
    if x == 0:
        raise ZeroElement("Hilbert symbol needs nonzero arguments")
    return x.numerator * x.denominator


def _split(n, p):
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v, n


def _legendre(u, p):
    r = pow(u % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else 1


def hilbert_symbol(a, b, v):
    """``(a, b)_v`` for nonzero rationals, ``v`` a prime or ``"inf"``."""
    a, b = _square_class(a), _square_class(b)
    if v in ("inf", "oo", None) or v == float("inf"):
        return -1 if a < 0 and b < 0 else 1
    p = int(v)
    if not isprime(p):
        raise NotPrime(f"{p} is not prime")
    al, u = _split(a, p)
    be, w = _split(b, p)
    if p != 2:
        sign = -1 if (al * be * ((p - 1) // 2)) % 2 else 1
        return sign * _legendre(u, p) ** be * _legendre(w, p) ** al

    def eps(x):
        return ((x - 1) // 2) % 2

    def omega(x):
        return ((x * x - 1) // 8) % 2

    e = eps(u) * eps(w) + al * omega(w) + be * omega(u)
    return -1 if e % 2 else 1


def reciprocity_places(a, b):
    a, b = _square_class(a), _square_class(b)
    primes = set(factorint(abs(a))) | set(factorint(abs(b))) | {2}
    return ["inf"] + sorted(primes)


def reciprocity_product(a, b):
    """Product of ``(a, b)_v`` over the places where it can be nontrivial, and the table."""
    table = {v: hilbert_symbol(a, b, v) for v in reciprocity_places(a, b)}
    prod = 1
    for s in table.values():
        prod *= s
    return prod, table


# finite field index


def tate_index(a, b):
    """Relative dimension of ``t^a L0`` against ``t^b L0`` in ``F_q((t))``."""
    return b - a
