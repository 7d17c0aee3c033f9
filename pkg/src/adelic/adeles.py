"""Finitely presented adeles and ideles.

An idele is stored as a global scalar ``g`` times finitely many local
correction factors: its component at a finite place ``P`` is
``iota_P(g) * e_P`` with ``e_P = 1`` off the exception support.  Archimedean
corrections are field elements acting through the embedding, so the
component at ``sigma`` is ``sigma(g * c_sigma)``.  Diagonal ideles are exact
in this form even though they are not finitely supported away from 1.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    FieldMismatch,
    InsufficientPrecision,
    LiteralError,
    NonPrincipalFinitePart,
    UnsupportedField,
    ZeroElement,
)
from .localfield import DEFAULT_PRECISION, LocalElement, parse_local
from .numberfield import (
    FieldDesc,
    FieldElement,
    FracIdeal,
    embed_global,
    ideal_class,
    parse_element,
    parse_place,
    principal_generator,
    support_places,
    valuation,
)

# corrections equal to 1 below this many digits are kept, not silently dropped
MIN_EQUALITY_DIGITS = 8


def _sorted_items(d):
    return tuple(sorted(d.items(), key=lambda kv: kv[0].sort_key()))


@dataclass(frozen=True)
class Idele:
    field: FieldDesc
    g: FieldElement
    exceptions: tuple = ()
    arch: tuple = ()

    @classmethod
    def make(cls, F, g=1, exceptions=None, arch=None):
        if not isinstance(g, FieldElement):
            g = F.element(g)
        if g.field != F:
            raise FieldMismatch(f"scalar {g} is not in {F}")
        if not g:
            raise ZeroElement("global scalar of an idele must be nonzero")
        exc = {}
        for P, c in dict(exceptions or {}).items():
            if P.field != F or not P.is_finite:
                raise FieldMismatch(f"{P} is not a finite place of {F}")
            if not isinstance(c, LocalElement):
                c = LocalElement.from_rational(P, c)
            if c.is_zero():
                raise ZeroElement(f"idele correction at {P} is zero to precision")
            if c.is_one() and c.precision >= MIN_EQUALITY_DIGITS:
                continue
            exc[P] = c
        arch_map = {}
        given = dict(arch or {})
        for s in F.arch_places():
            c = given.pop(s, F.one)
            if not isinstance(c, FieldElement):
                c = F.element(c)
            if not c:
                raise ZeroElement(f"archimedean correction at {s} is zero")
            arch_map[s] = c
        if given:
            raise FieldMismatch(f"unknown archimedean places {list(given)}")
        return cls(F, g, _sorted_items(exc), tuple(arch_map.items()))

    @classmethod
    def identity(cls, F):
        return cls.make(F)

    @classmethod
    def principal(cls, q, F=None):
        if isinstance(q, FieldElement):
            return cls.make(q.field, q)
        return cls.make(F or FieldDesc.rational(), q)

    @property
    def exceptions_dict(self):
        return dict(self.exceptions)

    @property
    def arch_dict(self):
        return dict(self.arch)

    def component(self, place, precision=DEFAULT_PRECISION):
        if not place.is_finite:
            return (self.g * self.arch_dict[place]).evaluate(place)
        x = embed_global(self.field, self.g, place, precision)
        c = self.exceptions_dict.get(place)
        return x if c is None else x * c

    def arch_value(self, place):
        """Exact archimedean component, as the field element ``g * c_sigma``."""
        return self.g * self.arch_dict[place]

    def _check(self, other):
        if not isinstance(other, Idele):
            return NotImplemented
        if other.field != self.field:
            raise FieldMismatch(f"{self.field} vs {other.field}")
        return other

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        exc = self.exceptions_dict
        for P, c in other.exceptions:
            exc[P] = exc[P] * c if P in exc else c
        od = other.arch_dict
        arch = {s: c * od[s] for s, c in self.arch}
        return Idele.make(self.field, self.g * other.g, exc, arch)

    def inverse(self):
        return Idele.make(self.field, self.g.inverse(),
                          {P: c.inverse() for P, c in self.exceptions},
                          {s: c.inverse() for s, c in self.arch})

    def __truediv__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def exceptional_places(self):
        """Finite set outside which every component is a unit."""
        places = set(P for P, _ in self.exceptions) | set(support_places(self.g))
        return sorted(places, key=lambda P: P.sort_key())

    def nonunit_places(self):
        exc = self.exceptions_dict
        out = []
        for P in self.exceptional_places():
            v = valuation(self.g, P) + (exc[P].valuation if P in exc else 0)
            if v:
                out.append(P)
        return out

    def finite_valuations(self):
        exc = self.exceptions_dict
        out = {}
        for P in self.exceptional_places():
            v = valuation(self.g, P) + (exc[P].valuation if P in exc else 0)
            if v:
                out[P] = v
        return out

    def is_identity(self):
        return self.g == 1 and not self.exceptions and all(c == 1 for _, c in self.arch)

    # serialization

    def to_json(self):
        return {
            "field": self.field.literal(),
            "g": self.g.literal(),
            "exceptions": [[P.label(), c.render()] for P, c in self.exceptions],
            "arch": [c.literal() for _, c in self.arch],
        }

    @classmethod
    def from_json(cls, doc, F=None, precision=DEFAULT_PRECISION):
        if not isinstance(doc, dict):
            raise LiteralError("idele literal must be a JSON object")
        if "field" in doc:
            F = FieldDesc.parse(doc["field"])
        F = F or FieldDesc.rational()
        g = parse_element(F, doc.get("g", "1"))
        exc = {}
        for item in doc.get("exceptions", []):
            if not isinstance(item, (list, tuple)) or len(item) != 2:
                raise LiteralError("idele exceptions must be [[place, value], ...]")
            P = parse_place(F, item[0])
            exc[P] = parse_local_value(item[1], P, precision)
        arch_lits = doc.get("arch", [])
        places = F.arch_places()
        if len(arch_lits) not in (0, len(places)):
            raise LiteralError(f"{F} has {len(places)} archimedean places")
        arch = {s: parse_element(F, lit) for s, lit in zip(places, arch_lits)}
        return cls.make(F, g, exc, arch)

    def __str__(self):
        exc = ", ".join(f"{P}: {c.render()}" for P, c in self.exceptions)
        arch = ", ".join(f"{s}: {c}" for s, c in self.arch)
        return f"Idele(g={self.g}; exceptions={{{exc}}}; arch={{{arch}}})"


def parse_local_value(lit, place, precision=DEFAULT_PRECISION):
    """A local value from a rational literal or the rendered p-adic grammar."""
    if isinstance(lit, (int, float)) and not isinstance(lit, bool):
        lit = str(lit)
    if not isinstance(lit, str):
        raise LiteralError(f"local value must be a string, got {lit!r}")
    try:
        return LocalElement.from_rational(place, Fraction(lit), precision)
    except (ValueError, ZeroDivisionError):
        pass
    try:
        return parse_local(lit, place)
    except ValueError as exc:
        raise LiteralError(str(exc)) from None


def idele_arith(op, alpha, beta=None):
    if op == "mul":
        return alpha * beta
    if op == "inv":
        return alpha.inverse()
    raise ValueError(f"unknown op {op!r}")


def _finite_part_generator(alpha):
    """A field element with the same finite valuations as ``alpha``."""
    F = alpha.field
    if F.is_rational:
        q = Fraction(1)
        for P, v in alpha.finite_valuations().items():
            q *= Fraction(P.p) ** v
        return F.element(q)
    if not F.is_imaginary:
        raise UnsupportedField("idele class reduction needs unit-group data for real quadratic fields")
    corr = FracIdeal.make(F, {P: c.valuation for P, c in alpha.exceptions if c.valuation})
    gamma = principal_generator(F, corr)
    if gamma is None:
        label = ideal_class(F, corr)
        raise NonPrincipalFinitePart(f"finite part lies in the ideal class {label}", label)
    return alpha.g * gamma


def canonicalize_idele(alpha):
    """Split ``alpha = iota(q) * unitpart`` with ``unitpart`` the canonical class representative."""
    F = alpha.field
    q = _finite_part_generator(alpha)
    if F.is_rational:
        s = F.arch_places()[0]
        if alpha.arch_value(s).sign(s) < 0:
            q = -q
    else:
        # fix the ambiguity by mu(F): smallest coordinates of the unit-part scalar
        g0 = alpha.g / q
        zeta = min(F.roots_of_unity(), key=lambda z: ((g0 * z).a, (g0 * z).b))
        q = q / zeta
    unit = Idele.make(F, alpha.g / q, alpha.exceptions_dict, alpha.arch_dict)
    return q, unit


def is_principal(alpha):
    q, unit = canonicalize_idele(alpha)
    for P, c in unit.exceptions:
        if c.is_one():
            raise InsufficientPrecision(
                f"component at {P} is 1 only to {c.precision} digits (< {MIN_EQUALITY_DIGITS})")
    if unit.exceptions or any(c != 1 for _, c in unit.arch):
        return False
    return unit.g in alpha.field.roots_of_unity()


def class_equal(alpha, beta):
    if alpha.field != beta.field:
        raise FieldMismatch(f"{alpha.field} vs {beta.field}")
    return is_principal(alpha / beta)


@dataclass(frozen=True)
class Adele:
    """Global element ``t`` plus finitely many additive local corrections."""

    field: FieldDesc
    t: FieldElement
    corrections: tuple = ()
    arch: tuple = ()

    @classmethod
    def make(cls, F, t=0, corrections=None, arch=None):
        if not isinstance(t, FieldElement):
            t = F.element(t)
        corr = {}
        for P, c in dict(corrections or {}).items():
            if not isinstance(c, LocalElement):
                c = LocalElement.from_rational(P, c)
            if not c.is_exact_zero():
                corr[P] = c
        given = dict(arch or {})
        arch_map = {}
        for s in F.arch_places():
            c = given.get(s, F.zero)
            arch_map[s] = c if isinstance(c, FieldElement) else F.element(c)
        return cls(F, t, _sorted_items(corr), tuple(arch_map.items()))

    @classmethod
    def principal(cls, t, F=None):
        if isinstance(t, FieldElement):
            return cls.make(t.field, t)
        return cls.make(F or FieldDesc.rational(), t)

    def component(self, place, precision=DEFAULT_PRECISION):
        if not place.is_finite:
            return (self.t + dict(self.arch)[place]).evaluate(place)
        base = embed_global(self.field, self.t, place, precision) if self.t else LocalElement.zero(place)
        c = dict(self.corrections).get(place)
        return base if c is None else base + c

    def __add__(self, other):
        if other.field != self.field:
            raise FieldMismatch(f"{self.field} vs {other.field}")
        corr = dict(self.corrections)
        for P, c in other.corrections:
            corr[P] = corr[P] + c if P in corr else c
        oa = dict(other.arch)
        return Adele.make(self.field, self.t + other.t, corr, {s: c + oa[s] for s, c in self.arch})

    def __neg__(self):
        return Adele.make(self.field, -self.t, {P: -c for P, c in self.corrections},
                          {s: -c for s, c in self.arch})

    def __sub__(self, other):
        return self + (-other)

    def nonintegral_places(self):
        """Finite places where the component is not integral (a finite set)."""
        cands = set(P for P, _ in self.corrections)
        if self.t:
            cands |= set(P for P in support_places(self.t) if valuation(self.t, P) < 0)
        out = []
        for P in sorted(cands, key=lambda P: P.sort_key()):
            if not self.component(P).is_integral():
                out.append(P)
        return out
