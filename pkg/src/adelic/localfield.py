"""Arithmetic in completions of Q and of quadratic fields.

A completion of local degree two is modelled as ``Z_p[theta]/(theta^2 - t*theta - n)``
with ``theta`` either an unramified generator (``f = 2``) or an Eisenstein
uniformizer (``e = 2``).  Ring elements are pairs ``(a, b)`` meaning
``a + b*theta``; in local degree one ``b`` is always 0.

Elements carry *relative* precision: ``x = pi^v * u`` with the unit ``u`` known
modulo ``pi^N``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import (
    DivisionByZeroToPrecision,
    InsufficientPrecision,
    NoRootInResidueField,
    NotASimpleRoot,
    PlaceMismatch,
    UnsupportedPlace,
    ZeroResidue,
)

DEFAULT_PRECISION = 32
INF = math.inf


def vp(n: int, p: int) -> float:
    """p-adic valuation of an integer; ``inf`` for 0."""
    if n == 0:
        return INF
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass(frozen=True)
class PlaceRef:
    field: object
    kind: str  # "finite", "real" or "complex"
    p: int = 0
    e: int = 1
    f: int = 1
    index: int = 0

    @property
    def is_finite(self) -> bool:
        return self.kind == "finite"

    @property
    def q(self) -> int:
        return self.p ** self.f

    def sort_key(self):
        return (0, self.p, self.index) if self.is_finite else (1, 0, self.index)

    def label(self) -> str:
        if not self.is_finite:
            n_arch = len(self.field.arch_places())
            return "inf" if n_arch == 1 else f"inf{self.index}"
        if len(self.field.places_above(self.p)) == 1:
            return str(self.p)
        return f"{self.p}.{self.index}"

    def __str__(self):
        return self.label()

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()


@dataclass(frozen=True)
class _Model:
    p: int
    e: int
    f: int
    t: int
    n: int

    @property
    def degree(self):
        return self.e * self.f

    def moduli(self, N):
        p = self.p
        if self.e == 2:
            return p ** ((N + 1) // 2), p ** (N // 2)
        return p ** N, p ** N

    def reduce(self, r, N):
        ma, mb = self.moduli(N)
        return (r[0] % ma, r[1] % mb if self.degree == 2 else 0)

    def add(self, r, s):
        return (r[0] + s[0], r[1] + s[1])

    def mul(self, r, s):
        if self.degree == 1:
            return (r[0] * s[0], 0)
        a1, b1 = r
        a2, b2 = s
        bb = b1 * b2
        return (a1 * a2 + bb * self.n, a1 * b2 + a2 * b1 + bb * self.t)

    def pow(self, r, k, N):
        result = self.reduce((1, 0), N)
        base = self.reduce(r, N)
        while k:
            if k & 1:
                result = self.reduce(self.mul(result, base), N)
            base = self.reduce(self.mul(base, base), N)
            k >>= 1
        return result

    def valuation(self, r, M):
        """Valuation of ``r`` (known mod pi^M), capped at ``M``."""
        a, b = self.reduce(r, M)
        if self.e == 2:
            v = min(2 * vp(a, self.p), 2 * vp(b, self.p) + 1)
        else:
            v = min(vp(a, self.p), vp(b, self.p))
        return min(v, M)

    def pi(self):
        return (0, 1) if self.e == 2 else (self.p, 0)

    def pi_power(self, k):
        if self.e == 1:
            return (self.p ** k, 0)
        r = (1, 0)
        for _ in range(k):
            r = self.mul(r, (0, 1))
        return r

    def div_pi(self, r, k, M):
        """Divide ``r`` (valuation >= k, known mod pi^M) by pi^k."""
        p = self.p
        if self.e == 1:
            pk = p ** k
            return self.reduce((r[0] // pk, r[1] // pk), M - k)
        # p/theta = (theta - t)/n1 where n = p*n1
        inv = pow(self.n // p, -1, p ** (M + 1))
        for i in range(k):
            a, b = self.reduce(r, M - i)
            a1 = a // p
            r = (b - a1 * self.t * inv, a1 * inv)
        return self.reduce(r, M - k)

    def inverse(self, r, N):
        K = N + 1
        mod = self.p ** K
        if self.degree == 1:
            return self.reduce((pow(r[0], -1, mod), 0), N)
        a, b = r
        norm = a * a + a * b * self.t - b * b * self.n
        ninv = pow(norm, -1, mod)
        return self.reduce(((a + b * self.t) * ninv, -b * ninv), N)

    def residue(self, r):
        if self.f == 2:
            return (r[0] % self.p, r[1] % self.p)
        return r[0] % self.p

    def lift(self, residue):
        if self.f == 2:
            return (residue[0] % self.p, residue[1] % self.p)
        return (residue % self.p, 0)

    def residue_field(self):
        """All residue field elements, in order of the encoding ``a + b*p``."""
        if self.f == 2:
            return [(i % self.p, i // self.p) for i in range(self.p * self.p)]
        return list(range(self.p))

    def is_residue_zero(self, residue):
        return residue == (0, 0) if self.f == 2 else residue % self.p == 0


def _smallest_nonresidue(p):
    for n in range(2, p):
        if pow(n, (p - 1) // 2, p) == p - 1:
            return n
    raise ValueError(p)


@lru_cache(maxsize=None)
def local_model(place: PlaceRef) -> _Model:
    if not place.is_finite:
        raise UnsupportedPlace(f"{place} is archimedean")
    p = place.p
    if place.e * place.f == 1:
        return _Model(p, 1, 1, 0, 0)
    if place.f == 2:
        if p == 2:
            return _Model(2, 1, 2, -1, -1)
        return _Model(p, 1, 2, 0, _smallest_nonresidue(p))
    d = place.field.d
    if p == 2 and d % 4 == 3:
        # theta = 1 + sqrt(d), theta^2 = 2*theta + (d - 1)
        return _Model(2, 2, 1, 2, d - 1)
    return _Model(p, 2, 1, 0, d)


@dataclass(frozen=True)
class LocalElement:
    """``pi^valuation * unit`` with ``unit`` known modulo ``pi^precision``.

    A zero has ``unit is None``; its ``valuation`` is the absolute precision
    (``inf`` for an exact zero).
    """

    place: PlaceRef
    valuation: int | float
    unit: tuple | None
    precision: int

    # constructors

    @classmethod
    def zero(cls, place, absprec=INF):
        return cls(place, absprec, None, 0)

    @classmethod
    def from_ring(cls, place, r, M, base=0):
        """Normalize the ring element ``pi^base * r`` with ``r`` known mod ``pi^M``."""
        model = local_model(place)
        r = model.reduce(r, M)
        v = model.valuation(r, M)
        if v >= M:
            return cls.zero(place, base + M)
        u = model.div_pi(r, v, M)
        return cls(place, base + v, u, M - v)

    @classmethod
    def from_rational(cls, place, q, precision=DEFAULT_PRECISION):
        q = Fraction(q)
        if q == 0:
            return cls.zero(place)
        model = local_model(place)
        p = place.p
        num, den = q.numerator, q.denominator
        k = vp(num, p) - vp(den, p)
        num //= p ** vp(num, p)
        den //= p ** vp(den, p)
        K = precision + 2
        mod = p ** K
        u = (num * pow(den, -1, mod) % mod, 0)
        if model.e == 2 and k:
            # p = pi^2 * w^-1 with w = pi^2 / p
            w = (model.n // p, model.t // p)
            wk = model.pow(w, abs(k), precision)
            if k > 0:
                wk = model.inverse(wk, precision)
            u = model.mul(u, wk)
        return cls(place, model.e * k, model.reduce(u, precision), precision)

    @classmethod
    def one(cls, place, precision=DEFAULT_PRECISION):
        return cls(place, 0, local_model(place).reduce((1, 0), precision), precision)

    @classmethod
    def uniformizer(cls, place, precision=DEFAULT_PRECISION):
        return cls(place, 1, local_model(place).reduce((1, 0), precision), precision)

    @classmethod
    def pi_power(cls, place, k, precision=DEFAULT_PRECISION):
        return cls(place, k, local_model(place).reduce((1, 0), precision), precision)

    # basic predicates

    @property
    def model(self):
        return local_model(self.place)

    def is_zero(self):
        return self.unit is None

    def is_exact_zero(self):
        return self.unit is None and self.valuation == INF

    @property
    def abs_precision(self):
        return self.valuation if self.unit is None else self.valuation + self.precision

    def is_unit(self):
        return self.unit is not None and self.valuation == 0

    def is_integral(self):
        return self.valuation >= 0

    def is_one(self):
        return self.is_unit() and self.unit == self.model.reduce((1, 0), self.precision)

    # arithmetic

    def _coerce(self, other):
        if isinstance(other, LocalElement):
            if other.place != self.place:
                raise PlaceMismatch(f"{self.place} vs {other.place}")
            return other
        if isinstance(other, (int, Fraction)):
            return LocalElement.from_rational(self.place, other, max(self.precision, DEFAULT_PRECISION))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        x, y = self, other
        if x.unit is None and y.unit is None:
            return LocalElement.zero(self.place, min(x.valuation, y.valuation))
        if x.unit is None:
            x, y = y, x
        if y.unit is None:
            A = y.valuation
            if x.valuation >= A:
                return LocalElement.zero(self.place, A)
            N = min(x.precision, A - x.valuation)
            return LocalElement(self.place, x.valuation, self.model.reduce(x.unit, N), N)
        if y.valuation < x.valuation:
            x, y = y, x
        model = self.model
        shift = y.valuation - x.valuation
        M = min(x.precision, shift + y.precision)
        if shift >= M:
            s = x.unit
        else:
            s = model.add(x.unit, model.mul(model.pi_power(shift), y.unit))
        return LocalElement.from_ring(self.place, s, M, base=x.valuation)

    __radd__ = __add__

    def __neg__(self):
        if self.unit is None:
            return self
        a, b = self.unit
        return LocalElement(self.place, self.valuation, self.model.reduce((-a, -b), self.precision), self.precision)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.unit is None or other.unit is None:
            return LocalElement.zero(self.place, self.valuation + other.valuation)
        N = min(self.precision, other.precision)
        u = self.model.reduce(self.model.mul(self.unit, other.unit), N)
        return LocalElement(self.place, self.valuation + other.valuation, u, N)

    __rmul__ = __mul__

    def inverse(self):
        if self.unit is None:
            raise DivisionByZeroToPrecision(f"inverse of {self.render()}")
        return LocalElement(self.place, -self.valuation, self.model.inverse(self.unit, self.precision), self.precision)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        if k == 0:
            return LocalElement.one(self.place, max(self.precision, 1))
        if self.unit is None:
            return LocalElement.zero(self.place, self.valuation * k)
        u = self.model.pow(self.unit, k, self.precision)
        return LocalElement(self.place, self.valuation * k, u, self.precision)

    def with_precision(self, N):
        """Truncate to at most ``N`` significant digits."""
        if self.unit is None or N >= self.precision:
            return self
        return LocalElement(self.place, self.valuation, self.model.reduce(self.unit, N), N)

    def agrees(self, other, digits=None):
        """True when ``self - other`` vanishes to the available precision.

        With ``digits`` given, agreement must hold to at least that many
        digits beyond the valuation of ``self``.
        """
        diff = self - other
        if not diff.is_zero():
            return False
        if digits is None:
            return True
        return diff.valuation - self.valuation >= digits

    # residue data

    def residue(self):
        if self.unit is None:
            raise DivisionByZeroToPrecision("residue of zero")
        return self.model.residue(self.unit)

    def digits(self):
        """The ``precision`` pi-adic digits of the unit part."""
        model = self.model
        if self.unit is None:
            return []
        p, N = model.p, self.precision
        if model.e == 1:
            a, b = self.unit
            out = []
            for _ in range(N):
                out.append((a % p, b % p) if model.f == 2 else a % p)
                a //= p
                b //= p
            return out
        r, out = self.unit, []
        for i in range(N):
            d = r[0] % p
            out.append(d)
            if i < N - 1:
                r = model.div_pi((r[0] - d, r[1]), 1, N - i)
        return out

    def to_fraction(self):
        """Rational representative ``p^v * a`` (local degree one only)."""
        if self.model.degree != 1:
            raise UnsupportedPlace("to_fraction needs local degree one")
        if self.unit is None:
            return Fraction(0)
        return Fraction(self.place.p) ** self.valuation * self.unit[0]

    # text form

    def _base(self):
        return "pi" if self.model.e == 2 else str(self.place.p)

    def render(self):
        b = self._base()
        if self.unit is None:
            return "0" if self.valuation == INF else f"0  (O({b}^{self.valuation}))"
        terms = []
        for i, d in enumerate(self.digits()):
            if i and d in (0, (0, 0)):
                continue
            ds = f"[{d[0]},{d[1]}]" if isinstance(d, tuple) else str(d)
            terms.append(ds if i == 0 else f"{ds}*{b}" if i == 1 else f"{ds}*{b}^{i}")
        return f"{b}^{self.valuation} * ({' + '.join(terms)})  (O({b}^{self.valuation + self.precision}))"

    def __str__(self):
        return self.render()


_RENDER_RE = re.compile(r"^\s*(\w+)\^(-?\d+)\s*\*\s*\((.*)\)\s*\(O\((\w+)\^(-?\d+)\)\)\s*$")
_ZERO_RE = re.compile(r"^\s*0\s*(?:\(O\((\w+)\^(-?\d+)\)\))?\s*$")
_TERM_RE = re.compile(r"^\s*(\d+|\[\s*\d+\s*,\s*\d+\s*\])(?:\s*\*\s*(\w+)(?:\^(\d+))?)?\s*$")


def parse_local(text: str, place: PlaceRef) -> LocalElement:
    """Inverse of :meth:`LocalElement.render`."""
    model = local_model(place)
    base = "pi" if model.e == 2 else str(place.p)
    m = _ZERO_RE.match(text)
    if m:
        if m.group(1) is None:
            return LocalElement.zero(place)
        if m.group(1) != base:
            raise ValueError(f"base {m.group(1)!r} does not match place {place}")
        return LocalElement.zero(place, int(m.group(2)))
    m = _RENDER_RE.match(text)
    if not m:
        raise ValueError(f"not a local element literal: {text!r}")
    if m.group(1) != base or m.group(4) != base:
        raise ValueError(f"base does not match place {place}")
    v = int(m.group(2))
    N = int(m.group(5)) - v
    digits = {}
    for term in m.group(3).split("+"):
        t = _TERM_RE.match(term)
        if not t:
            raise ValueError(f"bad term {term!r}")
        if t.group(2) is not None and t.group(2) != base:
            raise ValueError(f"bad base in term {term!r}")
        i = 0 if t.group(2) is None else int(t.group(3) or 1)
        ds = t.group(1)
        if ds.startswith("["):
            a, b = (int(s) for s in ds.strip("[]").split(","))
            digits[i] = (a, b)
        else:
            digits[i] = int(ds)
    if N <= 0:
        raise ValueError("precision must be positive")
    r = (0, 0)
    for i, d in digits.items():
        r = model.add(r, model.mul(model.lift(d), model.pi_power(i)))
    x = LocalElement.from_ring(place, r, N)
    if x.unit is None or x.valuation != 0:
        raise ValueError("leading digit must be nonzero")
    return LocalElement(place, v, x.unit, N)


# operations


def local_arith(op, x, y=None):
    if op == "add":
        return x + y
    if op == "mul":
        return x * y
    if op == "neg":
        return -x
    if op == "inv":
        return x.inverse()
    raise ValueError(f"unknown op {op!r}")


def valuation_residue(x: LocalElement):
    if x.is_zero():
        raise DivisionByZeroToPrecision("zero to precision has no valuation")
    return x.valuation, x.residue()


def _poly_eval(model, coeffs, r, N):
    acc = (0, 0)
    for c in reversed(coeffs):
        acc = model.reduce(model.add(model.mul(acc, r), (c, 0)), N)
    return acc


def _poly_deriv(coeffs):
    return [i * c for i, c in enumerate(coeffs)][1:]


def hensel_lift(poly, seed, place, precision=DEFAULT_PRECISION):
    """Lift a simple residue-field root of ``poly`` to ``precision`` digits.

    ``poly`` lists integer coefficients from the constant term upwards.
    With ``seed=None`` the smallest residue root is used.
    """
    model = local_model(place)
    dpoly = _poly_deriv(poly)
    if seed is None:
        roots = [r for r in model.residue_field()
                 if model.valuation(_poly_eval(model, poly, model.lift(r), 1), 1) >= 1]
        if not roots:
            raise NoRootInResidueField(f"{poly} has no root mod {place}")
        seed = roots[0]
    x = model.lift(seed)
    if model.valuation(_poly_eval(model, poly, x, 1), 1) < 1:
        raise NotASimpleRoot(f"seed {seed} is not a root mod {place}")
    if model.valuation(_poly_eval(model, dpoly, x, 1), 1) >= 1:
        raise NotASimpleRoot(f"seed {seed} is a multiple root mod {place}")
    m = 1
    while m < precision:
        m = min(2 * m, precision)
        fx = _poly_eval(model, poly, x, m)
        dfx = model.inverse(_poly_eval(model, dpoly, x, m), m)
        step = model.mul(fx, dfx)
        x = model.reduce((x[0] - step[0], x[1] - step[1]), m)
    return LocalElement.from_ring(place, x, precision)


def teichmuller(residue, place, precision=DEFAULT_PRECISION):
    """The (q-1)-th root of unity reducing to ``residue``."""
    model = local_model(place)
    if model.is_residue_zero(residue):
        raise ZeroResidue("Teichmuller lift of 0")
    x = model.lift(residue)
    q = place.q
    for _ in range(precision):
        x = model.pow(x, q, precision)
    return LocalElement(place, 0, x, precision)


def _unit_square_2adic(model, u):
    e = model.e
    target = model.reduce(u, 2 * e + 1)
    ma, mb = model.moduli(e + 1)
    for a in range(ma):
        for b in range(mb):
            y = (a, b)
            if model.valuation(y, 1) == 0 and model.reduce(model.mul(y, y), 2 * e + 1) == target:
                return y
    return None


def is_square(x: LocalElement) -> bool:
    if x.is_zero():
        raise DivisionByZeroToPrecision("square test on zero")
    model = x.model
    p = model.p
    if p == 2 and x.precision < 2 * model.e + 1:
        raise InsufficientPrecision(f"need {2 * model.e + 1} digits at 2, have {x.precision}")
    if x.valuation % 2:
        return False
    if p != 2:
        r = model.lift(x.residue())
        return model.pow(r, (x.place.q - 1) // 2, 1) == model.reduce((1, 0), 1)
    if model.degree == 1:
        return x.unit[0] % 8 == 1
    return _unit_square_2adic(model, x.unit) is not None


def sqrt(x: LocalElement, precision=None) -> LocalElement:
    """A square root of ``x``; the root with the smallest leading digits."""
    if not is_square(x):
        raise NoRootInResidueField(f"{x.render()} is not a square")
    model = x.model
    N = x.precision if precision is None else precision
    e = model.e
    W = N + 2 * e + 2
    u = model.reduce(x.unit, x.precision)
    if model.p == 2:
        y = _unit_square_2adic(model, u)
    else:
        rr = model.residue(u)
        y = next(model.lift(s) for s in model.residue_field()
                 if not model.is_residue_zero(s)
                 and model.reduce(model.mul(model.lift(s), model.lift(s)), 1) == model.lift(rr))
    W = min(W, x.precision)
    for _ in range(4 * W + 8):
        delta = model.reduce(model.add(model.mul(y, y), (-u[0], -u[1])), W)
        if model.valuation(delta, W) >= W:
            break
        # delta has valuation > 2*v(2) here, so it is divisible by 2 exactly
        if model.p == 2:
            half = (delta[0] // 2, delta[1] // 2)
            yinv = model.inverse(y, W)
            step = model.mul(half, yinv)
        else:
            step = model.mul(delta, model.inverse(model.mul((2, 0), y), W))
        y = model.reduce((y[0] - step[0], y[1] - step[1]), W)
    out_prec = max(1, W - (e if model.p == 2 else 0))
    return LocalElement(x.place, x.valuation // 2, model.reduce(y, out_prec), out_prec)
