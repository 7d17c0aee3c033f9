"""Q and quadratic fields: elements, places, embeddings, ideals, Minkowski data."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt

from sympy import factorint, isprime

from .errors import FieldMismatch, NonIntegralIdeal, NotPrime, UnsupportedField, ZeroElement, LiteralError
from .linalg import hnf_columns
from .localfield import DEFAULT_PRECISION, LocalElement, PlaceRef, hensel_lift, local_model, vp


def _squarefree(n):
    return all(e == 1 for e in factorint(abs(n)).values())


@dataclass(frozen=True)
class FieldDesc:
    """Q (``d == 1``) or the quadratic field Q(sqrt d).

    The integral basis is ``{1, w}`` with ``w = (1 + sqrt d)/2`` when
    ``d = 1 mod 4`` and ``w = sqrt d`` otherwise.
    """

    d: int = 1

    def __post_init__(self):
        if self.d != 1 and (self.d == 0 or not _squarefree(self.d)):
            raise UnsupportedField(f"d = {self.d} is not a squarefree integer != 0, 1")

    @classmethod
    def rational(cls):
        return cls(1)

    @classmethod
    def parse(cls, text):
        text = text.strip().lower()
        if text in ("q", "rational"):
            return cls(1)
        if text.startswith("quad:"):
            try:
                d = int(text[5:])
            except ValueError:
                d = None
            if d is not None and d != 1 and d and _squarefree(d):
                return cls(d)
        raise LiteralError(f"field literal must be 'q' or 'quad:<d>', <d> squarefree, d != 0, 1; got {text!r}")

    def literal(self):
        return "q" if self.is_rational else f"quad:{self.d}"

    def __str__(self):
        return "Q" if self.is_rational else f"Q(sqrt({self.d}))"

    @property
    def is_rational(self):
        return self.d == 1

    @property
    def degree(self):
        return 1 if self.is_rational else 2

    @property
    def discriminant(self):
        if self.is_rational:
            return 1
        return self.d if self.d % 4 == 1 else 4 * self.d

    @property
    def trace_w(self):
        return 1 if (not self.is_rational and self.d % 4 == 1) else 0

    @property
    def norm_w(self):
        if self.is_rational:
            return 0
        return (1 - self.d) // 4 if self.d % 4 == 1 else -self.d

    def minpoly(self):
        """Minimal polynomial of ``w``, constant term first."""
        return [self.norm_w, -self.trace_w, 1]

    @property
    def signature(self):
        if self.is_rational:
            return (1, 0)
        return (2, 0) if self.d > 0 else (0, 1)

    @property
    def is_imaginary(self):
        return self.d < 0

    @property
    def limited(self):
        """Real quadratic fields: no class group or idele-class reduction."""
        return not self.is_rational and self.d > 0

    def element(self, a, b=0):
        return FieldElement(self, Fraction(a), Fraction(b))

    @property
    def zero(self):
        return self.element(0)

    @property
    def one(self):
        return self.element(1)

    @property
    def w(self):
        return self.element(0, 1)

    def arch_places(self):
        return _arch_places(self)

    def places_above(self, p):
        return split_prime(self, p)

    def roots_of_unity(self):
        """mu(F), listed as powers of a generator."""
        if self.d == -1:
            gen = self.w
        elif self.d == -3:
            gen = self.w  # (1 + sqrt -3)/2 is a primitive 6th root
        else:
            gen = self.element(-1)
        out = [self.one]
        x = gen
        while x != self.one:
            out.append(x)
            x = x * gen
        return out


@lru_cache(maxsize=None)
def _arch_places(F):
    if F.is_rational:
        return (PlaceRef(F, "real"),)
    if F.d > 0:
        return (PlaceRef(F, "real", index=0), PlaceRef(F, "real", index=1))
    return (PlaceRef(F, "complex"),)


@dataclass(frozen=True)
class FieldElement:
    """``a + b*w`` with rational coordinates."""

    field: FieldDesc
    a: Fraction
    b: Fraction = Fraction(0)

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldMismatch(f"{self.field} vs {other.field}")
            return other
        if isinstance(other, (int, Fraction)):
            return FieldElement(self.field, Fraction(other), Fraction(0))
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, -self.a, -self.b)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        F = self.field
        bb = self.b * o.b
        return FieldElement(F, self.a * o.a - bb * F.norm_w,
                            self.a * o.b + o.a * self.b + bb * F.trace_w)

    __rmul__ = __mul__

    def conj(self):
        return FieldElement(self.field, self.a + self.b * self.field.trace_w, -self.b)

    def norm(self) -> Fraction:
        F = self.field
        if F.is_rational:
            return self.a
        return self.a * self.a + self.a * self.b * F.trace_w + self.b * self.b * F.norm_w

    def trace(self) -> Fraction:
        return self.a if self.field.is_rational else 2 * self.a + self.b * self.field.trace_w

    def inverse(self):
        n = self.norm()
        if n == 0:
            raise ZeroElement("inverse of 0")
        if self.field.is_rational:
            return FieldElement(self.field, 1 / self.a)
        c = self.conj()
        return FieldElement(self.field, c.a / n, c.b / n)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        out = self.field.one
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def is_zero(self):
        return not self

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.field == other.field and self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.field, self.a, self.b))

    def denominator(self):
        return self.a.denominator * self.b.denominator // gcd(self.a.denominator, self.b.denominator)

    def is_integral(self):
        return self.denominator() == 1

    def is_rational(self):
        return self.b == 0

    def evaluate(self, place):
        """Value at an archimedean place (float or complex)."""
        F = self.field
        if F.is_rational:
            return float(self.a)
        r = math.sqrt(abs(F.d))
        if F.d > 0:
            s = r if place.index == 0 else -r
            w = (1 + s) / 2 if F.d % 4 == 1 else s
            return float(self.a) + float(self.b) * w
        s = complex(0, r)
        w = (1 + s) / 2 if F.d % 4 == 1 else s
        return complex(float(self.a)) + float(self.b) * w

    def sign(self, place):
        """Exact sign at a real place."""
        F = self.field
        if not self:
            return 0
        if F.is_rational:
            return 1 if self.a > 0 else -1
        # x = A + B*sqrt(d) at sigma_0, A - B*sqrt(d) at sigma_1
        if F.d % 4 == 1:
            A, B = self.a + self.b / 2, self.b / 2
        else:
            A, B = self.a, self.b
        if place.index == 1:
            B = -B
        if A >= 0 and B >= 0:
            return 1
        if A <= 0 and B <= 0:
            return -1
        big = A * A - B * B * F.d
        return (1 if A > 0 else -1) if big > 0 else (1 if B > 0 else -1)

    def literal(self):
        if self.field.is_rational:
            return str(self.a)
        return [str(self.a), str(self.b)]

    def __str__(self):
        if self.field.is_rational or self.b == 0:
            return str(self.a)
        return f"{self.a} + {self.b}*w"

    __repr__ = __str__


def parse_element(F, lit):
    """Field element from ``"3/4"`` or ``["a", "b"]`` (coordinates over ``{1, w}``)."""
    try:
        if isinstance(lit, (list, tuple)):
            if len(lit) != 2 or F.is_rational and Fraction(str(lit[1])) != 0:
                raise ValueError
            return F.element(Fraction(str(lit[0])), Fraction(str(lit[1])))
        return F.element(Fraction(str(lit)))
    except (ValueError, ZeroDivisionError):
        raise LiteralError(f"field element literal must be 'num/den' or [a, b], got {lit!r}") from None


# places


def _residue_roots(F, p):
    poly = F.minpoly()
    return [r for r in range(p) if (poly[0] + poly[1] * r + r * r) % p == 0]


@lru_cache(maxsize=None)
def _split_prime(F, p):
    if F.is_rational:
        return (PlaceRef(F, "finite", p),)
    D = F.discriminant
    if D % p == 0:
        return (PlaceRef(F, "finite", p, e=2),)
    if p == 2:
        split = D % 8 == 1
    else:
        split = pow(D % p, (p - 1) // 2, p) == 1
    if split:
        return (PlaceRef(F, "finite", p, index=0), PlaceRef(F, "finite", p, index=1))
    return (PlaceRef(F, "finite", p, f=2),)


def split_prime(F, p):
    if p < 2 or not isprime(p):
        raise NotPrime(f"{p} is not prime")
    return list(_split_prime(F, p))


def splitting_type(F, p):
    places = split_prime(F, p)
    if len(places) == 2:
        return "split"
    return "ramified" if places[0].e == 2 else "inert"


def place_of(F, p, index=0):
    places = split_prime(F, p)
    if index >= len(places):
        raise LiteralError(f"no place {p}.{index} in {F}")
    return places[index]


def arch_place(F, index=0):
    places = F.arch_places()
    if index >= len(places):
        raise LiteralError(f"no archimedean place {index} in {F}")
    return places[index]


def parse_place(F, lit):
    """Place from ``5``, ``"5"``, ``"5.1"``, ``[5, 1]``, ``"inf"`` or ``"inf1"``."""
    try:
        if isinstance(lit, (list, tuple)):
            return place_of(F, int(lit[0]), int(lit[1]))
        if isinstance(lit, int):
            return place_of(F, lit)
        s = str(lit).strip()
        if s.startswith("inf"):
            return arch_place(F, int(s[3:] or 0))
        if "." in s:
            p, i = s.split(".")
            return place_of(F, int(p), int(i))
        return place_of(F, int(s))
    except (ValueError, IndexError):
        raise LiteralError(f"place literal must be p, 'p.i', [p, i] or 'inf[i]', got {lit!r}") from None


@lru_cache(maxsize=None)
def _omega_ring(place, N):
    """Image of ``w`` in the local model, known mod pi^N."""
    F = place.field
    model = local_model(place)
    if F.is_rational:
        return (0, 0)
    if place.e == 2:
        if model.t == 2:
            return model.reduce((-1, 1), N)  # sqrt(d) = theta - 1
        if F.d % 4 == 1:
            h = pow(2, -1, place.p ** (N + 1))
            return model.reduce((h, h), N)
        return model.reduce((0, 1), N)
    if place.f == 2:
        seed = None
    else:
        seed = _residue_roots(F, place.p)[place.index]
    x = hensel_lift(F.minpoly(), seed, place, N)
    r = model.mul(model.pi_power(x.valuation), x.unit) if x.unit is not None else (0, 0)
    return model.reduce(r, N)


def embed_global(F, x, place, precision=DEFAULT_PRECISION):
    """Image of a nonzero field element in the completion at ``place``."""
    if not isinstance(x, FieldElement):
        x = F.element(x)
    if not x:
        raise ZeroElement("cannot embed 0")
    if not place.is_finite:
        return x.evaluate(place)
    if F.is_rational or x.b == 0:
        return LocalElement.from_rational(place, x.a, precision)
    model = local_model(place)
    D = x.denominator()
    A, B = int(x.a * D), int(x.b * D)
    K = precision + 4
    while True:
        r = model.add((A, 0), model.mul((B, 0), _omega_ring(place, K)))
        num = LocalElement.from_ring(place, r, K)
        if not num.is_zero() and num.precision >= precision:
            break
        K *= 2
    return (num / LocalElement.from_rational(place, D, precision + 2)).with_precision(precision)


def valuation(x, place):
    """v_P(x) for a nonzero field element, exact."""
    if not isinstance(x, FieldElement):
        x = place.field.element(x)
    if place.field.is_rational or x.b == 0:
        q = Fraction(x.a)
        return place.e * (vp(q.numerator, place.p) - vp(q.denominator, place.p))
    return embed_global(place.field, x, place, 8).valuation


def different_exponent(place):
    F = place.field
    if F.is_rational:
        return 0
    return valuation(2 * F.w - F.trace_w, place)


def support_places(x):
    """Finite places where the nonzero field element ``x`` is not a unit."""
    F = x.field
    n = x.norm()
    primes = set(factorint(abs(n.numerator))) | set(factorint(n.denominator)) | set(factorint(x.denominator()))
    out = []
    for p in sorted(primes):
        for P in split_prime(F, p):
            if valuation(x, P) != 0:
                out.append(P)
    return out


def log_abs(x, place):
    """Logarithm of the normalized absolute value of ``x`` at ``place``."""
    if place.is_finite:
        return -valuation(x, place) * math.log(place.q)
    val = x.evaluate(place)
    if place.kind == "complex":
        return 2 * math.log(abs(val))
    return math.log(abs(val))


# ideals


@dataclass(frozen=True)
class FracIdeal:
    """Product of prime ideals, as a finite map place -> exponent."""

    field: FieldDesc
    exponents: tuple = ()  # sorted ((place, exponent), ...), no zero exponents

    @classmethod
    def make(cls, F, mapping):
        items = {}
        for P, k in dict(mapping).items():
            if P.field != F:
                raise FieldMismatch(f"{P} is not a place of {F}")
            if k:
                items[P] = items.get(P, 0) + k
        return cls(F, tuple(sorted(((P, k) for P, k in items.items() if k), key=lambda t: t[0].sort_key())))

    @classmethod
    def unit(cls, F):
        return cls(F, ())

    def as_dict(self):
        return dict(self.exponents)

    def is_integral(self):
        return all(k > 0 for _, k in self.exponents)

    def norm(self) -> Fraction:
        out = Fraction(1)
        for P, k in self.exponents:
            out *= Fraction(P.q) ** k
        return out

    def __mul__(self, other):
        d = self.as_dict()
        for P, k in other.exponents:
            d[P] = d.get(P, 0) + k
        return FracIdeal.make(self.field, d)

    def inverse(self):
        return FracIdeal.make(self.field, {P: -k for P, k in self.exponents})

    def to_json(self):
        return {"places": [[P.p, P.index, k] for P, k in self.exponents]}

    @classmethod
    def from_json(cls, F, doc):
        try:
            return cls.make(F, {place_of(F, int(p), int(i)): int(k) for p, i, k in doc["places"]})
        except (KeyError, TypeError, ValueError):
            raise LiteralError('ideal literal must be {"places": [[p, index, exponent], ...]}') from None


def principal_ideal(x):
    F = x.field
    return FracIdeal.make(F, {P: valuation(x, P) for P in support_places(x)})


def _prime_zbasis(P):
    """Z-basis of the prime ideal P as integer coordinate pairs over {1, w}."""
    F = P.field
    p = P.p
    if F.is_rational:
        return [(p, 0)]
    if P.f == 2:
        return [(p, 0), (0, p)]
    roots = _residue_roots(F, p)
    r = roots[P.index] if P.e == 1 else roots[0]
    return [(p, 0), (-r, 1)]


def _mul_coords(F, u, v):
    x = F.element(*u) * F.element(*v)
    return (int(x.a), int(x.b))


def _hnf_basis(F, gens):
    """Reduced Z-basis ``[(a, 0), (b, c)]`` of the lattice spanned by ``gens``."""
    if F.is_rational:
        g = 0
        for u in gens:
            g = gcd(g, u[0])
        return [(g, 0)]
    M = [[u[0] for u in gens], [u[1] for u in gens]]
    H, _, r = hnf_columns(M, row_order=[1, 0])
    # column 0 carries the w-pivot, column 1 the rational pivot
    (b, c), (a, _) = (H[0][0], H[1][0]), (H[0][1], H[1][1])
    return [(a, 0), (b % a, c)]


def integral_zbasis(J: FracIdeal):
    """Z-basis of an integral ideal as coordinate pairs over {1, w}."""
    if not J.is_integral():
        raise NonIntegralIdeal("exact basis requested for a non-integral ideal")
    F = J.field
    basis = [(1, 0)] if F.is_rational else [(1, 0), (0, 1)]
    for P, k in J.exponents:
        for _ in range(k):
            gens = [_mul_coords(F, u, v) for u in basis for v in _prime_zbasis(P)]
            basis = _hnf_basis(F, gens)
    return basis


def split_denominator(J: FracIdeal):
    """Write ``J = (1/m) * J'`` with ``J'`` integral; returns ``(m, J')``."""
    F = J.field
    m = 1
    extra = {}
    for P, k in J.exponents:
        if k < 0:
            m *= P.p ** (-k)
            for Q in split_prime(F, P.p):
                # (p) = prod Q^e, so P^-1 = (1/p) * (p) P^-1
                extra[Q] = extra.get(Q, 0) + (-k) * (Q.e if Q != P else Q.e - 1)
        else:
            extra[P] = extra.get(P, 0) + k
    return m, FracIdeal.make(F, extra)


@dataclass(frozen=True)
class QuadSurd:
    """Exact real number ``r + s*sqrt(m)``."""

    r: Fraction
    s: Fraction
    m: int

    def __mul__(self, o):
        return QuadSurd(self.r * o.r + self.s * o.s * self.m, self.r * o.s + self.s * o.r, self.m)

    def __sub__(self, o):
        return QuadSurd(self.r - o.r, self.s - o.s, self.m)

    def square(self) -> Fraction:
        if self.r and self.s:
            raise ValueError("square of a mixed surd is irrational")
        return self.r * self.r + self.s * self.s * self.m

    def __float__(self):
        return float(self.r) + float(self.s) * math.sqrt(self.m)

    def __str__(self):
        if not self.s:
            return str(self.r)
        if not self.r:
            return f"{self.s}*sqrt({self.m})"
        return f"{self.r} + {self.s}*sqrt({self.m})"


@dataclass(frozen=True)
class MinkowskiData:
    basis: tuple          # rows indexed by real coordinates, entries QuadSurd
    covolume_squared: Fraction
    torus_rank: int

    def float_basis(self):
        return [[float(x) for x in row] for row in self.basis]

    @property
    def torus(self):
        return (self.torus_rank, self.basis)


def _coords_real(F, x):
    """Real coordinates of ``x`` under the archimedean embeddings, exactly."""
    m = abs(F.d)
    if F.is_rational:
        return [QuadSurd(x.a, Fraction(0), 1)]
    half = Fraction(1, 2) if F.d % 4 == 1 else Fraction(0)
    root = Fraction(1, 2) if F.d % 4 == 1 else Fraction(1)
    # x = (a + b*half) + (b*root)*sqrt(d)
    rat, irr = x.a + x.b * half, x.b * root
    if F.d > 0:
        return [QuadSurd(rat, irr, m), QuadSurd(rat, -irr, m)]
    return [QuadSurd(rat, Fraction(0), m), QuadSurd(Fraction(0), irr, m)]


def minkowski(F, J, allow_fractional=False):
    """Minkowski lattice of ``J`` in the real span of the archimedean places."""
    if not J.is_integral():
        if not allow_fractional:
            raise NonIntegralIdeal("Minkowski basis of a non-integral ideal")
        m, Jint = split_denominator(J)
    else:
        m, Jint = 1, J
    basis = [F.element(Fraction(a, m), Fraction(b, m)) for a, b in integral_zbasis(Jint)]
    cols = [_coords_real(F, x) for x in basis]
    rows = tuple(tuple(col[i] for col in cols) for i in range(F.degree))
    if F.degree == 1:
        det = rows[0][0]
    else:
        det = rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    return MinkowskiData(rows, det.square(), F.degree)


# binary quadratic forms and ideal classes


def _reduce_form(A, B, C):
    """Reduce a positive definite form, tracking the SL2(Z) change of variables."""
    M = [[1, 0], [0, 1]]

    def apply(T):
        nonlocal M
        M = [[M[0][0] * T[0][0] + M[0][1] * T[1][0], M[0][0] * T[0][1] + M[0][1] * T[1][1]],
             [M[1][0] * T[0][0] + M[1][1] * T[1][0], M[1][0] * T[0][1] + M[1][1] * T[1][1]]]

    while True:
        if not (-A < B <= A):
            k = (A - B) // (2 * A)
            B, C = B + 2 * A * k, A * k * k + B * k + C
            apply([[1, k], [0, 1]])
        if A > C:
            A, B, C = C, -B, A
            apply([[0, -1], [1, 0]])
            continue
        if A == C and B < 0:
            A, B, C = C, -B, A
            apply([[0, -1], [1, 0]])
            continue
        return (A, B, C), M


def reduced_forms(D):
    """All reduced forms of discriminant ``D < 0``."""
    out = []
    a = 1
    while 3 * a * a <= -D:
        for b in range(-a + 1, a + 1):
            if (b * b - D) % (4 * a) == 0:
                c = (b * b - D) // (4 * a)
                if c >= a and gcd(gcd(a, abs(b)), c) == 1 and not (a == c and b < 0):
                    out.append((a, b, c))
        a += 1
    return sorted(out)


def class_number(F):
    if F.is_rational:
        return 1
    if not F.is_imaginary:
        raise UnsupportedField("class group of a real quadratic field")
    return len(reduced_forms(F.discriminant))


def _ideal_form(F, J):
    m, Jint = split_denominator(J)
    (a, _), (b, c) = integral_zbasis(Jint)
    alpha = F.element(a)
    beta = F.element(b, c)
    N = a * c
    # f(x, y) = N(x*alpha - y*beta) / N(J)
    A = int(alpha.norm()) // N
    Bc = -int((alpha * beta.conj()).trace()) // N
    C = int(beta.norm()) // N
    return (A, Bc, C), alpha / m, beta / m


def ideal_class(F, J):
    """Class label of ``J``: its reduced form ``(A, B, C)``; ``(1, ., .)`` is trivial."""
    if F.is_rational:
        return "trivial"
    if not F.is_imaginary:
        raise UnsupportedField("ideal classes of real quadratic fields are not computed")
    form, _, _ = _ideal_form(F, J)
    red, _ = _reduce_form(*form)
    return red


def is_trivial_class(label):
    return label == "trivial" or label[0] == 1


def principal_generator(F, J):
    """A generator of ``J`` if it is principal, else ``None``."""
    if F.is_rational:
        n = J.norm()
        return F.element(n)
    if not F.is_imaginary:
        raise UnsupportedField("principal generators in real quadratic fields are not computed")
    form, alpha, beta = _ideal_form(F, J)
    red, M = _reduce_form(*form)
    if red[0] != 1:
        return None
    x, y = M[0][0], M[1][0]
    return alpha * x - beta * y
