"""Adelic blocks as finite data, their morphisms, kernels and duals.

A block over ``F`` is ``sum_sigma R_sigma^{m_sigma}`` plus a restricted product
of local vector spaces.  It is stored as archimedean multiplicities, a tail
dimension ``d`` (meaning ``O_P^d`` inside ``F_P^d`` at almost every place) and
finitely many exceptional places carrying their own dimension and lattice.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import combinations
from math import gcd

from sympy import factorint

from . import linalg
from .errors import (
    FieldMismatch,
    LiteralError,
    PlaceFieldMismatch,
    PrecisionExhausted,
    ShapeMismatch,
    SingularToPrecision,
)
from .localfield import DEFAULT_PRECISION, INF, LocalElement, PlaceRef
from .numberfield import (
    FieldDesc,
    FieldElement,
    different_exponent,
    embed_global,
    parse_element,
    parse_place,
)


def _sorted_places(places):
    return sorted(set(places), key=lambda P: P.sort_key())


# local matrices


def to_local(place, x, precision=DEFAULT_PRECISION):
    if isinstance(x, LocalElement):
        return x
    if isinstance(x, FieldElement):
        if not x:
            return LocalElement.zero(place)
        return embed_global(x.field, x, place, precision)
    return LocalElement.from_rational(place, Fraction(x), precision)


def local_matrix(place, M, precision=DEFAULT_PRECISION):
    return [[to_local(place, x, precision) for x in row] for row in M]


def _lzero(place):
    return LocalElement.zero(place)


def _lone(place, precision):
    return LocalElement.one(place, precision)


def _local_inverse(place, M, precision):
    if not M:
        return []
    return linalg.inverse(M, _lzero(place), _lone(place, precision))


def _matmul(A, B, ncols, zero):
    """``A @ B`` allowing an empty inner dimension (``B`` then has no rows)."""
    A = [list(r) for r in A]
    if A and not A[0]:
        return [[zero] * ncols for _ in A]
    return linalg.matmul(A, [list(r) for r in B], zero)


def _is_integral_matrix(M):
    return all(x.is_zero() or x.valuation >= 0 for row in M for x in row)


def local_smith_exponents(M):
    """Valuations of the elementary divisors of a square local matrix."""
    A = [list(r) for r in M]
    n = len(A)
    out = []
    for s in range(n):
        best = None
        for i in range(s, n):
            for j in range(s, n):
                x = A[i][j]
                if not x.is_zero() and (best is None or x.valuation < best[0]):
                    best = (x.valuation, i, j)
        if best is None:
            raise SingularToPrecision("lattice basis is singular to precision")
        _, i, j = best
        A[s], A[i] = A[i], A[s]
        for row in A:
            row[s], row[j] = row[j], row[s]
        piv = A[s][s]
        for i in range(s + 1, n):
            if not A[i][s].is_zero():
                f = A[i][s] / piv
                A[i] = [a - f * b for a, b in zip(A[i], A[s])]
        for j in range(s + 1, n):
            if not A[s][j].is_zero():
                f = A[s][j] / piv
                for row in A:
                    row[j] = row[j] - f * row[s]
        out.append(piv.valuation)
    return sorted(out)


# lattices


def _digit_reduce(place, x, k, precision):
    """Representative of ``x`` modulo ``pi^k`` as a finite pi-adic digit sum."""
    if x.is_zero():
        if x.valuation < k:
            raise PrecisionExhausted(f"entry known only to O(pi^{x.valuation}), need {k}")
        return _lzero(place)
    v = x.valuation
    if v >= k:
        return _lzero(place)
    if k - v > x.precision:
        raise PrecisionExhausted(f"entry known to {x.precision} digits, need {k - v}")
    model = x.model
    r = (0, 0)
    for i, d in enumerate(x.digits()[: k - v]):
        r = model.add(r, model.mul(model.lift(d), model.pi_power(i)))
    return LocalElement.from_ring(place, r, precision, base=v)


def _hnf(place, cols, n, precision):
    """Canonical column HNF of the span of ``cols`` (vectors of length ``n``)."""
    remaining = [list(c) for c in cols]
    piv = [None] * n
    for i in range(n - 1, -1, -1):
        cands = [c for c in remaining if not c[i].is_zero()]
        if not cands:
            raise SingularToPrecision(f"generators do not span a full-rank lattice at {place}")
        col = min(cands, key=lambda c: c[i].valuation)
        remaining.remove(col)
        v = col[i].valuation
        s = LocalElement.pi_power(place, v, precision) / col[i]
        col = [x * s for x in col]
        col[i] = LocalElement.pi_power(place, v, precision)
        for c in remaining:
            if not c[i].is_zero():
                f = c[i] / col[i]
                for r in range(n):
                    c[r] = c[r] - f * col[r]
            c[i] = _lzero(place)
        for r in range(i + 1, n):
            col[r] = _lzero(place)
        piv[i] = col
    # piv[j] has zeros below row j; reduce row i entries right of the pivot
    for i in range(n - 1, -1, -1):
        k = piv[i][i].valuation
        for j in range(i + 1, n):
            x = piv[j][i]
            red = _digit_reduce(place, x, k, precision)
            if not (x.is_zero() and red.is_zero()):
                q = (x - red) / piv[i][i]
                if not q.is_zero():
                    piv[j] = [a - q * b for a, b in zip(piv[j], piv[i])]
            piv[j][i] = red
    return tuple(tuple(piv[j][i] for j in range(n)) for i in range(n))


def _entry_key(x):
    if x.is_zero():
        return None
    ds = list(x.digits())
    while ds and ds[-1] in (0, (0, 0)):
        ds.pop()
    return (x.valuation, tuple(ds))


@dataclass(frozen=True, eq=False)
class Lattice:
    """Full-rank lattice in ``F_P^n``, stored as its canonical column HNF."""

    place: PlaceRef
    basis: tuple
    precision: int = DEFAULT_PRECISION

    @classmethod
    def from_generators(cls, place, cols, n=None, precision=DEFAULT_PRECISION):
        cols = [[to_local(place, x, precision) for x in c] for c in cols]
        n = len(cols[0]) if n is None else n
        if n == 0:
            return cls(place, (), precision)
        return cls(place, _hnf(place, cols, n, precision), precision)

    @classmethod
    def from_basis(cls, place, M, precision=DEFAULT_PRECISION):
        """Lattice spanned by the columns of the square matrix ``M`` (a list of rows)."""
        n = len(M)
        if any(len(row) != n for row in M):
            raise ShapeMismatch("lattice basis must be square")
        return cls.from_generators(place, linalg.transpose(M, n), n, precision)

    @classmethod
    def standard(cls, place, n, precision=DEFAULT_PRECISION):
        one, zero = LocalElement.one(place, precision), _lzero(place)
        return cls(place, tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n)), precision)

    @property
    def n(self):
        return len(self.basis)

    def matrix(self):
        return [list(r) for r in self.basis]

    def pivots(self):
        return tuple(self.basis[i][i].valuation for i in range(self.n))

    def key(self):
        return (self.place, self.pivots(),
                tuple(_entry_key(self.basis[i][j]) for i in range(self.n) for j in range(i + 1, self.n)))

    def __eq__(self, other):
        return isinstance(other, Lattice) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def is_standard(self):
        return all(k == 0 for k in self.pivots())

    def dual(self):
        """Annihilator under the trace pairing: ``pi^-delta * B^-T``."""
        if self.n == 0:
            return self
        delta = different_exponent(self.place)
        inv = _local_inverse(self.place, self.matrix(), self.precision)
        scale = LocalElement.pi_power(self.place, -delta, self.precision)
        cols = [[x * scale for x in row] for row in inv]  # rows of B^-1 are columns of B^-T
        return Lattice.from_generators(self.place, cols, self.n, self.precision)

    def contains(self, other):
        if self.place != other.place or self.n != other.n:
            raise ShapeMismatch("lattices live in different spaces")
        if self.n == 0:
            return True
        inv = _local_inverse(self.place, self.matrix(), self.precision)
        return _is_integral_matrix(linalg.matmul(inv, other.matrix(), _lzero(self.place)))

    def elementary_divisors(self):
        """Exponents ``k_i`` with ``L ~ diag(pi^k_i) * O_P^n``."""
        return local_smith_exponents(self.matrix()) if self.n else []

    def direct_sum(self, other):
        n, m = self.n, other.n
        zero = _lzero(self.place)
        rows = [list(r) + [zero] * m for r in self.basis] + [[zero] * n + list(r) for r in other.basis]
        if n + m == 0:
            return self
        return Lattice.from_basis(self.place, rows, min(self.precision, other.precision))

    def to_json(self):
        return [[x.render() for x in row] for row in self.basis]

    def __str__(self):
        return f"Lattice({self.place}: " + "; ".join(", ".join(x.render() for x in row) for row in self.basis) + ")"


def lattice_canonicalize(L):
    return Lattice.from_basis(L.place, L.matrix(), L.precision)


def lattice_equal(L, M):
    return L == M


def lattice_dual(L):
    return L.dual()


# blocks


@dataclass(frozen=True)
class AdelicBlock:
    field: FieldDesc
    arch: tuple
    tail_dim: int
    exceptions: tuple = ()

    @classmethod
    def make(cls, F, tail_dim=0, exceptions=None, arch=None, precision=DEFAULT_PRECISION):
        if tail_dim < 0:
            raise ShapeMismatch("tail dimension must be non-negative")
        arch = arch if arch is not None else {}
        if isinstance(arch, int):
            arch = {s: arch for s in F.arch_places()}
        arch = dict(arch)
        mults = []
        for s in F.arch_places():
            m = arch.pop(s, 0)
            if m < 0:
                raise ShapeMismatch("archimedean multiplicity must be non-negative")
            mults.append((s, m))
        if arch:
            raise PlaceFieldMismatch(f"unknown archimedean places {list(arch)}")
        exc = []
        for P, data in dict(exceptions or {}).items():
            if P.field != F or not P.is_finite:
                raise PlaceFieldMismatch(f"{P} is not a finite place of {F}")
            dim, L = data if isinstance(data, tuple) else (data.n, data)
            if L is None:
                L = Lattice.standard(P, dim, precision)
            elif not isinstance(L, Lattice):
                L = Lattice.from_basis(P, L, precision)
            if L.n != dim or L.place != P:
                raise ShapeMismatch(f"lattice at {P} has rank {L.n}, expected {dim}")
            if dim == tail_dim and L.is_standard():
                continue
            exc.append((P, dim, L))
        exc.sort(key=lambda t: t[0].sort_key())
        return cls(F, tuple(mults), tail_dim, tuple(exc))

    @classmethod
    def adeles(cls, F, n=1):
        return cls.make(F, n, arch=n)

    @classmethod
    def zero(cls, F):
        return cls.make(F)

    @property
    def arch_dict(self):
        return dict(self.arch)

    @property
    def exceptions_dict(self):
        return {P: (d, L) for P, d, L in self.exceptions}

    def exception_places(self):
        return [P for P, _, _ in self.exceptions]

    def dim_at(self, place):
        if not place.is_finite:
            return self.arch_dict[place]
        e = self.exceptions_dict.get(place)
        return self.tail_dim if e is None else e[0]

    def lattice_at(self, place, precision=DEFAULT_PRECISION):
        e = self.exceptions_dict.get(place)
        return Lattice.standard(place, self.tail_dim, precision) if e is None else e[1]

    def dims(self):
        return (tuple(m for _, m in self.arch), self.tail_dim,
                tuple((P, d) for P, d, _ in self.exceptions if d != self.tail_dim))

    def to_json(self):
        return {
            "field": self.field.literal(),
            "arch": {s.label(): m for s, m in self.arch},
            "tail_dim": self.tail_dim,
            "exceptions": [[P.label(), d, L.to_json()] for P, d, L in self.exceptions],
        }

    @classmethod
    def from_json(cls, doc, F=None, precision=DEFAULT_PRECISION):
        if not isinstance(doc, dict):
            raise LiteralError("block literal must be a JSON object")
        if "field" in doc:
            F = FieldDesc.parse(doc["field"])
        F = F or FieldDesc.rational()
        arch = doc.get("arch", {})
        if isinstance(arch, dict):
            arch = {parse_place(F, k): int(v) for k, v in arch.items()}
        elif isinstance(arch, int):
            arch = {s: arch for s in F.arch_places()}
        else:
            raise LiteralError("block arch must be an object or an integer")
        exc = {}
        for item in doc.get("exceptions", []):
            if not isinstance(item, (list, tuple)) or len(item) not in (2, 3):
                raise LiteralError("block exceptions must be [[place, dim, basis], ...]")
            P = parse_place(F, item[0])
            dim = int(item[1])
            basis = item[2] if len(item) == 3 else None
            if basis is None:
                exc[P] = (dim, None)
            else:
                exc[P] = (dim, Lattice.from_basis(P, _parse_local_matrix(P, basis, dim, precision), precision))
        return cls.make(F, int(doc.get("tail_dim", 0)), exc, arch, precision)

    def content_hash(self):
        text = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()[:16]

    def __str__(self):
        arch = ", ".join(f"{s}: {m}" for s, m in self.arch)
        exc = "; ".join(f"{P}: dim {d}, {L}" for P, d, L in self.exceptions)
        return f"AdelicBlock({self.field}; arch {{{arch}}}; tail {self.tail_dim}; exceptions {{{exc}}})"


def _parse_local_matrix(place, rows, n, precision):
    from .adeles import parse_local_value

    if not isinstance(rows, list) or len(rows) != n or any(not isinstance(r, list) or len(r) != n for r in rows):
        raise LiteralError(f"expected a {n}x{n} matrix at {place}")
    out = []
    for row in rows:
        new = []
        for x in row:
            if isinstance(x, str) and x.strip() == "0":
                new.append(_lzero(place))
            else:
                new.append(parse_local_value(x, place, precision))
        out.append(new)
    return out


def block_ptorsion(B, place):
    if place.field != B.field:
        raise PlaceFieldMismatch(f"{place} is not a place of {B.field}")
    if not place.is_finite:
        return B.arch_dict[place]
    return (B.dim_at(place), B.lattice_at(place))


def reassemble(F, arch, tail_dim, components):
    """Rebuild a block from its P-torsion components on a finite set of places."""
    return AdelicBlock.make(F, tail_dim, components, arch)


def block_direct_sum(B1, B2):
    if B1.field != B2.field:
        raise FieldMismatch(f"{B1.field} vs {B2.field}")
    places = _sorted_places(B1.exception_places() + B2.exception_places())
    exc = {}
    for P in places:
        d1, L1 = block_ptorsion(B1, P)
        d2, L2 = block_ptorsion(B2, P)
        exc[P] = (d1 + d2, L1.direct_sum(L2))
    a2 = B2.arch_dict
    arch = {s: m + a2[s] for s, m in B1.arch}
    return AdelicBlock.make(B1.field, B1.tail_dim + B2.tail_dim, exc, arch)


def ramified_places(F):
    if F.is_rational:
        return []
    out = []
    for p in sorted(factorint(abs(F.discriminant))):
        out.extend(P for P in F.places_above(p) if different_exponent(P) > 0)
    return out


def block_dual(B):
    F = B.field
    exc = {P: (d, L.dual()) for P, d, L in B.exceptions}
    for P in ramified_places(F):
        if P not in exc:
            exc[P] = (B.tail_dim, Lattice.standard(P, B.tail_dim).dual())
    return AdelicBlock.make(F, B.tail_dim, exc, B.arch_dict)


def lattice_difference_support(B1, B2):
    """Places where the P-torsion data of two blocks differ."""
    if B1.field != B2.field:
        raise FieldMismatch(f"{B1.field} vs {B2.field}")
    out = []
    for P in _sorted_places(B1.exception_places() + B2.exception_places()):
        if block_ptorsion(B1, P) != block_ptorsion(B2, P):
            out.append(P)
    return out


# morphisms


def _check_shape(M, rows, cols, what):
    if len(M) != rows or any(len(r) != cols for r in M):
        raise ShapeMismatch(f"{what} must be {rows}x{cols}")


def _field_matrix(F, M):
    return tuple(tuple(x if isinstance(x, FieldElement) else F.element(x) for x in row) for row in M)


def _transpose(M, ncols):
    return tuple(tuple(r) for r in linalg.transpose([list(r) for r in M], ncols))


@dataclass(frozen=True)
class BlockMorphism:
    """Placewise linear map between blocks.

    ``tail`` is a matrix over ``F`` used at every place through the
    embeddings; ``overrides`` replace it at finitely many finite places and
    ``arch`` gives the matrix (over ``F``, acting through sigma) at each
    archimedean place.
    """

    source: AdelicBlock
    target: AdelicBlock
    tail: tuple
    overrides: tuple = ()
    arch: tuple = ()
    precision: int = dc_field(default=DEFAULT_PRECISION, compare=False)

    @classmethod
    def make(cls, source, target, tail, overrides=None, arch=None, precision=DEFAULT_PRECISION):
        F = source.field
        if target.field != F:
            raise FieldMismatch(f"{source.field} vs {target.field}")
        tail = _field_matrix(F, tail)
        _check_shape(tail, target.tail_dim, source.tail_dim, "tail matrix")
        ov = {}
        for P, M in dict(overrides or {}).items():
            if P.field != F or not P.is_finite:
                raise PlaceFieldMismatch(f"{P} is not a finite place of {F}")
            M = local_matrix(P, M, precision)
            _check_shape(M, target.dim_at(P), source.dim_at(P), f"override at {P}")
            ov[P] = tuple(tuple(r) for r in M)
        for P in _sorted_places(source.exception_places() + target.exception_places()):
            if P in ov:
                continue
            if source.dim_at(P) != source.tail_dim or target.dim_at(P) != target.tail_dim:
                raise ShapeMismatch(f"dimension changes at {P}; an explicit override is required")
            ov[P] = tuple(tuple(r) for r in local_matrix(P, tail, precision))
        given = dict(arch or {})
        am = []
        for s in F.arch_places():
            m, m2 = source.dim_at(s), target.dim_at(s)
            if s in given:
                A = _field_matrix(F, given.pop(s))
            elif (m, m2) == (source.tail_dim, target.tail_dim):
                A = tail
            elif m == 0 or m2 == 0:
                A = tuple(tuple(F.zero for _ in range(m)) for _ in range(m2))
            else:
                raise ShapeMismatch(f"archimedean matrix at {s} is required")
            _check_shape(A, m2, m, f"archimedean matrix at {s}")
            am.append((s, A))
        if given:
            raise PlaceFieldMismatch(f"unknown archimedean places {list(given)}")
        return cls(source, target, tail, tuple(sorted(ov.items(), key=lambda kv: kv[0].sort_key())),
                   tuple(am), precision)

    @classmethod
    def identity(cls, B):
        F = B.field
        n = B.tail_dim
        tail = [[F.one if i == j else F.zero for j in range(n)] for i in range(n)]
        ov = {P: linalg.identity(d, LocalElement.one(P), _lzero(P)) for P, d, _ in B.exceptions}
        arch = {s: [[F.one if i == j else F.zero for j in range(m)] for i in range(m)] for s, m in B.arch}
        return cls.make(B, B, tail, ov, arch)

    @property
    def field(self):
        return self.source.field

    @property
    def overrides_dict(self):
        return dict(self.overrides)

    @property
    def arch_dict(self):
        return dict(self.arch)

    def local(self, place):
        """Matrix at a place: override, embedded tail, or archimedean matrix."""
        if not place.is_finite:
            return [list(r) for r in self.arch_dict[place]]
        ov = self.overrides_dict.get(place)
        if ov is not None:
            return [list(r) for r in ov]
        return local_matrix(place, self.tail, self.precision)

    def override_places(self):
        return [P for P, _ in self.overrides]

    def compose(self, other):
        """``self o other``."""
        if other.target != self.source:
            raise ShapeMismatch("target of the inner map is not the source of the outer map")
        F = self.field
        tail = _matmul(self.tail, other.tail, other.source.tail_dim, F.zero)
        ov = {}
        for P in _sorted_places(self.override_places() + other.override_places()):
            ov[P] = _matmul(self.local(P), other.local(P), other.source.dim_at(P), _lzero(P))
        arch = {}
        for s, A in self.arch:
            arch[s] = _matmul(A, other.arch_dict[s], other.source.dim_at(s), F.zero)
        return BlockMorphism.make(other.source, self.target, tail, ov, arch, min(self.precision, other.precision))

    def dual(self):
        """Transpose, as a map between the dual blocks."""
        n = self.target.tail_dim
        tail = _transpose(self.tail, n)
        ov = {P: _transpose(M, self.target.dim_at(P)) for P, M in self.overrides}
        arch = {s: _transpose(A, self.target.dim_at(s)) for s, A in self.arch}
        return BlockMorphism.make(block_dual(self.target), block_dual(self.source), tail, ov, arch, self.precision)

    def to_json(self):
        return {
            "source": self.source.content_hash(),
            "target": self.target.content_hash(),
            "tail": [[x.literal() for x in row] for row in self.tail],
            "overrides": [[P.label(), [[x.render() for x in row] for row in M]] for P, M in self.overrides],
            "arch": {s.label(): [[x.literal() for x in row] for row in A] for s, A in self.arch},
        }

    @classmethod
    def from_json(cls, doc, blocks=None, F=None, precision=DEFAULT_PRECISION):
        """Parse a morphism; ``source``/``target`` are inline blocks or hashes found in ``blocks``."""
        if not isinstance(doc, dict):
            raise LiteralError("morphism literal must be a JSON object")
        if "field" in doc:
            F = FieldDesc.parse(doc["field"])
        registry = {B.content_hash(): B for B in (blocks or [])}

        def block(ref):
            if isinstance(ref, str):
                if ref not in registry:
                    raise LiteralError(f"unknown block hash {ref}")
                return registry[ref]
            return AdelicBlock.from_json(ref, F, precision)

        if "source" not in doc:
            raise LiteralError("morphism needs a source block")
        src = block(doc["source"])
        tgt = block(doc["target"]) if "target" in doc else src
        F = src.field
        tail = [[parse_element(F, x) for x in row] for row in doc.get("tail", [])]
        if not tail and tgt.tail_dim:
            tail = [[] for _ in range(tgt.tail_dim)]
        ov = {}
        for item in doc.get("overrides", []):
            if not isinstance(item, (list, tuple)) or len(item) != 2:
                raise LiteralError("overrides must be [[place, matrix], ...]")
            P = parse_place(F, item[0])
            ov[P] = _parse_rect_matrix(P, item[1], precision)
        arch = {}
        for k, A in dict(doc.get("arch", {})).items():
            arch[parse_place(F, k)] = [[parse_element(F, x) for x in row] for row in A]
        return cls.make(src, tgt, tail, ov, arch, precision)


def _parse_rect_matrix(place, rows, precision):
    from .adeles import parse_local_value

    if not isinstance(rows, list) or any(not isinstance(r, list) for r in rows):
        raise LiteralError("matrix must be a list of rows")
    return [[_lzero(place) if str(x).strip() == "0" else parse_local_value(x, place, precision) for x in row]
            for row in rows]


def morphism_exceptional_set(f):
    """Finite places where ``f`` does not carry the source lattice into the target lattice."""
    F = f.field
    cands = set(f.override_places()) | set(f.source.exception_places()) | set(f.target.exception_places())
    den = 1
    for row in f.tail:
        for x in row:
            d = x.denominator()
            den = den * d // gcd(den, d)
    for p in factorint(den):
        cands.update(F.places_above(p))
    out = []
    for P in _sorted_places(cands):
        n, m = f.target.dim_at(P), f.source.dim_at(P)
        if n == 0 or m == 0:
            continue
        Bt = f.target.lattice_at(P).matrix()
        Bs = f.source.lattice_at(P).matrix()
        M = f.local(P)
        X = linalg.matmul(linalg.matmul(_local_inverse(P, Bt, f.precision), M, _lzero(P)), Bs, _lzero(P))
        if not _is_integral_matrix(X):
            out.append(P)
    return out


@dataclass(frozen=True)
class Verdict:
    exact: bool
    failures: tuple = ()

    def __str__(self):
        return "exact" if self.exact else "fails-at: " + ", ".join(self.failures)


def _short_exact(A, B, d0, d1, d2, zero):
    """Is ``0 -> K^d0 -A-> K^d1 -B-> K^d2 -> 0`` exact?"""
    rA = linalg.rank(A) if d0 and d1 else 0
    rB = linalg.rank(B) if d1 and d2 else 0
    if rA != d0 or rB != d2 or d0 + d2 != d1:
        return False
    if d0 and d1 and d2:
        C = linalg.matmul([list(r) for r in B], [list(r) for r in A], zero)
        return all(linalg.is_zero(x) for row in C for x in row)
    return True


def sequence_exactness(f, g):
    if not isinstance(f, BlockMorphism) or not isinstance(g, BlockMorphism):
        raise ShapeMismatch("exactness is only decided for morphisms of adelic blocks")
    if f.target != g.source:
        raise ShapeMismatch("target of f is not the source of g")
    F = f.field
    failures = []
    A, B, C = f.source, f.target, g.target
    if not _short_exact([list(r) for r in f.tail], [list(r) for r in g.tail],
                        A.tail_dim, B.tail_dim, C.tail_dim, F.zero):
        failures.append("tail")
    for P in _sorted_places(f.override_places() + g.override_places()):
        if not _short_exact(f.local(P), g.local(P), A.dim_at(P), B.dim_at(P), C.dim_at(P), _lzero(P)):
            failures.append(P.label())
    for s in F.arch_places():
        if not _short_exact(f.local(s), g.local(s), A.dim_at(s), B.dim_at(s), C.dim_at(s), F.zero):
            failures.append(s.label())
    return Verdict(not failures, tuple(failures))


def _field_kernel_basis(F, M, ncols):
    """Kernel basis over ``F`` (``ncols x k``) with entries in the ring of integers."""
    if ncols == 0:
        return []
    if F.is_rational:
        rows = linalg.clear_denominators([[x.a for x in row] for row in M]) if M else []
        K = linalg.integer_kernel(rows, ncols) if rows else linalg.identity(ncols)
        return [[F.element(x) for x in row] for row in K]
    K = linalg.kernel([list(r) for r in M], ncols, F.zero, F.one) if M else linalg.identity(ncols, F.one, F.zero)
    k = len(K[0]) if K else 0
    for j in range(k):
        den = 1
        for i in range(ncols):
            d = K[i][j].denominator()
            den = den * d // gcd(den, d)
        for i in range(ncols):
            K[i][j] = K[i][j] * den
    return K


def _bad_primes(F, N, ncols, k):
    """Primes where the columns of ``N`` may fail to span a saturated sublattice."""
    if F.is_rational or k == 0:
        return []
    g = 0
    for rows in combinations(range(ncols), k):
        minor = linalg.det([[N[i][j] for j in range(k)] for i in rows], F.one) if k else F.one
        if minor:
            g = gcd(g, int(minor.norm()))
    return sorted(factorint(g)) if g > 1 else []


def morphism_kernel(f):
    """Kernel block ``K`` with its inclusion into ``f.source``."""
    F = f.field
    src = f.source
    d = src.tail_dim
    N = _field_kernel_basis(F, [list(r) for r in f.tail], d)
    k = len(N[0]) if N and N[0] else 0
    if d and not k:
        N = [[] for _ in range(d)]
    special = set(f.override_places()) | set(src.exception_places())
    for p in _bad_primes(F, N, d, k):
        special.update(F.places_above(p))
    overrides, kdims = {}, {}
    for P in _sorted_places(special):
        dP = src.dim_at(P)
        if P in f.overrides_dict:
            M = f.local(P)
            if dP == 0:
                NP = []
            elif not M:
                NP = linalg.identity(dP, LocalElement.one(P, f.precision), _lzero(P))
            else:
                NP = linalg.kernel(M, dP, _lzero(P), LocalElement.one(P, f.precision))
        else:
            NP = local_matrix(P, N, f.precision)
        kP = len(NP[0]) if NP and NP[0] else 0
        kdims[P] = kP
        if kP == 0:
            overrides[P] = [[] for _ in range(dP)]
            continue
        Binv = _local_inverse(P, src.lattice_at(P, f.precision).matrix(), f.precision)
        C = linalg.matmul(Binv, NP, _lzero(P))
        # rows of C span the dual of the kernel lattice; their HNF is T^t
        H = Lattice.from_generators(P, C, kP, f.precision).matrix()
        Tinv = _local_inverse(P, linalg.transpose(H, kP), f.precision)
        overrides[P] = linalg.matmul(NP, Tinv, _lzero(P))
    arch_dims, arch_maps = {}, {}
    for s, A in f.arch:
        m = src.dim_at(s)
        if m == 0:
            K = []
        elif not A:
            K = linalg.identity(m, F.one, F.zero)
        else:
            K = linalg.kernel([list(r) for r in A], m, F.zero, F.one)
        km = len(K[0]) if K and K[0] else 0
        arch_dims[s] = km
        arch_maps[s] = K if km else [[] for _ in range(m)]
    exc = {P: (kP, None) for P, kP in kdims.items() if kP != k}
    K = AdelicBlock.make(F, k, exc, arch_dims)
    inc = BlockMorphism.make(K, src, N, overrides, arch_maps, f.precision)
    return K, inc


# general LCA_F objects


@dataclass(frozen=True)
class Discrete:
    n: int


@dataclass(frozen=True)
class CompactVS:
    n: int


@dataclass(frozen=True)
class Block:
    block: AdelicBlock


@dataclass(frozen=True)
class Sum:
    children: tuple


def _walk(X):
    if isinstance(X, Sum):
        for c in X.children:
            yield from _walk(c)
    else:
        yield X


def lca_normalize(X, field=None):
    """``X ~ V + A + D``: returns ``(dim V, A, dim D)``."""
    compact = discrete = 0
    block = None
    for leaf in _walk(X):
        if isinstance(leaf, Discrete):
            if leaf.n < 0:
                raise ShapeMismatch("dimension must be non-negative")
            discrete += leaf.n
        elif isinstance(leaf, CompactVS):
            if leaf.n < 0:
                raise ShapeMismatch("dimension must be non-negative")
            compact += leaf.n
        elif isinstance(leaf, Block):
            block = leaf.block if block is None else block_direct_sum(block, leaf.block)
        else:
            raise ShapeMismatch(f"not an LCA object: {leaf!r}")
    if block is None:
        block = AdelicBlock.zero(field or FieldDesc.rational())
    return compact, block, discrete


def lca_tree(normal):
    compact, block, discrete = normal
    return Sum((CompactVS(compact), Block(block), Discrete(discrete)))


def lca_dual(X):
    if isinstance(X, Discrete):
        return CompactVS(X.n)
    if isinstance(X, CompactVS):
        return Discrete(X.n)
    if isinstance(X, Block):
        return Block(block_dual(X.block))
    if isinstance(X, Sum):
        return Sum(tuple(lca_dual(c) for c in X.children))
    raise ShapeMismatch(f"not an LCA object: {X!r}")
