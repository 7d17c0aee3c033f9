"""Brute-force reference computations on plain integers.

Nothing here imports the arithmetic of the other modules; the only shared
ground is Python's big integers.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass

from .errors import SearchSpaceTooLarge

MAX_STATES = 10 ** 7


@dataclass(frozen=True)
class OracleReport:
    subject: str
    instance: str
    verdict: str
    witness: object = None

    def __post_init__(self):
        if self.verdict not in ("agree", "disagree"):
            raise ValueError(f"bad verdict {self.verdict!r}")
        if self.verdict == "disagree" and self.witness is None:
            raise ValueError("a disagreement must carry a witness")

    @property
    def agrees(self):
        return self.verdict == "agree"

    def to_json_line(self):
        return json.dumps(asdict(self), sort_keys=True, default=str)


def compare(subject, instance, expected, actual):
    if expected == actual:
        return OracleReport(subject, instance, "agree")
    return OracleReport(subject, instance, "disagree", {"oracle": expected, "formula": actual})


def _vp(n, p):
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _strip_squares(n, p):
    while n % (p * p) == 0:
        n //= p * p
    return n


def hilbert_modulus_exponent(a, b, p):
    """Smallest exponent the primitive-solution search needs: ``3 + v_p(4ab)``, at least 6 at p = 2."""
    k = 3 + _vp(4 * a * b, p)
    return max(k, 6) if p == 2 else k


def oracle_hilbert_solvable(a, b, p, k=None, budget=MAX_STATES):
    """Does ``a x^2 + b y^2 = z^2`` have a primitive solution modulo ``p^k``?

    A primitive p-adic solution has ``x`` or ``y`` a unit (if both were
    divisible by p so would be z), so after scaling it lies on the chart
    ``x = 1`` or ``y = 1``.  Factors ``p^2`` are first removed from ``a`` and
    ``b``.  Each chart is searched depth first over the
    p-adic digits of ``(y, z)``; a partial pair survives level ``j`` when the
    equation holds modulo ``p^j``.  With ``k >= 3 + v_p(4ab)`` a solution
    modulo ``p^k`` already forces solvability over Z_p.
    """
    if a == 0 or b == 0:
        raise ValueError("a and b must be nonzero")
    # x -> x/p rescales a p^2 factor away without changing solvability over Q_p
    a, b = _strip_squares(a, p), _strip_squares(b, p)
    k = hilbert_modulus_exponent(a, b, p) if k is None else k
    if p ** k > budget:
        raise SearchSpaceTooLarge(f"{p}^{k} exceeds the search budget {budget}")
    nodes = 0

    def chart(c0, c1):
        nonlocal nodes
        stack = [(0, 0, 0)]
        while stack:
            y0, z0, j = stack.pop()
            if j == k:
                return True
            m, step = p ** (j + 1), p ** j
            for dy in range(p):
                y = y0 + dy * step
                for dz in range(p):
                    z = z0 + dz * step
                    nodes += 1
                    if nodes > budget:
                        raise SearchSpaceTooLarge("node budget exhausted")
                    if (c0 + c1 * y * y - z * z) % m == 0:
                        stack.append((y, z, j + 1))
        return False

    return chart(a, b) or chart(b, a)


def oracle_hilbert_symbol(a, b, p, k=None):
    return 1 if oracle_hilbert_solvable(a, b, p, k) else -1


def oracle_snf_int(M):
    """Elementary divisors of an integer matrix by naive pivoting."""
    A = [list(map(int, r)) for r in M]
    if not A or not A[0]:
        return []
    m, n = len(A), len(A[0])
    divisors = []
    t = 0
    while t < min(m, n):
        entries = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, n) if A[i][j]]
        if not entries:
            break
        _, i, j = min(entries)
        A[t], A[i] = A[i], A[t]
        for row in A:
            row[t], row[j] = row[j], row[t]
        done = False
        while not done:
            done = True
            piv = A[t][t]
            for i in range(t + 1, m):
                q = A[i][t] // piv
                A[i] = [x - q * y for x, y in zip(A[i], A[t])]
                if A[i][t]:
                    done = False
            for j in range(t + 1, n):
                q = A[t][j] // piv
                for row in A:
                    row[j] -= q * row[t]
                if A[t][j]:
                    done = False
            if not done:
                entries = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, n)
                           if A[i][j] and (i == t or j == t)]
                _, i, j = min(entries)
                A[t], A[i] = A[i], A[t]
                for row in A:
                    row[t], row[j] = row[j], row[t]
                continue
            # the pivot must divide the rest of the block
            bad = [(i, j) for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % piv]
            if bad:
                i, _ = bad[0]
                A[t] = [x + y for x, y in zip(A[t], A[i])]
                done = False
        divisors.append(abs(A[t][t]))
        t += 1
    return divisors


def oracle_splitting(d, p):
    """Splitting type of the odd prime ``p`` in ``Q(sqrt d)`` by exhaustive squaring."""
    if d % p == 0:
        return "ramified"
    for x in range(1, p):
        if (x * x - d) % p == 0:
            return "split"
    return "inert"


def oracle_mu_order(p, k=3):
    """``|mu(Q_p)|`` by enumerating Teichmuller representatives and p-power roots mod ``p^k``."""
    m = p ** k
    reps = set()
    for a in range(1, p):
        t = a
        for _ in range(k + 1):
            t = pow(t, p, m)
        if pow(t, p - 1, m) != 1:
            raise ArithmeticError(f"Teichmuller iteration did not converge for {a} mod {p}^{k}")
        reps.add(t)
    order = len(reps)
    # p-power part: primitive p^j-th roots x = 1 mod p, cyclotomic value 0 mod p^k
    j = 1
    while True:
        q = p ** j
        found = False
        for x in range(1, m, p):
            # Phi_{p^j}(x) = sum_{i<p} x^(i p^(j-1))
            s = sum(pow(x, i * (q // p), m) for i in range(p)) % m
            if s == 0:
                found = True
                break
        if not found:
            break
        order *= p
        j += 1
    return order
