from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from adelic.errors import (
    DivisionByZeroToPrecision,
    InsufficientPrecision,
    NoRootInResidueField,
    NotASimpleRoot,
    PlaceMismatch,
    ZeroResidue,
)
from adelic.localfield import (
    LocalElement,
    hensel_lift,
    is_square,
    local_arith,
    local_model,
    parse_local,
    sqrt,
    teichmuller,
    valuation_residue,
)
from adelic.numberfield import FieldDesc, embed_global, place_of, split_prime

Q = FieldDesc.rational()
K5 = FieldDesc.parse("quad:-5")
Q5, Q7, Q3, Q2 = (place_of(Q, p) for p in (5, 7, 3, 2))


def L(place, q, N=20):
    return LocalElement.from_rational(place, q, N)


def test_arith_examples():
    x = local_arith("mul", L(Q5, 2), L(Q5, 15))
    assert (x.valuation, x.unit[0]) == (1, 6)
    inv = local_arith("inv", L(Q5, 5))
    assert (inv.valuation, inv.unit[0]) == (-1, 1)
    s = local_arith("add", L(Q5, 2), L(Q5, 3))
    assert (s.valuation, s.unit[0]) == (1, 1)
    assert local_arith("neg", L(Q5, 1)).agrees(L(Q5, -1))


def test_cancellation_loses_precision():
    a = L(Q5, 1, 10)
    b = L(Q5, Fraction(-1) + 5 ** 3, 10)
    s = a + b
    assert s.valuation == 3 and s.precision == 7


def test_full_cancellation_is_zero_to_precision():
    z = L(Q5, 7, 10) - L(Q5, 7, 10)
    assert z.is_zero() and z.valuation == 10
    with pytest.raises(DivisionByZeroToPrecision):
        z.inverse()


def test_place_mismatch():
    with pytest.raises(PlaceMismatch):
        L(Q5, 1) + L(Q7, 1)


def test_valuation_residue_examples():
    assert valuation_residue(L(Q3, 18)) == (2, 2)
    assert valuation_residue(L(Q7, 1)) == (0, 1)
    assert valuation_residue(L(Q7, Fraction(7, 5))) == (1, 3)
    with pytest.raises(DivisionByZeroToPrecision):
        valuation_residue(LocalElement.zero(Q7))


def test_hensel_examples():
    r = hensel_lift([-2, 0, 1], 3, Q7, 2)
    assert r.unit[0] % 49 == 10
    assert hensel_lift([-1, 1], 1, Q5, 10).is_one()
    with pytest.raises(NoRootInResidueField):
        hensel_lift([-2, 0, 1], None, Q5, 4)
    with pytest.raises(NotASimpleRoot):
        hensel_lift([-2, 0, 1], 1, Q7, 4)
    with pytest.raises(NotASimpleRoot):
        hensel_lift([0, 0, 1], 0, Q7, 4)


def test_teichmuller_examples():
    assert teichmuller(2, Q5, 2).unit[0] % 25 == 7
    assert teichmuller(1, Q7, 12).is_one()
    t = teichmuller(4, Q5, 12)
    assert t.digits() == [4] * 12
    with pytest.raises(ZeroResidue):
        teichmuller(0, Q5)


def test_is_square_examples():
    assert is_square(L(Q7, 2))
    assert not is_square(L(Q5, 5))
    assert is_square(L(Q2, 17))
    assert not is_square(L(Q2, 5))
    with pytest.raises(InsufficientPrecision):
        is_square(L(Q2, 17, 2))


def test_sqrt_squares_back():
    for place, a in ((Q7, 2), (Q2, 17), (Q5, -1)):
        y = sqrt(L(place, a, 16))
        assert (y * y).agrees(L(place, a, 16))


def test_render_parse_round_trip():
    for place in [Q5, Q2] + split_prime(K5, 5) + split_prime(K5, 11) + split_prime(K5, 3):
        x = embed_global(place.field, place.field.element(Fraction(7, 3), 2), place, 12) \
            if not place.field.is_rational else L(place, Fraction(-250, 7), 12)
        assert parse_local(x.render(), place) == x


def test_render_shape():
    assert L(Q5, 2, 3).render() == "5^0 * (2)  (O(5^3))"
    assert L(Q5, 15, 3).render() == "5^1 * (3)  (O(5^4))"


def test_unramified_and_ramified_models():
    P11 = place_of(K5, 11)
    assert local_model(P11).f == 2
    P5 = place_of(K5, 5)
    pi = LocalElement.uniformizer(P5, 10)
    assert (pi * pi).valuation == 2
    assert embed_global(K5, K5.element(5), P5, 10).valuation == 2


# properties

primes = st.sampled_from([2, 3, 5, 7, 11])
nonzero = st.fractions(max_denominator=10 ** 4).filter(lambda q: q != 0)


@given(primes, nonzero, nonzero)
@settings(max_examples=500)
def test_valuation_multiplicative(p, a, b):
    P = place_of(Q, p)
    x, y = L(P, a), L(P, b)
    assert (x * y).valuation == x.valuation + y.valuation


@given(primes, nonzero, nonzero)
def test_ultrametric(p, a, b):
    P = place_of(Q, p)
    x, y = L(P, a), L(P, b)
    s = x + y
    assert s.valuation >= min(x.valuation, y.valuation)
    if x.valuation != y.valuation:
        assert s.valuation == min(x.valuation, y.valuation)


@given(st.sampled_from([7, 17, 23, 31, 41, 47]), st.integers(3, 30))
def test_hensel_extends_digits(p, N):
    P = place_of(Q, p)
    r = hensel_lift([-2, 0, 1], None, P, N)
    longer = hensel_lift([-2, 0, 1], r.residue(), P, N + 7)
    assert longer.digits()[:N] == r.digits()


@pytest.mark.parametrize("place", [Q5, Q7, Q2, place_of(K5, 11), place_of(K5, 3, 1)])
def test_teichmuller_closure(place):
    model = local_model(place)
    N = 10
    reps = [teichmuller(r, place, N) for r in model.residue_field() if not model.is_residue_zero(r)]
    keys = {t.unit for t in reps}
    assert len(keys) == place.q - 1
    for s in reps:
        assert (s ** (place.q - 1)).agrees(LocalElement.one(place, N))
        for t in reps:
            assert (s * t).unit in keys
