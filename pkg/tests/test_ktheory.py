import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from adelic import linalg
from adelic.adeles import Idele
from adelic.blocks import AdelicBlock, BlockMorphism, block_direct_sum, block_dual
from adelic.errors import FieldMismatch, NotInvertible, NotPrime, SingularToPrecision
from adelic.ktheory import (
    K0Class,
    MuVector,
    alpha0_injective_on,
    alpha1_injective_on,
    hilbert_symbol,
    k0_class_of_block,
    k0_image_of_free,
    k0_is_bounded_deviation,
    k1_class_of_automorphism,
    k1_det,
    k2_torsion_class_equal,
    k_lcaF_class,
    k_lcaF_equal,
    k_lcaF_trivial,
    mu_group,
    mu_order,
    reciprocity_product,
    tate_index,
    whitehead_reduce,
)
from adelic.localfield import LocalElement
from adelic.numberfield import FieldDesc, place_of
from adelic.oracle import oracle_mu_order

Q = FieldDesc.rational()
KI = FieldDesc.parse("quad:-1")
K3 = FieldDesc.parse("quad:-3")
P2, P3, P5, P7 = (place_of(Q, p) for p in (2, 3, 5, 7))
INF = Q.arch_places()[0]
A = AdelicBlock.adeles(Q)


def L(P, q, N=30):
    return LocalElement.from_rational(P, q, N)


# K0

def test_k0_examples():
    c = k0_class_of_block(A)
    assert c.tail == 1 and c.is_constant() and c.value_at(INF) == 1
    assert k0_class_of_block(AdelicBlock.zero(Q)).is_zero()
    c = k0_class_of_block(AdelicBlock.make(Q, 1, {P2: (3, None)}))
    assert c.tail == 1 and dict(c.exceptions) == {P2: 3}


def test_k0_free_and_bounded():
    assert k0_image_of_free(3) == K0Class.constant(Q, 3)
    assert k0_is_bounded_deviation(k0_class_of_block(A)) == (1, [])
    assert k0_is_bounded_deviation(K0Class.make(Q, 1, {P2: 5})) == (5, [P2])


def test_k0_quotient_examples():
    assert k_lcaF_trivial(K0Class.constant(Q, 5))
    a = K0Class.make(Q, 0, {P2: 1})
    b = K0Class.make(Q, 3, {P2: 4})
    assert k_lcaF_equal(a, b)
    assert k_lcaF_class(b) == a
    assert not k_lcaF_equal(a, K0Class.make(Q, 0, {P3: 1}))


def test_k0_json():
    c = K0Class.make(Q, 2, {P5: -1}, {INF: 4})
    assert K0Class.from_json(c.to_json()) == c


# K1

def test_k1_det_examples():
    M = [[L(P5, 5), L(P5, 0)], [L(P5, 0), L(P5, 1)]]
    M[0][1] = M[1][0] = LocalElement.zero(P5)
    assert k1_det(M).agrees(L(P5, 5))
    T = [[L(P3, 1), L(P3, 7)], [LocalElement.zero(P3), L(P3, 1)]]
    assert k1_det(T).is_one()
    assert k1_det([[L(P7, 2), L(P7, 1)], [L(P7, 1), L(P7, 1)]]).is_one()
    with pytest.raises(SingularToPrecision):
        k1_det([[L(P7, 1), L(P7, 2)], [L(P7, 2), L(P7, 4)]])


def test_k1_automorphism_examples():
    B = AdelicBlock.make(Q, 1, {}, 1)
    assert k1_class_of_automorphism(BlockMorphism.identity(B)).is_identity()
    f = BlockMorphism.make(B, B, [[Fraction(3, 7)]])
    assert k1_class_of_automorphism(f) == Idele.principal(Fraction(3, 7))
    g = BlockMorphism.make(B, B, [[1]], {P5: [[5]]})
    assert k1_class_of_automorphism(g) == Idele.make(Q, 1, {P5: 5})
    with pytest.raises(NotInvertible):
        k1_class_of_automorphism(BlockMorphism.make(B, B, [[0]]))


def test_k1_quotient_examples():
    assert k_lcaF_trivial(Idele.principal(7))
    assert not k_lcaF_trivial(Idele.make(Q, 1, {P5: 5}))
    assert k_lcaF_class(Idele.principal(7)).is_identity()


def test_diagonal_maps_are_injective():
    assert alpha0_injective_on(range(-20, 21))
    assert alpha1_injective_on([Fraction(n, d) for n in range(-9, 10) if n for d in range(1, 6)])


# mu and K2

def test_mu_examples():
    n, g = mu_group(P5, 10)
    assert n == 4 and g.residue() == 2
    n, g = mu_group(P2, 10)
    assert n == 2 and g.agrees(L(P2, -1, 10))
    assert mu_group(P7)[0] == 6


def test_mu_orders_match_enumeration():
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47):
        assert mu_order(place_of(Q, p)) == oracle_mu_order(p)


def test_mu_quadratic_places():
    assert mu_order(place_of(KI, 2)) == 4
    assert mu_order(place_of(K3, 3)) == 6
    assert mu_order(place_of(KI, 3)) == 8
    n, g = mu_group(place_of(KI, 2), 12)
    assert (g ** n).agrees(LocalElement.one(place_of(KI, 2), 12))
    assert not (g ** (n // 2)).agrees(LocalElement.one(place_of(KI, 2), 12))


def test_k2_examples():
    u = MuVector.make(Q, {P5: 3, P7: 1})
    assert k2_torsion_class_equal(u, u)
    assert k2_torsion_class_equal(u, u * MuVector.make(Q, {}, 1))
    assert not k2_torsion_class_equal(MuVector.make(Q), MuVector.make(Q, {P5: 1}))
    assert MuVector.make(Q, {P5: 4}).is_diagonal()
    with pytest.raises(FieldMismatch):
        k2_torsion_class_equal(u, MuVector.make(KI))


def test_mu_vector_tameness():
    v = MuVector.make(KI, {place_of(KI, 2): 1, place_of(KI, 5, 0): 1})
    tame = v.tame()
    assert tame[place_of(KI, 2)] is False
    assert tame[place_of(KI, 5, 0)] is True


def test_hilbert_examples():
    assert hilbert_symbol(-1, -1, "inf") == -1
    assert hilbert_symbol(2, 5, 5) == -1
    assert hilbert_symbol(2, 5, 2) == -1
    with pytest.raises(NotPrime):
        hilbert_symbol(2, 5, 4)


def test_reciprocity_examples():
    prod, table = reciprocity_product(2, 5)
    assert prod == 1 and table == {"inf": 1, 2: -1, 5: -1}
    prod, table = reciprocity_product(1, 15)
    assert set(table.values()) == {1}
    prod, table = reciprocity_product(-1, -1)
    assert prod == 1 and table == {"inf": -1, 2: -1}


def test_reciprocity_sweep():
    vals = [x for x in range(-30, 31) if x]
    for a in vals:
        for b in vals:
            assert reciprocity_product(a, b)[0] == 1, (a, b)


def test_tate_index_examples():
    assert tate_index(-2, 0) == 2
    assert tate_index(4, 4) == 0


# properties

place_st = st.sampled_from([P2, P3, P5, P7])


@st.composite
def blocks(draw):
    n = draw(st.integers(0, 3))
    exc = {P: (draw(st.integers(0, 4)), None) for P in draw(st.lists(place_st, max_size=2, unique=True))}
    return AdelicBlock.make(Q, n, exc, draw(st.integers(0, 3)))


@given(blocks(), blocks())
@settings(max_examples=200)
def test_k0_additive(B1, B2):
    assert k0_class_of_block(block_direct_sum(B1, B2)) == k0_class_of_block(B1) + k0_class_of_block(B2)


@given(blocks())
def test_k0_duality_invariant(B):
    assert k0_class_of_block(block_dual(B)) == k0_class_of_block(B)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_rank_stabilisation(p):
    rng = random.Random(p)
    P = place_of(Q, p)
    done = 0
    while done < 100:
        n = rng.randint(1, 4)
        M = [[L(P, Fraction(rng.randint(-50, 50), rng.randint(1, 9))) for _ in range(n)] for _ in range(n)]
        try:
            d = k1_det(M)
        except SingularToPrecision:
            continue
        D, ops = whitehead_reduce(M)
        assert D[0][0].agrees(d, 20)
        for i in range(1, n):
            assert D[i][i].agrees(LocalElement.one(P, 30), 20)
            assert all(D[i][j].is_zero() for j in range(n) if j != i)
        done += 1


def test_transvections_have_determinant_one():
    P = P5
    for c in (1, 5, Fraction(1, 25), -7):
        for n in (2, 3):
            E = linalg.identity(n, LocalElement.one(P, 30), LocalElement.zero(P))
            E[0][n - 1] = L(P, c)
            assert k1_det(E).is_one()


inv2 = st.lists(st.lists(st.integers(-6, 6), min_size=2, max_size=2), min_size=2, max_size=2).filter(
    lambda M: M[0][0] * M[1][1] - M[0][1] * M[1][0] != 0)


@given(inv2, inv2, st.integers(1, 4), st.integers(1, 4))
def test_k1_multiplicative(M, N, a, b):
    B = AdelicBlock.make(Q, 2, {P5: (2, [[5, 0], [0, 1]])}, 2)
    f = BlockMorphism.make(B, B, M, {P5: [[L(P5, 5 ** a), 0], [0, 1]]} if a else None)
    g = BlockMorphism.make(B, B, N, {P5: [[1, 0], [0, L(P5, 3 ** b)]]})
    lhs = k1_class_of_automorphism(f.compose(g))
    rhs = k1_class_of_automorphism(f) * k1_class_of_automorphism(g)
    assert lhs.g == rhs.g
    assert k_lcaF_equal(lhs, rhs)
    for P in set(lhs.exceptions_dict) | set(rhs.exceptions_dict):
        assert lhs.component(P).agrees(rhs.component(P))


k0_st = st.builds(lambda t, e, a: K0Class.make(Q, t, e, {INF: a}),
                  st.integers(-5, 5), st.dictionaries(place_st, st.integers(-5, 5), max_size=3),
                  st.integers(-5, 5))


@given(k0_st)
@settings(max_examples=200)
def test_fiber_sequence_k0(c):
    assert k_lcaF_trivial(c) == c.is_constant()
    assert k_lcaF_equal(c, c.shift(7))


nonzero = st.fractions(max_denominator=50).filter(lambda q: q != 0)


@given(nonzero, st.dictionaries(place_st, nonzero, max_size=2))
@settings(max_examples=200)
def test_fiber_sequence_k1(g, corrections):
    # a finitely supported correction is diagonal only when it is trivial
    a = Idele.make(Q, g, corrections)
    assert k_lcaF_trivial(a) == (a.exceptions == ())
    assert k_lcaF_trivial(Idele.principal(g))


hs_vals = st.integers(-60, 60).filter(bool)


@given(hs_vals, hs_vals, hs_vals, st.sampled_from(["inf", 2, 3, 5, 7, 11, 13]))
@settings(max_examples=500)
def test_hilbert_bimultiplicative(a, a2, b, v):
    assert hilbert_symbol(a * a2, b, v) == hilbert_symbol(a, b, v) * hilbert_symbol(a2, b, v)
    assert hilbert_symbol(a, b, v) == hilbert_symbol(b, a, v)


@given(st.integers(-50, 50), st.integers(-50, 50), st.integers(-50, 50))
@settings(max_examples=100)
def test_tate_index_additive(a, b, c):
    assert tate_index(a, b) + tate_index(b, c) == tate_index(a, c)
