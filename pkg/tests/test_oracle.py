import pytest

from adelic.errors import SearchSpaceTooLarge
from adelic.oracle import (
    OracleReport,
    compare,
    hilbert_modulus_exponent,
    oracle_hilbert_solvable,
    oracle_mu_order,
    oracle_snf_int,
    oracle_splitting,
)

# Computed once by the brute-force search and frozen here.  Row a, column b,
# over VALS; "+" means a x^2 + b y^2 = z^2 has a primitive solution.
VALS = [-3, -1, 2, 3, 5, 6, 7, 10]
FROZEN_SOLVABLE = {
    2: ["++-++-+-", "+-+-+--+", "-++---+-", "+---++--", "++-++-+-", "---+---+", "+-+-+--+", "-+---+++"],
    3: ["---+--++", "-++-+-++", "-++-+-++", "+----+++", "-++-+-++", "---+--++", "++++++++", "++++++++"],
    5: ["++++-++-", "++++++++", "++++-++-", "++++-++-", "-+--++--", "++++++++", "++++-++-", "-+---+-+"],
    7: ["++++++++", "++++++-+", "++++++++", "++++++-+", "++++++-+", "++++++-+", "+-+-----", "++++++-+"],
}
FROZEN_MU = {2: 2, 3: 2, 5: 4, 7: 6, 11: 10, 13: 12, 17: 16, 19: 18, 23: 22, 29: 28,
             31: 30, 37: 36, 41: 40, 43: 42, 47: 46}
FROZEN_SPLIT = {
    (-1, 3): "inert", (-1, 5): "split", (-1, 7): "inert", (-1, 11): "inert", (-1, 13): "split",
    (-5, 3): "split", (-5, 7): "split", (-5, 11): "inert", (-5, 13): "inert",
    (-7, 3): "inert", (-7, 5): "inert", (-7, 11): "split", (-7, 13): "inert",
    (2, 3): "inert", (2, 5): "inert", (2, 7): "split", (2, 11): "inert", (2, 13): "inert",
    (5, 3): "inert", (5, 7): "inert", (5, 11): "split", (5, 13): "inert",
}


def test_hilbert_search_examples():
    assert oracle_hilbert_solvable(2, 5, 5, 3) is False
    assert oracle_hilbert_solvable(2, 7, 3, 3) is True
    for p in (2, 3, 5, 7):
        assert oracle_hilbert_solvable(1, 11, p)


def test_hilbert_search_frozen_table():
    for p, rows in FROZEN_SOLVABLE.items():
        for a, row in zip(VALS, rows):
            got = "".join("+" if oracle_hilbert_solvable(a, b, p) else "-" for b in VALS)
            assert got == row, (p, a)


def test_modulus_exponent():
    assert hilbert_modulus_exponent(2, 5, 5) == 4
    assert hilbert_modulus_exponent(3, 5, 2) == 6
    assert hilbert_modulus_exponent(16, 1, 2) == 9


def test_budget_is_a_hard_error():
    with pytest.raises(SearchSpaceTooLarge):
        oracle_hilbert_solvable(97 * 97, 97, 97)
    with pytest.raises(SearchSpaceTooLarge):
        oracle_hilbert_solvable(3, 5, 7, 3, budget=100)


def test_snf():
    assert oracle_snf_int([[2, 0], [0, 3]]) == [1, 6]
    assert oracle_snf_int([[1, 0], [0, 1]]) == [1, 1]
    assert oracle_snf_int([[2, 0], [0, 2]]) == [2, 2]
    assert oracle_snf_int([[2, 4, 4], [-6, 6, 12], [10, -4, -16]]) == [2, 6, 12]
    assert oracle_snf_int([[3, 1], [0, 5]]) == [1, 15]


def test_splitting():
    assert oracle_splitting(-5, 3) == "split"
    assert oracle_splitting(-5, 11) == "inert"
    assert oracle_splitting(-5, 5) == "ramified"
    for (d, p), kind in FROZEN_SPLIT.items():
        assert oracle_splitting(d, p) == kind


def test_mu_enumeration():
    for p, n in FROZEN_MU.items():
        assert oracle_mu_order(p) == n


def test_report_contract():
    assert compare("x", "y", 1, 1).verdict == "agree"
    rep = compare("x", "y", 1, -1)
    assert rep.verdict == "disagree" and rep.witness == {"oracle": 1, "formula": -1}
    with pytest.raises(ValueError):
        OracleReport("x", "y", "disagree")
    assert compare("x", "y", 2, 2).to_json_line() == compare("x", "y", 2, 2).to_json_line()
