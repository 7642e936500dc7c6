from fractions import Fraction

import pytest

from ladder.errors import CompositeModulus
from ladder.irregular import (IrregularPair, bernoulli_mod_p, bernoulli_table, irregular_indices,
                              primes_up_to, scan_irregular)

from oracles import bernoulli_exact

EXACT = bernoulli_exact(60)


def reduce_mod(x: Fraction, p: int) -> int:
    return x.numerator * pow(x.denominator, -1, p) % p


def test_exact_oracle_sanity():
    assert EXACT[1] == Fraction(-1, 2)
    assert EXACT[2] == Fraction(1, 6)
    assert EXACT[12] == Fraction(-691, 2730)


@pytest.mark.parametrize("p", [q for q in primes_up_to(50) if q >= 5])
def test_recurrence_matches_exact(p):
    table = bernoulli_mod_p(p)
    assert table == {k: reduce_mod(EXACT[k], p) for k in range(2, p - 2, 2)}


def test_examples():
    assert bernoulli_mod_p(7)[2] == 6
    assert bernoulli_mod_p(691)[12] == 0
    assert list(bernoulli_mod_p(5)) == [2]


def test_odd_indices_vanish():
    for p in [7, 11, 13, 37, 101]:
        b = bernoulli_table(p, skip_odd=False)
        assert all(b[j] == 0 for j in range(3, p - 2, 2))
        assert [int(b[j]) for j in range(2, p - 2, 2)] == list(bernoulli_mod_p(p).values())


def test_irregular_indices():
    assert irregular_indices(11) == []
    assert irregular_indices(37) == [32]
    assert irregular_indices(157) == [62, 110]


def test_exact_oracle_irregular_indices_upto_61():
    for p in [q for q in primes_up_to(61) if q >= 5]:
        expect = [k for k in range(2, p - 2, 2) if EXACT[k].numerator % p == 0]
        assert irregular_indices(p) == expect


def test_scan_examples():
    assert scan_irregular(30) == []
    assert scan_irregular(37) == [IrregularPair(37, 32)]
    assert IrregularPair(691, 12) in scan_irregular(700)


def test_scan_invariants():
    for pair in scan_irregular(400):
        assert pair.k % 2 == 0 and 12 <= pair.k <= pair.p - 3
        assert bernoulli_mod_p(pair.p)[pair.k] == 0


def test_composite_rejected():
    with pytest.raises(CompositeModulus):
        bernoulli_mod_p(9)
    with pytest.raises(CompositeModulus):
        irregular_indices(3)


def test_pair_validation():
    with pytest.raises(ValueError):
        IrregularPair(37, 10)
