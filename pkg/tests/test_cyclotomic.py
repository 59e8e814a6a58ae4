import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from overrank.cyclotomic import (
    CYC_MINUS_ONE,
    CYC_ONE,
    CYC_ZERO,
    CycloNum,
    LevelOverflow,
    as_root_of_unity,
    cyclotomic_polynomial,
    euler_phi,
    root_label,
    root_of_unity_sum,
    zeta,
)


def test_cyclotomic_polynomials_small():
    assert cyclotomic_polynomial(1) == (-1, 1)
    assert cyclotomic_polynomial(2) == (1, 1)
    assert cyclotomic_polynomial(3) == (1, 1, 1)
    assert cyclotomic_polynomial(4) == (1, 0, 1)
    assert cyclotomic_polynomial(6) == (1, -1, 1)
    assert cyclotomic_polynomial(12) == (1, 0, -1, 0, 1)


def test_zeta_basics():
    assert zeta(1, 0) == CYC_ONE
    assert zeta(2, 1) == CYC_MINUS_ONE
    assert zeta(3, 1) + zeta(3, 2) == CYC_MINUS_ONE
    assert zeta(3).inverse() == zeta(3, 2)
    assert zeta(4) * zeta(4) == CYC_MINUS_ONE


def test_root_of_unity_sum_cases():
    assert root_of_unity_sum(6, 6) == 6
    assert root_of_unity_sum(6, 4) == 0
    assert root_of_unity_sum(1, 0) == 1


@pytest.mark.parametrize("n", range(1, 25))
def test_root_of_unity_sum_brute_force(n):
    for s in range(-48, 49):
        direct = CYC_ZERO
        for j in range(n):
            direct = direct + zeta(n, s * j)
        assert direct == CycloNum.rational(root_of_unity_sum(n, s))


def test_zeta_power_sum_vanishes():
    total = CYC_ZERO
    for j in range(5):
        total = total + zeta(5, 2 * j)
    assert total.is_zero()


def test_multiplicative_order():
    from math import gcd

    for L in (1, 2, 3, 4, 5, 6, 8, 12):
        for k in range(L):
            value = zeta(L, k)
            expected = L // gcd(L, k) if k else 1
            assert as_root_of_unity(value)[1] == expected


def test_cross_level_equality_and_lifting():
    z6 = zeta(6)
    assert z6 * z6 == zeta(3)
    assert (z6 * z6).lift(12) == zeta(3).lift(12)
    a, b = zeta(3), zeta(4)
    lifted_sum = (a + b).lift(24)
    assert lifted_sum == a.lift(24) + b.lift(24)


def test_rational_collapse_and_is_rational():
    assert (zeta(3) + zeta(3, 2)).is_rational() == mpq(-1)
    assert zeta(3).is_rational() is None
    assert zeta(4, 2).is_rational() == mpq(-1)
    assert (zeta(6) - zeta(6)).level == 1


def test_inverse_and_division():
    v = zeta(12, 5) + CycloNum.rational(mpq(3, 7))
    assert (v * v.inverse()).is_one()
    with pytest.raises(ZeroDivisionError):
        CYC_ZERO.inverse()


def test_level_cap():
    import overrank.cyclotomic as cy

    old = cy.LEVEL_CAP
    try:
        cy.set_level_cap(20)
        with pytest.raises(LevelOverflow):
            zeta(7) * zeta(13)
        with pytest.raises(LevelOverflow):
            zeta(23)
    finally:
        cy.set_level_cap(old)


def test_root_label():
    assert root_label(CYC_ONE) == "1"
    assert root_label(CYC_MINUS_ONE) == "-1"
    assert root_label(zeta(3)) == "zeta(3)"
    assert root_label(-zeta(3)) == "zeta(6)^5"
    assert root_label(CycloNum.rational(5)) is None


_scalars = st.sampled_from(
    [zeta(3), zeta(3, 2), zeta(4), zeta(6), CYC_ONE, CYC_MINUS_ONE]
)
_elems = st.builds(
    lambda u, p, r: u * CycloNum.rational(p) + CycloNum.rational(r),
    _scalars,
    st.integers(-4, 4),
    st.fractions(min_value=-3, max_value=3).map(lambda f: mpq(f.numerator, f.denominator)),
)


@settings(max_examples=80, deadline=None)
@given(_elems, _elems, _elems)
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c
    assert a + CYC_ZERO == a
    assert a * CYC_ONE == a
    if not a.is_zero():
        assert (a * a.inverse()).is_one()


def test_hash_consistency_for_canonical_roots():
    a = as_root_of_unity(zeta(6) * zeta(6))[0]
    assert a == zeta(3)
    assert hash(a) == hash(zeta(3))
