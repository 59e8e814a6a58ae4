import random

import pytest
from gmpy2 import mpq

from overrank.cyclotomic import CYC_MINUS_ONE, CYC_ONE, zeta
from overrank.errors import ExponentOverflow, NotInvertible
from overrank.series import (
    J,
    Monomial,
    QSeries,
    extract_progression,
    j_is_zero,
    overpartition_factor,
    pochhammer_inf,
    render_series,
    theta_j,
    theta_j_sum,
)


def geo(prec, c=1):
    # 1/(1 - c q) as an explicit window
    return QSeries(0, prec, [mpq(c) ** n for n in range(prec)])


def test_precision_rules_add_mul():
    a = QSeries.from_terms([(0, 1), (1, 1)], 2)
    b = QSeries.from_terms([(0, 1), (1, -1)], 2)
    prod = a * b
    assert prod.prec == 2
    assert prod == QSeries.one(2)
    s = QSeries.from_terms([(0, 1)], 5) + QSeries.from_terms([(0, 2)], 3)
    assert s.prec == 3


def test_shift_and_scale():
    s = QSeries.one(3).shifted(-4)
    assert s.min_exp == -4 and s.prec == -1
    assert render_series(s) == "q^-4 + O(q^-1)"
    assert J(1, 10).scaled(0).is_zero()


def test_equality_on_overlap_and_zero_normalization():
    a = QSeries.zero(5)
    b = QSeries.from_terms([], 9)
    assert a == b
    c = QSeries.from_terms([(7, 3)], 9)
    assert a == c  # difference starts at q^7, beyond the shared window O(q^5)
    assert not (QSeries.from_terms([(2, 1)], 5) == a)


def test_invert_geometric():
    s = QSeries.from_terms([(0, 1), (1, -1)], 8)
    assert s.inverse() == geo(8)
    t = QSeries.from_terms([(1, 1), (2, 1)], 9)
    inv = t.inverse()
    assert inv.min_exp == -1
    assert (t * inv) == QSeries.one(7)


def test_invert_requires_unit():
    with pytest.raises(NotInvertible):
        QSeries.zero(5).inverse()


def test_invert_round_trip_random():
    rng = random.Random(7)
    units = [CYC_ONE, CYC_MINUS_ONE, zeta(3), zeta(4)]
    for _ in range(50):
        coeffs = [rng.choice(units)] + [
            rng.choice(units) * rng.randint(-3, 3) for _ in range(11)
        ]
        s = QSeries(0, 12, coeffs)
        assert s * s.inverse() == QSeries.one(12)


def test_subst_q_power():
    s = QSeries.from_terms([(0, 1), (1, 1)], 2)
    assert s.subst_q_power(3) == QSeries.from_terms([(0, 1), (3, 1)], 6)
    assert s.subst_q_power(1) == s
    t = QSeries.from_terms([(-1, 1)], 1).subst_q_power(2)
    assert t.min_exp == -2 and t.prec == 2


def test_exponent_overflow_checked():
    s = QSeries.one(4)
    with pytest.raises(ExponentOverflow):
        s.shifted(1 << 63)
    with pytest.raises(ExponentOverflow):
        Monomial(CYC_ONE, 1 << 63)


def test_pochhammer_pentagonal():
    assert render_series(J(1, 6)) == "1 - q - q^2 + q^5 + O(q^6)"
    j1 = J(1, 40)
    # pentagonal-number support with signs
    expected = {0: 1}
    k = 1
    while k * (3 * k - 1) // 2 < 40:
        for e in (k * (3 * k - 1) // 2, k * (3 * k + 1) // 2):
            if e < 40:
                expected[e] = (-1) ** k
        k += 1
    assert dict((e, c.is_rational()) for e, c in j1.nonzero_items()) == {
        e: mpq(c) for e, c in expected.items()
    }


def test_pochhammer_negative_and_zero_exponent():
    assert pochhammer_inf(Monomial.one(), 1, 8).is_zero()
    assert pochhammer_inf(Monomial.q(0), 3, 8).is_zero()
    p = pochhammer_inf(Monomial(CYC_MINUS_ONE, 1), 1, 10)
    assert all(c.is_rational() is not None for _, c in p.nonzero_items())
    # exponent chain through zero with coefficient 1: a vanishing factor
    assert pochhammer_inf(Monomial.q(-2), 1, 8).is_zero()
    # Laurent product: finitely many negative-exponent factors
    lau = pochhammer_inf(Monomial.q(-3), 2, 4)
    assert lau.min_exp == -4
    direct = QSeries.one(8)
    for e in range(-3, 8, 2):
        direct = direct - direct.shifted(e)
    assert lau == direct.truncated(4)


def test_J_substitution_consistency():
    assert J(2, 30) == J(1, 15).subst_q_power(2)
    assert all(e % 2 == 0 for e, _ in J(2, 30).nonzero_items())


@pytest.mark.parametrize(
    "z,base,quot",
    [
        (Monomial(CYC_MINUS_ONE, 0), 1, {2: 2, 1: -1}),
        (Monomial.q(1), 2, {1: 2, 2: -1}),
        (Monomial(CYC_MINUS_ONE, 1), 2, {2: 5, 1: -2, 4: -2}),
        (Monomial.q(1), 3, {1: 1}),
        (Monomial(CYC_MINUS_ONE, 1), 3, {2: 1, 3: 2, 1: -1, 6: -1}),
        (Monomial.q(1), 6, {1: 1, 6: 2, 2: -1, 3: -1}),
        (Monomial(CYC_MINUS_ONE, 1), 6, {2: 2, 3: 1, 12: 1, 1: -1, 4: -1, 6: -1}),
    ],
)
def test_theta_dictionary(z, base, quot):
    prec = 60
    num = QSeries.one(prec)
    den = QSeries.one(prec)
    for m, e in quot.items():
        p = J(m, prec) ** abs(e)
        if e > 0:
            num = num * p
        else:
            den = den * p
    rhs = num * den.inverse()
    if z.unity == CYC_MINUS_ONE and z.exp == 0:
        rhs = rhs.scaled(2)
    assert theta_j(z, base, prec) == rhs


def test_theta_product_equals_sum_grid():
    for name, unity in (("1", CYC_ONE), ("-1", CYC_MINUS_ONE), ("z3", zeta(3)),
                        ("-z3", -zeta(3)), ("z5", zeta(5))):
        for e in range(-3, 4):
            for base in (1, 2, 3):
                z = Monomial(unity, e)
                assert theta_j(z, base, 45) == theta_j_sum(z, base, 45), (name, e, base)


def test_theta_vanishing_and_sum_cancellation():
    assert theta_j(Monomial.q(2), 2, 25).is_zero()
    assert theta_j_sum(Monomial.q(1), 1, 25).is_zero()
    assert theta_j_sum(Monomial(CYC_MINUS_ONE, 0), 1, 25).coeff(0) == 2


def test_j_is_zero_rule():
    assert j_is_zero(Monomial.q(2), 2)
    assert not j_is_zero(Monomial(CYC_MINUS_ONE, 2), 2)
    assert not j_is_zero(Monomial(zeta(3), 3), 3)


def test_theta_shift_transformations():
    z = Monomial(zeta(3), 2)
    base_series = theta_j(z, 1, 30)
    assert base_series == theta_j(Monomial(z.unity.inverse(), 1 - z.exp), 1, 30)
    for n in range(-3, 4):
        shifted = theta_j(Monomial(z.unity, z.exp + n), 1, 30)
        sign = CYC_MINUS_ONE if n % 2 else CYC_ONE
        prefix = Monomial(z.unity.inverse() ** n * sign, -n * z.exp - n * (n - 1) // 2)
        assert shifted == prefix.times(base_series)


def test_extract_progression():
    s = QSeries.from_terms([(0, 1), (1, 2), (2, 3), (3, 4)], 4)
    picked = extract_progression(s, 1, 3)
    assert picked.prec == 1 and picked.coeff(0).is_rational() == 2
    assert extract_progression(s, 0, 1) == s
    even = J(2, 21)
    assert extract_progression(even, 1, 2).is_zero()


def test_render_format():
    s = QSeries.from_terms([(0, mpq(-1, 3)), (2, 1), (5, mpq(7, 2))], 8)
    assert render_series(s) == "-1/3 + q^2 + 7/2*q^5 + O(q^8)"
    z = QSeries.from_terms([(1, zeta(3))], 4)
    assert render_series(z) == "(z)*q + O(q^4)"
    assert render_series(QSeries.zero(6)) == "0 + O(q^6)"


def test_overpartition_factor_counts():
    s = overpartition_factor(9)
    got = [int(s.coeff(n).is_rational()) for n in range(9)]
    assert got == [1, 2, 4, 8, 14, 24, 40, 64, 100]
