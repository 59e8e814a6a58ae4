import pytest
from gmpy2 import mpq

from overrank.appell import (
    T2_series,
    T_series,
    delta,
    h_series,
    m_series,
    orthogonality_check,
    psi,
    psi_pole_reason,
)
from overrank.cyclotomic import CYC_MINUS_ONE, CYC_ONE, zeta
from overrank.errors import PoleError
from overrank.series import J, Monomial, QSeries, theta_j

Q = Monomial.q
MONE = Monomial(CYC_MINUS_ONE, 0)
MQ = Monomial(CYC_MINUS_ONE, 1)  # -q


def test_m_constant_half():
    assert m_series(Q(1), 2, MONE, 80) == QSeries.constant(mpq(1, 2), 80)
    # base substitution leaves the constant alone
    assert m_series(Q(9), 18, MONE, 80) == QSeries.constant(mpq(1, 2), 80)


def test_m_pole_detection():
    with pytest.raises(PoleError):
        m_series(Q(1), 2, Q(2), 10)  # z an integral power of the base
    with pytest.raises(PoleError):
        m_series(Q(3), 2, Q(1), 10)  # x z an integral power of the base


def test_m_flip_identity():
    x = Monomial(zeta(3), 1)
    z = MQ
    lhs = m_series(x, 1, z, 40)
    rhs = x.inverse().times(m_series(x.inverse(), 1, z.inverse(), 41))
    assert lhs == rhs


def test_m_negative_argument_laurent():
    # the d < 0 denominator rewrite pins the low end of the window exactly:
    # m(q^-3, q^18, q^6) = -q^6 h(q^6; q^9)
    s = m_series(Q(-3), 18, Q(6), 30)
    assert s.min_exp == 6
    h = h_series(Q(6), 9, 24)
    assert Monomial(CYC_MINUS_ONE, -6).times(s) == h


def test_m_range_margin_independence():
    x, z = Monomial(zeta(3), 1), MQ
    base = m_series(x, 1, z, 35, margin=2)
    for extra in (6, 12, 20):
        assert m_series(x, 1, z, 35, margin=extra) == base


def test_switch_term_matches_m_difference():
    x = Monomial(zeta(3), 1)
    z1 = Monomial(zeta(3))
    z0 = MONE
    lhs = m_series(x, 2, z1, 45) - m_series(x, 2, z0, 45)
    assert lhs == delta(x, z1, z0, 2, 45)


def test_switch_term_zero_and_poles():
    x = Monomial(zeta(3), 1)
    z = Monomial(zeta(3))
    assert delta(x, z, z, 2, 20).is_zero()
    assert delta(Q(1), Monomial(zeta(6, 3)), MONE, 2, 20).is_zero()
    with pytest.raises(PoleError):
        delta(Q(1), Q(2), MONE, 2, 20)


def test_psi_vanishing_evaluations():
    assert psi(0, 3, Q(1), MONE, MONE, 2, 50).is_zero()
    assert psi(2, 3, Q(-1), MONE, MONE, 2, 50).is_zero()


def test_psi_pole_reason_names_the_factor():
    reason = psi_pole_reason(0, 1, Q(1), Q(2), MQ, 2)
    assert reason is not None and "j(z" in reason
    assert psi_pole_reason(2, 3, Q(1), MONE, Q(6), 2) is None


def test_orthogonality_single_term_reduces_to_switch():
    rep = orthogonality_check(0, 1, Monomial(zeta(3), 1), MQ, MONE, 1, 30)
    assert rep.passed


@pytest.mark.parametrize("k,n,base", [(2, 3, 2), (0, 3, 2), (1, 3, 1), (0, 5, 2), (3, 4, 2)])
def test_orthogonality_grid_cases(k, n, base):
    assert orthogonality_check(k, n, Q(1), MONE, MQ, base, 35).passed


def test_orthogonality_inherent_pole_base1_even_n():
    # omega^(n/2) x z = q is an integral power of q: outside the hypotheses
    with pytest.raises(PoleError):
        orthogonality_check(1, 2, Q(1), Monomial(CYC_MINUS_ONE, 3), MONE, 1, 20)


def test_h_equals_m_form():
    x = Monomial(zeta(6), 1)
    lhs = h_series(x, 1, 40)
    inner = Monomial(x.unity.inverse() ** 2, 1 - 2 * x.exp)
    rhs = Monomial(-x.unity.inverse(), -x.exp).times(m_series(inner, 2, x, 42))
    assert lhs == rhs


def test_h_reflection_and_pair_sum():
    x = Monomial(zeta(3), 1)
    assert h_series(x, 1, 40) == h_series(Monomial(zeta(3, -1), 0), 1, 40)
    s = h_series(x, 1, 40) + h_series(-x, 1, 40)
    rhs = (J(2, 44) ** 4 * (J(1, 44) ** 2 * theta_j(x * x, 2, 44)).inverse()).scaled(2)
    assert s == rhs


def test_h_pole():
    with pytest.raises(PoleError):
        h_series(Q(3), 1, 10)
    with pytest.raises(PoleError):
        h_series(Monomial.one(), 2, 10)


def test_t_series_constants_and_rationality():
    t = T_series(30)
    t2 = T2_series(30)
    assert t.coeff(0).is_rational() == mpq(1, 2)
    assert t2.coeff(0).is_rational() == mpq(1, 2)
    assert t.is_rational() and t2.is_rational()


def test_orthogonality_report_records_discrepancy_shape():
    rep = orthogonality_check(2, 3, Q(1), MONE, MQ, 2, 25)
    assert rep.status == "pass"
    assert rep.first_discrepancy is None
    data = rep.to_json_dict()
    assert set(data) == {"identity_id", "parameters", "status",
                         "first_discrepancy", "elapsed_ms", "order"}
