"""The Appell-Lerch kernel: m(x, q, z), the switch term Delta, the
orthogonality term Psi, the classical sum h(x; q), and the T-series for the
parity-class deviations.

Denominators 1 - u q^d (u a root of unity times a sign, d an integer) are
expanded with one fixed policy, the unique one that yields a well-defined
Laurent series for negative-exponent arguments:

    d > 0:  geometric series in q^d
    d = 0:  the constant 1/(1 - u); u = 1 is a pole
    d < 0:  1/(1 - u q^d) = -u^-1 q^-d / (1 - u^-1 q^-d), then geometric

Genericity is checked symbolically before any series work (j_is_zero on every
theta factor and denominator), never discovered via division by zero.
"""

from __future__ import annotations

import functools
import time

from gmpy2 import mpq

from .cyclotomic import CYC_ONE, CYC_ZERO, CycloNum, as_root_of_unity, zeta
from .errors import PoleError
from .report import VerificationReport, compare_series
from .series import (
    J,
    Monomial,
    QSeries,
    j_is_zero,
    overpartition_factor,
    pochhammer_inf,
    theta_j,
)


def _unity_cycle(u: CycloNum) -> list[CycloNum]:
    root = as_root_of_unity(u)
    if root is None:
        raise ValueError("denominator coefficient must be a root of unity")
    canonical, order = root
    cycle = [CYC_ONE]
    for _ in range(order - 1):
        cycle.append(cycle[-1] * canonical)
    return cycle


def _add_denominator_expansion(out: dict, coeff: CycloNum, E: int, u: CycloNum, d: int, bound: int) -> None:
    """Accumulate coeff * q^E / (1 - u q^d) into `out`, exactly below `bound`."""
    if d == 0:
        if u.is_one():
            raise PoleError("denominator 1 - u q^0 with u = 1")
        if E < bound:
            c = coeff * (CYC_ONE - u).inverse()
            out[E] = out.get(E, CYC_ZERO) + c
        return
    cyc = _unity_cycle(u)
    order = len(cyc)
    if d > 0:
        i, e = 0, E
        while e < bound:
            out[e] = out.get(e, CYC_ZERO) + coeff * cyc[i % order]
            i += 1
            e += d
    else:
        i, e = 1, E - d
        while e < bound:
            out[e] = out.get(e, CYC_ZERO) - coeff * cyc[(-i) % order]
            i += 1
            e -= d


def m_pole_reason(x: Monomial, base: int, z: Monomial):
    """Why m(x, q^base, z) is undefined, or None if the parameters are generic."""
    if j_is_zero(z, base):
        return f"z = {z} is an integral power of q^{base}, so j(z; q^{base}) = 0"
    if j_is_zero(x * z, base):
        return f"x*z = {x * z} is an integral power of q^{base} (pole in the bilateral sum)"
    return None


def _m_bilateral_sum(x: Monomial, base: int, z: Monomial, bound: int, margin: int) -> QSeries:
    """The bilateral sum of the Appell-Lerch series, exact below `bound`.

    The minimal exponent of the r-th term is base*r(r-1)/2 + r*z.exp minus the
    negative-denominator rewrite shift, a quadratic lower bound; the scan stops
    once it is past `bound` and provably monotone, then widens by `margin`.
    """
    ex, ez = x.exp, z.exp

    def geometry(r):
        E = base * r * (r - 1) // 2 + ez * r
        d = base * (r - 1) + ex + ez
        return E, d, E - max(0, -d)

    rs = []
    r = 0
    while True:
        _, d, lo = geometry(r)
        if lo < bound:
            rs.append(r)
        elif base * r + ez > 0 and d >= 0:
            break
        r += 1
    rs.extend(range(r, r + margin))
    r = -1
    while True:
        _, d, lo = geometry(r)
        if lo < bound:
            rs.append(r)
        elif base * r + ez < 0 and d < 0:
            break
        r -= 1
    rs.extend(range(r - margin + 1, r + 1))

    uz_cycle = _unity_cycle(z.unity)
    nz = len(uz_cycle)
    u = x.unity * z.unity
    out: dict[int, CycloNum] = {}
    for r in sorted(set(rs)):
        E, d, _ = geometry(r)
        coeff = uz_cycle[r % nz]
        if r % 2:
            coeff = -coeff
        _add_denominator_expansion(out, coeff, E, u, d, bound)
    return QSeries.from_terms(out.items(), bound)


@functools.lru_cache(maxsize=None)
def m_series(x: Monomial, base: int, z: Monomial, prec: int, margin: int = 2) -> QSeries:
    """The Appell-Lerch series m(x, q^base, z), exact to O(q^prec).

    Requires generic parameters: neither z nor x*z an integral power of
    q^base.  The result is the bilateral sum divided by j(z; q^base).
    """
    reason = m_pole_reason(x, base, z)
    if reason is not None:
        raise PoleError(f"m({x}, q^{base}, {z}): {reason}")
    jz = theta_j(z, base, max(prec, 1))
    mu_j = jz.min_exp
    total = _m_bilateral_sum(x, base, z, prec, margin)
    mu_s = total.min_exp if not total.is_zero() else 0
    pad = max(0, 2 * mu_j - mu_s)
    if pad:
        jz = theta_j(z, base, prec + pad)
    out = total * jz.inverse()
    assert out.prec >= prec
    return out.truncated(prec)


def _assemble_to_prec(build, prec: int) -> QSeries:
    # Evaluate a quotient assembly at increasing working precision until the
    # propagated window covers the request, then trim.  Intermediate results
    # are exact on their own windows, so retrying is sound and deterministic.
    pad = 0
    for _ in range(8):
        out = build(prec + pad)
        if out.prec >= prec:
            return out.truncated(prec)
        pad += prec - out.prec + 2
    raise AssertionError("assembly precision did not converge")


@functools.lru_cache(maxsize=None)
def delta(x: Monomial, z1: Monomial, z0: Monomial, base: int, prec: int) -> QSeries:
    """The switch term: the theta quotient by which m(x, q^base, .) changes
    when its third parameter moves from z0 to z1.

    A vanishing numerator factor gives the zero series (e.g. z1 = z0); a
    vanishing denominator factor is a pole and raises.
    """
    for name, mono in (("z0", z0), ("z1", z1), ("x*z0", x * z0), ("x*z1", x * z1)):
        if j_is_zero(mono, base):
            raise PoleError(
                f"Delta({x}, {z1}, {z0}; q^{base}): factor j({name}; q^{base}) vanishes ({name} = {mono})"
            )
    ratio = z1 * z0.inverse()
    product = x * z0 * z1
    if j_is_zero(ratio, base) or j_is_zero(product, base):
        return QSeries.zero(prec)

    def build(p):
        num = (J(base, p) ** 3) * theta_j(ratio, base, p) * theta_j(product, base, p)
        den = theta_j(z0, base, p) * theta_j(z1, base, p) * theta_j(x * z0, base, p) * theta_j(x * z1, base, p)
        return z0.times(num * den.inverse())

    return _assemble_to_prec(build, prec)


def _psi_monomials(k: int, n: int, x: Monomial, z: Monomial, zp: Monomial, base: int):
    minus_z_n = (-z) ** n
    minus_x_n = (-x) ** n
    xz_n = (x * z) ** n
    front = Monomial(-(x.unity**k) * (z.unity ** (k + 1)), k * x.exp + (k + 1) * z.exp)
    c_fixed = Monomial(
        -minus_x_n.unity * zp.unity,
        base * (n * (n - 1) // 2 - n * k) + minus_x_n.exp + zp.exp,
    )
    rows = []
    for t in range(n):
        pre_t = Monomial(((-z) ** t).unity, base * (t * (t + 1) // 2 + k * t) + t * z.exp)
        a_t = Monomial(
            -minus_z_n.unity * zp.unity.inverse(),
            base * (n * (n + 1) // 2 + n * k + n * t) + minus_z_n.exp - zp.exp,
        )
        b_t = Monomial(xz_n.unity * zp.unity, base * n * t + xz_n.exp + zp.exp)
        d_t = Monomial(xz_n.unity, base * n * t + xz_n.exp)
        rows.append((pre_t, a_t, b_t, d_t))
    return front, c_fixed, rows


def psi_pole_reason(k: int, n: int, x: Monomial, z: Monomial, zp: Monomial, base: int):
    """Why Psi_k^n(x, z, z'; q^base) is undefined, or None if generic."""
    big = base * n * n
    if j_is_zero(z, base):
        return f"Psi_{k}^{n}: factor j(z; q^{base}) vanishes (z = {z})"
    if j_is_zero(zp, big):
        return f"Psi_{k}^{n}: factor j(z'; q^{big}) vanishes (z' = {zp})"
    _, c_fixed, rows = _psi_monomials(k, n, x, z, zp, base)
    if j_is_zero(c_fixed, big):
        return f"Psi_{k}^{n}: denominator factor j({c_fixed}; q^{big}) vanishes"
    for t, (_, _, _, d_t) in enumerate(rows):
        if j_is_zero(d_t, big):
            return f"Psi_{k}^{n}: denominator factor j({d_t}; q^{big}) vanishes at t={t}"
    return None


@functools.lru_cache(maxsize=None)
def psi(k: int, n: int, x: Monomial, z: Monomial, zp: Monomial, base: int, prec: int) -> QSeries:
    """The orthogonality correction term: a finite theta-quotient sum over
    t = 0..n-1 at base q^(base*n^2), with the two-argument convention
    j(z1, z2; q) = j(z1; q) j(z2; q)."""
    if n < 1:
        raise ValueError("n must be positive")
    big = base * n * n
    reason = psi_pole_reason(k, n, x, z, zp, base)
    if reason is not None:
        raise PoleError(reason)
    front, c_fixed, rows = _psi_monomials(k, n, x, z, zp, base)

    def build(p):
        head = (J(big, p) ** 3) * (theta_j(z, base, p) * theta_j(zp, big, p)).inverse()
        total = None
        for pre_t, a_t, b_t, d_t in rows:
            num = theta_j(a_t, big, p) * theta_j(b_t, big, p)
            den = theta_j(c_fixed, big, p) * theta_j(d_t, big, p)
            term = pre_t.times(num * den.inverse())
            total = term if total is None else total + term
        return front.times(head * total)

    return _assemble_to_prec(build, prec)


def orthogonality_check(
    k: int, n: int, x: Monomial, z: Monomial, zp: Monomial, base: int, prec: int
) -> VerificationReport:
    """Check the root-of-unity averaging identity for m: the omega^(-kt)-weighted
    sum of m(omega^t x, q^base, z) over t equals
    n q^(-base*k(k+1)/2) (-x)^k m(-q^(base(n(n-1)/2 - nk)) (-x)^n, q^(base n^2), z')
    plus n Psi_k^n(x, z, z'; q^base).

    Raises PoleError when any m-evaluation is non-generic; otherwise returns a
    pass/fail report with the first discrepant exponent.
    """
    if not 0 <= k < n:
        raise ValueError("need 0 <= k < n")
    t0 = time.perf_counter()
    lhs = None
    for t in range(n):
        xt = Monomial(zeta(n, t) * x.unity, x.exp)
        term = m_series(xt, base, z, prec).scaled(zeta(n, -k * t))
        lhs = term if lhs is None else lhs + term

    minus_x_n = (-x) ** n
    big_x = Monomial(-minus_x_n.unity, base * (n * (n - 1) // 2 - n * k) + minus_x_n.exp)
    lead = Monomial(((-x) ** k).unity, -base * (k * (k + 1) // 2) + k * x.exp)
    inner = m_series(big_x, base * n * n, zp, prec + max(0, -lead.exp))
    rhs = lead.times(inner).scaled(n) + psi(k, n, x, z, zp, base, prec).scaled(n)
    return compare_series(
        f"orthogonality/n={n},k={k},base={base}",
        lhs,
        rhs,
        parameters={"n": n, "k": k, "x": str(x), "z": str(z), "z'": str(zp), "base": base},
        elapsed=time.perf_counter() - t0,
    )


def _h_bilateral_sum(x: Monomial, base: int, bound: int) -> QSeries:
    ex, u = x.exp, x.unity

    def geometry(nn):
        E = base * (nn * nn + nn)
        d = base * nn + ex
        return E, d, E - max(0, -d)

    out: dict[int, CycloNum] = {}
    nn = 0
    while True:
        E, d, lo = geometry(nn)
        if lo < bound:
            coeff = CYC_ONE if nn % 2 == 0 else -CYC_ONE
            _add_denominator_expansion(out, coeff, E, u, d, bound)
        elif d >= 0:
            break
        nn += 1
    nn = -1
    while True:
        E, d, lo = geometry(nn)
        if lo < bound:
            coeff = CYC_ONE if nn % 2 == 0 else -CYC_ONE
            _add_denominator_expansion(out, coeff, E, u, d, bound)
        elif d < 0:
            break
        nn -= 1
    return QSeries.from_terms(out.items(), bound)


@functools.lru_cache(maxsize=None)
def h_series(x: Monomial, base: int, prec: int) -> QSeries:
    """The classical rank-kernel sum h(x; q^base): the overpartition-count
    prefactor times the bilateral sum of (-1)^n q^(base(n^2+n)) / (1 - x q^(base n)),
    expanded with the fixed denominator policy."""
    if j_is_zero(x, base):
        raise PoleError(f"h({x}; q^{base}): x is an integral power of q^{base}, a denominator degenerates")
    total = _h_bilateral_sum(x, base, prec)
    mu = min(0, total.min_exp) if not total.is_zero() else 0
    if mu:
        total = _h_bilateral_sum(x, base, prec - mu)
    head = pochhammer_inf(Monomial(zeta(2, 1), base), base, prec - mu)
    head = head * pochhammer_inf(Monomial.q(base), base, prec - mu).inverse()
    out = head * total
    assert out.prec >= prec
    return out.truncated(prec)


def _parity_class_sum(prec: int, exp_of, denom_exp_of) -> QSeries:
    """2 * ((-q)/(q))_inf times the bilateral sum of
    (-1)^n q^exp(n) / (1 + q^denom(n))^2, exact to O(q^prec).

    The squared denominator expands in closed form as sum (i+1) (-q^d)^i; for
    negative d it is first rewritten as q^(-2d) / (1 + q^(-d))^2, and the n = 0
    term contributes the exact constant 1/4.
    """
    out: dict[int, mpq] = {}

    def add_term(nn):
        E, d = exp_of(nn), denom_exp_of(nn)
        sign = 1 if nn % 2 == 0 else -1
        if d == 0:
            if E < prec:
                out[E] = out.get(E, mpq(0)) + mpq(sign, 4)
            return E
        if d < 0:
            E, d = E - 2 * d, -d
        i, e = 0, E
        while e < prec:
            c = (i + 1) if i % 2 == 0 else -(i + 1)
            out[e] = out.get(e, mpq(0)) + sign * c
            i += 1
            e += d
        return E

    nn = 0
    while add_term(nn) < prec or nn == 0:
        nn += 1
    nn = -1
    while add_term(nn) < prec:
        nn -= 1
    total = QSeries.from_terms(out.items(), prec)
    return (overpartition_factor(prec) * total).scaled(2).truncated(prec)


@functools.lru_cache(maxsize=None)
def T_series(prec: int) -> QSeries:
    """Deviation of the even ordinary-rank class from the modulus-2 average,
    as the exact squared-denominator bilateral sum."""
    return _parity_class_sum(prec, lambda n: n * n + n, lambda n: n)


@functools.lru_cache(maxsize=None)
def T2_series(prec: int) -> QSeries:
    """The even M2-rank analogue of T_series."""
    return _parity_class_sum(prec, lambda n: n * n + 2 * n, lambda n: 2 * n)
