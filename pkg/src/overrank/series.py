"""Truncated Laurent series in q over Q(zeta_L), plus theta-function builders.

A QSeries stores a dense coefficient window [min_exp, prec): every coefficient
strictly below `prec` is exact, nothing is claimed at or above it.  All binary
operations propagate the worst-case precision (add/sub take the min, mul uses
min(prec_a + min_exp_b, prec_b + min_exp_a)) rather than assuming alignment;
silent precision loss is the classic q-series bug and is designed out here.

A Monomial is the symbolic shape c * q^e with c a root of unity times a sign.
These are the only arguments the theta and Appell-Lerch constructors accept,
which keeps every pole check decidable.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

from gmpy2 import mpq

from .cyclotomic import (
    CYC_MINUS_ONE,
    CYC_ONE,
    CYC_ZERO,
    CycloNum,
    as_root_of_unity,
)
from .errors import ExponentOverflow, NotInvertible

#: Checked magnitude bound for q-exponents; arithmetic past it fails loudly.
EXP_LIMIT = 1 << 62

_MPQ_ZERO = mpq(0)


def _check_exp(e: int) -> int:
    if -EXP_LIMIT <= e <= EXP_LIMIT:
        return e
    raise ExponentOverflow(f"q-exponent {e} outside checked range")


def _coerce_coeff(value) -> CycloNum:
    if isinstance(value, CycloNum):
        return value
    return CycloNum(1, (mpq(value),))


class QSeries:
    """A truncated Laurent series with exact cyclotomic coefficients."""

    __slots__ = ("min_exp", "prec", "coeffs")

    def __init__(self, min_exp: int, prec: int, coeffs):
        coeffs = [_coerce_coeff(c) for c in coeffs]
        if len(coeffs) != prec - min_exp:
            raise ValueError("dense window must cover [min_exp, prec)")
        lead = 0
        while lead < len(coeffs) and coeffs[lead].is_zero():
            lead += 1
        if lead:
            min_exp += lead
            coeffs = coeffs[lead:]
        _check_exp(min_exp)
        _check_exp(prec)
        object.__setattr__(self, "min_exp", min_exp)
        object.__setattr__(self, "prec", prec)
        object.__setattr__(self, "coeffs", tuple(coeffs))

    def __setattr__(self, name, value):
        raise AttributeError("QSeries is immutable")

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero(prec: int) -> "QSeries":
        return QSeries(prec, prec, ())

    @staticmethod
    def constant(value, prec: int) -> "QSeries":
        return QSeries.term(value, 0, prec)

    @staticmethod
    def one(prec: int) -> "QSeries":
        return QSeries.constant(1, prec)

    @staticmethod
    def term(value, exp: int, prec: int) -> "QSeries":
        """The single term value * q^exp, exact to O(q^prec)."""
        c = _coerce_coeff(value)
        if c.is_zero() or exp >= prec:
            return QSeries.zero(prec)
        window = [CYC_ZERO] * (prec - exp)
        window[0] = c
        return QSeries(exp, prec, window)

    @staticmethod
    def from_terms(terms, prec: int) -> "QSeries":
        """Build from an iterable of (exponent, coefficient), dropping >= prec."""
        kept = {}
        for e, c in terms:
            if e < prec:
                kept[e] = kept.get(e, CYC_ZERO) + _coerce_coeff(c)
        if not kept:
            return QSeries.zero(prec)
        lo = min(kept)
        window = [CYC_ZERO] * (prec - lo)
        for e, c in kept.items():
            window[e - lo] = c
        return QSeries(lo, prec, window)

    # -- access ---------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, e: int) -> CycloNum:
        """The exact coefficient of q^e; e must lie below the precision."""
        if e >= self.prec:
            raise ValueError(f"coefficient of q^{e} is not tracked (O(q^{self.prec}))")
        if e < self.min_exp:
            return CYC_ZERO
        return self.coeffs[e - self.min_exp]

    def nonzero_items(self):
        base = self.min_exp
        return [(base + i, c) for i, c in enumerate(self.coeffs) if not c.is_zero()]

    def truncated(self, prec: int) -> "QSeries":
        """Forget everything at or above q^prec."""
        if prec >= self.prec:
            if prec == self.prec:
                return self
            raise ValueError("cannot extend precision by truncation")
        if prec <= self.min_exp:
            return QSeries.zero(prec)
        return QSeries(self.min_exp, prec, list(self.coeffs[: prec - self.min_exp]))

    def is_rational(self) -> bool:
        return all(c.level == 1 for c in self.coeffs)

    # -- ring operations -----------------------------------------------------

    @staticmethod
    def _coerce(value, prec: int):
        if isinstance(value, QSeries):
            return value
        if isinstance(value, (int, type(_MPQ_ZERO), CycloNum)):
            return QSeries.constant(value, prec)
        return NotImplemented

    def __add__(self, other):
        other = QSeries._coerce(other, self.prec)
        if other is NotImplemented:
            return NotImplemented
        prec = min(self.prec, other.prec)
        if self.is_zero():
            return other.truncated(prec) if other.prec != prec else other
        if other.is_zero():
            return self.truncated(prec) if self.prec != prec else self
        lo = min(self.min_exp, other.min_exp)
        if lo >= prec:
            return QSeries.zero(prec)
        window = [CYC_ZERO] * (prec - lo)
        for s in (self, other):
            for i, c in enumerate(s.coeffs):
                e = s.min_exp + i
                if e >= prec:
                    break
                if not c.is_zero():
                    window[e - lo] = window[e - lo] + c
        return QSeries(lo, prec, window)

    __radd__ = __add__

    def __neg__(self):
        return QSeries(self.min_exp, self.prec, [-c for c in self.coeffs])

    def __sub__(self, other):
        other = QSeries._coerce(other, self.prec)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scaled(self, value) -> "QSeries":
        """Multiply every coefficient by an exact scalar."""
        c = _coerce_coeff(value)
        if c.is_zero():
            return QSeries.zero(self.prec)
        return QSeries(self.min_exp, self.prec, [c * x for x in self.coeffs])

    def shifted(self, e: int) -> "QSeries":
        """Multiply by q^e."""
        if e == 0 or self.is_zero():
            return QSeries.zero(self.prec + e) if self.is_zero() else self
        return QSeries(_check_exp(self.min_exp + e), _check_exp(self.prec + e), list(self.coeffs))

    def __mul__(self, other):
        if isinstance(other, (int, type(_MPQ_ZERO), CycloNum)):
            return self.scaled(other)
        if not isinstance(other, QSeries):
            return NotImplemented
        prec = min(self.prec + other.min_exp, other.prec + self.min_exp)
        if self.is_zero() or other.is_zero():
            return QSeries.zero(prec)
        lo = self.min_exp + other.min_exp
        n = prec - lo
        if n <= 0:
            return QSeries.zero(prec)
        ra = _rational_window(self.coeffs)
        rb = _rational_window(other.coeffs)
        if ra is not None and rb is not None:
            window = _convolve_rational(ra, rb, n)
        else:
            window = _convolve_cyclo(self.coeffs, other.coeffs, n)
        return QSeries(lo, prec, window)

    __rmul__ = __mul__

    def inverse(self) -> "QSeries":
        """Multiplicative inverse; requires an invertible leading coefficient."""
        if self.is_zero():
            raise NotInvertible("cannot invert a series that is zero on its window")
        lead = self.coeffs[0]
        n = self.prec - self.min_exp
        inv_lead = lead.inverse()
        a = self.coeffs
        out = [CYC_ZERO] * n
        out[0] = inv_lead
        a_nonzero = [(i, c) for i, c in enumerate(a) if i and not c.is_zero()]
        for k in range(1, n):
            acc = CYC_ZERO
            for i, c in a_nonzero:
                if i > k:
                    break
                acc = acc + c * out[k - i]
            if not acc.is_zero():
                out[k] = -inv_lead * acc
        return QSeries(-self.min_exp, self.prec - 2 * self.min_exp, out)

    def __truediv__(self, other):
        if isinstance(other, (int, type(_MPQ_ZERO), CycloNum)):
            return self.scaled(_coerce_coeff(other).inverse())
        if not isinstance(other, QSeries):
            return NotImplemented
        return self * other.inverse()

    def __pow__(self, n: int) -> "QSeries":
        if n == 0:
            return QSeries.one(self.prec)
        if n < 0:
            return self.inverse() ** (-n)
        result = None
        base = self
        while n:
            if n & 1:
                result = base if result is None else result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def subst_q_power(self, t: int) -> "QSeries":
        """Substitute q -> q^t; exponents and precision multiply by t."""
        if t < 1:
            raise ValueError("substitution power must be >= 1")
        if t == 1:
            return self
        if self.is_zero():
            return QSeries.zero(_check_exp(self.prec * t))
        lo = _check_exp(self.min_exp * t)
        prec = _check_exp(self.prec * t)
        window = [CYC_ZERO] * (prec - lo)
        for i, c in enumerate(self.coeffs):
            window[i * t] = c
        return QSeries(lo, prec, window)

    # -- comparison -------------------------------------------------------------

    def __eq__(self, other):
        """Coefficientwise equality on the overlap window below min(prec)."""
        other = QSeries._coerce(other, self.prec)
        if other is NotImplemented:
            return NotImplemented
        prec = min(self.prec, other.prec)
        lo = min(self.min_exp, other.min_exp)
        for e in range(lo, prec):
            a = self.coeffs[e - self.min_exp] if self.min_exp <= e else CYC_ZERO
            b = other.coeffs[e - other.min_exp] if other.min_exp <= e else CYC_ZERO
            if a != b:
                return False
        return True

    __hash__ = None

    def first_difference(self, other: "QSeries"):
        """(exponent, own coefficient, other coefficient) of the first mismatch
        on the shared window, or None if equal there."""
        prec = min(self.prec, other.prec)
        lo = min(self.min_exp, other.min_exp)
        for e in range(lo, prec):
            a = self.coeff(e)
            b = other.coeff(e)
            if a != b:
                return e, a, b
        return None

    # -- rendering ------------------------------------------------------------

    def __str__(self):
        return render_series(self)

    def __repr__(self):
        return f"QSeries({render_series(self)})"


def _rational_window(coeffs):
    out = []
    for c in coeffs:
        if c.level != 1:
            return None
        out.append(c.coeffs[0])
    return out


def _convolve_rational(a, b, n):
    out = [_MPQ_ZERO] * n
    nz_b = [(j, y) for j, y in enumerate(b) if y]
    for i, x in enumerate(a):
        if i >= n:
            break
        if not x:
            continue
        for j, y in nz_b:
            k = i + j
            if k >= n:
                break
            out[k] += x * y
    return [CycloNum(1, (v,)) for v in out]


def _convolve_cyclo(a, b, n):
    out = [CYC_ZERO] * n
    nz_b = [(j, y) for j, y in enumerate(b) if not y.is_zero()]
    for i, x in enumerate(a):
        if i >= n:
            break
        if x.is_zero():
            continue
        for j, y in nz_b:
            k = i + j
            if k >= n:
                break
            out[k] = out[k] + x * y
    return out


def render_series(s: QSeries) -> str:
    """Terms in increasing exponent with exact coefficients, then + O(q^prec).

    This text format is the CLI's bit-exact output contract: `c*q^e` terms,
    rational coefficients as plain fractions, cyclotomic ones as
    `(a0 + a1*z + ...)` in the power basis of the coefficient's level.
    """
    parts = []
    for e, c in s.nonzero_items():
        rat = c.is_rational()
        if e == 0:
            body = str(c)
            negative = rat is not None and rat < 0
            if negative:
                body = str(-c)
        else:
            qpart = "q" if e == 1 else f"q^{e}"
            negative = rat is not None and rat < 0
            mag = -c if negative else c
            mag_rat = mag.is_rational()
            if mag_rat == 1:
                body = qpart
            else:
                body = f"{mag}*{qpart}"
        if not parts:
            parts.append(("-" if negative else "") + body)
        else:
            parts.append((" - " if negative else " + ") + body)
    if not parts:
        parts.append("0")
    return "".join(parts) + f" + O(q^{s.prec})"


@dataclass(frozen=True)
class Monomial:
    """The symbolic argument c * q^e with c a root of unity times a sign."""

    unity: CycloNum
    exp: int = 0

    def __post_init__(self):
        root = as_root_of_unity(self.unity)
        if root is None:
            raise ValueError("monomial coefficient must be a root of unity")
        object.__setattr__(self, "unity", root[0])
        _check_exp(self.exp)

    @staticmethod
    def q(exp: int = 1) -> "Monomial":
        return Monomial(CYC_ONE, exp)

    @staticmethod
    def one() -> "Monomial":
        return Monomial(CYC_ONE, 0)

    @staticmethod
    def minus_one() -> "Monomial":
        return Monomial(CYC_MINUS_ONE, 0)

    @staticmethod
    def root(L: int, k: int = 1, exp: int = 0) -> "Monomial":
        from .cyclotomic import zeta

        return Monomial(zeta(L, k), exp)

    def __mul__(self, other: "Monomial") -> "Monomial":
        return Monomial(self.unity * other.unity, _check_exp(self.exp + other.exp))

    def __neg__(self) -> "Monomial":
        return Monomial(-self.unity, self.exp)

    def inverse(self) -> "Monomial":
        return Monomial(self.unity.inverse(), -self.exp)

    def __pow__(self, n: int) -> "Monomial":
        return Monomial(self.unity**n, _check_exp(self.exp * n))

    def unity_order(self) -> int:
        return as_root_of_unity(self.unity)[1]

    def as_qseries(self, prec: int) -> QSeries:
        return QSeries.term(self.unity, self.exp, prec)

    def times(self, s: QSeries) -> QSeries:
        """Multiply a series by this monomial (exact scale and shift)."""
        out = s.shifted(self.exp)
        return out if self.unity.is_one() else out.scaled(self.unity)

    def __str__(self):
        from .cyclotomic import root_label

        label = root_label(self.unity)
        if self.exp == 0:
            return label
        qpart = "q" if self.exp == 1 else f"q^{self.exp}"
        if label == "1":
            return qpart
        if label == "-1":
            return f"-{qpart}"
        return f"{label}*{qpart}"


def j_is_zero(z: Monomial, base: int) -> bool:
    """True iff j(z; q^base) vanishes identically: z an integral power of q^base."""
    return z.unity.is_one() and z.exp % base == 0


def _negative_exponent_sum(e: int, base: int) -> int:
    # Sum of the exponents e + k*base that fall below zero (k >= 0).
    if e >= 0:
        return 0
    count = (-e + base - 1) // base
    return e * count + base * (count * (count - 1) // 2)


def pochhammer_inf(x: Monomial, base: int, prec: int) -> QSeries:
    """The infinite product over k >= 0 of (1 - c q^(e + k*base)), exact to O(q^prec).

    Factors with negative exponent are rewritten as (-c q^E)(1 - c^-1 q^-E), so
    the result is a genuine Laurent series; the factor (1 - c) appears when the
    exponent chain passes through zero, and the whole product is identically
    zero when c = 1 lands there.
    """
    if base < 1:
        raise ValueError("pochhammer base must be >= 1")
    u, e = x.unity, x.exp
    if u.is_one() and e <= 0 and e % base == 0:
        return QSeries.zero(prec)
    mu = _negative_exponent_sum(e, base)
    width = prec - mu
    if width <= 0:
        return QSeries.zero(prec)
    scalar = CYC_ONE
    unit_factors = []  # (positive exponent, coefficient c) for factors (1 - c q^F)
    u_inv = None
    k = 0
    while True:
        E = e + k * base
        if E >= width:
            break
        if E > 0:
            unit_factors.append((E, u))
        elif E == 0:
            scalar = scalar * (CYC_ONE - u)
        else:
            if u_inv is None:
                u_inv = u.inverse()
            scalar = scalar * (-u)
            if -E < width:
                unit_factors.append((-E, u_inv))
        k += 1
    buf = [CYC_ZERO] * width
    buf[0] = scalar
    top = 0  # highest index that can be nonzero so far
    for F, c in sorted(unit_factors, key=lambda fc: fc[0]):
        new_top = min(top + F, width - 1)
        for i in range(min(top, width - 1 - F), -1, -1):
            b = buf[i]
            if not b.is_zero():
                buf[i + F] = buf[i + F] - c * b
        top = new_top
    return QSeries(mu, prec, buf)


@functools.lru_cache(maxsize=None)
def J(m: int, prec: int) -> QSeries:
    """The Euler product (q^m; q^m)_infinity, exact to O(q^prec)."""
    if m < 1:
        raise ValueError("J index must be >= 1")
    return pochhammer_inf(Monomial.q(m), m, prec)


@functools.lru_cache(maxsize=None)
def overpartition_factor(prec: int) -> QSeries:
    """(-q; q)_inf / (q; q)_inf, the overpartition-count generating function."""
    head = pochhammer_inf(Monomial(CYC_MINUS_ONE, 1), 1, prec)
    return head * pochhammer_inf(Monomial.q(1), 1, prec).inverse()


@functools.lru_cache(maxsize=None)
def theta_j(z: Monomial, base: int, prec: int) -> QSeries:
    """The theta function j(z; q^base) = (z)(q^base/z)(q^base) as a triple product.

    Identically zero exactly when z is an integral power of q^base (callers
    detect that case with j_is_zero; no error is raised here).
    """
    mu = _negative_exponent_sum(z.exp, base) + _negative_exponent_sum(base - z.exp, base)
    inner = prec - mu
    a = pochhammer_inf(z, base, inner)
    b = pochhammer_inf(Monomial(z.unity.inverse(), base - z.exp), base, inner)
    c = pochhammer_inf(Monomial.q(base), base, inner)
    out = (a * b) * c
    assert out.prec >= prec
    return out.truncated(prec)


def theta_j_sum(z: Monomial, base: int, prec: int) -> QSeries:
    """Bilateral theta sum of (-1)^n q^(base*n(n-1)/2) z^n; cross-check oracle
    for theta_j.  Every omitted term has exponent >= prec."""
    u, e = z.unity, z.exp
    order = as_root_of_unity(u)[1]
    upow = [CYC_ONE]
    for _ in range(order - 1):
        upow.append(upow[-1] * u)

    def coeff_at(n):
        c = upow[n % order]
        return c if n % 2 == 0 else -c

    terms = []
    n = 0
    while True:
        E = base * n * (n - 1) // 2 + e * n
        if E < prec:
            terms.append((E, coeff_at(n)))
        elif base * n + e > 0:
            break
        n += 1
    n = -1
    while True:
        E = base * n * (n - 1) // 2 + e * n
        if E < prec:
            terms.append((E, coeff_at(n)))
        elif base * (n - 1) + e < 0:
            break
        n -= 1
    return QSeries.from_terms(terms, prec)


def extract_progression(s: QSeries, r: int, m: int) -> QSeries:
    """The sub-series of coefficients on the exponent class r (mod m),
    reindexed: sum of c_(m*n+r) q^n."""
    if m < 1:
        raise ValueError("progression modulus must be >= 1")
    r %= m
    prec = (s.prec - r) // m
    lo = -((r - s.min_exp) // m)  # ceil((min_exp - r) / m)
    if lo >= prec:
        return QSeries.zero(prec)
    window = []
    for n in range(lo, prec):
        e = m * n + r
        window.append(s.coeff(e) if e < s.prec else CYC_ZERO)
    return QSeries(lo, prec, window)
