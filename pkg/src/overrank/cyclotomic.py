"""Exact arithmetic in cyclotomic fields Q(zeta_L).

A value is a vector of rationals over the power basis 1, z, ..., z^(phi(L)-1)
modulo the L-th cyclotomic polynomial.  Rationals are gmpy2.mpq: arbitrary
precision, canonically reduced, never floating point.  Values are immutable;
all operations are pure, so values may be shared freely between threads.

Two values at different levels are compared (and combined) by lifting both to
the lcm level, where the power-basis representation is unique.  A value whose
coordinates beyond index 0 vanish is collapsed to level 1 on construction, so
rational values round-trip exactly with mpq.
"""

from __future__ import annotations

import functools
from math import gcd

from gmpy2 import mpq

from .errors import LevelOverflow

Rational = mpq

#: Largest cyclotomic level any operation may produce.  Operations that would
#: exceed it raise LevelOverflow instead of degrading.  Everything the library
#: verifies lives in levels <= 2*7 plus small lcms; the default leaves room.
LEVEL_CAP = 240

_MPQ_ZERO = mpq(0)
_MPQ_ONE = mpq(1)


def set_level_cap(cap: int) -> None:
    global LEVEL_CAP
    if cap < 1:
        raise ValueError("level cap must be positive")
    LEVEL_CAP = cap


def _check_level(level: int) -> None:
    if level > LEVEL_CAP:
        raise LevelOverflow(f"cyclotomic level {level} exceeds cap {LEVEL_CAP}")


def _divisors(n: int) -> list[int]:
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def _poly_div_exact(num: list[int], den: list[int]) -> list[int]:
    # Long division of integer polynomials known to divide exactly.
    num = list(num)
    dd = len(den) - 1
    out = [0] * (len(num) - dd)
    for i in range(len(num) - 1, dd - 1, -1):
        c = num[i]
        if c == 0:
            continue
        q, r = divmod(c, den[dd])
        assert r == 0
        out[i - dd] = q
        for j in range(dd + 1):
            num[i - dd + j] -= q * den[j]
    assert all(c == 0 for c in num)
    return out


@functools.lru_cache(maxsize=None)
def cyclotomic_polynomial(L: int) -> tuple[int, ...]:
    """Integer coefficients of the L-th cyclotomic polynomial, constant first.

    Computed by dividing x^L - 1 by the cyclotomic polynomials of the proper
    divisors of L; monic, degree phi(L).
    """
    if L < 1:
        raise ValueError("level must be positive")
    if L == 1:
        return (-1, 1)
    poly = [-1] + [0] * (L - 1) + [1]
    for d in _divisors(L)[:-1]:
        poly = _poly_div_exact(poly, list(cyclotomic_polynomial(d)))
    return tuple(poly)


def euler_phi(L: int) -> int:
    return len(cyclotomic_polynomial(L)) - 1


@functools.lru_cache(maxsize=None)
def _level_data(L: int) -> tuple[int, tuple[tuple[int, ...], ...]]:
    """(phi(L), reduction rows for x^k, k = phi(L) .. 2*phi(L)-2)."""
    phi_poly = cyclotomic_polynomial(L)
    d = len(phi_poly) - 1
    base = tuple(-c for c in phi_poly[:-1])  # x^d in the power basis
    rows = [base]
    for _ in range(d - 2):
        prev = rows[-1]
        top = prev[d - 1]
        shifted = (0,) + prev[: d - 1]
        rows.append(tuple(s + top * b for s, b in zip(shifted, base)))
    return d, tuple(rows)


def _poly_mod(coeffs: list, L: int) -> list:
    # Reduce an arbitrary-degree rational polynomial modulo Phi_L.
    phi_poly = cyclotomic_polynomial(L)
    d = len(phi_poly) - 1
    coeffs = list(coeffs)
    for i in range(len(coeffs) - 1, d - 1, -1):
        c = coeffs[i]
        if c:
            coeffs[i] = _MPQ_ZERO
            for j in range(d):
                coeffs[i - d + j] -= c * phi_poly[j]
    del coeffs[d:]
    while len(coeffs) < d:
        coeffs.append(_MPQ_ZERO)
    return coeffs


def _poly_xgcd_inverse(vec: tuple, L: int) -> list:
    # Inverse of the polynomial `vec` modulo Phi_L via the extended Euclid
    # algorithm over Q[x].
    def deg(p):
        for i in range(len(p) - 1, -1, -1):
            if p[i]:
                return i
        return -1

    def scale(p, c):
        return [x * c for x in p]

    def sub(p, q):
        n = max(len(p), len(q))
        p = p + [_MPQ_ZERO] * (n - len(p))
        q = q + [_MPQ_ZERO] * (n - len(q))
        return [a - b for a, b in zip(p, q)]

    r0 = [mpq(c) for c in cyclotomic_polynomial(L)]
    r1 = [mpq(c) for c in vec]
    s0, s1 = [_MPQ_ZERO], [_MPQ_ONE]
    while True:
        d1 = deg(r1)
        if d1 <= 0:
            break
        d0 = deg(r0)
        if d0 < d1:
            r0, r1, s0, s1 = r1, r0, s1, s0
            continue
        c = r0[d0] / r1[d1]
        shift = d0 - d1
        r0 = sub(r0, [_MPQ_ZERO] * shift + scale(r1, c))
        s0 = sub(s0, [_MPQ_ZERO] * shift + scale(s1, c))
    g = r1[0]
    if not g:
        raise ZeroDivisionError("cyclotomic inverse of zero")
    return _poly_mod(scale(s1, 1 / g), L)


class CycloNum:
    """An exact element of Q(zeta_L) in the power basis modulo Phi_L."""

    __slots__ = ("level", "coeffs")

    def __init__(self, level: int, coeffs):
        coeffs = tuple(c if isinstance(c, type(_MPQ_ZERO)) else mpq(c) for c in coeffs)
        if level != 1 and not any(coeffs[1:]):
            level, coeffs = 1, coeffs[:1]
        if len(coeffs) != euler_phi(level):
            raise ValueError("coefficient vector length must be phi(level)")
        object.__setattr__(self, "level", level)
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, name, value):
        raise AttributeError("CycloNum is immutable")

    # -- constructors -----------------------------------------------------

    @staticmethod
    def rational(value) -> "CycloNum":
        return CycloNum(1, (mpq(value),))

    # -- structure ---------------------------------------------------------

    def is_zero(self) -> bool:
        return self.level == 1 and not self.coeffs[0]

    def is_one(self) -> bool:
        return self.level == 1 and self.coeffs[0] == 1

    def is_rational(self):
        """The mpq value if this element lies in Q, else None."""
        return self.coeffs[0] if self.level == 1 else None

    def lift(self, level: int) -> "CycloNum":
        """Rewrite at a multiple of the current level (zeta_L -> zeta_M^(M/L))."""
        if level == self.level:
            return self
        if level % self.level:
            raise ValueError("can only lift to a multiple of the level")
        _check_level(level)
        t = level // self.level
        spread = [_MPQ_ZERO] * ((len(self.coeffs) - 1) * t + 1)
        for i, c in enumerate(self.coeffs):
            spread[i * t] = c
        return CycloNum(level, _poly_mod(spread, level))

    def _lift_vec(self, level: int) -> tuple:
        # Raw coefficient vector at a multiple level, without the rational
        # collapse the public constructor applies.
        if level == self.level:
            return self.coeffs
        t = level // self.level
        spread = [_MPQ_ZERO] * ((len(self.coeffs) - 1) * t + 1)
        for i, c in enumerate(self.coeffs):
            spread[i * t] = c
        return tuple(_poly_mod(spread, level))

    def _aligned(self, other: "CycloNum"):
        if self.level == other.level:
            return self.level, self.coeffs, other.coeffs
        m = self.level * other.level // gcd(self.level, other.level)
        _check_level(m)
        return m, self._lift_vec(m), other._lift_vec(m)

    # -- arithmetic ----------------------------------------------------------

    @staticmethod
    def _coerce(value):
        if isinstance(value, CycloNum):
            return value
        if isinstance(value, (int, type(_MPQ_ZERO))):
            return CycloNum(1, (value,))
        return NotImplemented

    def __add__(self, other):
        other = CycloNum._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.level == 1 and other.level == 1:
            return CycloNum(1, (self.coeffs[0] + other.coeffs[0],))
        level, va, vb = self._aligned(other)
        return CycloNum(level, tuple(x + y for x, y in zip(va, vb)))

    __radd__ = __add__

    def __neg__(self):
        return CycloNum(self.level, tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        other = CycloNum._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = CycloNum._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.level == 1:
            c = self.coeffs[0]
            if not c:
                return CYC_ZERO
            return CycloNum(other.level, tuple(c * y for y in other.coeffs))
        if other.level == 1:
            c = other.coeffs[0]
            if not c:
                return CYC_ZERO
            return CycloNum(self.level, tuple(c * y for y in self.coeffs))
        level, va, bc = self._aligned(other)
        d, rows = _level_data(level)
        conv = [_MPQ_ZERO] * (2 * d - 1)
        for i, x in enumerate(va):
            if x:
                for j, y in enumerate(bc):
                    if y:
                        conv[i + j] += x * y
        out = conv[:d]
        for k in range(d, 2 * d - 1):
            c = conv[k]
            if c:
                row = rows[k - d]
                for i in range(d):
                    if row[i]:
                        out[i] += c * row[i]
        return CycloNum(level, out)

    __rmul__ = __mul__

    def inverse(self) -> "CycloNum":
        if self.level == 1:
            if not self.coeffs[0]:
                raise ZeroDivisionError("division by zero in Q(zeta)")
            return CycloNum(1, (1 / self.coeffs[0],))
        return CycloNum(self.level, _poly_xgcd_inverse(self.coeffs, self.level))

    def __truediv__(self, other):
        other = CycloNum._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int) -> "CycloNum":
        if n < 0:
            return self.inverse() ** (-n)
        result = CYC_ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- comparison ----------------------------------------------------------

    def __eq__(self, other):
        other = CycloNum._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.level == other.level:
            return self.coeffs == other.coeffs
        _, va, vb = self._aligned(other)
        return va == vb

    def __hash__(self):
        # Values constructed through canonical paths (zeta, as_root_of_unity)
        # hash consistently; see module docstring for the cross-level caveat.
        return hash((self.level, self.coeffs))

    # -- rendering -------------------------------------------------------------

    def __str__(self):
        if self.level == 1:
            return str(self.coeffs[0])
        parts = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            if i == 0:
                body = str(c)
            else:
                zpow = "z" if i == 1 else f"z^{i}"
                mag = abs(c)
                body = zpow if mag == 1 else f"{mag}*{zpow}"
                body = ("-" if c < 0 else "") + body
            if not parts:
                parts.append(body)
            elif body.startswith("-"):
                parts.append(" - " + body[1:])
            else:
                parts.append(" + " + body)
        return "(" + "".join(parts) + ")" if parts else "0"

    def __repr__(self):
        return f"CycloNum[L={self.level}]({self})"


CYC_ZERO = CycloNum(1, (_MPQ_ZERO,))
CYC_ONE = CycloNum(1, (_MPQ_ONE,))
CYC_MINUS_ONE = CycloNum(1, (mpq(-1),))


def zeta(L: int, k: int = 1) -> CycloNum:
    """The root of unity zeta_L^k in canonical form.

    The result is represented at level L/gcd(L, k), the order of the root,
    so equal roots always share a representation.
    """
    if L < 1:
        raise ValueError("level must be positive")
    _check_level(L)
    k %= L
    g = gcd(k, L) if k else L
    level, power = L // g, k // g
    if level == 1:
        return CYC_ONE
    d = euler_phi(level)
    if power < d:
        vec = [_MPQ_ZERO] * d
        vec[power] = _MPQ_ONE
        return CycloNum(level, vec)
    spread = [_MPQ_ZERO] * (power + 1)
    spread[power] = _MPQ_ONE
    return CycloNum(level, _poly_mod(spread, level))


def root_of_unity_sum(n: int, s: int):
    """Sum of zeta_n^(s*j) over j = 0..n-1: n if n | s, else 0."""
    if n < 1:
        raise ValueError("n must be positive")
    return mpq(n) if s % n == 0 else mpq(0)


@functools.lru_cache(maxsize=None)
def as_root_of_unity(value: CycloNum):
    """(canonical representation, multiplicative order) if `value` is a root
    of unity, else None.

    Every root of unity in Q(zeta_L) is +-zeta_L^k, so the order divides
    lcm(2, L); the scan is bounded by that.
    """
    if value.is_zero():
        return None
    bound = value.level if value.level % 2 == 0 else 2 * value.level
    power = value
    for k in range(1, bound + 1):
        if power.is_one():
            return zeta_power_matching(value, k), k
        power = power * value
    return None


def zeta_power_matching(value: CycloNum, order: int) -> CycloNum:
    return zeta(order, _root_exponent(value, order))


def _root_exponent(value: CycloNum, order: int) -> int:
    for j in range(order):
        if gcd(j, order) == 1 or (j == 0 and order == 1):
            if zeta(order, j) == value:
                return j
    raise AssertionError("element of finite order is not a root of unity")


def root_label(value: CycloNum):
    """A zeta-power name for a root of unity ('1', '-1', 'zeta(6)^5', ...),
    or None if the value is not a root of unity."""
    info = as_root_of_unity(value)
    if info is None:
        return None
    canonical, order = info
    if order == 1:
        return "1"
    if order == 2:
        return "-1"
    j = _root_exponent(canonical, order)
    return f"zeta({order})" if j == 1 else f"zeta({order})^{j}"
