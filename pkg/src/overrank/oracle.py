"""Combinatorial ground truth for the rank identities.

Everything in this module is anchored in explicit enumeration of
overpartitions: partitions in which the first occurrence of each distinct part
may be overlined.  Two statistics are tracked, the ordinary rank (largest part
minus number of parts) and the M2-rank.  Counting tables are built either by
streaming the objects themselves or by a memoized recurrence; the two must
agree, and the closed forms for the rank generating functions are certified
against the tables before they are trusted to extend any series beyond the
enumerated range.
"""

from __future__ import annotations

import functools
import json
import os
from dataclasses import dataclass

from gmpy2 import mpq

from .appell import T2_series, T_series, delta, m_series
from .cyclotomic import CYC_ONE, CYC_ZERO, CycloNum, zeta
from .errors import PoleError
from .series import Monomial, QSeries, overpartition_factor


@dataclass(frozen=True)
class Overpartition:
    """Parts in non-increasing order; at most one overlined copy per value,
    listed before the plain copies of that value."""

    parts: tuple[tuple[int, bool], ...]

    def __post_init__(self):
        values = [v for v, _ in self.parts]
        if values != sorted(values, reverse=True):
            raise ValueError("parts must be non-increasing")
        seen_plain = set()
        seen_over = set()
        for v, overlined in self.parts:
            if overlined:
                if v in seen_over or v in seen_plain:
                    raise ValueError("overlined copy must be the first of its value")
                seen_over.add(v)
            else:
                seen_plain.add(v)

    def total(self) -> int:
        return sum(v for v, _ in self.parts)

    def __str__(self):
        if not self.parts:
            return "()"
        return "(" + ", ".join(f"{v}~" if o else str(v) for v, o in self.parts) + ")"


def enumerate_overpartitions(n: int):
    """Yield every overpartition of n exactly once (largest parts first,
    overlined variant before plain)."""
    if n < 0:
        return
    if n == 0:
        yield Overpartition(())
        return

    def rec(remaining, max_part, acc):
        if remaining == 0:
            yield Overpartition(tuple(acc))
            return
        for v in range(min(remaining, max_part), 0, -1):
            for j in range(1, remaining // v + 1):
                for overlined in (True, False):
                    block = [(v, overlined)] + [(v, False)] * (j - 1)
                    yield from rec(remaining - j * v, v - 1, acc + block)

    yield from rec(n, n, [])


def rank(op: Overpartition) -> int:
    """Largest part minus number of parts; the empty overpartition has rank 0."""
    if not op.parts:
        return 0
    return op.parts[0][0] - len(op.parts)


def m2_rank(op: Overpartition) -> int:
    """ceil(largest/2) - #parts + #(odd non-overlined parts)
    - [largest part odd and non-overlined]; 0 for the empty overpartition."""
    if not op.parts:
        return 0
    largest, largest_overlined = op.parts[0]
    odd_plain = sum(1 for v, o in op.parts if v % 2 and not o)
    chi = 1 if largest % 2 and not largest_overlined else 0
    return (largest + 1) // 2 - len(op.parts) + odd_plain - chi


class RankTable:
    """Counts of overpartitions of n by exact rank value, n <= n_max."""

    __slots__ = ("which", "n_max", "rows")

    def __init__(self, which: str, n_max: int, rows):
        if which not in ("rank", "m2"):
            raise ValueError("which must be 'rank' or 'm2'")
        self.which = which
        self.n_max = n_max
        self.rows = rows  # rows[n] maps rank value -> count

    def count(self, m: int, n: int) -> int:
        return self.rows[n].get(m, 0)

    def pbar(self, n: int) -> int:
        return sum(self.rows[n].values())

    def class_count(self, a: int, M: int, n: int) -> int:
        return sum(c for m, c in self.rows[n].items() if (m - a) % M == 0)

    def validate(self) -> None:
        """Check the symmetry and total-count invariants; raise on failure."""
        product = overpartition_factor(self.n_max + 1)
        for n in range(self.n_max + 1):
            row = self.rows[n]
            for m, c in row.items():
                if row.get(-m, 0) != c:
                    raise ValueError(f"rank table asymmetric at n={n}, m={m}")
            expected = product.coeff(n).is_rational()
            if expected is None or self.pbar(n) != expected:
                raise ValueError(f"rank table total at n={n} disagrees with the product series")

    def to_json_dict(self) -> dict:
        return {
            "version": 1,
            "which": self.which,
            "n_max": self.n_max,
            "rows": [sorted(row.items()) for row in self.rows],
        }

    @staticmethod
    def from_json_dict(data: dict) -> "RankTable":
        if data.get("version") != 1:
            raise ValueError("unknown rank table cache version")
        rows = [{int(m): int(c) for m, c in row} for row in data["rows"]]
        return RankTable(data["which"], int(data["n_max"]), rows)


def _statistic(which: str):
    return rank if which == "rank" else m2_rank


def table_by_enumeration(n_max: int, which: str = "rank") -> RankTable:
    stat = _statistic(which)
    rows = []
    for n in range(n_max + 1):
        row: dict[int, int] = {}
        for op in enumerate_overpartitions(n):
            m = stat(op)
            row[m] = row.get(m, 0) + 1
        rows.append(row)
    return RankTable(which, n_max, rows)


@functools.lru_cache(maxsize=None)
def _parts_profile(n: int, vmax: int, which: str):
    """Distribution over the accumulated statistic of overpartitions of n with
    all parts <= vmax.

    For the rank the statistic is minus the number of parts; for the M2-rank
    it is the per-part sum -1 + [odd and non-overlined] (the overline flag of
    each value shifts it by one when the value is odd).
    """
    if n == 0:
        return ((0, 1),)
    if vmax == 0:
        return ()
    acc: dict[int, int] = dict(_parts_profile(n, vmax - 1, which))
    v = vmax
    j = 1
    while j * v <= n:
        rest = _parts_profile(n - j * v, v - 1, which)
        if which == "rank":
            shifts = ((-j, 2),)
        elif v % 2:
            shifts = ((0, 1), (-1, 1))
        else:
            shifts = ((-j, 2),)
        for s, w in shifts:
            for stat, cnt in rest:
                key = stat + s
                acc[key] = acc.get(key, 0) + w * cnt
        j += 1
    return tuple(sorted(acc.items()))


def table_by_counting(n_max: int, which: str = "rank") -> RankTable:
    """Build the table with the memoized largest-part recurrence (no object
    streaming); must agree with table_by_enumeration everywhere."""
    rows = [{0: 1} if n == 0 else {} for n in range(n_max + 1)]
    for n in range(1, n_max + 1):
        row = rows[n]
        for v in range(1, n + 1):
            j = 1
            while j * v <= n:
                rest = _parts_profile(n - j * v, v - 1, which)
                if which == "rank":
                    heads = ((v - j, 2),)
                elif v % 2:
                    heads = (((v + 1) // 2 - 1, 2),)
                else:
                    heads = ((v // 2 - j, 2),)
                for head, w in heads:
                    for stat, cnt in rest:
                        m = head + stat
                        row[m] = row.get(m, 0) + w * cnt
                j += 1
    return RankTable(which, n_max, rows)


#: Enumerated range within which the closed forms are certified before being
#: trusted for extension; the full table builds in seconds at this size.
DEFAULT_ORACLE_RANGE = 24

#: Streaming and counting builders must agree on at least this range.
ENUMERATION_AGREEMENT_RANGE = 18


def _cache_path(cache_dir: str, which: str, n_max: int) -> str:
    return os.path.join(cache_dir, f"ranktable-v1-{which}-{n_max}.json")


@functools.lru_cache(maxsize=None)
def build_rank_table(n_max: int, which: str = "rank", cache_dir: str | None = None) -> RankTable:
    """The rank table for n <= n_max, via the counting recurrence.

    With a cache directory (the argument, or the OVERRANK_CACHE_DIR
    environment variable), a versioned JSON snapshot keyed by (which, n_max)
    is reused when present; cached data is re-validated against the symmetry
    and total-count invariants before use and rebuilt if it fails.
    """
    if cache_dir is None:
        cache_dir = os.environ.get("OVERRANK_CACHE_DIR")
    path = None
    if cache_dir:
        path = _cache_path(cache_dir, which, n_max)
        if os.path.exists(path):
            try:
                with open(path, "r", encoding="utf-8") as fh:
                    table = RankTable.from_json_dict(json.load(fh))
                if table.which == which and table.n_max == n_max:
                    table.validate()
                    return table
            except (ValueError, KeyError, json.JSONDecodeError, OSError):
                pass
    table = table_by_counting(n_max, which)
    if path:
        os.makedirs(cache_dir, exist_ok=True)
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(table.to_json_dict(), fh)
    return table


def pbar_series(prec: int) -> QSeries:
    """The overpartition-count generating function (-q;q)_inf / (q;q)_inf."""
    return overpartition_factor(prec)


# ---------------------------------------------------------------------------
# Closed forms for the two-variable rank generating functions, and the
# deviations built from them.
# ---------------------------------------------------------------------------

_MINUS_ONE = Monomial(CycloNum(1, (mpq(-1),)), 0)


@functools.lru_cache(maxsize=None)
def sbar_closed(z: Monomial, prec: int) -> QSeries:
    """(1+z) times the two-variable rank generating function, in closed form:
    (1 - z)(1 - 2 m(z^-2 q, q^2, z)).

    When the third parameter z makes the Appell-Lerch evaluation non-generic,
    it is switched to -1 through the Delta term first.
    """
    x = Monomial(z.unity.inverse() ** 2, 1 - 2 * z.exp)
    try:
        mm = m_series(x, 2, z, prec)
    except PoleError:
        mm = m_series(x, 2, _MINUS_ONE, prec) + delta(x, z, _MINUS_ONE, 2, prec)
    one = QSeries.one(prec)
    return (one - z.as_qseries(prec)) * (one - mm.scaled(2))


@functools.lru_cache(maxsize=None)
def sbar2_closed(z: Monomial, prec: int) -> QSeries:
    """The M2-rank analogue: -(1-z) + 2(1-z) m(zq, q^2, q), with the same
    switch of the third parameter to -1 when poles arise."""
    x = Monomial(z.unity, z.exp + 1)
    third = Monomial.q(1)
    try:
        mm = m_series(x, 2, third, prec)
    except PoleError:
        mm = m_series(x, 2, _MINUS_ONE, prec) + delta(x, third, _MINUS_ONE, 2, prec)
    one_minus_z = QSeries.one(prec) - z.as_qseries(prec)
    return one_minus_z * mm.scaled(2) - one_minus_z


def sbar_from_table(z_unity: CycloNum, table: RankTable, prec: int) -> QSeries:
    """Enumeration-built S-bar(z; q): sum over m, n of
    (N(m, n) + N(m-1, n)) z^m q^n, for z a root of unity."""
    from .cyclotomic import as_root_of_unity

    _, order = as_root_of_unity(z_unity)
    powers = [CYC_ONE]
    for _ in range(order - 1):
        powers.append(powers[-1] * z_unity)
    coeffs = []
    top = min(prec, table.n_max + 1)
    for n in range(top):
        acc = None
        for m, c in table.rows[n].items():
            w = powers[m % order] + powers[(m + 1) % order]
            contrib = w * c
            acc = contrib if acc is None else acc + contrib
        coeffs.append(acc if acc is not None else CYC_ZERO)
    return QSeries(0, top, coeffs)


def _closed_form(which: str):
    return sbar_closed if which == "rank" else sbar2_closed


def _even_class_series(which: str, prec: int) -> QSeries:
    return T_series(prec) if which == "rank" else T2_series(prec)


def _rationalized(s: QSeries, context: str) -> QSeries:
    pos = next((e for e, c in s.nonzero_items() if c.level != 1), None)
    if pos is not None:
        raise ArithmeticError(f"{context}: cyclotomic residue survives at q^{pos}")
    return s


@functools.lru_cache(maxsize=None)
def _deviation_closed(a: int, M: int, which: str, prec: int) -> QSeries:
    """Single deviation series from the certified closed forms.

    For odd M the pairwise sums are triangularly solved from the anchor
    a = (M-1)/2, where the pair equals twice one deviation.  For even M the
    averaged generating functions are used directly, with the z = -1 slot
    supplied by twice the parity-class T-series.
    """
    closed = _closed_form(which)
    if M % 2:
        sbars = {j: closed(Monomial(zeta(M, j)), prec) for j in range(1, M)}

        def pair(b):
            total = None
            for j, s in sbars.items():
                term = s.scaled(zeta(M, -b * j))
                total = term if total is None else total + term
            return total.scaled(mpq(1, M))

        half = (M - 1) // 2
        dev = {half: pair(half + 1).scaled(mpq(1, 2))}
        for b in range(half, 0, -1):
            dev[b - 1] = pair(b) - dev[b]
        target = min(a, M - a)
        return _rationalized(dev[target], f"deviation({a},{M},{which})")
    evens = _even_class_series(which, prec).scaled(2)
    total = evens if a % 2 == 0 else evens.scaled(-1)
    for j in range(1, M):
        if j == M // 2:
            continue
        r_j = closed(Monomial(zeta(M, j)), prec).scaled((CYC_ONE + zeta(M, j)).inverse())
        total = total + r_j.scaled(zeta(M, -a * j))
    return _rationalized(total.scaled(mpq(1, M)), f"deviation({a},{M},{which})")


def deviation(a: int, M: int, which: str = "rank", prec: int = 40,
              oracle_range: int = DEFAULT_ORACLE_RANGE) -> QSeries:
    """The deviation of the rank class a (mod M) from the average:
    sum of (N(a, M, n) - pbar(n)/M) q^n, with exact rational coefficients.

    Coefficients up to `oracle_range` come from the enumeration-anchored
    table; beyond that the certified closed forms extend the series, and the
    two are required to agree on the overlap.
    """
    if M < 2:
        raise ValueError("modulus must be >= 2")
    if not 0 <= a <= M:
        raise ValueError("need 0 <= a <= M")
    a %= M
    top = min(prec, oracle_range + 1)
    table = build_rank_table(max(top - 1, 0), which)
    avg = overpartition_factor(top).scaled(mpq(1, M))
    table_part = QSeries(
        0, top,
        [CycloNum(1, (mpq(table.class_count(a, M, n)),)) for n in range(top)],
    ) - avg
    if prec <= top:
        return table_part.truncated(prec) if table_part.prec > prec else table_part
    closed = _deviation_closed(a, M, which, prec)
    mismatch = table_part.first_difference(closed)
    if mismatch is not None:
        raise ArithmeticError(
            f"closed-form deviation({a},{M},{which}) disagrees with enumeration at q^{mismatch[0]}: "
            f"{mismatch[1]} != {mismatch[2]}"
        )
    window = [table_part.coeff(n) for n in range(0, top)]
    window += [closed.coeff(n) for n in range(top, prec)]
    return QSeries(0, prec, window)


def deviation_pair(a: int, M: int, which: str = "rank", prec: int = 40,
                   oracle_range: int = DEFAULT_ORACLE_RANGE) -> QSeries:
    """deviation(a, M) + deviation(a-1, M), the shape the pair formulas produce."""
    lo = (a - 1) % M
    return deviation(a % M, M, which, prec, oracle_range) + deviation(lo, M, which, prec, oracle_range)
