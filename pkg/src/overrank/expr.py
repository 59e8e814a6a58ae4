"""A small expression language over the q-series kernel.

Grammar (standard precedence, ^ binds tightest, then unary minus, then * /,
then + -; binary operators associate left):

    expr   := term (('+'|'-') term)*
    term   := unary (('*'|'/') unary)*
    unary  := '-' unary | power
    power  := atom ['^' int]
    atom   := INT | 'q' | '(' expr ')' | call
    call   := J(INT) | zeta(INT) | T() | T2()
            | j(mono; qpow) | h(mono; qpow)
            | m(mono, qpow, mono)
            | Delta(mono, mono, mono; qpow)
            | Psi(int, INT, mono, mono, mono; qpow)
            | Dev(int, INT) | Dev2(int, INT)
            | pick(expr, int, INT)
    mono   := ['-'] ( '1' | 'q' ['^' int]
                    | zeta(INT) ['^' int] ['*' 'q' ['^' int]] )
    qpow   := 'q' ['^' int]

Arguments of j/m/Delta/Psi/h must be monomials; anything else is rejected at
parse time so every pole check stays decidable.
"""

from __future__ import annotations

from dataclasses import dataclass

from gmpy2 import mpq

from .appell import T2_series, T_series, delta, h_series, m_series, psi
from .cyclotomic import CYC_MINUS_ONE, CYC_ONE, zeta
from .errors import ExprSyntaxError, LevelOverflow, NotInvertible, PoleError
from .oracle import deviation
from .series import Monomial, QSeries, extract_progression, theta_j
from .series import J as euler_J

# -- tokens -------------------------------------------------------------------

_SYMBOLS = "+-*/^(),;"
_NAMES = {"J", "j", "m", "Delta", "Psi", "h", "T", "T2", "Dev", "Dev2", "pick", "zeta", "q"}


@dataclass(frozen=True)
class _Token:
    kind: str  # 'int' | 'name' | one of _SYMBOLS | 'end'
    text: str
    line: int
    column: int


def _tokenize(source: str) -> list[_Token]:
    tokens = []
    line, col = 1, 1
    i = 0
    while i < len(source):
        c = source[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c.isspace():
            col += 1
            i += 1
            continue
        if c.isdigit():
            start = i
            while i < len(source) and source[i].isdigit():
                i += 1
            tokens.append(_Token("int", source[start:i], line, col))
            col += i - start
            continue
        if c.isalpha() or c == "_":
            start = i
            while i < len(source) and (source[i].isalnum() or source[i] == "_"):
                i += 1
            text = source[start:i]
            if text not in _NAMES:
                raise ExprSyntaxError(f"unknown name '{text}'", line, col, sorted(_NAMES))
            tokens.append(_Token("name", text, line, col))
            col += i - start
            continue
        if c in _SYMBOLS:
            tokens.append(_Token(c, c, line, col))
            col += 1
            i += 1
            continue
        raise ExprSyntaxError(f"unexpected character {c!r}", line, col)
    tokens.append(_Token("end", "", line, col))
    return tokens


# -- syntax tree ----------------------------------------------------------------


@dataclass(frozen=True)
class MonoLit:
    negative: bool = False
    zeta_level: int | None = None
    zeta_power: int = 1
    q_exp: int | None = None

    def to_monomial(self) -> Monomial:
        unity = CYC_ONE if self.zeta_level is None else zeta(self.zeta_level, self.zeta_power)
        if self.negative:
            unity = -unity
        return Monomial(unity, self.q_exp or 0)

    def render(self) -> str:
        parts = []
        if self.zeta_level is not None:
            zs = f"zeta({self.zeta_level})"
            if self.zeta_power != 1:
                zs += f"^{self.zeta_power}"
            parts.append(zs)
        if self.q_exp is not None:
            parts.append("q" if self.q_exp == 1 else f"q^{self.q_exp}")
        body = "*".join(parts) if parts else "1"
        return ("-" if self.negative else "") + body


@dataclass(frozen=True)
class Lit:
    value: int


@dataclass(frozen=True)
class QPow:
    exp: int


@dataclass(frozen=True)
class ZetaPow:
    level: int
    power: int


@dataclass(frozen=True)
class EulerJ:
    index: int


@dataclass(frozen=True)
class Theta:
    z: MonoLit
    base: int


@dataclass(frozen=True)
class AppellM:
    x: MonoLit
    base: int
    z: MonoLit


@dataclass(frozen=True)
class SwitchDelta:
    x: MonoLit
    z1: MonoLit
    z0: MonoLit
    base: int


@dataclass(frozen=True)
class OrthoPsi:
    k: int
    n: int
    x: MonoLit
    z: MonoLit
    zp: MonoLit
    base: int


@dataclass(frozen=True)
class HSum:
    x: MonoLit
    base: int


@dataclass(frozen=True)
class TSeriesNode:
    m2: bool


@dataclass(frozen=True)
class DevNode:
    a: int
    M: int
    m2: bool


@dataclass(frozen=True)
class Pick:
    inner: "Expr"
    residue: int
    modulus: int


@dataclass(frozen=True)
class Neg:
    inner: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # '+', '-', '*', '/'
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: int


Expr = object


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, expected: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ExprSyntaxError(f"unexpected {tok.text or 'end of input'!r}",
                                  tok.line, tok.column, [expected])
        return self.advance()

    def fail(self, message: str, expected=()):
        tok = self.peek()
        raise ExprSyntaxError(message, tok.line, tok.column, expected)

    # expression levels

    def parse_expr(self):
        node = self.parse_term()
        while self.peek().kind in ("+", "-"):
            op = self.advance().kind
            node = BinOp(op, node, self.parse_term())
        return node

    def parse_term(self):
        node = self.parse_unary()
        while self.peek().kind in ("*", "/"):
            op = self.advance().kind
            node = BinOp(op, node, self.parse_unary())
        return node

    def parse_unary(self):
        if self.peek().kind == "-":
            self.advance()
            return Neg(self.parse_unary())
        return self.parse_power()

    def parse_power(self):
        node = self.parse_atom()
        if self.peek().kind == "^":
            self.advance()
            k = self.parse_int()
            if isinstance(node, QPow):
                node = QPow(node.exp * k)
            elif isinstance(node, ZetaPow):
                node = ZetaPow(node.level, node.power * k)
            else:
                node = Pow(node, k)
        return node

    def parse_int(self) -> int:
        sign = 1
        if self.peek().kind == "-":
            self.advance()
            sign = -1
        tok = self.expect("int", "integer")
        return sign * int(tok.text)

    def parse_atom(self):
        tok = self.peek()
        if tok.kind == "int":
            self.advance()
            return Lit(int(tok.text))
        if tok.kind == "(":
            self.advance()
            node = self.parse_expr()
            self.expect(")", "')'")
            return node
        if tok.kind == "name":
            return self.parse_call()
        self.fail("expected a value", ["integer", "q", "function call", "'('"])

    # calls and structured arguments

    def parse_call(self):
        tok = self.advance()
        name = tok.text
        if name == "q":
            return QPow(1)
        if name == "zeta":
            self.expect("(", "'('")
            level = self.parse_int()
            self.expect(")", "')'")
            return ZetaPow(level, 1)
        if name == "J":
            self.expect("(", "'('")
            idx = self.parse_int()
            self.expect(")", "')'")
            return EulerJ(idx)
        if name in ("T", "T2"):
            self.expect("(", "'('")
            self.expect(")", "')'")
            return TSeriesNode(name == "T2")
        if name in ("Dev", "Dev2"):
            self.expect("(", "'('")
            a = self.parse_int()
            self.expect(",", "','")
            M = self.parse_int()
            self.expect(")", "')'")
            return DevNode(a, M, name == "Dev2")
        if name == "pick":
            self.expect("(", "'('")
            inner = self.parse_expr()
            self.expect(",", "','")
            r = self.parse_int()
            self.expect(",", "','")
            m = self.parse_int()
            self.expect(")", "')'")
            return Pick(inner, r, m)
        if name == "j":
            self.expect("(", "'('")
            z = self.parse_mono()
            self.expect(";", "';'")
            base = self.parse_qpow()
            self.expect(")", "')'")
            return Theta(z, base)
        if name == "h":
            self.expect("(", "'('")
            x = self.parse_mono()
            self.expect(";", "';'")
            base = self.parse_qpow()
            self.expect(")", "')'")
            return HSum(x, base)
        if name == "m":
            self.expect("(", "'('")
            x = self.parse_mono()
            self.expect(",", "','")
            base = self.parse_qpow()
            self.expect(",", "','")
            z = self.parse_mono()
            self.expect(")", "')'")
            return AppellM(x, base, z)
        if name == "Delta":
            self.expect("(", "'('")
            x = self.parse_mono()
            self.expect(",", "','")
            z1 = self.parse_mono()
            self.expect(",", "','")
            z0 = self.parse_mono()
            self.expect(";", "';'")
            base = self.parse_qpow()
            self.expect(")", "')'")
            return SwitchDelta(x, z1, z0, base)
        if name == "Psi":
            self.expect("(", "'('")
            k = self.parse_int()
            self.expect(",", "','")
            n = self.parse_int()
            self.expect(",", "','")
            x = self.parse_mono()
            self.expect(",", "','")
            z = self.parse_mono()
            self.expect(",", "','")
            zp = self.parse_mono()
            self.expect(";", "';'")
            base = self.parse_qpow()
            self.expect(")", "')'")
            return OrthoPsi(k, n, x, z, zp, base)
        self.fail(f"'{name}' cannot start a value here")

    def parse_qpow(self) -> int:
        tok = self.peek()
        if tok.kind != "name" or tok.text != "q":
            self.fail("series base must be a positive power of q", ["q", "q^t"])
        self.advance()
        exp = 1
        if self.peek().kind == "^":
            self.advance()
            exp = self.parse_int()
        if exp < 1:
            raise ExprSyntaxError("series base exponent must be >= 1", tok.line, tok.column)
        return exp

    def parse_mono(self) -> MonoLit:
        tok = self.peek()
        negative = False
        if tok.kind == "-":
            self.advance()
            negative = True
        tok = self.peek()
        if tok.kind == "int":
            if tok.text != "1":
                raise ExprSyntaxError(
                    "arguments of j/m/Delta/Psi/h must be monomials: "
                    "use [-][zeta(L)^k *] q^e, or 1 / -1",
                    tok.line, tok.column)
            self.advance()
            return MonoLit(negative=negative)
        if tok.kind == "name" and tok.text == "zeta":
            self.advance()
            self.expect("(", "'('")
            level = self.parse_int()
            self.expect(")", "')'")
            power = 1
            if self.peek().kind == "^":
                self.advance()
                power = self.parse_int()
            q_exp = None
            if self.peek().kind == "*":
                save = self.pos
                self.advance()
                nxt = self.peek()
                if nxt.kind == "name" and nxt.text == "q":
                    self.advance()
                    q_exp = 1
                    if self.peek().kind == "^":
                        self.advance()
                        q_exp = self.parse_int()
                else:
                    self.pos = save
            return MonoLit(negative, level, power, q_exp)
        if tok.kind == "name" and tok.text == "q":
            self.advance()
            q_exp = 1
            if self.peek().kind == "^":
                self.advance()
                q_exp = self.parse_int()
            return MonoLit(negative, None, 1, q_exp)
        raise ExprSyntaxError(
            "arguments of j/m/Delta/Psi/h must be monomials: "
            "use [-][zeta(L)^k *] q^e, or 1 / -1",
            tok.line, tok.column, ["1", "q^e", "zeta(L)^k"])


def parse(source: str):
    """Parse an expression; raises ExprSyntaxError with line/column on failure."""
    parser = _Parser(_tokenize(source))
    node = parser.parse_expr()
    tok = parser.peek()
    if tok.kind != "end":
        raise ExprSyntaxError(f"trailing input {tok.text!r}", tok.line, tok.column)
    return node


# -- printing ---------------------------------------------------------------------


def render(node) -> str:
    """Deterministic text form; parse(render(e)) evaluates to the same series."""
    if isinstance(node, Lit):
        return str(node.value)
    if isinstance(node, QPow):
        return "q" if node.exp == 1 else f"q^{node.exp}"
    if isinstance(node, ZetaPow):
        body = f"zeta({node.level})"
        return body if node.power == 1 else f"{body}^{node.power}"
    if isinstance(node, EulerJ):
        return f"J({node.index})"
    if isinstance(node, Theta):
        return f"j({node.z.render()}; q^{node.base})"
    if isinstance(node, AppellM):
        return f"m({node.x.render()}, q^{node.base}, {node.z.render()})"
    if isinstance(node, SwitchDelta):
        return f"Delta({node.x.render()}, {node.z1.render()}, {node.z0.render()}; q^{node.base})"
    if isinstance(node, OrthoPsi):
        return (f"Psi({node.k}, {node.n}, {node.x.render()}, {node.z.render()}, "
                f"{node.zp.render()}; q^{node.base})")
    if isinstance(node, HSum):
        return f"h({node.x.render()}; q^{node.base})"
    if isinstance(node, TSeriesNode):
        return "T2()" if node.m2 else "T()"
    if isinstance(node, DevNode):
        return f"{'Dev2' if node.m2 else 'Dev'}({node.a}, {node.M})"
    if isinstance(node, Pick):
        return f"pick({render(node.inner)}, {node.residue}, {node.modulus})"
    if isinstance(node, Neg):
        return f"-({render(node.inner)})"
    if isinstance(node, BinOp):
        return f"({render(node.left)} {node.op} {render(node.right)})"
    if isinstance(node, Pow):
        return f"({render(node.base)})^{node.exponent}"
    raise TypeError(f"cannot render {node!r}")


# -- evaluation -----------------------------------------------------------------


def evaluate(node, prec: int) -> QSeries:
    """Evaluate through the kernel at uniform target precision.

    Pole, invertibility, and level errors are re-raised with the offending
    sub-expression attached.
    """
    try:
        return _eval(node, prec)
    except (PoleError, NotInvertible, LevelOverflow, ZeroDivisionError) as exc:
        raise type(exc)(f"{exc} [while evaluating {render(node)}]") from None


def _eval(node, prec: int) -> QSeries:
    if isinstance(node, Lit):
        return QSeries.constant(node.value, prec)
    if isinstance(node, QPow):
        return QSeries.term(1, node.exp, prec)
    if isinstance(node, ZetaPow):
        return QSeries.constant(zeta(node.level, node.power), prec)
    if isinstance(node, EulerJ):
        return euler_J(node.index, prec)
    if isinstance(node, Theta):
        return theta_j(node.z.to_monomial(), node.base, prec)
    if isinstance(node, AppellM):
        return m_series(node.x.to_monomial(), node.base, node.z.to_monomial(), prec)
    if isinstance(node, SwitchDelta):
        return delta(node.x.to_monomial(), node.z1.to_monomial(), node.z0.to_monomial(),
                     node.base, prec)
    if isinstance(node, OrthoPsi):
        return psi(node.k, node.n, node.x.to_monomial(), node.z.to_monomial(),
                   node.zp.to_monomial(), node.base, prec)
    if isinstance(node, HSum):
        return h_series(node.x.to_monomial(), node.base, prec)
    if isinstance(node, TSeriesNode):
        return T2_series(prec) if node.m2 else T_series(prec)
    if isinstance(node, DevNode):
        return deviation(node.a, node.M, "m2" if node.m2 else "rank", prec)
    if isinstance(node, Pick):
        inner = _eval(node.inner, prec * node.modulus + node.residue % node.modulus)
        return extract_progression(inner, node.residue, node.modulus)
    if isinstance(node, Neg):
        return -_eval(node.inner, prec)
    if isinstance(node, BinOp):
        lhs = _eval(node.left, prec)
        rhs = _eval(node.right, prec)
        if node.op == "+":
            return lhs + rhs
        if node.op == "-":
            return lhs - rhs
        if node.op == "*":
            return lhs * rhs
        try:
            return lhs * rhs.inverse()
        except NotInvertible:
            raise NotInvertible(f"division by a non-invertible series [{render(node.right)}]") from None
    if isinstance(node, Pow):
        return _eval(node.base, prec) ** node.exponent
    raise TypeError(f"cannot evaluate {node!r}")
