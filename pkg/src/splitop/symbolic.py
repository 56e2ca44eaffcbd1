"""Exact rational-function kernel over the coordinate-jet alphabet.

The alphabet has six base coordinates ``u1 u2 u3 v1 v2 v3``; trailing
apostrophes denote t-derivative jets (``u1'`` is the first derivative of
``u1``, and so on up to a configured maximum order).  Everything here is
exact: coefficients are arbitrary-precision rationals and floats only appear
when a :class:`PointState` holding floats is evaluated.

Equality of two rational expressions is decided by cross multiplication
(``a.num * b.den - b.num * a.den`` expands to the zero polynomial).  This is
sound and complete without any polynomial GCD machinery, so canonical forms
may carry unreduced common factors; evaluation and equality are unaffected.

Monomials are ordered graded-lexicographically (total degree first, then the
variable order ``u1 < u1' < u1'' < u2 < ... < v3''``), which makes printed
canonical forms byte-for-byte reproducible.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Union

BASES = ("u1", "u2", "u3", "v1", "v2", "v3")
DEFAULT_MAX_ORDER = 2

Number = Union[int, Fraction, float]


class ExprError(ValueError):
    """Base class for kernel errors."""


class ParseError(ExprError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class DerivOrderError(ExprError):
    """Derivative order exceeds the configured maximum."""


class ZeroDenominator(ExprError):
    """Denominator expands to the identically-zero polynomial."""


class EvaluationError(ExprError):
    """Division by zero at a point, or a missing jet value."""


@dataclass(frozen=True, order=True)
class Sym:
    """One symbol: a base coordinate plus a derivative order."""

    base: int   # index into BASES
    order: int  # 0 = the coordinate itself, 1 = ', 2 = '', ...

    @property
    def name(self) -> str:
        return BASES[self.base] + "'" * self.order

    def __str__(self) -> str:
        return self.name


def sym(name: str) -> Sym:
    """Build a Sym from surface syntax like ``u2`` or ``v3''``."""
    m = re.fullmatch(r"([uv][123])('*)", name)
    if not m:
        raise ExprError(f"unknown symbol {name!r}")
    return Sym(BASES.index(m.group(1)), len(m.group(2)))


# A monomial is a tuple of (Sym, exponent) pairs sorted by Sym, exponents >= 1.
Monomial = tuple

_EMPTY: Monomial = ()


def _glex_key(mono: Monomial):
    # ascending sort by this key lists the graded-lex largest monomial first
    return (-sum(e for _, e in mono),
            tuple((s.base, s.order, -e) for s, e in mono))


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    merged = dict(a)
    for s, e in b:
        merged[s] = merged.get(s, 0) + e
    return tuple(sorted(merged.items()))


class Polynomial:
    """Sparse multivariate polynomial with exact rational coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, Fraction] | None = None):
        self.terms = {m: c for m, c in (terms or {}).items() if c != 0}

    @staticmethod
    def zero() -> "Polynomial":
        return Polynomial()

    @staticmethod
    def const(c: Number) -> "Polynomial":
        return Polynomial({_EMPTY: Fraction(c)})

    @staticmethod
    def var(s: Sym) -> "Polynomial":
        return Polynomial({((s, 1),): Fraction(1)})

    def is_zero(self) -> bool:
        return not self.terms

    def is_const(self) -> bool:
        return not self.terms or set(self.terms) == {_EMPTY}

    def const_value(self) -> Fraction:
        if not self.is_const():
            raise ExprError("polynomial is not constant")
        return self.terms.get(_EMPTY, Fraction(0))

    def __eq__(self, other) -> bool:
        return isinstance(other, Polynomial) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other: "Polynomial") -> "Polynomial":
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, Fraction(0)) + c
        return Polynomial(out)

    def __neg__(self) -> "Polynomial":
        return Polynomial({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, Fraction(0)) + c1 * c2
        return Polynomial(out)

    def scale(self, c: Fraction) -> "Polynomial":
        if c == 0:
            return Polynomial()
        return Polynomial({m: co * c for m, co in self.terms.items()})

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise ExprError("negative power on a bare polynomial")
        result = Polynomial.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def leading(self) -> tuple[Monomial, Fraction]:
        """Graded-lex leading (monomial, coefficient)."""
        if not self.terms:
            raise ExprError("zero polynomial has no leading term")
        m = min(self.terms, key=_glex_key)
        return m, self.terms[m]

    def max_deriv_order(self) -> int:
        return max((s.order for m in self.terms for s, _ in m), default=0)

    def diff_t(self, max_order: int = DEFAULT_MAX_ORDER) -> "Polynomial":
        """Total t-derivative: each jet symbol steps to the next order."""
        out: dict = {}
        for mono, coeff in self.terms.items():
            for i, (s, e) in enumerate(mono):
                if s.order + 1 > max_order:
                    raise DerivOrderError(
                        f"derivative of {s} exceeds maximum order {max_order}")
                bumped = Sym(s.base, s.order + 1)
                rest = mono[:i] + ((s, e - 1),) if e > 1 else mono[:i]
                rest = rest + mono[i + 1:]
                m = _mono_mul(rest, ((bumped, 1),))
                out[m] = out.get(m, Fraction(0)) + coeff * e
        return Polynomial(out)

    def diff_sym(self, s: Sym) -> "Polynomial":
        """Partial derivative with respect to one symbol."""
        out: dict = {}
        for mono, coeff in self.terms.items():
            for i, (t, e) in enumerate(mono):
                if t != s:
                    continue
                rest = mono[:i] + ((t, e - 1),) if e > 1 else mono[:i]
                rest = rest + mono[i + 1:]
                out[rest] = out.get(rest, Fraction(0)) + coeff * e
        return Polynomial(out)

    def substitute(self, mapping: Mapping[Sym, "Polynomial"]) -> "Polynomial":
        result = Polynomial()
        for mono, coeff in self.terms.items():
            term = Polynomial.const(coeff)
            for s, e in mono:
                term = term * (mapping.get(s, Polynomial.var(s)) ** e)
            result = result + term
        return result

    def evaluate(self, value_of: Callable[[Sym], Number]) -> Number:
        total: Number = 0
        for mono, coeff in self.terms.items():
            val: Number = coeff
            for s, e in mono:
                val = val * value_of(s) ** e
            total = total + val
        return total

    def exact_div(self, divisor: "Polynomial") -> "Polynomial":
        """Exact polynomial quotient; raises if the division has a remainder."""
        if divisor.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = self
        quot: dict = {}
        dm, dc = divisor.leading()
        dvars = dict(dm)
        while not rem.is_zero():
            rm, rc = rem.leading()
            rvars = dict(rm)
            qvars = {}
            for s, e in dvars.items():
                if rvars.get(s, 0) < e:
                    raise ExprError("inexact polynomial division")
                q = rvars[s] - e
                if q:
                    qvars[s] = q
            for s, e in rvars.items():
                if s not in dvars and e:
                    qvars[s] = e
            qm = tuple(sorted(qvars.items()))
            qc = rc / dc
            quot[qm] = quot.get(qm, Fraction(0)) + qc
            rem = rem - Polynomial({qm: qc}) * divisor
        return Polynomial(quot)

    def _term_str(self, mono: Monomial, coeff: Fraction) -> str:
        # normalized polynomials carry integer coefficients
        parts = []
        mag = abs(coeff)
        if mag != 1 or not mono:
            parts.append(str(mag.numerator) if mag.denominator == 1 else str(mag))
        for s, e in sorted(mono):
            parts.append(f"{s.name}^{e}" if e > 1 else s.name)
        return "*".join(parts)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        monos = sorted(self.terms, key=_glex_key)
        out = []
        for i, m in enumerate(monos):
            c = self.terms[m]
            if i == 0:
                out.append(("-" if c < 0 else "") + self._term_str(m, c))
            else:
                out.append((" - " if c < 0 else " + ") + self._term_str(m, c))
        return "".join(out)

    def __repr__(self) -> str:
        return f"Polynomial({self})"


def _int_gcd(values: Iterable[int]) -> int:
    g = 0
    for v in values:
        g = math.gcd(g, abs(v))
    return g


class RationalExpr:
    """Canonical numerator/denominator pair of expanded polynomials.

    Normalization: zero is 0/1; otherwise both polynomials are scaled by one
    rational so every coefficient is an integer, the collective gcd is 1, and
    the denominator's graded-lex leading coefficient is positive.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Polynomial | None = None):
        den = Polynomial.const(1) if den is None else den
        if den.is_zero():
            raise ZeroDenominator("denominator is identically zero")
        if num.is_zero():
            self.num = Polynomial.zero()
            self.den = Polynomial.const(1)
            return
        coeffs = list(num.terms.values()) + list(den.terms.values())
        scale = Fraction(math.lcm(*(c.denominator for c in coeffs)),
                         _int_gcd(c.numerator for c in coeffs))
        if den.leading()[1] * scale < 0:
            scale = -scale
        self.num = num.scale(scale)
        self.den = den.scale(scale)

    @staticmethod
    def const(c: Number) -> "RationalExpr":
        f = Fraction(c)
        return RationalExpr(Polynomial.const(f.numerator),
                            Polynomial.const(f.denominator))

    @staticmethod
    def var(s: Sym | str) -> "RationalExpr":
        return RationalExpr(Polynomial.var(sym(s) if isinstance(s, str) else s))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __add__(self, other: "RationalExpr") -> "RationalExpr":
        return RationalExpr(self.num * other.den + other.num * self.den,
                            self.den * other.den)

    def __sub__(self, other: "RationalExpr") -> "RationalExpr":
        return RationalExpr(self.num * other.den - other.num * self.den,
                            self.den * other.den)

    def __neg__(self) -> "RationalExpr":
        return RationalExpr(-self.num, self.den)

    def __mul__(self, other: "RationalExpr") -> "RationalExpr":
        return RationalExpr(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: "RationalExpr") -> "RationalExpr":
        return RationalExpr(self.num * other.den, self.den * other.num)

    def __pow__(self, n: int) -> "RationalExpr":
        if n >= 0:
            return RationalExpr(self.num ** n, self.den ** n)
        return RationalExpr(self.den ** (-n), self.num ** (-n))

    def equals(self, other: "RationalExpr") -> bool:
        """Exact equality as rational functions, by cross multiplication."""
        return (self.num * other.den - other.num * self.den).is_zero()

    def diff_t(self, max_order: int = DEFAULT_MAX_ORDER) -> "RationalExpr":
        """d/dt by the quotient rule over the jet alphabet."""
        return RationalExpr(
            self.num.diff_t(max_order) * self.den
            - self.num * self.den.diff_t(max_order),
            self.den * self.den)

    def diff_sym(self, s: Sym) -> "RationalExpr":
        return RationalExpr(
            self.num.diff_sym(s) * self.den - self.num * self.den.diff_sym(s),
            self.den * self.den)

    def substitute(self, mapping: Mapping[Sym, Polynomial]) -> "RationalExpr":
        return RationalExpr(self.num.substitute(mapping),
                            self.den.substitute(mapping))

    def max_deriv_order(self) -> int:
        return max(self.num.max_deriv_order(), self.den.max_deriv_order())

    def evaluate(self, point: "PointState") -> Number:
        """Exact rational at an exact point; IEEE double at a float point."""
        num = self.num.evaluate(point.value)
        den = self.den.evaluate(point.value)
        if den == 0:
            raise EvaluationError(f"denominator vanishes at {point}")
        return num / den

    def __eq__(self, other) -> bool:
        # structural equality of the canonical representation
        return (isinstance(other, RationalExpr)
                and self.num == other.num and self.den == other.den)

    def __hash__(self):
        return hash((self.num, self.den))

    def _poly_str(self, poly: Polynomial, denominator: bool) -> str:
        s = str(poly)
        if len(poly.terms) > 1:
            return f"({s})"
        if denominator and poly.terms:
            (mono, coeff), = poly.terms.items()
            factors = len(mono) + (0 if abs(coeff) == 1 and mono else 1)
            if factors > 1:
                return f"({s})"
        return s

    def __str__(self) -> str:
        return (self._poly_str(self.num, False) + "/"
                + self._poly_str(self.den, True))

    def __repr__(self) -> str:
        return f"RationalExpr({self})"


ZERO = RationalExpr(Polynomial.zero())
ONE = RationalExpr(Polynomial.const(1))


# ---------------------------------------------------------------------------
# Point values


@dataclass(frozen=True)
class PointState:
    """Values of the six coordinates and their jets at one parameter value."""

    u: tuple
    v: tuple
    du: tuple = (0, 0, 0)
    dv: tuple = (0, 0, 0)
    ddu: tuple = (0, 0, 0)
    ddv: tuple = (0, 0, 0)

    def __post_init__(self):
        for name in ("u", "v", "du", "dv", "ddu", "ddv"):
            if len(getattr(self, name)) != 3:
                raise ExprError(f"{name} must have three entries")
        if any(x == 0 for x in self.u) or any(x == 0 for x in self.v):
            raise ExprError("coordinates u_i and v_i must all be nonzero")

    @staticmethod
    def all_ones(du=(0, 0, 0), dv=(0, 0, 0)) -> "PointState":
        return PointState((1, 1, 1), (1, 1, 1), du, dv)

    def value(self, s: Sym) -> Number:
        jets = ((self.u, self.v), (self.du, self.dv), (self.ddu, self.ddv))
        if s.order >= len(jets):
            raise EvaluationError(f"no value stored for {s}")
        half, idx = divmod(s.base, 3)
        return jets[s.order][half][idx]

    def coords(self) -> tuple:
        return tuple(self.u) + tuple(self.v)

    def is_exact(self) -> bool:
        vals = self.coords() + tuple(self.du) + tuple(self.dv) \
            + tuple(self.ddu) + tuple(self.ddv)
        return all(isinstance(x, (int, Fraction)) for x in vals)


# ---------------------------------------------------------------------------
# Surface grammar
#
#   expr  := term (('+'|'-') term)*
#   term  := unary (('*'|'/') unary)*
#   unary := '-' unary | power
#   power := atom ('^' exponent)?          exponent: optionally signed integer
#   atom  := INT | SYMBOL | '(' expr ')'
#
# '^' binds tightest; unary minus binds tighter than '*' but looser than '^'.


@dataclass(frozen=True)
class Const:
    value: Fraction


@dataclass(frozen=True)
class Var:
    symbol: Sym


@dataclass(frozen=True)
class Add:
    left: object
    right: object


@dataclass(frozen=True)
class Sub:
    left: object
    right: object


@dataclass(frozen=True)
class Mul:
    left: object
    right: object


@dataclass(frozen=True)
class Div:
    left: object
    right: object


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: int


@dataclass(frozen=True)
class Neg:
    operand: object


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z]\w*'*)|([-+*/^()]))")


def _tokenize(text: str, max_order: int):
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        if m.group(1):
            tokens.append(("num", int(m.group(1)), m.start(1)))
        elif m.group(2):
            name = m.group(2)
            sm = re.fullmatch(r"([uv][123])('*)", name)
            if not sm:
                raise ParseError(f"unknown identifier {name!r}", m.start(2))
            order = len(sm.group(2))
            if order > max_order:
                raise ParseError(
                    f"derivative order {order} exceeds maximum {max_order}",
                    m.start(2))
            tokens.append(("sym", Sym(BASES.index(sm.group(1)), order),
                           m.start(2)))
        else:
            tokens.append(("op", m.group(3), m.start(3)))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op):
        kind, val, pos = self.next()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}", pos)

    def parse_expr(self):
        node = self.parse_term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.next()
                rhs = self.parse_term()
                node = Add(node, rhs) if val == "+" else Sub(node, rhs)
            else:
                return node

    def parse_term(self):
        node = self.parse_unary()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "*/":
                self.next()
                rhs = self.parse_unary()
                node = Mul(node, rhs) if val == "*" else Div(node, rhs)
            else:
                return node

    def parse_unary(self):
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.next()
            return Neg(self.parse_unary())
        return self.parse_power()

    def parse_power(self):
        base = self.parse_atom()
        kind, val, pos = self.peek()
        if kind == "op" and val == "^":
            self.next()
            return Pow(base, self.parse_exponent())
        return base

    def parse_exponent(self) -> int:
        sign = 1
        kind, val, pos = self.peek()
        if kind == "op" and val == "-":
            self.next()
            sign = -1
            kind, val, pos = self.peek()
        if kind == "op" and val == "(":
            self.next()
            n = self.parse_exponent()
            self.expect_op(")")
            return sign * n
        if kind != "num":
            raise ParseError("exponent must be an integer", pos)
        self.next()
        return sign * val

    def parse_atom(self):
        kind, val, pos = self.next()
        if kind == "num":
            return Const(Fraction(val))
        if kind == "sym":
            return Var(val)
        if kind == "op" and val == "(":
            node = self.parse_expr()
            self.expect_op(")")
            return node
        if kind == "end":
            raise ParseError("unexpected end of input", pos)
        raise ParseError(f"unexpected token {val!r}", pos)


def parse(text: str, max_order: int = DEFAULT_MAX_ORDER):
    """Parse surface syntax into an AST; whitespace-insensitive."""
    parser = _Parser(_tokenize(text, max_order))
    node = parser.parse_expr()
    kind, val, pos = parser.peek()
    if kind != "end":
        raise ParseError(f"trailing input starting with {val!r}", pos)
    return node


def canonicalize(node) -> RationalExpr:
    """Reduce an AST to a canonical numerator/denominator pair."""
    if isinstance(node, Const):
        return RationalExpr.const(node.value)
    if isinstance(node, Var):
        return RationalExpr.var(node.symbol)
    if isinstance(node, Add):
        return canonicalize(node.left) + canonicalize(node.right)
    if isinstance(node, Sub):
        return canonicalize(node.left) - canonicalize(node.right)
    if isinstance(node, Mul):
        return canonicalize(node.left) * canonicalize(node.right)
    if isinstance(node, Div):
        return canonicalize(node.left) / canonicalize(node.right)
    if isinstance(node, Neg):
        return -canonicalize(node.operand)
    if isinstance(node, Pow):
        if not isinstance(node.exponent, int):
            raise ExprError("exponent must be an integer")
        return canonicalize(node.base) ** node.exponent
    raise ExprError(f"unknown AST node {node!r}")


def expr(text: str, max_order: int = DEFAULT_MAX_ORDER) -> RationalExpr:
    """Parse and canonicalize in one step."""
    return canonicalize(parse(text, max_order))
