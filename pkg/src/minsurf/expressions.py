"""Complex-analytic expressions in one variable z.

Provides a small closed language (literals, + - * / ^, exp/log/sin/cos/
sinh/cosh) with exact symbolic differentiation and numpy-vectorized
evaluation. Evaluation never raises on singular input: division by a
near-zero modulus, log of zero, or any non-finite intermediate is flagged
as a "pole" outcome that callers must handle.

Grammar (standard precedence, ^ binds tightest and is right-associative):

    expr   := term (('+'|'-') term)*
    term   := unary (('*'|'/') unary)*
    unary  := ('+'|'-')* power
    power  := atom ['^' unary]          # exponent must fold to a constant
    atom   := NUMBER | 'z' | 'i' | 'pi' | 'e' | FUNC '(' expr ')' | '(' expr ')'

Exponents on a non-constant base must be integers; constant^constant is
folded at parse time (principal branch).
"""

from __future__ import annotations

import math
import re

import numpy as np

from .errors import ParseError

# Modulus below which a divisor or log argument counts as a pole.
POLE_EPS = 1e-300

_FUNCTIONS = ("exp", "log", "sin", "cos", "sinh", "cosh")

_NUMPY_FUNC = {
    "exp": np.exp,
    "log": np.log,
    "sin": np.sin,
    "cos": np.cos,
    "sinh": np.sinh,
    "cosh": np.cosh,
}

# Printing precedence levels.
_PREC_ADD = 1
_PREC_MUL = 2
_PREC_NEG = 3
_PREC_POW = 4
_PREC_ATOM = 5


class Node:
    """Base AST node. Subclasses implement eval/deriv/printing."""

    prec = _PREC_ATOM

    def eval(self, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Return (values, pole_mask) for the complex array z."""
        raise NotImplementedError

    def deriv(self) -> "Node":
        raise NotImplementedError

    def is_const(self) -> bool:
        return False

    def to_str(self) -> str:
        raise NotImplementedError

    def __str__(self) -> str:
        return self.to_str()

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.to_str()!r})"


class Var(Node):
    def eval(self, z):
        return z, np.zeros(z.shape, dtype=bool)

    def deriv(self):
        return Const(1.0)

    def to_str(self):
        return "z"

    def __eq__(self, other):
        return isinstance(other, Var)

    def __hash__(self):
        return hash("z")


class Const(Node):
    def __init__(self, value: complex):
        self.value = complex(value)

    def eval(self, z):
        vals = np.full(z.shape, self.value, dtype=np.complex128)
        return vals, np.zeros(z.shape, dtype=bool)

    def deriv(self):
        return Const(0.0)

    def is_const(self):
        return True

    def to_str(self):
        text = _format_complex(self.value)
        # A leading minus would re-parse as a Neg node around a positive
        # constant; parenthesize so print/parse round-trips structurally.
        if text.startswith("-"):
            return f"({text})"
        return text

    def __eq__(self, other):
        return isinstance(other, Const) and other.value == self.value

    def __hash__(self):
        return hash(self.value)


class _Binary(Node):
    op = "?"
    prec = _PREC_ADD

    def __init__(self, left: Node, right: Node):
        self.left = left
        self.right = right

    def __eq__(self, other):
        return (
            type(other) is type(self)
            and other.left == self.left
            and other.right == self.right
        )

    def __hash__(self):
        return hash((type(self).__name__, self.left, self.right))

    def to_str(self):
        lhs = _paren(self.left, self.prec, strict=False)
        # - / ^ are not associative on the right.
        rhs = _paren(self.right, self.prec, strict=True)
        if self.prec == _PREC_ADD:
            return f"{lhs} {self.op} {rhs}"
        return f"{lhs}{self.op}{rhs}"


class Add(_Binary):
    op = "+"
    prec = _PREC_ADD

    def eval(self, z):
        a, pa = self.left.eval(z)
        b, pb = self.right.eval(z)
        return a + b, pa | pb

    def deriv(self):
        return add(self.left.deriv(), self.right.deriv())

    def to_str(self):
        lhs = _paren(self.left, self.prec, strict=False)
        rhs = _paren(self.right, self.prec, strict=False)
        return f"{lhs} + {rhs}"


class Sub(_Binary):
    op = "-"
    prec = _PREC_ADD

    def eval(self, z):
        a, pa = self.left.eval(z)
        b, pb = self.right.eval(z)
        return a - b, pa | pb

    def deriv(self):
        return sub(self.left.deriv(), self.right.deriv())


class Mul(_Binary):
    op = "*"
    prec = _PREC_MUL

    def eval(self, z):
        a, pa = self.left.eval(z)
        b, pb = self.right.eval(z)
        return a * b, pa | pb

    def deriv(self):
        return add(
            mul(self.left.deriv(), self.right),
            mul(self.left, self.right.deriv()),
        )


class Div(_Binary):
    op = "/"
    prec = _PREC_MUL

    def eval(self, z):
        a, pa = self.left.eval(z)
        b, pb = self.right.eval(z)
        bad = np.abs(b) < POLE_EPS
        safe = np.where(bad, 1.0, b)
        return a / safe, pa | pb | bad

    def deriv(self):
        num = sub(
            mul(self.left.deriv(), self.right),
            mul(self.left, self.right.deriv()),
        )
        return div(num, pow_int(self.right, 2))


class Neg(Node):
    prec = _PREC_NEG

    def __init__(self, arg: Node):
        self.arg = arg

    def eval(self, z):
        a, pa = self.arg.eval(z)
        return -a, pa

    def deriv(self):
        return neg(self.arg.deriv())

    def to_str(self):
        return "-" + _paren(self.arg, self.prec, strict=True)

    def __eq__(self, other):
        return isinstance(other, Neg) and other.arg == self.arg

    def __hash__(self):
        return hash(("neg", self.arg))


class Pow(Node):
    """Integer power of an arbitrary base; keeps evaluation single-valued."""

    prec = _PREC_POW

    def __init__(self, base: Node, exponent: int):
        self.base = base
        self.exponent = int(exponent)

    def eval(self, z):
        a, pa = self.base.eval(z)
        if self.exponent < 0:
            bad = np.abs(a) < POLE_EPS
            safe = np.where(bad, 1.0, a)
            return safe ** self.exponent, pa | bad
        return a ** self.exponent, pa

    def deriv(self):
        # d/dz base^n = n * base^(n-1) * base'
        return mul(
            mul(Const(self.exponent), pow_int(self.base, self.exponent - 1)),
            self.base.deriv(),
        )

    def to_str(self):
        base = _paren(self.base, self.prec, strict=True)
        if self.exponent < 0:
            return f"{base}^({self.exponent})"
        return f"{base}^{self.exponent}"

    def __eq__(self, other):
        return (
            isinstance(other, Pow)
            and other.base == self.base
            and other.exponent == self.exponent
        )

    def __hash__(self):
        return hash(("pow", self.base, self.exponent))


class Call(Node):
    prec = _PREC_ATOM

    def __init__(self, name: str, arg: Node):
        if name not in _FUNCTIONS:
            raise ValueError(f"unsupported function {name!r}")
        self.name = name
        self.arg = arg

    def eval(self, z):
        a, pa = self.arg.eval(z)
        if self.name == "log":
            bad = np.abs(a) < POLE_EPS
            safe = np.where(bad, 1.0, a)
            return np.log(safe), pa | bad
        return _NUMPY_FUNC[self.name](a), pa

    def deriv(self):
        inner = self.arg.deriv()
        if self.name == "exp":
            outer = Call("exp", self.arg)
        elif self.name == "log":
            return div(inner, self.arg)
        elif self.name == "sin":
            outer = Call("cos", self.arg)
        elif self.name == "cos":
            return neg(mul(inner, Call("sin", self.arg)))
        elif self.name == "sinh":
            outer = Call("cosh", self.arg)
        else:  # cosh
            outer = Call("sinh", self.arg)
        return mul(inner, outer)

    def to_str(self):
        return f"{self.name}({self.arg.to_str()})"

    def __eq__(self, other):
        return (
            isinstance(other, Call)
            and other.name == self.name
            and other.arg == self.arg
        )

    def __hash__(self):
        return hash((self.name, self.arg))


def _paren(node: Node, parent_prec: int, strict: bool) -> str:
    text = node.to_str()
    if node.prec < parent_prec or (strict and node.prec == parent_prec):
        return f"({text})"
    return text


def _format_complex(value: complex) -> str:
    re_, im = value.real, value.imag
    if im == 0.0:
        return _format_real(re_)
    if re_ == 0.0:
        if im == 1.0:
            return "i"
        if im == -1.0:
            return "-i"
        return f"{_format_real(im)}*i"
    return f"({_format_real(re_)} + {_format_real(im)}*i)"


def _format_real(x: float) -> str:
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


# ---------------------------------------------------------------------------
# Smart constructors: constant folding only, no algebraic rewriting.


def _fold(node: Node) -> Node:
    """Collapse an all-constant node into a Const when evaluation is clean."""
    z = np.zeros((), dtype=np.complex128)
    vals, pole = node.eval(z)
    if pole or not (np.isfinite(vals.real) and np.isfinite(vals.imag)):
        return node
    return Const(complex(vals))


def add(a: Node, b: Node) -> Node:
    if a == Const(0.0):
        return b
    if b == Const(0.0):
        return a
    node = Add(a, b)
    return _fold(node) if a.is_const() and b.is_const() else node


def sub(a: Node, b: Node) -> Node:
    if b == Const(0.0):
        return a
    if a == Const(0.0):
        return neg(b)
    node = Sub(a, b)
    return _fold(node) if a.is_const() and b.is_const() else node


def mul(a: Node, b: Node) -> Node:
    if a == Const(0.0) or b == Const(0.0):
        return Const(0.0)
    if a == Const(1.0):
        return b
    if b == Const(1.0):
        return a
    node = Mul(a, b)
    return _fold(node) if a.is_const() and b.is_const() else node


def div(a: Node, b: Node) -> Node:
    if a == Const(0.0) and not b == Const(0.0):
        return Const(0.0)
    if b == Const(1.0):
        return a
    node = Div(a, b)
    return _fold(node) if a.is_const() and b.is_const() else node


def neg(a: Node) -> Node:
    if a.is_const():
        return Const(-a.value)  # type: ignore[attr-defined]
    return Neg(a)


def pow_int(base: Node, exponent: int) -> Node:
    if exponent == 0:
        return Const(1.0)
    if exponent == 1:
        return base
    node = Pow(base, exponent)
    return _fold(node) if base.is_const() else node


# ---------------------------------------------------------------------------
# Tokenizer / parser.

_TOKEN_RE = re.compile(
    r"""
    (?P<num>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?)
    |(?P<ident>[A-Za-z_][A-Za-z_0-9]*)
    |(?P<op>[-+*/^()])
    |(?P<ws>\s+)
    """,
    re.VERBOSE,
)


class _Token:
    __slots__ = ("kind", "text", "offset")

    def __init__(self, kind: str, text: str, offset: int):
        self.kind = kind
        self.text = text
        self.offset = offset


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup != "ws":
            tokens.append(_Token(m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(_Token("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op: str):
        tok = self.peek()
        if tok.kind != "op" or tok.text != op:
            raise ParseError(f"expected {op!r}", tok.offset)
        return self.advance()

    def parse(self) -> Node:
        node = self.parse_expr()
        tok = self.peek()
        if tok.kind != "eof":
            raise ParseError(f"unexpected trailing input {tok.text!r}", tok.offset)
        return node

    def parse_expr(self) -> Node:
        node = self.parse_term()
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text in "+-":
                self.advance()
                rhs = self.parse_term()
                node = add(node, rhs) if tok.text == "+" else sub(node, rhs)
            else:
                return node

    def parse_term(self) -> Node:
        node = self.parse_unary()
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text in "*/":
                self.advance()
                rhs = self.parse_unary()
                node = mul(node, rhs) if tok.text == "*" else div(node, rhs)
            else:
                return node

    def parse_unary(self) -> Node:
        tok = self.peek()
        if tok.kind == "op" and tok.text in "+-":
            self.advance()
            inner = self.parse_unary()
            return inner if tok.text == "+" else neg(inner)
        return self.parse_power()

    def parse_power(self) -> Node:
        base = self.parse_atom()
        tok = self.peek()
        if tok.kind == "op" and tok.text == "^":
            self.advance()
            exp_tok = self.peek()
            exponent = self.parse_unary()  # right-associative via recursion
            return self._make_pow(base, exponent, exp_tok.offset)
        return base

    def _make_pow(self, base: Node, exponent: Node, offset: int) -> Node:
        if not exponent.is_const():
            raise ParseError("exponent must be a constant", offset)
        value = exponent.value  # type: ignore[attr-defined]
        is_integer = value.imag == 0.0 and float(value.real).is_integer()
        if base.is_const():
            # Constant^constant folds via the principal branch.
            if is_integer:
                return pow_int(base, int(value.real))
            folded = base.value ** value  # type: ignore[attr-defined]
            return Const(folded)
        if not is_integer:
            raise ParseError(
                "non-integer exponent requires a constant base", offset
            )
        return pow_int(base, int(value.real))

    def parse_atom(self) -> Node:
        tok = self.peek()
        if tok.kind == "num":
            self.advance()
            return Const(float(tok.text))
        if tok.kind == "ident":
            self.advance()
            name = tok.text
            if name == "z":
                return Var()
            if name == "i":
                return Const(1j)
            if name == "pi":
                return Const(math.pi)
            if name == "e":
                return Const(math.e)
            if name in _FUNCTIONS:
                self.expect_op("(")
                arg = self.parse_expr()
                self.expect_op(")")
                return Call(name, arg)
            raise ParseError(f"unknown identifier {name!r}", tok.offset)
        if tok.kind == "op" and tok.text == "(":
            self.advance()
            node = self.parse_expr()
            self.expect_op(")")
            return node
        raise ParseError("expected a value", tok.offset)


# ---------------------------------------------------------------------------
# Public interface.


class Expression:
    """Immutable wrapper around a parsed AST.

    Evaluation is pure and safe for concurrent use; differentiation returns
    a new Expression.
    """

    __slots__ = ("root",)

    def __init__(self, root: Node):
        self.root = root

    def evaluate(self, zeta: complex) -> complex | None:
        """Evaluate at a single point; None signals a pole/invalid outcome."""
        z = np.asarray(zeta, dtype=np.complex128)
        with np.errstate(all="ignore"):
            vals, pole = self.root.eval(z)
        bad = pole | ~np.isfinite(vals.real) | ~np.isfinite(vals.imag)
        if bad:
            return None
        return complex(vals)

    def evaluate_array(self, zz: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Vectorized evaluation: (values, pole_mask) over a complex array."""
        z = np.asarray(zz, dtype=np.complex128)
        with np.errstate(all="ignore"):
            vals, pole = self.root.eval(z)
        pole = pole | ~np.isfinite(vals.real) | ~np.isfinite(vals.imag)
        return vals, pole

    def differentiate(self) -> "Expression":
        return Expression(self.root.deriv())

    def __str__(self) -> str:
        return self.root.to_str()

    def __repr__(self) -> str:
        return f"Expression({self.root.to_str()!r})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Expression) and other.root == self.root

    def __hash__(self) -> int:
        return hash(self.root)


def parse(text: str) -> Expression:
    """Parse an expression string over the variable z."""
    return Expression(_Parser(text).parse())


def differentiate(expr: Expression) -> Expression:
    return expr.differentiate()


def evaluate(expr: Expression, zeta: complex) -> complex | None:
    return expr.evaluate(zeta)
