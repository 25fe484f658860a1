"""Parser and evaluator for complex functions of one variable.

The language covers rational arithmetic, integer powers and the three
functions sqrt, exp, log, which is enough to write the kernels and factors
this toolkit works with::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := '-' factor | atom ('^' int)?
    atom   := number | 'i' | 't' | 'z' | func '(' expr ')' | '(' expr ')'
    func   := 'sqrt' | 'exp' | 'log'

't' and 'z' both name the single variable.  '^' takes an integer literal
exponent (possibly negative) and binds tighter than unary minus, so
``-t^2`` is ``-(t^2)``.  sqrt and log use the principal branch: cut along
the negative real axis, argument in (-pi, pi].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EvalDomainError, ExprSyntaxError


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Number:
    value: complex


@dataclass(frozen=True)
class Variable:
    pass


@dataclass(frozen=True)
class Add:
    left: "ExprAst"
    right: "ExprAst"


@dataclass(frozen=True)
class Sub:
    left: "ExprAst"
    right: "ExprAst"


@dataclass(frozen=True)
class Mul:
    left: "ExprAst"
    right: "ExprAst"


@dataclass(frozen=True)
class Div:
    left: "ExprAst"
    right: "ExprAst"


@dataclass(frozen=True)
class Neg:
    operand: "ExprAst"


@dataclass(frozen=True)
class Pow:
    base: "ExprAst"
    exponent: int


@dataclass(frozen=True)
class Sqrt:
    operand: "ExprAst"


@dataclass(frozen=True)
class Exp:
    operand: "ExprAst"


@dataclass(frozen=True)
class Log:
    operand: "ExprAst"


ExprAst = Number | Variable | Add | Sub | Mul | Div | Neg | Pow | Sqrt | Exp | Log

_FUNCS = {"sqrt": Sqrt, "exp": Exp, "log": Log}


# ---------------------------------------------------------------------------
# Tokenizer

_SINGLE = set("+-*/^()")


def _tokenize(source: str):
    """Yield (kind, text, offset) triples; kinds: num, name, op, end."""
    tokens = []
    pos = 0
    n = len(source)
    while pos < n:
        ch = source[pos]
        if ch.isspace():
            pos += 1
            continue
        if ch in _SINGLE:
            tokens.append(("op", ch, pos))
            pos += 1
            continue
        if ch.isdigit() or ch == ".":
            start = pos
            while pos < n and (source[pos].isdigit() or source[pos] == "."):
                pos += 1
            # optional exponent part
            if pos < n and source[pos] in "eE":
                mark = pos
                pos += 1
                if pos < n and source[pos] in "+-":
                    pos += 1
                if pos < n and source[pos].isdigit():
                    while pos < n and source[pos].isdigit():
                        pos += 1
                else:
                    pos = mark
            text = source[start:pos]
            try:
                float(text)
            except ValueError:
                raise ExprSyntaxError("malformed number", start, {"number"}) from None
            tokens.append(("num", text, start))
            continue
        if ch.isalpha():
            start = pos
            while pos < n and source[pos].isalnum():
                pos += 1
            tokens.append(("name", source[start:pos], start))
            continue
        raise ExprSyntaxError(f"unexpected character {ch!r}", pos, {"token"})
    tokens.append(("end", "", n))
    return tokens


# ---------------------------------------------------------------------------
# Parser


class _Parser:
    def __init__(self, source: str):
        self.tokens = _tokenize(source)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, expected):
        kind, text, offset = self.peek()
        what = "end of input" if kind == "end" else repr(text)
        raise ExprSyntaxError(f"unexpected {what}", offset, expected)

    def expect_op(self, op):
        kind, text, offset = self.peek()
        if kind == "op" and text == op:
            return self.advance()
        self.fail({op})

    def parse(self):
        node = self.expr()
        if self.peek()[0] != "end":
            self.fail({"operator", "end of input"})
        return node

    def expr(self):
        node = self.term()
        while self.peek()[:2] in (("op", "+"), ("op", "-")):
            op = self.advance()[1]
            rhs = self.term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def term(self):
        node = self.factor()
        while self.peek()[:2] in (("op", "*"), ("op", "/")):
            op = self.advance()[1]
            rhs = self.factor()
            node = Mul(node, rhs) if op == "*" else Div(node, rhs)
        return node

    def factor(self):
        if self.peek()[:2] == ("op", "-"):
            self.advance()
            return Neg(self.factor())
        node = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.advance()
            node = Pow(node, self.int_literal())
        return node

    def int_literal(self):
        sign = 1
        if self.peek()[:2] == ("op", "-"):
            self.advance()
            sign = -1
        kind, text, offset = self.peek()
        if kind != "num" or not text.isdigit():
            self.fail({"integer"})
        self.advance()
        return sign * int(text)

    def atom(self):
        kind, text, offset = self.peek()
        if kind == "num":
            self.advance()
            return Number(complex(float(text)))
        if kind == "name":
            if text == "i":
                self.advance()
                return Number(1j)
            if text in ("t", "z"):
                self.advance()
                return Variable()
            if text in _FUNCS:
                self.advance()
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return _FUNCS[text](arg)
            self.fail({"number", "i", "t", "z", "sqrt", "exp", "log"})
        if kind == "op" and text == "(":
            self.advance()
            node = self.expr()
            self.expect_op(")")
            return node
        self.fail({"number", "i", "t", "z", "function", "("})


def parse(source: str) -> ExprAst:
    """Parse expression text into an AST.

    Raises
    ------
    ExprSyntaxError
        With the byte offset of the failure and the expected token set.
    """
    return _Parser(source).parse()


# ---------------------------------------------------------------------------
# Printer


def to_source(ast: ExprAst) -> str:
    """Render an AST back to text with canonical parentheses.

    ``parse(to_source(parse(s)))`` equals ``parse(s)`` for every valid s.
    """
    if isinstance(ast, Number):
        v = ast.value
        if v == 1j:
            return "i"
        if v.imag == 0:
            return repr(v.real)
        if v.real == 0:
            return f"({repr(v.imag)}*i)"
        return f"({repr(v.real)}+{repr(v.imag)}*i)"
    if isinstance(ast, Variable):
        return "t"
    if isinstance(ast, Add):
        return f"({to_source(ast.left)}+{to_source(ast.right)})"
    if isinstance(ast, Sub):
        return f"({to_source(ast.left)}-{to_source(ast.right)})"
    if isinstance(ast, Mul):
        return f"({to_source(ast.left)}*{to_source(ast.right)})"
    if isinstance(ast, Div):
        return f"({to_source(ast.left)}/{to_source(ast.right)})"
    if isinstance(ast, Neg):
        return f"(-{to_source(ast.operand)})"
    if isinstance(ast, Pow):
        return f"{_pow_base(ast.base)}^{ast.exponent}"
    if isinstance(ast, Sqrt):
        return f"sqrt({to_source(ast.operand)})"
    if isinstance(ast, Exp):
        return f"exp({to_source(ast.operand)})"
    if isinstance(ast, Log):
        return f"log({to_source(ast.operand)})"
    raise TypeError(f"not an AST node: {ast!r}")


def _pow_base(node):
    # the grammar allows one '^' per factor, so any base other than a
    # plain atom must be parenthesized (including nested Pow)
    text = to_source(node)
    if isinstance(node, (Variable, Sqrt, Exp, Log)):
        return text
    return text if text.startswith("(") and isinstance(node, (Add, Sub, Mul, Div, Neg)) \
        else f"({text})"


# ---------------------------------------------------------------------------
# Evaluation


def evaluate(ast: ExprAst, z):
    """Evaluate at a complex point or numpy array of points.

    Uses principal branches for sqrt and log.  Raises EvalDomainError on
    division by exact zero, log of exact zero, or a negative power of
    exact zero, identifying an offending point.
    """
    scalar = np.isscalar(z) or isinstance(z, complex)
    zz = np.asarray(z, dtype=complex)
    values = _eval(ast, zz)
    if scalar:
        return complex(values)
    return values


def evaluate_masked(ast: ExprAst, z):
    """Evaluate over an array, absorbing singularities.

    Returns (values, ok) where ok is False at points whose result is not
    finite (division by zero, log of zero, overflow).  Used by the
    renderer, which paints failed pixels gray.
    """
    zz = np.asarray(z, dtype=complex)
    with np.errstate(all="ignore"):
        values = _eval(ast, zz, strict=False)
    ok = np.isfinite(values.real) & np.isfinite(values.imag)
    return values, ok


def _first_bad(zz, mask):
    flat = np.argwhere(mask)
    at = tuple(flat[0]) if flat.size else ()
    return zz[at] if at else complex(np.ravel(zz)[0])


def _eval(ast, zz, strict=True):
    if isinstance(ast, Number):
        return np.broadcast_to(np.asarray(ast.value, dtype=complex), zz.shape).copy()
    if isinstance(ast, Variable):
        return zz.astype(complex, copy=True)
    if isinstance(ast, Add):
        return _eval(ast.left, zz, strict) + _eval(ast.right, zz, strict)
    if isinstance(ast, Sub):
        return _eval(ast.left, zz, strict) - _eval(ast.right, zz, strict)
    if isinstance(ast, Mul):
        return _eval(ast.left, zz, strict) * _eval(ast.right, zz, strict)
    if isinstance(ast, Div):
        num = _eval(ast.left, zz, strict)
        den = _eval(ast.right, zz, strict)
        bad = den == 0
        if strict and bad.any():
            raise EvalDomainError(f"division by zero at z = {_first_bad(zz, bad)}")
        with np.errstate(all="ignore"):
            return num / den
    if isinstance(ast, Neg):
        return -_eval(ast.operand, zz, strict)
    if isinstance(ast, Pow):
        base = _eval(ast.base, zz, strict)
        if ast.exponent < 0:
            bad = base == 0
            if strict and bad.any():
                raise EvalDomainError(
                    f"zero raised to negative power at z = {_first_bad(zz, bad)}"
                )
        with np.errstate(all="ignore"):
            return base ** ast.exponent
    if isinstance(ast, Sqrt):
        return np.sqrt(_eval(ast.operand, zz, strict))
    if isinstance(ast, Exp):
        with np.errstate(all="ignore"):
            return np.exp(_eval(ast.operand, zz, strict))
    if isinstance(ast, Log):
        arg = _eval(ast.operand, zz, strict)
        bad = arg == 0
        if strict and bad.any():
            raise EvalDomainError(f"log of zero at z = {_first_bad(zz, bad)}")
        with np.errstate(all="ignore"):
            return np.log(arg)
    raise TypeError(f"not an AST node: {ast!r}")
