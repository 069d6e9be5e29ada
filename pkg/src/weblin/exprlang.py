"""Expression front end: parse, print, differentiate and evaluate f(x, y).

Grammar (no implicit multiplication):

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | power
    power  := atom ('^' exponent)?
    atom   := number | 'x' | 'y' | func '(' expr ')' | '(' expr ')'
    exponent := ['-'] rational | '(' ['-'] rational ')'
    func   := sqrt | exp | log | sin | cos

Constants are exact rationals and always non-negative; a quotient of two
integer literals folds into a single rational constant.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .mpnum import to_big

FUNCS = ("sqrt", "exp", "log", "sin", "cos")


class ExprError(ValueError):
    pass


class LexError(ExprError):
    def __init__(self, msg, pos):
        super().__init__(f"{msg} at offset {pos}")
        self.pos = pos


class ParseError(ExprError):
    def __init__(self, pos, expected, found):
        self.pos = pos
        self.expected = frozenset(expected)
        super().__init__(f"parse error at offset {pos}: expected one of "
                         f"{', '.join(sorted(self.expected))}, found {found!r}")


class ArityError(ExprError):
    pass


class EvalDomainError(ArithmeticError):
    def __init__(self, msg, node):
        super().__init__(f"{msg} in {to_text(node)}")
        self.node = node


# -- tree ------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    value: Fraction
    text: str | None = None  # decimal spelling, when parsed from one


@dataclass(frozen=True)
class Unary:
    op: str  # neg, sqrt, exp, log, sin, cos
    arg: object


@dataclass(frozen=True)
class Binary:
    op: str  # add, sub, mul, div
    left: object
    right: object


@dataclass(frozen=True)
class Pow:
    base: object
    exp: Fraction


X, Y = Var("x"), Var("y")
ZERO, ONE = Const(Fraction(0)), Const(Fraction(1))


def Add(a, b):
    return Binary("add", a, b)


def Sub(a, b):
    return Binary("sub", a, b)


def Mul(a, b):
    return Binary("mul", a, b)


def Div(a, b):
    return Binary("div", a, b)


def Neg(a):
    return Unary("neg", a)


def num(v):
    return Const(Fraction(v))


# -- lexer -----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+\.\d*|\.\d+|\d+)|([A-Za-z_]\w*)|(\S))")


def tokenize(src):
    toks = []
    pos = 0
    n = len(src)
    while pos < n:
        m = _TOKEN.match(src, pos)
        if m is None:  # only trailing whitespace left
            break
        start = m.start(m.lastindex)
        if m.group(1):
            toks.append(("num", m.group(1), start))
        elif m.group(2):
            name = m.group(2)
            if name not in ("x", "y") and name not in FUNCS:
                raise LexError(f"unknown identifier {name!r}", start)
            toks.append(("id", name, start))
        else:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise LexError(f"bad character {ch!r}", start)
            toks.append((ch, ch, start))
        pos = m.end()
    toks.append(("end", "", n))
    return toks


# -- parser ----------------------------------------------------------------

class _Parser:
    def __init__(self, src):
        self.toks = tokenize(src)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None, expected=None):
        t = self.toks[self.i]
        if kind is not None and t[0] != kind:
            raise ParseError(t[2], expected or {kind}, t[1] or "end of input")
        self.i += 1
        return t

    def parse(self):
        e = self.expr()
        t = self.peek()
        if t[0] != "end":
            raise ParseError(t[2], {"+", "-", "*", "/", "end of input"}, t[1])
        return e

    def expr(self):
        e = self.term()
        while self.peek()[0] in "+-" and self.peek()[0] != "end":
            op = self.take()[0]
            e = Binary("add" if op == "+" else "sub", e, self.term())
        return e

    def term(self):
        e = self.factor()
        while self.peek()[0] in ("*", "/"):
            op = self.take()[0]
            r = self.factor()
            if op == "/" and _int_literal(e) and _int_literal(r):
                if r.value == 0:
                    raise ParseError(self.peek()[2], {"nonzero divisor"}, "0")
                e = Const(e.value / r.value)
            else:
                e = Binary("mul" if op == "*" else "div", e, r)
        return e

    def factor(self):
        if self.peek()[0] == "-":
            self.take()
            return Unary("neg", self.factor())
        return self.power()

    def power(self):
        a = self.atom()
        if self.peek()[0] == "^":
            self.take()
            a = Pow(a, self.exponent())
            if self.peek()[0] == "^":
                raise ParseError(self.peek()[2], {"operator other than '^'"}, "^")
        return a

    def exponent(self):
        paren = self.peek()[0] == "("
        if paren:
            self.take()
        sign = 1
        if self.peek()[0] == "-":
            self.take()
            sign = -1
        t = self.take("num", {"rational exponent"})
        if "." in t[1]:
            raise ParseError(t[2], {"integer or p/q exponent"}, t[1])
        val = Fraction(int(t[1]))
        if self.peek()[0] == "/" and paren:
            self.take()
            d = self.take("num", {"integer denominator"})
            if "." in d[1] or int(d[1]) == 0:
                raise ParseError(d[2], {"nonzero integer denominator"}, d[1])
            val = val / int(d[1])
        if paren:
            self.take(")", {")"})
        return sign * val

    def atom(self):
        t = self.peek()
        if t[0] == "num":
            self.take()
            if "." in t[1]:
                return Const(Fraction(t[1]), t[1])
            return Const(Fraction(int(t[1])))
        if t[0] == "id":
            self.take()
            if t[1] in ("x", "y"):
                return Var(t[1])
            if self.peek()[0] != "(":
                raise ArityError(f"function {t[1]} needs one argument in parentheses (offset {t[2]})")
            self.take()
            if self.peek()[0] == ")":
                raise ArityError(f"function {t[1]} takes exactly one argument (offset {t[2]})")
            arg = self.expr()
            if self.peek()[0] != ")":
                raise ParseError(self.peek()[2], {")"}, self.peek()[1] or "end of input")
            self.take()
            return Unary(t[1], arg)
        if t[0] == "(":
            self.take()
            e = self.expr()
            self.take(")", {")"})
            return e
        raise ParseError(t[2], {"number", "x", "y", "function", "(", "-"}, t[1] or "end of input")


def _int_literal(e):
    return isinstance(e, Const) and e.text is None and e.value.denominator == 1


def parse(source):
    """Parse web-function source text into an expression tree."""
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    return _Parser(source).parse()


# -- printing --------------------------------------------------------------

_PREC = {"add": 1, "sub": 1, "mul": 2, "div": 2}


def _prec(e):
    if isinstance(e, Binary):
        return _PREC[e.op]
    if isinstance(e, Unary) and e.op == "neg":
        return 3
    if isinstance(e, Pow):
        return 4
    if isinstance(e, Const) and e.value.denominator != 1 and e.text is None:
        return 5  # printed with its own parentheses
    return 6


def _fmt_const(c):
    if c.text is not None:
        return c.text
    if c.value.denominator == 1:
        return str(c.value.numerator)
    return f"({c.value.numerator}/{c.value.denominator})"


def to_text(e):
    """Print with the minimal parentheses needed to parse back to ``e``."""
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Const):
        return _fmt_const(e)
    if isinstance(e, Unary):
        if e.op == "neg":
            inner = to_text(e.arg)
            return "-" + (inner if _prec(e.arg) >= 3 else f"({inner})")
        return f"{e.op}({to_text(e.arg)})"
    if isinstance(e, Pow):
        inner = to_text(e.base)
        if _prec(e.base) <= 4:
            inner = f"({inner})"
        p = e.exp
        ex = str(p.numerator) if p.denominator == 1 and p >= 0 else f"({p.numerator}/{p.denominator})" if p.denominator != 1 else f"({p.numerator})"
        return f"{inner}^{ex}"
    if isinstance(e, Binary):
        p = _PREC[e.op]
        left = to_text(e.left)
        if _prec(e.left) < p:
            left = f"({left})"
        right = to_text(e.right)
        if _prec(e.right) <= p:
            right = f"({right})"
        sym = {"add": " + ", "sub": " - ", "mul": "*", "div": "/"}[e.op]
        return left + sym + right
    raise ExprError(f"not an expression: {e!r}")


# -- differentiation -------------------------------------------------------

def _is_const(e, v=None):
    return isinstance(e, Const) and (v is None or e.value == v)


def _neg(a):
    if _is_const(a, 0):
        return ZERO
    if isinstance(a, Unary) and a.op == "neg":
        return a.arg
    return Neg(a)


def _split_sign(a):
    if isinstance(a, Unary) and a.op == "neg":
        return -1, a.arg
    return 1, a


def _add(a, b):
    if _is_const(a, 0):
        return b
    if _is_const(b, 0):
        return a
    sb, mb = _split_sign(b)
    if sb < 0:
        return Sub(a, mb)
    return Add(a, b)


def _sub(a, b):
    if _is_const(b, 0):
        return a
    if _is_const(a, 0):
        return _neg(b)
    sb, mb = _split_sign(b)
    if sb < 0:
        return Add(a, mb)
    return Sub(a, b)


def _mul(a, b):
    sa, a = _split_sign(a)
    sb, b = _split_sign(b)
    s = sa * sb
    if _is_const(a, 0) or _is_const(b, 0):
        return ZERO
    if _is_const(a) and _is_const(b):
        r = Const(a.value * b.value)
    elif _is_const(a, 1):
        r = b
    elif _is_const(b, 1):
        r = a
    elif _is_const(b):
        r = Mul(b, a)
    else:
        r = Mul(a, b)
    return r if s > 0 else _neg(r)


def _div(a, b):
    sa, a = _split_sign(a)
    sb, b = _split_sign(b)
    s = sa * sb
    if _is_const(a, 0):
        return ZERO
    if _is_const(b, 1):
        r = a
    elif _is_const(a) and _is_const(b):
        r = Const(a.value / b.value)
    else:
        r = Div(a, b)
    return r if s > 0 else _neg(r)


def _pow(base, p):
    if p == 1:
        return base
    if p == 0:
        return ONE
    return Pow(base, Fraction(p))


def _cnum(v):
    v = Fraction(v)
    return Const(v) if v >= 0 else _neg(Const(-v))


def diff(e, var):
    """Exact partial derivative d e / d var, folding trivial constants."""
    if var not in ("x", "y"):
        raise ExprError(f"unknown variable {var!r}")
    if isinstance(e, Var):
        return ONE if e.name == var else ZERO
    if isinstance(e, Const):
        return ZERO
    if isinstance(e, Unary):
        da = diff(e.arg, var)
        if e.op == "neg":
            return _neg(da)
        if _is_const(da, 0):
            return ZERO
        g = e.arg
        if e.op == "sqrt":
            outer = _mul(Const(Fraction(1, 2)), Pow(g, Fraction(-1, 2)))
        elif e.op == "exp":
            outer = e
        elif e.op == "log":
            return _div(da, g)
        elif e.op == "sin":
            outer = Unary("cos", g)
        elif e.op == "cos":
            outer = _neg(Unary("sin", g))
        else:
            raise ExprError(f"unknown function {e.op}")
        return _mul(outer, da)
    if isinstance(e, Pow):
        da = diff(e.base, var)
        if _is_const(da, 0):
            return ZERO
        outer = _mul(_cnum(e.exp), _pow(e.base, e.exp - 1))
        return _mul(outer, da)
    if isinstance(e, Binary):
        a, b = e.left, e.right
        da, db = diff(a, var), diff(b, var)
        if e.op == "add":
            return _add(da, db)
        if e.op == "sub":
            return _sub(da, db)
        if e.op == "mul":
            return _add(_mul(da, b), _mul(a, db))
        if e.op == "div":
            num_ = _sub(_mul(da, b), _mul(a, db))
            return _div(num_, _pow(b, 2))
    raise ExprError(f"not an expression: {e!r}")


# -- evaluation ------------------------------------------------------------

def evaluate(e, x, y, precision=256):
    """Value of ``e`` at (x, y), rounded to ``precision`` bits."""
    with mpmath.workprec(int(precision) + 20):
        v = _ev(e, to_big(x), to_big(y))
    with mpmath.workprec(int(precision)):
        return +v


def _ev(e, x, y):
    if isinstance(e, Var):
        return x if e.name == "x" else y
    if isinstance(e, Const):
        return to_big(e.value)
    if isinstance(e, Unary):
        a = _ev(e.arg, x, y)
        if e.op == "neg":
            return -a
        if e.op == "sqrt":
            if a < 0:
                raise EvalDomainError("sqrt of a negative number", e)
            return mpmath.sqrt(a)
        if e.op == "log":
            if a <= 0:
                raise EvalDomainError("log of a non-positive number", e)
            return mpmath.log(a)
        return getattr(mpmath, e.op)(a)
    if isinstance(e, Pow):
        a = _ev(e.base, x, y)
        p = e.exp
        if p.denominator == 1:
            if a == 0 and p < 0:
                raise EvalDomainError("division by zero", e)
            return a ** int(p)
        if a < 0:
            if p.denominator % 2 == 0:
                raise EvalDomainError("even root of a negative number", e)
            mag = mpmath.power(-a, mpmath.mpf(p.numerator) / p.denominator)
            return -mag if p.numerator % 2 else mag
        if a == 0 and p < 0:
            raise EvalDomainError("division by zero", e)
        return mpmath.power(a, mpmath.mpf(p.numerator) / p.denominator)
    if isinstance(e, Binary):
        a, b = _ev(e.left, x, y), _ev(e.right, x, y)
        if e.op == "add":
            return a + b
        if e.op == "sub":
            return a - b
        if e.op == "mul":
            return a * b
        if b == 0:
            raise EvalDomainError("division by zero", e)
        return a / b
    raise ExprError(f"not an expression: {e!r}")


eval_expr = evaluate


def depth(e):
    if isinstance(e, (Var, Const)):
        return 1
    if isinstance(e, Unary):
        return 1 + depth(e.arg)
    if isinstance(e, Pow):
        return 1 + depth(e.base)
    return 1 + max(depth(e.left), depth(e.right))
