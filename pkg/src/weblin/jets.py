"""Truncated bivariate Taylor series (jets) at a base point.

A jet of order N stores c[i][j] = d^(i+j) g / dx^i dy^j (x0, y0) / (i! j!)
for i + j <= N, in a flat list ordered by total degree.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import mpmath
from mpmath import mpf

from .mpnum import to_big


class JetError(ValueError):
    pass


class JetDomainError(JetError):
    pass


@lru_cache(None)
def monomials(N):
    return tuple((d - j, j) for d in range(N + 1) for j in range(d + 1))


@lru_cache(None)
def index_of(N):
    return {m: k for k, m in enumerate(monomials(N))}


@lru_cache(None)
def _mul_table(N):
    mons = monomials(N)
    idx = index_of(N)
    table = []
    for a, (i1, j1) in enumerate(mons):
        for b, (i2, j2) in enumerate(mons):
            if i1 + i2 + j1 + j2 <= N:
                table.append((idx[(i1 + i2, j1 + j2)], a, b))
    return tuple(table)


@lru_cache(None)
def _div_table(N):
    # for each target k: pairs (m, r) with m != 0 and mon[m] + mon[r] = mon[k]
    mons = monomials(N)
    idx = index_of(N)
    out = []
    for i, j in mons:
        pairs = []
        for a in range(i + 1):
            for b in range(j + 1):
                if a or b:
                    pairs.append((idx[(a, b)], idx[(i - a, j - b)]))
        out.append(tuple(pairs))
    return tuple(out)


def _scalar(v):
    if isinstance(v, (int, Fraction, str)):
        return to_big(v)
    return v


class Jet2:
    """Immutable truncated Taylor expansion at ``base``."""

    __slots__ = ("base", "order", "c")

    def __init__(self, base, order, coeffs):
        self.base = base
        self.order = order
        self.c = list(coeffs)
        if len(self.c) != (order + 1) * (order + 2) // 2:
            raise JetError("coefficient count does not match order")

    # -- constructors --------------------------------------------------
    @classmethod
    def const(cls, base, order, value):
        c = [mpf(0)] * ((order + 1) * (order + 2) // 2)
        c[0] = _scalar(value)
        return cls(base, order, c)

    @classmethod
    def var(cls, base, order, name):
        j = cls.const(base, order, base[0] if name == "x" else base[1])
        if order >= 1:
            j.c[1 if name == "x" else 2] = mpf(1)
        return j

    # -- access --------------------------------------------------------
    @property
    def value(self):
        return self.c[0]

    def coef(self, i, j):
        return self.c[index_of(self.order)[(i, j)]]

    def derivative_value(self, i, j):
        return self.coef(i, j) * mpmath.factorial(i) * mpmath.factorial(j)

    def truncate(self, M):
        if M > self.order:
            raise JetError(f"cannot raise jet order {self.order} to {M}")
        return Jet2(self.base, M, self.c[: (M + 1) * (M + 2) // 2])

    def scale(self):
        return max(abs(v) for v in self.c)

    # -- arithmetic ----------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Jet2):
            if other.base != self.base:
                raise JetError("jets at different base points")
            n = min(self.order, other.order)
            a = self if self.order == n else self.truncate(n)
            b = other if other.order == n else other.truncate(n)
            return a, b
        return self, Jet2.const(self.base, self.order, other)

    def __add__(self, other):
        if not isinstance(other, Jet2):
            c = list(self.c)
            c[0] = c[0] + _scalar(other)
            return Jet2(self.base, self.order, c)
        a, b = self._coerce(other)
        return Jet2(a.base, a.order, [x + y for x, y in zip(a.c, b.c)])

    __radd__ = __add__

    def __neg__(self):
        return Jet2(self.base, self.order, [-x for x in self.c])

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet2):
            s = _scalar(other)
            return Jet2(self.base, self.order, [x * s for x in self.c])
        a, b = self._coerce(other)
        out = [mpf(0)] * len(a.c)
        ac, bc = a.c, b.c
        for k, i, j in _mul_table(a.order):
            out[k] += ac[i] * bc[j]
        return Jet2(a.base, a.order, out)

    __rmul__ = __mul__

    def reciprocal(self):
        b0 = self.c[0]
        if b0 == 0:
            raise JetDomainError("division by a jet with zero constant term")
        out = [mpf(0)] * len(self.c)
        out[0] = 1 / b0
        for k, pairs in enumerate(_div_table(self.order)):
            if k == 0:
                continue
            acc = mpf(0)
            for m, r in pairs:
                acc += self.c[m] * out[r]
            out[k] = -acc / b0
        return Jet2(self.base, self.order, out)

    def __truediv__(self, other):
        if not isinstance(other, Jet2):
            return self * (1 / _scalar(other))
        a, b = self._coerce(other)
        return a * b.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, n):
        if isinstance(n, int):
            if n < 0:
                return self.reciprocal() ** (-n)
            out = Jet2.const(self.base, self.order, 1)
            base = self
            while n:
                if n & 1:
                    out = out * base
                n >>= 1
                if n:
                    base = base * base
            return out
        return jet_elem("pow", self, Fraction(n))

    def __repr__(self):
        return f"Jet2(order={self.order}, value={mpmath.nstr(self.c[0], 12)})"


# -- operations ------------------------------------------------------------

def jet_partial(g: Jet2, var):
    """Jet of dg/dx or dg/dy, one order lower."""
    if g.order < 1:
        raise JetError("cannot differentiate an order-0 jet")
    N = g.order - 1
    src = index_of(g.order)
    out = []
    for i, j in monomials(N):
        if var == "x":
            out.append((i + 1) * g.c[src[(i + 1, j)]])
        elif var == "y":
            out.append((j + 1) * g.c[src[(i, j + 1)]])
        else:
            raise JetError(f"unknown variable {var!r}")
    return Jet2(g.base, N, out)


def jet_combine(op, a, b):
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op in ("*", "×"):
        return a * b
    if op in ("/", "÷"):
        return a / b
    raise JetError(f"unknown operator {op!r}")


def _taylor_coeffs(fn, a0, N, r=None):
    """d_k = fn^(k)(a0) / k! for k = 0..N."""
    if fn == "exp":
        e = mpmath.exp(a0)
        return [e / mpmath.factorial(k) for k in range(N + 1)]
    if fn == "log":
        if a0 <= 0:
            raise JetDomainError("log of a jet with non-positive constant term")
        return [mpmath.log(a0)] + [(-1) ** (k + 1) / (k * a0**k) for k in range(1, N + 1)]
    if fn in ("sin", "cos"):
        s, c = mpmath.sin(a0), mpmath.cos(a0)
        cyc = [s, c, -s, -c] if fn == "sin" else [c, -s, -c, s]
        return [cyc[k % 4] / mpmath.factorial(k) for k in range(N + 1)]
    if fn == "pow":
        out = []
        binom = mpf(1)
        rr = mpf(r.numerator) / r.denominator
        for k in range(N + 1):
            if k:
                binom = binom * (rr - (k - 1)) / k
            if binom == 0:
                out.append(mpf(0))
            else:
                out.append(binom * a0 ** (rr - k) if (r.denominator == 1) else binom * mpmath.power(a0, rr - k))
        return out
    raise JetError(f"unknown function {fn!r}")


def jet_elem(fn, a: Jet2, r=None):
    """Elementary function of a jet by composing its Taylor series."""
    a0 = a.c[0]
    if fn == "sqrt":
        fn, r = "pow", Fraction(1, 2)
    if fn == "pow":
        r = Fraction(r)
        if r.denominator != 1:
            if a0 < 0:
                if r.denominator % 2 == 0:
                    raise JetDomainError("even root of a jet with negative constant term")
                sign = -1 if r.numerator % 2 else 1
                return jet_elem("pow", -a, r) * sign
            if a0 == 0:
                raise JetDomainError("fractional power of a jet with zero constant term")
        elif r < 0 and a0 == 0:
            raise JetDomainError("negative power of a jet with zero constant term")
    d = _taylor_coeffs(fn, a0, a.order, r)
    h = a - a0
    out = Jet2.const(a.base, a.order, d[-1])
    for k in range(a.order - 1, -1, -1):
        out = out * h + d[k]
    return out


def jet_lift(e, point, order):
    """Taylor expansion of the expression ``e`` at ``point`` to ``order``."""
    base = (to_big(point[0]), to_big(point[1]))
    env = {"x": Jet2.var(base, order, "x"), "y": Jet2.var(base, order, "y")}
    return jet_eval(e, env)


def jet_eval(e, env):
    """Evaluate an expression tree with x and y bound to jets in ``env``."""
    from . import exprlang as el

    some = next(iter(env.values()))
    base, order = some.base, some.order
    cache = {}

    def go(node):
        key = id(node)
        hit = cache.get(key)
        if hit is not None:
            return hit[1]
        res = _lift_node(node, base, order, env, go, el)
        cache[key] = (node, res)
        return res

    return go(e)


def _lift_node(n, base, order, env, go, el):
    if isinstance(n, el.Var):
        return env[n.name]
    if isinstance(n, el.Const):
        return Jet2.const(base, order, n.value)
    if isinstance(n, el.Unary):
        a = go(n.arg)
        if n.op == "neg":
            return -a
        try:
            return jet_elem(n.op, a)
        except JetDomainError as exc:
            raise el.EvalDomainError(str(exc), n) from exc
    if isinstance(n, el.Pow):
        a = go(n.base)
        try:
            if n.exp.denominator == 1:
                if n.exp < 0 and a.c[0] == 0:
                    raise JetDomainError("division by zero")
                return a ** int(n.exp)
            return jet_elem("pow", a, n.exp)
        except JetDomainError as exc:
            raise el.EvalDomainError(str(exc), n) from exc
    if isinstance(n, el.Binary):
        a, b = go(n.left), go(n.right)
        if n.op == "div" and b.c[0] == 0:
            raise el.EvalDomainError("division by zero", n)
        return jet_combine({"add": "+", "sub": "-", "mul": "*", "div": "/"}[n.op], a, b)
    raise JetError(f"unknown node {n!r}")
