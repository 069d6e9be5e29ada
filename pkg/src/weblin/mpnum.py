"""Arbitrary-precision scalars and univariate polynomial algebra.

The scalar type is ``mpmath.mpf`` (binary floating point, round to nearest
even, unbounded exponent).  ``UPoly`` is a dense polynomial in ``u`` with
coefficients stored from the constant term upward.
"""
from __future__ import annotations

import contextlib
from fractions import Fraction
from itertools import combinations_with_replacement
from math import comb

import mpmath
from mpmath import mp, mpc, mpf

Big = mpf
DEFAULT_PREC = 256


class PolyError(ValueError):
    pass


class RootFindingError(ArithmeticError):
    pass


class IllConditioned(ArithmeticError):
    pass


@contextlib.contextmanager
def precision(bits):
    """Run a block at ``bits`` of working precision."""
    with mpmath.workprec(int(bits)):
        yield


def to_big(v):
    if isinstance(v, Fraction):
        return mpf(v.numerator) / v.denominator
    if isinstance(v, str) and "/" in v:
        return to_big(Fraction(v))
    return mpf(v)


def eps_half():
    """2^(-p/2) at the current precision."""
    return mpf(2) ** (-(mp.prec // 2))


def is_zero(value, scale, rel=None, abs_tol=0):
    """Scale-free vanishing test |value| <= abs + rel * scale."""
    rel = eps_half() if rel is None else rel
    return abs(value) <= abs_tol + rel * abs(scale)


class UPoly:
    """Dense univariate polynomial; ``coeffs[k]`` multiplies u**k."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs, trim_eps=None):
        cs = [c if isinstance(c, (mpf, mpc)) else to_big(c) for c in coeffs]
        self.coeffs = _trim(cs, trim_eps)

    @classmethod
    def from_roots(cls, roots, lead=1):
        p = cls([lead])
        for r in roots:
            p = p * cls([-r, 1])
        return p

    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else -1

    @property
    def lc(self):
        if not self.coeffs:
            raise PolyError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def is_zero(self):
        return not self.coeffs

    def norm(self):
        return max((abs(c) for c in self.coeffs), default=mpf(0))

    def trimmed(self, eps=None):
        return UPoly(self.coeffs, eps if eps is not None else eps_half())

    def __call__(self, x):
        acc = mpf(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __neg__(self):
        return UPoly([-c for c in self.coeffs])

    def __add__(self, other):
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + [0] * (n - len(self.coeffs))
        b = other.coeffs + [0] * (n - len(other.coeffs))
        return UPoly([x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        if not isinstance(other, UPoly):
            return UPoly([c * other for c in self.coeffs])
        if not self.coeffs or not other.coeffs:
            return UPoly([])
        out = [mpf(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return UPoly(out)

    __rmul__ = __mul__

    def divmod(self, other):
        if other.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        r = list(self.coeffs)
        dq = len(r) - len(other.coeffs)
        if dq < 0:
            return UPoly([]), UPoly(r)
        q = [mpf(0)] * (dq + 1)
        lc = other.coeffs[-1]
        m = len(other.coeffs) - 1
        for k in range(dq, -1, -1):
            c = r[k + m] / lc
            q[k] = c
            if c:
                for j, b in enumerate(other.coeffs):
                    r[k + j] -= c * b
            r[k + m] = mpf(0)
        return UPoly(q), UPoly(r[:m])

    def derivative(self):
        return UPoly([k * c for k, c in enumerate(self.coeffs)][1:])

    def monic(self):
        return UPoly([c / self.lc for c in self.coeffs])

    def __repr__(self):
        return f"UPoly(deg={self.degree})"


def _as_poly(v):
    return v if isinstance(v, UPoly) else UPoly([v])


def _trim(cs, eps):
    cs = list(cs)
    if not cs:
        return cs
    if eps is None:
        while cs and cs[-1] == 0:
            cs.pop()
        return cs
    scale = max(abs(c) for c in cs)
    if scale == 0:
        return []
    while cs and abs(cs[-1]) <= eps * scale:
        cs.pop()
    return cs


# -- resultants ------------------------------------------------------------

def sylvester(f: UPoly, g: UPoly):
    m, n = f.degree, g.degree
    size = m + n
    S = mpmath.matrix(size, size)
    fr, gr = list(reversed(f.coeffs)), list(reversed(g.coeffs))
    for i in range(n):
        for j, c in enumerate(fr):
            S[i, i + j] = c
    for i in range(m):
        for j, c in enumerate(gr):
            S[n + i, i + j] = c
    return S


def resultant(f: UPoly, g: UPoly):
    """Sylvester resultant R(f, g), by pivoted LU at working precision."""
    if f.is_zero() or g.is_zero():
        raise PolyError("resultant of a zero polynomial")
    if f.degree == 0:
        return f.lc ** g.degree
    if g.degree == 0:
        return g.lc ** f.degree
    return mpmath.det(sylvester(f, g))


def complex_roots(f: UPoly, maxsteps=400):
    """All roots of f by simultaneous (Durand-Kerner) iteration."""
    if f.degree < 1:
        raise PolyError("need degree >= 1")
    coeffs = list(reversed(f.coeffs))
    extra = 2 * mp.prec
    try:
        roots, err = mpmath.polyroots(coeffs, maxsteps=maxsteps, extraprec=extra, error=True)
    except mpmath.libmp.libhyper.NoConvergence as exc:
        raise RootFindingError(str(exc)) from exc
    if f.degree == 1:
        roots = [roots] if not isinstance(roots, list) else roots
    return [mpc(r) for r in roots]


def generalized_resultants(T: UPoly, S):
    """Coefficients R_sigma of R(T, sum_j x_j S_j) as a polynomial in x.

    Keys are multi-indices (exponents of x_1..x_n) of total degree deg T.
    Uses lc(T)^m * prod_i sum_j x_j S_j(lambda_i) over the roots of T.
    """
    t = T.degree
    if t < 1:
        raise PolyError("T must have degree >= 1")
    n = len(S)
    m = max(s.degree for s in S)
    roots = complex_roots(T)
    vals = [[s(lam) if not s.is_zero() else mpc(0) for s in S] for lam in roots]
    # polynomial in x stored as {exponent tuple: coefficient}
    prod = {(0,) * n: mpc(1)}
    for row in vals:
        nxt = {}
        for mono, c in prod.items():
            for j in range(n):
                key = mono[:j] + (mono[j] + 1,) + mono[j + 1:]
                nxt[key] = nxt.get(key, 0) + c * row[j]
        prod = nxt
    scale = T.lc ** m
    out = {}
    for mono in _monomials(n, t):
        out[mono] = (prod.get(mono, mpc(0)) * scale).real
    return out


def root_product_scale(T: UPoly, S):
    """|lc T|^m * prod_i max_j sum_k |s_jk| |lambda_i|^k over the roots of T.

    The natural magnitude of the (generalized) resultants of T against S;
    values far below it mean a common root.
    """
    m = max(s.degree for s in S)
    acc = abs(T.lc) ** m
    for lam in complex_roots(T):
        acc *= max(_abs_scale(s, lam) for s in S)
    return acc


def relative_resultant(f: UPoly, g: UPoly):
    """R(f, g) divided by its root-product scale."""
    sc = root_product_scale(f, [g])
    return resultant(f, g) / sc if sc else mpf(0)


def _monomials(n, t):
    res = []
    for combo in combinations_with_replacement(range(n), t):
        e = [0] * n
        for j in combo:
            e[j] += 1
        res.append(tuple(e))
    return sorted(res, reverse=True)


def invariant_count(n, t):
    return comb(t + n - 1, n - 1)


# -- approximate GCD -------------------------------------------------------

def _gcd2(a: UPoly, b: UPoly, eps):
    if a.degree < b.degree:
        a, b = b, a
    while not b.is_zero():
        scale = max(a.norm(), b.norm())
        _, r = a.divmod(b)
        r = UPoly([c if abs(c) > eps * scale else mpf(0) for c in r.coeffs])
        a, b = b, r
        # keep magnitudes balanced
        if not b.is_zero():
            b = UPoly([c / b.norm() for c in b.coeffs])
    return a.monic()


def _rel_remainder(p: UPoly, g: UPoly):
    _, r = p.divmod(g)
    return r.norm() / p.norm()


def approx_gcd(polys, eps=None):
    """Monic approximate GCD of nonzero polynomials (degree 0 means coprime)."""
    if not polys:
        raise PolyError("empty list")
    eps = eps_half() if eps is None else eps
    polys = [p.trimmed(eps) for p in polys]
    if any(p.is_zero() for p in polys):
        raise PolyError("zero polynomial in gcd input")
    polys = [UPoly([c / p.norm() for c in p.coeffs]) for p in polys]
    g = polys[0].monic()
    for p in polys[1:]:
        if g.degree == 0:
            break
        g = _gcd2(g, p, eps)
    while g.degree > 0 and max(_rel_remainder(p, g) for p in polys) >= eps:
        # the truncated Euclid sequence overshot; fall back to the roots of g
        # that are common to all inputs
        keep = [r for r in complex_roots(g)
                if all(abs(p(r)) <= eps * _abs_scale(p, r) for p in polys)]
        g2 = UPoly.from_roots(keep)
        g = UPoly([c.real if isinstance(c, mpc) else c for c in g2.coeffs])
        if len(keep) == 0:
            break
    return g


def _abs_scale(p, x):
    ax = abs(x)
    acc = mpf(0)
    for c in reversed(p.coeffs):
        acc = acc * ax + abs(c)
    return acc


# -- real roots --------------------------------------------------------------

def sturm_sequence(f: UPoly, eps=None):
    eps = eps_half() if eps is None else eps
    seq = [f, f.derivative()]
    while seq[-1].degree > 0:
        _, r = seq[-2].divmod(seq[-1])
        scale = seq[-2].norm()
        r = UPoly([c if abs(c) > eps * scale else mpf(0) for c in r.coeffs])
        if r.is_zero():
            break
        seq.append(-r)
    return seq


def _sign_changes(seq, x):
    signs = []
    for p in seq:
        v = p(x)
        if v != 0:
            signs.append(v > 0)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def root_bound(f: UPoly):
    lc = abs(f.lc)
    return 1 + max((abs(c) / lc for c in f.coeffs[:-1]), default=mpf(0))


def real_roots(f: UPoly, eps=None):
    """Distinct real roots with a multiplicity estimate, ascending.

    Roots are isolated with a Sturm sequence and bisection, then polished
    with damped Newton steps on f / gcd(f, f').
    """
    eps = eps_half() if eps is None else eps
    f = f.trimmed(eps)
    if f.degree < 1:
        raise PolyError("need degree >= 1")
    f = UPoly([c / f.norm() for c in f.coeffs])
    seq = sturm_sequence(f, eps)
    # squarefree part for Newton polishing
    g = seq[-1]
    core = f.divmod(g.monic())[0] if g.degree > 0 else f
    B = root_bound(f)
    lo, hi = -B, B
    total = _sign_changes(seq, lo) - _sign_changes(seq, hi)
    if total <= 0:
        return []
    stack = [(lo, hi, total)]
    intervals = []
    width_floor = B * mpf(2) ** (-(mp.prec * 3 // 4))
    while stack:
        a, b, n = stack.pop()
        if n == 0:
            continue
        if n == 1 or b - a < width_floor:
            intervals.append((a, b, n))
            continue
        mid = (a + b) / 2
        if any(p(mid) == 0 for p in seq[:1]):
            mid += (b - a) * mpf("1e-7")
        cm = _sign_changes(seq, mid)
        stack.append((a, mid, _sign_changes(seq, a) - cm))
        stack.append((mid, b, cm - _sign_changes(seq, b)))
    out = []
    for a, b, n in sorted(intervals, key=lambda t: t[0]):
        r = _refine(core, seq, a, b)
        out.append((r, _multiplicity(f, r, eps)))
        if n > 1:
            raise IllConditioned("real roots could not be separated at this precision")
    return out


def _refine(core, seq, a, b):
    # bisection on the Sturm count until the interval is small, then Newton
    for _ in range(mp.prec // 2):
        mid = (a + b) / 2
        if _sign_changes(seq, a) - _sign_changes(seq, mid) >= 1:
            b = mid
        else:
            a = mid
    x = (a + b) / 2
    dcore = core.derivative()
    for _ in range(60):
        d = dcore(x)
        if d == 0:
            break
        step = core(x) / d
        x_new = x - step
        if not (a - (b - a) <= x_new <= b + (b - a)):
            x_new = x - step / 2
        if abs(x_new - x) <= abs(x) * mpf(2) ** (-mp.prec + 4):
            x = x_new
            break
        x = x_new
    return x


def _multiplicity(f: UPoly, r, eps):
    p = f
    m = 0
    tol = mpf(2) ** (-(mp.prec // 4))
    while p.degree >= 1 and abs(p(r)) <= tol * _abs_scale(p, r):
        m += 1
        p = p.derivative()
    return max(m, 1)
