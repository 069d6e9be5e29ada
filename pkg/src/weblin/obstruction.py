"""Linearizability obstructions of a planar 3-web.

A candidate trace component mu of the affine deformation tensor (written u)
must satisfy the compatibility system I1 = I2 = I12 = 0.  Eliminating the
derivatives of mu leaves polynomials in u whose coefficients are functions
of K and its symmetrized covariant derivatives.  The web is linearizable
iff these polynomials have a common real root (for K != 0).

Coefficients are read from data/coefficients.tsv and evaluated on jets of
the K-symbols truncated to order one, so that a further covariant
derivative of every coefficient is available.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources

from mpmath import mpf

from . import exprlang as el
from .jets import Jet2, jet_lift
from .mpnum import (UPoly, approx_gcd, eps_half, generalized_resultants, precision, real_roots,
                    resultant, root_product_scale, to_big)
from .webcalc import WebError, WeightedJet, canonical, cov_d, k_table, web_frame

TABLE_NAME = "coefficients.tsv"
# total weights of the evaluated polynomials (u has weight 1)
WEIGHTS = {
    "A11": 2, "A12": 2, "A10": 4, "A21": 2, "A22": 2, "A20": 4,
    "A111": 3, "A112": 3, "A110": 5, "A121": 3, "A122": 3, "A120": 5,
    "A221": 3, "A222": 3, "A220": 5, "B121": 3, "B122": 3, "B120": 5,
    "V0": 11, "V1": 13, "V2": 13, "V11": 15, "V12": 15, "V22": 15,
    "Qa": 26, "Qs": 26, "Q12": 26, "Q1": 38, "Q2": 38, "L": 26, "S": 29,
}
COEFF_NAMES = ("A11", "A12", "A10", "A21", "A22", "A20",
               "A111", "A112", "A110", "A121", "A122", "A120",
               "A221", "A222", "A220", "B121", "B122", "B120")
V_NAMES = ("V0", "V1", "V2", "V11", "V12", "V22")
Q_NAMES = ("Qa", "Qs", "Q12", "Q1", "Q2")
K_ORDER = 5


class Parallelizable(WebError):
    pass


class Indeterminate(WebError):
    pass


# -- coefficient table -----------------------------------------------------

@dataclass(frozen=True)
class Term:
    coeff: Fraction
    u_power: int
    kmono: tuple      # ((symbol, power), ...)
    factors: tuple    # coefficient names multiplied in (V polynomials)


@dataclass(frozen=True)
class CoefficientTable:
    terms: dict
    sha256: str

    def __getitem__(self, target):
        return self.terms[target]


def _parse_mono(text):
    if text == "1":
        return ()
    out = []
    for part in text.split("*"):
        name, _, p = part.partition("^")
        out.append((name, int(p) if p else 1))
    return tuple(out)


def parse_table(text):
    terms = {}
    for n, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) != 5:
            raise ValueError(f"coefficient table line {n}: expected 5 fields")
        target, c, up, km, fs = cols
        fac = () if fs == "1" else tuple(fs.split("*"))
        terms.setdefault(target, []).append(Term(Fraction(c), int(up), _parse_mono(km), fac))
    return terms


@lru_cache(None)
def load_table():
    raw = resources.files("weblin").joinpath("data", TABLE_NAME).read_bytes()
    return CoefficientTable(parse_table(raw.decode()), hashlib.sha256(raw).hexdigest())


# -- dual numbers (oracle route) -----------------------------------------------

class Dual:
    """a + b e with e^2 = 0."""

    __slots__ = ("a", "b")

    def __init__(self, a, b=0):
        self.a, self.b = a, b

    def _c(self, o):
        return o if isinstance(o, Dual) else Dual(o, 0)

    def __add__(self, o):
        o = self._c(o)
        return Dual(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return Dual(-self.a, -self.b)

    def __sub__(self, o):
        return self + (-self._c(o))

    def __rsub__(self, o):
        return self._c(o) - self

    def __mul__(self, o):
        o = self._c(o)
        return Dual(self.a * o.a, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def reciprocal(self):
        return Dual(1 / self.a, -self.b / (self.a * self.a))

    def __truediv__(self, o):
        return self * self._c(o).reciprocal()

    def __rtruediv__(self, o):
        return self._c(o) * self.reciprocal()


# -- polynomials in u over a coefficient ring ----------------------------------
# lists indexed by the power of u; entries are mpf, Jet2 or Dual

def padd(a, b):
    n = max(len(a), len(b))
    return [(a[k] if k < len(a) else 0) + (b[k] if k < len(b) else 0) for k in range(n)]


def pscale(a, c):
    return [x * c for x in a]


def psub(a, b):
    return padd(a, pscale(b, -1))


def pmul(a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return out


def pderiv(a):
    return [a[k] * k for k in range(1, len(a))]


def _ipow(x, n):
    out = x
    for _ in range(n - 1):
        out = out * x
    return out


class Evaluator:
    """Evaluates table targets on an environment of K-symbol values."""

    def __init__(self, env, table=None):
        self.table = table or load_table()
        self.env = dict(env)
        self.Kinv = 1 / self.env["K"]
        self._mono = {}
        self._cache = {}
        self._num = {}

    def num(self, c):
        v = self._num.get(c)
        if v is None:
            v = self._num[c] = to_big(c)
        return v

    def mono(self, km):
        v = self._mono.get(km)
        if v is None:
            v = None
            for name, p in km:
                base = self.env[name]
                if p < 0:
                    base, p = self.Kinv, -p
                t = _ipow(base, p)
                v = t if v is None else v * t
            self._mono[km] = v
        return v

    def _scalar_poly(self, terms):
        deg = max(t.u_power for t in terms)
        out = [0] * (deg + 1)
        for t in terms:
            m = self.mono(t.kmono)
            c = self.num(t.coeff)
            out[t.u_power] = out[t.u_power] + (c if m is None else m * c)
        return out

    def poly(self, target):
        hit = self._cache.get(target)
        if hit is not None:
            return hit
        terms = self.table[target]
        if all(not t.factors for t in terms):
            res = self._scalar_poly(terms)
        else:
            groups = {}
            for t in terms:
                groups.setdefault(t.factors, []).append(t)
            res = []
            for fac, ts in groups.items():
                p = self._scalar_poly(ts)
                for name in fac:
                    p = pmul(p, self.poly(name))
                res = padd(res, p)
        self._cache[target] = res
        return res

    def scalar(self, target):
        """Value of a u-free target (e.g. a field component)."""
        p = self.poly(target)
        return p[0] if p else 0


# -- K-symbol environments -------------------------------------------------------

def _sym(word):
    return "K" + word


def k_env(kd, order=1):
    """K-symbols as jets truncated to ``order`` (dict name -> Jet2)."""
    return {_sym(w): v.jet.truncate(order) for w, v in kd.items()}


def k_values(kd):
    return {_sym(w): v.value for w, v in kd.items()}


def tau(kd):
    """Image of a K-table under (x, y, u, K) -> (y, x, -u, -K)."""
    out = {}
    for w, v in kd.items():
        sw = canonical(w.translate(str.maketrans("12", "21")))
        out[sw] = -v
    return {w: out[w] for w in kd}


def tau_sign(p):
    """u -> -u on a coefficient list."""
    return [c * (-1) ** k for k, c in enumerate(p)]


def tau_poly(target, kd, table=None):
    """tau of an evaluated table target: evaluate on tau(kd) and flip u."""
    ev = Evaluator(k_values(tau(kd)), table)
    return tau_sign(ev.poly(target))


# -- weighted polynomials ----------------------------------------------------------

@dataclass(frozen=True)
class WPoly:
    coeffs: tuple   # WeightedJet per power of u
    W: int

    @classmethod
    def from_jets(cls, jets, W):
        cs = []
        for k, j in enumerate(jets):
            if not isinstance(j, Jet2):
                raise TypeError("WPoly coefficients must be jets")
            cs.append(WeightedJet(j, W - k))
        return cls(tuple(cs), W)

    def values(self):
        return [c.value for c in self.coeffs]

    def upoly(self, trim_eps=None):
        return UPoly(self.values(), trim_eps)

    def homogeneous(self):
        return all(c.weight + k == self.W for k, c in enumerate(self.coeffs))


def _jetify(p, base):
    return [c if isinstance(c, Jet2) else Jet2.const(base, 0, c) for c in p]


# -- compatibility system ------------------------------------------------------------

def _mu_jet(frame, mu):
    if isinstance(mu, WeightedJet):
        if mu.weight != 1:
            raise WebError("mu must have weight 1")
        return mu
    if isinstance(mu, str):
        mu = el.parse(mu)
    return WeightedJet(jet_lift(mu, frame.point, frame.order), 1)


def mu_derivatives(frame, mu):
    """u, p1, p2, p11, p12, p22 as symmetrized delta-derivatives of mu."""
    m = _mu_jet(frame, mu)
    d1, d2 = cov_d(frame, m, 1), cov_d(frame, m, 2)
    p11 = cov_d(frame, d1, 1)
    p22 = cov_d(frame, d2, 2)
    p12 = (cov_d(frame, d1, 2) + cov_d(frame, d2, 1)) * Fraction(1, 2)
    return {"u": m, "p1": d1, "p2": d2, "p11": p11, "p12": p12, "p22": p22}


def _I(K, u, p1, p2, p11, p12, p22):
    K0, K1, K2, K11, K12, K22, K112, K122 = (K[w] for w in ("", "1", "2", "11", "12", "22", "112", "122"))
    I1 = p11 - 2 * p12 - u * p1 + 2 * u * p2 + K1
    I2 = p22 - 2 * p12 - 2 * u * p1 + u * p2 + K2
    I12 = (24 * K0 * p12 + 6 * (2 * K1 - K2) * p1 + 6 * (2 * K2 - K1) * p2 + 24 * K0 * u * (p1 - p2)
           + 3 * u * (K11 - K12 + K22) - 8 * K0 * (K1 + K2) + 3 * (K112 - K122) - 3 * K0 * u ** 3)
    return I1, I2, I12


def compat_functions(frame, kd, mu):
    """Residuals (I1, I2, I12) of the compatibility functions at the point."""
    if not frame.K_nonzero:
        raise Parallelizable("K vanishes at the point")
    d = mu_derivatives(frame, mu)
    K = {w: v.value for w, v in kd.items()}
    return _I(K, *(d[k].value for k in ("u", "p1", "p2", "p11", "p12", "p22")))


def pij_system(K, u, p1, p2):
    """p11, p12, p22 solved from I1 = I2 = I12 = 0; K maps words to values."""
    K0 = K[""]
    if K0 == 0:
        raise Parallelizable("K vanishes")
    _, _, rest = _I(K, u, p1, p2, 0, 0, 0)
    p12 = -rest / (24 * K0)
    p11 = 2 * p12 + u * p1 - 2 * u * p2 - K["1"]
    p22 = 2 * p12 + 2 * u * p1 - u * p2 - K["2"]
    return p11, p12, p22


def _horner(p, u):
    acc = 0
    for c in reversed(p):
        if isinstance(c, Jet2):
            c = c.value
        acc = acc * u + c
    return acc


@dataclass
class GSystem:
    coeffs: dict      # name -> WPoly
    evaluator: Evaluator = field(repr=False)

    def _a(self, name, u):
        return _horner(self.evaluator.poly(name), u)

    def G1(self, u, p1, p2):
        a = self._a
        return p1 * p1 - 2 * p1 * p2 + a("A11", u) * p1 + a("A12", u) * p2 + a("A10", u)

    def G2(self, u, p1, p2):
        a = self._a
        return p2 * p2 - 2 * p1 * p2 + a("A21", u) * p1 + a("A22", u) * p2 + a("A20", u)


def _check_K(frame):
    if not frame.K_nonzero:
        raise Parallelizable("K vanishes at the point")


def _kd(frame, max_len=K_ORDER):
    return k_table(frame, max_len)


def g_system(frame, kd=None):
    _check_K(frame)
    kd = kd or _kd(frame)
    ev = Evaluator(k_env(kd))
    polys = {n: WPoly.from_jets(_jetify(ev.poly(n), frame.point), WEIGHTS[n])
             for n in COEFF_NAMES[:6]}
    return GSystem(polys, ev)


@dataclass
class GijSystem:
    coeffs: dict
    quad: dict
    evaluator: Evaluator = field(repr=False)

    def form(self, name, u, p1, p2):
        """G11, G12s, G12a or G22 with the multiples of G1, G2 removed."""
        ev = self.evaluator

        def q(m):
            t = f"{name}.{m}"
            return _horner(ev.poly(t), u) if t in ev.table.terms else 0

        lin = {"G11": "A11", "G12s": "A12", "G12a": "B12", "G22": "A22"}[name]
        a = lambda k: _horner(ev.poly(lin + k), u)
        return (q("p1p1") * p1 * p1 + q("p1p2") * p1 * p2 + q("p2p2") * p2 * p2
                + a("1") * p1 + a("2") * p2 + a("0"))


def gij_system(frame, kd=None):
    _check_K(frame)
    kd = kd or _kd(frame)
    ev = Evaluator(k_env(kd))
    polys = {n: WPoly.from_jets(_jetify(ev.poly(n), frame.point), WEIGHTS[n])
             for n in COEFF_NAMES[6:]}
    quad = {t: ev.poly(t) for t in ev.table.terms if t.startswith("G")}
    return GijSystem(polys, quad, ev)


def v_polys(frame, kd=None, evaluator=None):
    _check_K(frame)
    if evaluator is None:
        evaluator = Evaluator(k_env(kd or _kd(frame)))
    return {n: WPoly.from_jets(_jetify(evaluator.poly(n), frame.point), WEIGHTS[n]) for n in V_NAMES}


def _q_raw(V):
    """Q_a, Q_s, Q_12 from V coefficient lists (any ring)."""
    V0, V1, V2, V11, V12, V22 = (V[n] for n in V_NAMES)
    half = mpf(1) / 2
    a = pscale(padd(psub(pmul(V0, psub(V11, V22)), pmul(V1, V1)), pmul(V2, V2)), half)
    s = pscale(psub(psub(pmul(V0, padd(V11, V22)), pmul(V1, V1)), pmul(V2, V2)), half)
    q12 = psub(pmul(V0, V12), pmul(V1, V2))
    return a, s, q12


@dataclass
class QSet:
    polys: dict        # name -> WPoly (Qa, Qs, Q12, Q1, Q2)
    V: dict            # name -> WPoly
    K: dict            # word -> value

    def upoly(self, name, trim_eps=None):
        return self.polys[name].upoly(trim_eps)


def q_polys(frame, kd=None):
    """The five obstruction polynomials with jet coefficients."""
    _check_K(frame)
    kd = kd or _kd(frame)
    ev = Evaluator(k_env(kd))
    V = {n: _jetify(ev.poly(n), frame.point) for n in V_NAMES}
    a, s, q12 = _q_raw(V)
    out = {"Qa": a, "Qs": s, "Q12": q12}
    Wa = WEIGHTS["Qa"]
    da = pderiv([c.truncate(0) for c in a])
    for i, Vi in ((1, "V1"), (2, "V2")):
        dhat = [cov_d(frame, WeightedJet(c, Wa - k), i).jet for k, c in enumerate(a)]
        Vi0 = [c.truncate(0) for c in V[Vi]]
        V00 = [c.truncate(0) for c in V["V0"]]
        out[f"Q{i}"] = padd(pmul(da, Vi0), pmul(V00, dhat))
    polys = {n: WPoly.from_jets(out[n], WEIGHTS[n]) for n in Q_NAMES}
    Vw = {n: WPoly.from_jets(V[n], WEIGHTS[n]) for n in V_NAMES}
    return QSet(polys, Vw, {w: v.value for w, v in kd.items()})


def field_values(kd_values, index, table=None):
    """delta_index of each K-symbol through the total-derivative fields."""
    env = {_sym(w): v for w, v in kd_values.items()}
    ev = Evaluator(env, table)
    out = {}
    for w in kd_values:
        t = f"d{index}:{_sym(w)}"
        if t in ev.table.terms:
            out[w] = ev.scalar(t)
    return out


def delta_hat_K_oracle(index, kd, table=None):
    """delta-hat_index(Q_a) coefficients by the chain rule over the K-symbols.

    ``kd`` must reach order K_ORDER + 1 so the fields can be evaluated.
    Returns (Q_a values, delta-hat values) as coefficient lists.
    """
    vals = {w: v.value if isinstance(v, WeightedJet) else v for w, v in kd.items()}
    fv = field_values(vals, index, table)
    env = {_sym(w): Dual(vals[w], fv[w]) for w in vals if len(w) <= K_ORDER}
    ev = Evaluator(env, table)
    V = {n: ev.poly(n) for n in V_NAMES}
    a, _, _ = _q_raw(V)
    a = [c if isinstance(c, Dual) else Dual(c) for c in a]
    return [c.a for c in a], [c.b for c in a]


def aux_polys(q: QSet):
    """L = Q_s - 2 Q_12 and S = (K1 + K2) L - 3 (K2 - K1) Q_a as value lists."""
    K1, K2 = q.K["1"], q.K["2"]
    Qa, Qs, Q12 = (q.polys[n].values() for n in ("Qa", "Qs", "Q12"))
    L = psub(Qs, pscale(Q12, 2))
    S = psub(pscale(L, K1 + K2), pscale(Qa, 3 * (K2 - K1)))
    return L, S


def ag_residuals(frame, lam1, lam2, mu):
    """Residuals of the four first-order equations for (lambda1, lambda2, mu)."""
    def lift(e):
        if isinstance(e, str):
            e = el.parse(e)
        return jet_lift(e, frame.point, frame.order)

    l1, l2, m = lift(lam1), lift(lam2), lift(mu)
    g = frame.H.jet
    K = frame.K.jet
    d = frame.d
    r1 = 2 * d(2, l1) - d(1, l2) + d(2, m) - (K + l1 * l2 + g * (2 * l1 + m) - g * l2)
    r2 = d(2, l2) - l2 * (g + l2 - m)
    r3 = d(1, l1) - l1 * (g + l1 + m)
    r4 = d(2, l1) - 2 * d(1, l2) + d(1, m) - (K - l1 * l2 + l1 * g - g * (2 * l2 - m))
    return tuple(r.value for r in (r1, r2, r3, r4))


def _pencil(mode):
    if mode in ("order8", "pairs-order8"):
        return ("Qs", "Q12")
    if mode == "full":
        return ("Qs", "Q12", "Q1", "Q2")
    raise ValueError(f"unknown invariant mode {mode!r}")


def blaschke_invariants(q: QSet, mode="order8", trim_eps=None):
    """Generalized resultants of Q_a against (Q_s, Q_12) or all four others."""
    T = q.upoly("Qa", trim_eps or eps_half())
    S = [q.upoly(n) for n in _pencil(mode)]
    return generalized_resultants(T, S)


# -- verdict -------------------------------------------------------------------------

MAX_LINEARIZATIONS = 15
ESCALATION = (256, 512, 1024)


@dataclass
class LinearizabilityReport:
    point: tuple
    Q: dict              # name -> coefficient list (low to high)
    degrees: dict
    weights: dict
    L_degree: int
    S_degree: int
    resultants: dict     # "Qa,Q12" -> (value, value / root-product scale)
    invariants: dict     # multi-index -> value (may be empty)
    invariants_relative: object  # max |R_sigma| / root-product scale, or None
    gcd: list
    gcd_degree: int
    roots: list          # candidate mu values (u = 0 excluded)
    verdict: str
    root_count: int
    bound: int
    reason: str
    precision_trail: list
    tolerances: dict
    table_sha256: str


def _rel_residual(p: UPoly, x):
    ax = abs(x)
    sc = mpf(0)
    for c in reversed(p.coeffs):
        sc = sc * ax + abs(c)
    return abs(p(x)) / sc if sc else mpf(0)


def candidate_roots(Q, eps):
    """Common real roots of the polynomials in ``Q`` (a dict with key "Qa").

    Returns (gcd, roots, worst residual among gcd roots, closest approach to a
    common root among the real roots of Q_a).  u = 0 is never a candidate.
    """
    G = approx_gcd(list(Q.values()), eps)
    roots, worst = [], mpf(0)
    zero_tol = eps * max(1, max(abs(c) for c in G.coeffs)) if G.degree > 0 else eps
    if G.degree >= 1:
        for r, _m in real_roots(G):
            if abs(r) <= zero_tol:
                continue
            rho = max(_rel_residual(p, r) for p in Q.values())
            worst = max(worst, rho)
            if rho <= eps:
                roots.append(r)
    closest = None
    for r, _m in real_roots(Q["Qa"]):
        if abs(r) <= zero_tol:
            continue
        rho = max(_rel_residual(p, r) for p in Q.values())
        closest = rho if closest is None else min(closest, rho)
    return G, roots, worst, closest


def _analyze(f, point, order, rel, invariants):
    frame = web_frame(f, point, order)
    if not frame.K_nonzero:
        raise Parallelizable("K vanishes at the point: the web is parallelizable")
    kd = _kd(frame)
    eps = rel if rel is not None else eps_half()
    k1, k2 = kd["1"].value, kd["2"].value
    kscale = abs(kd[""].value) ** mpf(1.5)
    if abs(k1) <= eps * kscale and abs(k2) <= eps * kscale:
        raise Indeterminate("K1 = K2 = 0 at the point")
    q = q_polys(frame, kd)
    V0 = q.V["V0"].upoly(eps)
    if V0.is_zero():
        raise Indeterminate("V0 vanishes identically")
    Q = {n: q.upoly(n, eps) for n in Q_NAMES}
    if any(p.is_zero() for p in Q.values()):
        raise Indeterminate("an obstruction polynomial vanishes identically")
    L, S = aux_polys(q)
    Lp, Sp = UPoly(L, eps), UPoly(S, eps)
    res = {}
    for a, b in (("Qa", "Q12"), ("Qa", "Qs"), ("Qs", "Q12")):
        r = resultant(Q[a], Q[b])
        res[f"{a},{b}"] = (r, r / root_product_scale(Q[a], [Q[b]]))
    G, roots, worst, closest = candidate_roots(Q, eps)
    inv, inv_rel = {}, None
    if invariants != "none" and Q["Qa"].degree >= 1:
        mode = "order8" if invariants == "order8" else "full"
        inv = blaschke_invariants(q, mode, eps)
        sc = root_product_scale(Q["Qa"], [Q[n] for n in _pencil(mode)])
        inv_rel = max(abs(v) for v in inv.values()) / sc
    return dict(frame=frame, q=q, Q=Q, L=Lp, S=Sp, res=res, G=G, roots=roots,
                closest=closest, worst=worst, eps=eps, inv=inv, inv_rel=inv_rel)


def linearizability_verdict(f, point, precision_bits=256, order=12, rel=None,
                            invariants="none", escalate=True):
    """Decide linearizability of the web with web function ``f`` at ``point``."""
    if isinstance(f, str):
        f = el.parse(f)
    levels = [p for p in ESCALATION if p >= precision_bits] if escalate else [precision_bits]
    if not levels or levels[0] != precision_bits:
        levels = [precision_bits] + levels
    trail = []
    for bits in levels:
        with precision(bits):
            out = _analyze(f, point, order, rel, invariants)
            trail.append(bits)
            eps = out["eps"]
            c = out["closest"]
            ambiguous = c is not None and eps < c <= eps * 10 ** 6 and not out["roots"]
            if not ambiguous:
                return _report(point, out, trail, bits, "")
    return _report(point, out, trail, bits,
                   "closest common-root residual of the obstruction polynomials is tolerance-ambiguous")


def _report(point, out, trail, bits, ambiguous):
    Q, G, roots = out["Q"], out["G"], out["roots"]
    if ambiguous:
        verdict, reason = "Indeterminate", ambiguous
    elif roots:
        verdict, reason = "Linearizable", ""
    else:
        verdict, reason = "NotLinearizable", ""
    s = len(roots)
    return LinearizabilityReport(
        point=tuple(point),
        Q={n: list(p.coeffs) for n, p in Q.items()},
        degrees={n: p.degree for n, p in Q.items()},
        weights={n: WEIGHTS[n] for n in Q},
        L_degree=out["L"].degree, S_degree=out["S"].degree,
        resultants=out["res"], invariants=out["inv"], invariants_relative=out["inv_rel"],
        gcd=list(G.coeffs), gcd_degree=G.degree, roots=roots,
        verdict=verdict, root_count=s, bound=min(s, MAX_LINEARIZATIONS), reason=reason,
        precision_trail=trail,
        tolerances={"rel": out["eps"], "closest_residual": out["closest"]},
        table_sha256=load_table().sha256,
    )
