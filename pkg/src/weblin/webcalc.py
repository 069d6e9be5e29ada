"""Web geometry at a point in the web-function gauge.

The web is given by the coordinate foliations x = const, y = const and the
level sets of f.  Frame operators are d1 = -(1/f_x) d/dx, d2 = -(1/f_y) d/dy,
the connection coefficient is H = f_xy / (f_x f_y) and K = d1(H) - d2(H).
A function of weight w has covariant derivatives delta_i(g) = d_i(g) - w H g.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations

import mpmath
from mpmath import mpf

from . import exprlang as el
from .jets import Jet2, jet_elem, jet_eval, jet_lift, jet_partial
from .mpnum import eps_half, is_zero, to_big


class WebError(ArithmeticError):
    pass


class DegenerateWeb(WebError):
    pass


class NonpositiveCurvature(WebError):
    pass


class NoRoot(WebError):
    pass


class CausticAmbiguity(WebError):
    def __init__(self, msg, roots):
        super().__init__(msg)
        self.roots = roots


# -- weighted jets ---------------------------------------------------------

@dataclass(frozen=True)
class WeightedJet:
    jet: Jet2
    weight: int

    @property
    def value(self):
        return self.jet.value

    def __add__(self, other):
        if isinstance(other, WeightedJet):
            if other.weight != self.weight:
                raise WebError(f"adding weights {self.weight} and {other.weight}")
            return WeightedJet(self.jet + other.jet, self.weight)
        return WeightedJet(self.jet + other, self.weight)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return WeightedJet(-self.jet, self.weight)

    def __mul__(self, other):
        if isinstance(other, WeightedJet):
            return WeightedJet(self.jet * other.jet, self.weight + other.weight)
        return WeightedJet(self.jet * other, self.weight)

    __rmul__ = __mul__

    def truncate(self, M):
        return WeightedJet(self.jet.truncate(M), self.weight)


# -- frame -----------------------------------------------------------------

@dataclass
class WebFrame:
    point: tuple
    order: int
    f: Jet2
    fx: Jet2
    fy: Jet2
    H: WeightedJet
    K: WeightedJet
    fx_nonzero: bool
    fy_nonzero: bool
    K_nonzero: bool
    K_positive: bool
    _inv: dict = field(default_factory=dict, repr=False)

    def d(self, i, g: Jet2):
        """Frame derivative d_i of a plain jet."""
        inv = self._inv.get(i)
        if inv is None:
            inv = -(self.fx if i == 1 else self.fy).reciprocal()
            self._inv[i] = inv
        return inv * jet_partial(g, "x" if i == 1 else "y")

    def explicit_K(self):
        """The 4-term expression of K in derivatives of f."""
        fx, fy = self.fx, self.fy
        fxx, fxy, fyy = jet_partial(fx, "x"), jet_partial(fx, "y"), jet_partial(fy, "y")
        fxxy, fxyy = jet_partial(fxx, "y"), jet_partial(fxy, "y")
        return (fxyy / (fx * fy * fy) - fxxy / (fx * fx * fy)
                + fxx * fxy / (fx ** 3 * fy) - fxy * fyy / (fx * fy ** 3))


def frame_from_jet(fj: Jet2):
    """Frame of the web with web-function jet ``fj``."""
    if fj.order < 3:
        raise WebError("web function jet must have order >= 3")
    fx, fy = jet_partial(fj, "x"), jet_partial(fj, "y")
    fscale = max(abs(c) for c in fj.c[:6])
    fx_nz = not is_zero(fx.value, fscale)
    fy_nz = not is_zero(fy.value, fscale)
    if not (fx_nz and fy_nz):
        which = "f_x" if not fx_nz else "f_y"
        raise DegenerateWeb(f"{which} vanishes at the point")
    fxy = jet_partial(fx, "y")
    H = fxy / (fx * fy)
    frame = WebFrame(fj.base, fj.order, fj, fx, fy, WeightedJet(H, 0), None, fx_nz, fy_nz, False, False)
    d1H, d2H = frame.d(1, H), frame.d(2, H)
    K = d1H - d2H
    scale = max(abs(d1H.value), abs(d2H.value))
    kz = is_zero(K.value, scale) if scale else K.value == 0
    frame.K = WeightedJet(K, 2)
    frame.K_nonzero = not kz
    frame.K_positive = (not kz) and K.value > 0
    return frame


def web_frame(f, point, order=12):
    """Frame of the web with web function ``f`` (Expr or source text)."""
    if isinstance(f, str):
        f = el.parse(f)
    return frame_from_jet(jet_lift(f, point, order))


def cov_d(frame: WebFrame, g: WeightedJet, index):
    """delta_i(g) = d_i(g) - w H g, raising the weight by one."""
    if g.jet.order < 1:
        raise WebError("jet order exhausted")
    dg = frame.d(index, g.jet)
    if g.weight:
        dg = dg - frame.H.jet * g.jet * g.weight
    return WeightedJet(dg, g.weight + 1)


def commutator(frame, g: WeightedJet):
    """delta_2 delta_1 g - delta_1 delta_2 g (equals w K g)."""
    return cov_d(frame, cov_d(frame, g, 1), 2) - cov_d(frame, cov_d(frame, g, 2), 1)


# -- symmetrized derivatives of K ---------------------------------------------

def canonical(word):
    return "".join(sorted(word))


def k_words(max_len=6):
    return ["".join("1" * a + "2" * (n - a)) for n in range(max_len + 1) for a in range(n, -1, -1)]


R = Fraction


def k_table(frame: WebFrame, max_len=6):
    """K and its symmetrized covariant derivatives K_sigma, |sigma| <= max_len.

    Built left to right from pure delta_1 chains plus the symmetrization
    corrections; pure delta_2 chains give K_2..2.
    """
    if frame.K.jet.order < max_len:
        raise WebError(f"jet order {frame.order} too low for K-derivatives of order {max_len}")
    t = {"": frame.K}

    def d(i, w):
        return cov_d(frame, t[w], i)

    def g(w):
        return t[w]

    for n in range(1, max_len + 1):
        t["1" * n] = d(1, "1" * (n - 1))
        t["2" * n] = d(2, "2" * (n - 1))
        for a in range(n - 1, 0, -1):
            b = n - a
            w = "1" * a + "2" * b
            t[w] = d(1, "1" * (a - 1) + "2" * b) + _k_correction(w, g)
    return {w: t[w] for w in k_words(max_len)}


def _k_correction(w, g):
    K = g("")
    table = {
        "12": lambda: K * K,
        "112": lambda: K * g("1") * R(5, 3),
        "122": lambda: K * g("2") * R(10, 3),
        "1112": lambda: K * g("11") * R(11, 6) + g("1") * g("1") * R(5, 6),
        "1122": lambda: K * g("12") * R(11, 3) + g("1") * g("2") * R(5, 3),
        "1222": lambda: K * g("22") * R(11, 2) + g("2") * g("2") * R(5, 2),
        "11112": lambda: (K * g("111") + g("1") * g("11")) * R(21, 10),
        "11122": lambda: (K * g("112") * 3 + g("2") * g("11") + g("1") * g("12") * 2) * R(7, 5),
        "11222": lambda: (K * g("122") * 3 + g("1") * g("22") + g("2") * g("12") * 2) * R(21, 10),
        "12222": lambda: (K * g("222") + g("2") * g("22")) * R(42, 5),
        "111112": lambda: K * g("1111") * R(12, 5) + g("1") * g("111") * R(14, 5) + g("11") * g("11") * R(7, 5),
        "111122": lambda: (K * g("1112") * 24 + g("2") * g("111") * 7 + g("1") * g("112") * 21
                           + g("12") * g("11") * 14) * R(1, 5),
        "111222": lambda: (K * g("1122") * 36 + g("1") * g("122") * 21 + g("2") * g("112") * 21
                           + g("11") * g("22") * 7 + g("12") * g("12") * 14) * R(1, 5),
        "112222": lambda: (K * g("1222") * 24 + g("1") * g("222") * 7 + g("2") * g("122") * 21
                           + g("12") * g("22") * 14) * R(2, 5),
        "122222": lambda: K * g("2222") * 12 + g("2") * g("222") * 14 + g("22") * g("22") * 7,
    }
    return table[w]()


def ordered_derivative(frame, word):
    """delta_{w_1} ... delta_{w_n} K, rightmost operator applied first."""
    g = frame.K
    for i in reversed(word):
        g = cov_d(frame, g, int(i))
    return g


def symmetrized_derivative(frame, word):
    """Average of ordered derivatives over all distinct orderings of ``word``."""
    words = sorted(set(permutations(word)))
    acc = None
    for w in words:
        v = ordered_derivative(frame, w)
        acc = v if acc is None else acc + v
    return acc * R(1, len(words))


# -- absolute invariants ---------------------------------------------------

def _require_positive(frame):
    if not frame.K_nonzero or frame.K.value <= 0:
        raise NonpositiveCurvature("K must be positive at the point for the a-invariants")


def a_jets(frame: WebFrame):
    """Jets of a_1 = -delta_1 K / (2 K^(3/2)) and a_2 (weight 0)."""
    _require_positive(frame)
    K = frame.K
    K32 = jet_elem("pow", K.jet, Fraction(3, 2))
    a1 = -cov_d(frame, K, 1).jet / (K32 * 2)
    a2 = -cov_d(frame, K, 2).jet / (K32 * 2)
    return WeightedJet(a1, 0), WeightedJet(a2, 0)


def a_invariants(frame):
    a1, a2 = a_jets(frame)
    return a1.value, a2.value


def nabla(frame: WebFrame, h: WeightedJet, index):
    """nabla_i = (1/k) d_i on absolute invariants, k = sqrt(K)."""
    if h.weight != 0:
        raise WebError("nabla applies to weight-0 (absolute) invariants")
    _require_positive(frame)
    k = frame._inv.get("k")
    if k is None:
        k = jet_elem("sqrt", frame.K.jet)
        frame._inv["k"] = k
    return WeightedJet(frame.d(index, h.jet) / k, 0)


@dataclass
class RigidityReport:
    a1: mpf
    a2: mpf
    normalization_residual: mpf
    jacobian_xy: mpf
    J: mpf
    functionally_dependent: bool
    relation_residuals: tuple
    classification: str
    threshold: mpf


def _rigidity_core(frame):
    a1, a2 = a_jets(frame)

    def N(h, *idx):
        for i in reversed(idx):
            h = nabla(frame, h, i)
        return h.value

    n1a1, n2a1 = N(a1, 1), N(a1, 2)
    n1a2, n2a2 = N(a2, 1), N(a2, 2)
    A1, A2 = a1.value, a2.value
    n12a2, n21a2 = N(a2, 1, 2), N(a2, 2, 1)
    n11a2, n22a2 = N(a2, 1, 1), N(a2, 2, 2)
    r1 = A2 * n1a2 ** 2 + n12a2 * n1a2 - (A1 * n1a2 * n2a2 + n11a2 * n2a2)
    r2 = A2 * n2a2 * n1a2 + n22a2 * n1a2 - (A1 * n2a2 ** 2 + n21a2 * n2a2)
    # compatibility of the system for the symmetry factor s, taken with
    # [nabla_1, nabla_2] = -a_2 nabla_1 + a_1 nabla_2 and multiplied through by
    # D = nabla_2(a_2)
    D = n2a2
    r3 = (D * (N(a2, 2, 1, 2) - N(a2, 1, 2, 2) - A2 * n12a2 + A1 * n22a2 + A2 * n21a2
               - A2 ** 2 * n1a2 + A1 * A2 * D) - A2 * n1a2 * n22a2)
    J = n1a1 * n2a2 - n1a2 * n2a1
    jac = (jet_partial(a1.jet, "x").value * jet_partial(a2.jet, "y").value
           - jet_partial(a1.jet, "y").value * jet_partial(a2.jet, "x").value)
    norm = n1a2 - n2a1 - 1
    scale = max(abs(n1a1), abs(n2a1), abs(n1a2), abs(n2a2), 1) ** 2
    return dict(a1=A1, a2=A2, norm=norm, J=J, jac=jac, rel=(r1, r2, r3), scale=scale)


def rigidity_report(f, point, order=12, threshold=None, offset=mpf("1e-3")):
    """Infinitesimal rigidity diagnostics at ``point`` (Expr or source f)."""
    if isinstance(f, str):
        f = el.parse(f)
    if order < 8:
        raise WebError("rigidity needs jet order >= 8")
    frame = web_frame(f, point, order)
    core = _rigidity_core(frame)
    tol = eps_half() if threshold is None else threshold
    x0, y0 = to_big(point[0]), to_big(point[1])
    dep = abs(core["jac"]) <= tol * core["scale"]
    if dep:
        for dx, dy in ((offset, 0), (-offset, 0), (0, offset), (0, -offset)):
            other = _rigidity_core(web_frame(f, (x0 + dx, y0 + dy), order))
            if abs(other["jac"]) > tol * other["scale"]:
                dep = False
                break
    J = core["J"]
    rel = core["rel"]
    rel_scale = core["scale"] * max(1, abs(core["a1"]), abs(core["a2"])) ** 2
    if abs(J) > tol * core["scale"]:
        cls = "InfinitesimallyRigid"
    elif all(abs(r) <= tol * rel_scale for r in rel):
        cls = "AdmitsAutomorphismCandidate"
    else:
        cls = "Undetermined"
    return RigidityReport(core["a1"], core["a2"], core["norm"], core["jac"], J, dep, rel, cls, tol)


# -- linearity -------------------------------------------------------------

def linearity_residual_jet(fj: Jet2):
    fx, fy = jet_partial(fj, "x"), jet_partial(fj, "y")
    fxx, fxy, fyy = jet_partial(fx, "x"), jet_partial(fx, "y"), jet_partial(fy, "y")
    return fy * fy * fxx - fx * fy * fxy * 2 + fx * fx * fyy


def linearity_residual(f, point):
    """f_y^2 f_xx - 2 f_x f_y f_xy + f_x^2 f_yy at the point."""
    if isinstance(f, str):
        f = el.parse(f)
    return linearity_residual_jet(jet_lift(f, point, 2)).value


def linearity_determinant(f, point):
    """det [[f_xx, f_xy, f_x], [f_xy, f_yy, f_y], [f_x, f_y, 0]]."""
    if isinstance(f, str):
        f = el.parse(f)
    j = jet_lift(f, point, 2)
    fx, fy = j.coef(1, 0), j.coef(0, 1)
    fxx, fxy, fyy = 2 * j.coef(2, 0), j.coef(1, 1), 2 * j.coef(0, 2)
    return mpmath.det(mpmath.matrix([[fxx, fxy, fx], [fxy, fyy, fy], [fx, fy, 0]]))


# -- Euler webs ------------------------------------------------------------

def _univariate(e, t):
    return el.evaluate(e, 0, t, mpmath.mp.prec)


def euler_roots(w0, x, y, window=None, samples=400):
    """Real roots lambda of y + w0(lambda) x - lambda = 0 in a search window.

    ``w0`` is written in the variable y.
    """
    x, y = to_big(x), to_big(y)
    if window is None:
        r = 10 * (1 + abs(y))
        window = (y - r, y + r)
    lo, hi = to_big(window[0]), to_big(window[1])

    def g(t):
        return y + _univariate(w0, t) * x - t

    pts = [lo + (hi - lo) * k / samples for k in range(samples + 1)]
    vals = []
    for t in pts:
        try:
            vals.append(g(t))
        except el.EvalDomainError:
            vals.append(None)
    roots = []
    for (t0, v0), (t1, v1) in zip(zip(pts, vals), zip(pts[1:], vals[1:])):
        if v0 is None or v1 is None:
            continue
        if v0 == 0:
            roots.append(t0)
        elif v0 * v1 < 0:
            roots.append(mpmath.findroot(g, (t0, t1), solver="anderson"))
    # a root at a domain edge (e.g. lambda = 0 for sqrt(-lambda)) is picked up by its neighbour
    out = []
    for r in roots:
        if not any(abs(r - s) <= abs(hi - lo) * mpf(2) ** (-mpmath.mp.prec // 2) for s in out):
            out.append(r)
    return out


def euler_web_jet(w0, F, point, order, branch=None, window=None):
    """Jet of f = F(w) where w solves the Euler equation with Cauchy data w0.

    The implicit root lambda(x, y) is lifted to a jet by Newton iteration in
    jet arithmetic, doubling the correct order at each step.
    """
    x0, y0 = to_big(point[0]), to_big(point[1])
    lam0 = select_root(euler_roots(w0, x0, y0, window), branch)
    base = (x0, y0)
    X, Y = Jet2.var(base, order, "x"), Jet2.var(base, order, "y")
    dw0 = el.diff(w0, "y")
    lam = Jet2.const(base, order, lam0)
    for _ in range(order.bit_length() + 2):
        env = {"x": X, "y": lam}
        G = Y + jet_eval(w0, env) * X - lam
        dG = jet_eval(dw0, env) * X - 1
        lam = lam - G / dG
    w = jet_eval(w0, {"x": X, "y": lam})
    if F is None:
        return w
    return jet_eval(F, {"x": X, "y": w})


def select_root(roots, branch):
    if not roots:
        raise NoRoot("no root of the Euler system in the search window")
    if branch is None:
        if len(roots) > 1:
            raise CausticAmbiguity(f"{len(roots)} roots in the search window", roots)
        return roots[0]
    if branch == "min":
        return min(roots)
    if branch == "max":
        return max(roots)
    return roots[int(branch)]


def euler_web_eval(w0, F, point, branch=None, window=None):
    """Value f = F(w(x, y)) of the linear web generated by the Cauchy data w0.

    ``w0`` and ``F`` are univariate expressions written in the variable y;
    ``F = None`` means the identity.  With several roots and no ``branch``,
    CausticAmbiguity carries (lambda, f) for each root.
    """
    if isinstance(w0, str):
        w0 = el.parse(w0)
    if isinstance(F, str):
        F = el.parse(F)
    x0, y0 = to_big(point[0]), to_big(point[1])
    roots = euler_roots(w0, x0, y0, window)

    def value(lam):
        w = _univariate(w0, lam)
        return w if F is None else _univariate(F, w)

    if branch is None and len(roots) > 1:
        raise CausticAmbiguity(f"{len(roots)} roots in the search window",
                               [(r, value(r)) for r in roots])
    return value(select_root(roots, branch))
