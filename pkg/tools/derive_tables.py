#!/usr/bin/env python3
"""Regenerate the coefficient table used by weblin.obstruction.

The G, G_ij and V coefficients are obtained by symbolic elimination
starting from the compatibility functions I1, I2 and the reduced Mayer
bracket I12.  The output is a plain-text file with one record per term:

    target  coefficient  u_power  K_monomial  factors

``factors`` is a product of the coefficient names (A11, B121, ...) for
the V polynomials and ``1`` otherwise.  Total covariant derivative
fields of the K-symbols are written with targets ``d1:K12`` etc.

Usage: python3 tools/derive_tables.py [OUT]   (needs sympy)
"""
import sys
import time
from functools import lru_cache
from itertools import permutations
from pathlib import Path

import sympy as sp

WEIGHT = {"K": 2, "h": 1}
DEFAULT_OUT = Path(__file__).resolve().parent.parent / "src" / "weblin" / "data" / "coefficients.tsv"


# -- ordered covariant derivatives ---------------------------------------
# n{name}_{a}_{b} denotes delta_1^a delta_2^b applied to the base function.

def nsym(name, a, b):
    return sp.Symbol(f"n{name}_{a}_{b}")


def nparse(s):
    head, a, b = s.name[1:].split("_")
    return head, int(a), int(b)


def delta(i, expr):
    expr = sp.expand(expr)
    res = 0
    for s in expr.free_symbols:
        if s.name.startswith("n"):
            res += sp.diff(expr, s) * delta_n(i, s)
    return sp.expand(res)


@lru_cache(None)
def delta_n(i, s):
    name, a, b = nparse(s)
    if i == 1:
        return nsym(name, a + 1, b)
    if a == 0:
        return nsym(name, 0, b + 1)
    # delta_2 delta_1 g = delta_1 delta_2 g + w K g
    prev = nsym(name, a - 1, b)
    w = WEIGHT[name] + a - 1 + b
    return sp.expand(delta(1, delta_n(2, prev)) + w * nsym("K", 0, 0) * prev)


def ordered(name, word):
    e = nsym(name, 0, 0)
    for i in reversed(word):
        e = delta(i, e)
    return e


@lru_cache(None)
def symmetrized(name, a, b):
    words = set(permutations([1] * a + [2] * b))
    return sp.expand(sum(ordered(name, w) for w in words) / len(words))


def ssym(name, a, b):
    word = "1" * a + "2" * b
    if name == "K":
        return sp.Symbol("K" + word)
    return sp.Symbol("p" + word) if word else sp.Symbol("u")


@lru_cache(None)
def normal_to_sym(name, a, b):
    rest = sp.expand(symmetrized(name, a, b) - nsym(name, a, b))
    return sp.expand(ssym(name, a, b) - to_sym(rest))


def to_sym(expr):
    expr = sp.expand(expr)
    subs = {s: normal_to_sym(*nparse(s)) for s in expr.free_symbols if s.name.startswith("n")}
    return sp.expand(expr.xreplace(subs))


@lru_cache(None)
def field(i, s):
    """delta_i of a symmetrized symbol (u, p.., K..) in the symmetrized basis."""
    nm = s.name
    if nm == "u":
        name, word = "h", ""
    elif nm.startswith("p"):
        name, word = "h", nm[1:]
    else:
        name, word = "K", nm[1:]
    return to_sym(delta(i, symmetrized(name, word.count("1"), word.count("2"))))


def D(i, expr):
    expr = sp.sympify(expr)
    return sum((sp.diff(expr, s) * field(i, s) for s in expr.free_symbols), sp.Integer(0))


# -- elimination ---------------------------------------------------------

def derive():
    u, p1, p2, p11, p12, p22 = sp.symbols("u p1 p2 p11 p12 p22")
    K, K1, K2, K11, K12, K22, K112, K122 = sp.symbols("K K1 K2 K11 K12 K22 K112 K122")
    R = sp.Rational
    I1 = p11 - 2 * p12 - u * p1 + 2 * u * p2 + K1
    I2 = p22 - 2 * p12 - 2 * u * p1 + u * p2 + K2
    I12 = (24 * K * p12 + 6 * (2 * K1 - K2) * p1 + 6 * (2 * K2 - K1) * p2 + 24 * K * u * (p1 - p2)
           + 3 * u * (K11 - K12 + K22) - 8 * K * (K1 + K2) + 3 * (K112 - K122) - 3 * K * u**3)
    P = sp.solve([I1, I2, I12], [p11, p12, p22], dict=True)[0]
    P = {k: sp.expand(v) for k, v in P.items()}

    def Dsub(i, e):
        return sp.expand(D(i, e).subs(P))

    G1 = sp.expand(Dsub(2, P[p11]) - Dsub(1, P[p12]) - R(5, 2) * K * p1 - K1 * u / 2)
    G2 = sp.expand(Dsub(2, P[p12]) - Dsub(1, P[p22]) - R(5, 2) * K * p2 - K2 * u / 2)
    G1 = sp.expand(G1 / G1.coeff(p1, 2))
    G2 = sp.expand(G2 / G2.coeff(p2, 2))
    print("G1, G2", time.time() - T0, file=sys.stderr)

    d1G2, d2G1 = Dsub(1, G2), Dsub(2, G1)
    second = {
        "G11": Dsub(1, G1),
        "G22": Dsub(2, G2),
        "G12s": sp.expand((d1G2 + d2G1) / 2),
        "G12a": sp.expand((d1G2 - d2G1) / 2),
    }
    # multiples of G1, G2 removed so that only the p1^2, p1p2 / p2^2 parts remain
    mult = {
        "G11": (5 * u / 4, 0),
        "G12s": (5 * u / 4, -5 * u / 4),
        "G12a": (13 * u / 4 - 3 * K2 / (8 * K), 13 * u / 4 + 3 * K1 / (8 * K)),
        "G22": (0, -5 * u / 4),
    }
    for name, (a, b) in mult.items():
        second[name] = sp.expand(second[name] - a * G1 - b * G2)
    print("G_ij", time.time() - T0, file=sys.stderr)

    def lin(e):
        return (e.coeff(p1, 1).subs(p2, 0), e.coeff(p2, 1).subs(p1, 0), e.subs({p1: 0, p2: 0}))

    vals = {}
    for nm, e in (("A1", G1), ("A2", G2), ("A11", second["G11"]), ("A12", second["G12s"]),
                  ("B12", second["G12a"]), ("A22", second["G22"])):
        c1, c2, c0 = lin(e)
        vals[nm + "1"], vals[nm + "2"], vals[nm + "0"] = c1, c2, c0

    quad = {}
    for name, e in second.items():
        quad[name + ".p1p1"] = e.coeff(p1, 2)
        quad[name + ".p1p2"] = e.coeff(p1, 1).coeff(p2, 1)
        quad[name + ".p2p2"] = e.coeff(p2, 2)

    # -- V polynomials, generic in the coefficient names -----------------
    a = {k: sp.Symbol(k) for k in vals}
    X2 = -(a["B121"] * p1 + a["B122"] * p2 + a["B120"]) / (quad["G12a.p1p2"])
    X1 = 2 * X2 - (a["A11"] * p1 + a["A12"] * p2 + a["A10"])
    X3 = 2 * X2 - (a["A21"] * p1 + a["A22"] * p2 + a["A20"])

    g11 = (quad["G11.p1p1"] * X1 + quad["G11.p1p2"] * X2 + quad["G11.p2p2"] * X3
           + a["A111"] * p1 + a["A112"] * p2 + a["A110"])
    g22 = (quad["G22.p1p1"] * X1 + quad["G22.p1p2"] * X2 + quad["G22.p2p2"] * X3
           + a["A221"] * p1 + a["A222"] * p2 + a["A220"])
    eqs = [sp.expand(e * 39 * u * K) for e in (g11, g22)]
    M = sp.Matrix([[e.coeff(p1, 1).subs(p2, 0), e.coeff(p2, 1).subs(p1, 0)] for e in eqs])
    b = sp.Matrix([-e.subs({p1: 0, p2: 0}) for e in eqs])
    scale = R(16, 117) / u
    V0 = sp.expand(M.det() * scale)
    V1 = sp.expand(sp.Matrix.hstack(b, M[:, 1]).det() * scale)
    V2 = sp.expand(sp.Matrix.hstack(M[:, 0], b).det() * scale)
    # p_i p_j = V_ij / V0 from the linear expressions for the quadratic monomials
    X2n = -4 * (a["B121"] * V1 + a["B122"] * V2 + a["B120"] * V0)
    V12 = sp.expand(X2n / (39 * u))
    V11 = sp.expand((2 * X2n - 39 * u * (a["A11"] * V1 + a["A12"] * V2 + a["A10"] * V0)) / (39 * u))
    V22 = sp.expand((2 * X2n - 39 * u * (a["A21"] * V1 + a["A22"] * V2 + a["A20"] * V0)) / (39 * u))
    vpolys = {"V0": V0, "V1": V1, "V2": V2, "V11": V11, "V12": V12, "V22": V22}
    print("V", time.time() - T0, file=sys.stderr)

    fields = {}
    for n in range(0, 6):
        for i in range(n, -1, -1):
            s = ssym("K", i, n - i)
            for k in (1, 2):
                fields[f"d{k}:{s.name}"] = field(k, s)
    return vals, quad, vpolys, fields


def monomial_parts(mono, ab_names):
    u_pow = 0
    kparts, fparts = [], []
    for base, e in sorted(mono.as_powers_dict().items(), key=lambda t: sort_key(t[0].name)):
        name = base.name
        e = int(e)
        if name == "u":
            u_pow = e
        elif name in ab_names:
            fparts.extend([name] * e)
        elif name.startswith("K"):
            kparts.append(name if e == 1 else f"{name}^{e}")
        else:
            raise ValueError(f"unexpected symbol {name}")
    if u_pow < 0:
        raise ValueError("negative power of u")
    return u_pow, "*".join(kparts) or "1", "*".join(fparts) or "1"


def sort_key(name):
    return (name[0], len(name), name)


def records(target, expr, ab_names):
    out = []
    for mono, c in sp.expand(expr).as_coefficients_dict().items():
        if c == 0:
            continue
        if mono == 1:
            u_pow, km, fs = 0, "1", "1"
        else:
            u_pow, km, fs = monomial_parts(mono, ab_names)
        out.append((target, sp.Rational(c), u_pow, km, fs))
    out.sort(key=lambda r: (-r[2], r[4], r[3], str(r[1])))
    return out


def main(argv):
    out = Path(argv[1]) if len(argv) > 1 else DEFAULT_OUT
    vals, quad, vpolys, fields = derive()
    ab = set(vals)
    order = ["A11", "A12", "A10", "A21", "A22", "A20",
             "A111", "A112", "A110", "A121", "A122", "A120",
             "A221", "A222", "A220", "B121", "B122", "B120"]
    lines = [
        "# weblin coefficient table (generated by tools/derive_tables.py; do not edit)",
        "# target\tcoefficient\tu_power\tK_monomial\tfactors",
    ]
    n = 0
    for group in (((k, vals[k]) for k in order), sorted(quad.items()),
                  ((k, vpolys[k]) for k in ("V0", "V1", "V2", "V11", "V12", "V22")),
                  fields.items()):
        for target, expr in group:
            for t, c, up, km, fs in records(target, expr, ab):
                lines.append(f"{t}\t{c}\t{up}\t{km}\t{fs}")
                n += 1
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("\n".join(lines) + "\n")
    print(f"wrote {n} records to {out} ({time.time() - T0:.1f}s)", file=sys.stderr)


T0 = time.time()

if __name__ == "__main__":
    main(sys.argv)
