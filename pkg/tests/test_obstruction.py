import hashlib
from fractions import Fraction
from importlib import resources

import pytest
from mpmath import mpf, sqrt

from weblin import exprlang as el
from weblin.mpnum import UPoly, eps_half
from weblin.obstruction import (COEFF_NAMES, Q_NAMES, V_NAMES, WEIGHTS, Evaluator, Parallelizable, _I,
                                _q_raw, ag_residuals, aux_polys, blaschke_invariants, candidate_roots,
                                compat_functions, delta_hat_K_oracle, field_values, g_system, gij_system,
                                k_values, linearizability_verdict, load_table, parse_table, padd, pderiv,
                                pij_system, pmul, tau, tau_poly)
from weblin.webcalc import DegenerateWeb, k_table, web_frame
from cases import EX5, EX6, EX6_POINT, EX7_POINT, GENERIC, LINEAR3, LINEAR3_POINT, pipeline

WEBS = {"ex6": (EX6, EX6_POINT), "ex7": (EX5, EX7_POINT), "generic": (GENERIC, ("3/10", "7/10"))}
TWO128 = mpf(2) ** -128


def maxrel(a, b):
    scale = max(max(abs(v) for v in a), max(abs(v) for v in b))
    return max(abs(x - y) for x, y in zip(a, b)) / scale


def lead(q, name):
    return q.upoly(name, eps_half()).lc


@pytest.fixture(params=sorted(WEBS))
def web(request):
    return pipeline(*WEBS[request.param])


def test_table_loads_and_hash_is_pinned():
    t = load_table()
    raw = resources.files("weblin").joinpath("data/coefficients.tsv").read_bytes()
    assert t.sha256 == hashlib.sha256(raw).hexdigest()
    for n in COEFF_NAMES + V_NAMES:
        assert n in t.terms
    again = parse_table(raw.decode())
    assert len(again) == len(t.terms)


def test_A11_quadratic_term():
    terms = load_table()["A11"]
    assert [t.coeff for t in terms if t.u_power == 2 and not t.kmono] == [Fraction(5, 8)]


@pytest.mark.parametrize("pair,sign", [(("A21", "A12"), -1), (("A22", "A11"), -1), (("A20", "A10"), 1),
                                        (("A222", "A111"), -1), (("A221", "A112"), -1),
                                        (("A220", "A110"), 1), (("V0", "V0"), -1), (("V2", "V1"), 1),
                                        (("V22", "V11"), -1), (("V12", "V12"), -1)])
def test_tau_relations(web, pair, sign):
    _, kd5, _, _ = web
    ev = Evaluator(k_values(kd5))
    lhs = ev.poly(pair[0])
    rhs = [sign * c for c in tau_poly(pair[1], kd5)]
    assert maxrel(lhs, rhs) <= TWO128


def test_tau_is_involution(web):
    _, kd5, _, _ = web
    back = tau(tau(kd5))
    assert all(back[w].value == kd5[w].value for w in kd5)


def test_tau_image_of_A112():
    fr, kd5, _, _ = pipeline(*WEBS["generic"])
    img = [-c for c in tau_poly("A112", kd5)]
    K, K2 = kd5[""].value, kd5["2"].value
    assert len(img) == 4
    assert abs(img[3] + mpf(3) / 16) < 1e-70
    assert abs(img[2] + 3 * K2 / (16 * K)) < 1e-70


def test_leading_coefficients_closed_forms(web):
    fr, kd5, _, q = web
    K, K1, K2, K11, K12 = (kd5[w].value for w in ("", "1", "2", "11", "12"))
    c = mpf(13) * 3 ** 9 / 2 ** 17
    close = lambda a, b: abs(a - b) <= mpf(10) ** -30 * abs(b)
    assert close(lead(q, "Qa"), c * K ** 3 * (K1 + K2))
    assert close(lead(q, "Qs"), -mpf(65) * 3 ** 6 / 2 ** 15 * K ** 4)
    assert close(lead(q, "Q12"), -mpf(65) * 3 ** 6 / 2 ** 16 * K ** 4)
    assert close(q.V["V0"].upoly(eps_half()).lc, -mpf(13) * 27 / 64 * K ** 2)
    assert close(q.V["V1"].upoly(eps_half()).lc, -mpf(81) / 256 * K * K1)
    L, _ = aux_polys(q)
    assert close(UPoly(L, eps_half()).lc, mpf(13) * 3 ** 10 / 2 ** 17 * K ** 3 * (K2 - K1))
    # Q1 = Qa' V1 + V0 dhat_1(Qa); the top term carries K11 and K12 through dhat_1
    d1 = c * (3 * K ** 2 * K1 * (K1 + K2) + K ** 3 * (K11 + K12 - K ** 2))
    q1 = 17 * c * K ** 3 * (K1 + K2) * (-mpf(81) / 256 * K * K1) - mpf(13) * 27 / 64 * K ** 2 * d1
    assert close(lead(q, "Q1"), q1)


def test_reference_Q1_closed_form_disagrees_with_reference_numerics():
    _, kd5, _, q = pipeline(EX6, EX6_POINT)
    K, K1 = kd5[""].value, kd5["1"].value
    reference_form = mpf(131) * 65 * 3 ** 9 / 2 ** 23 * K ** 5 * K1
    assert abs(lead(q, "Q1") - mpf("-3.94038")) < 1e-5
    assert abs(reference_form - lead(q, "Q1")) > 1


def test_degrees(web):
    _, _, _, q = web
    eps = eps_half()
    want_v = {"V0": 7, "V1": 8, "V2": 8, "V11": 11, "V12": 11, "V22": 11}
    assert {n: q.V[n].upoly(eps).degree for n in V_NAMES} == want_v
    deg = {n: q.upoly(n, eps).degree for n in Q_NAMES}
    assert deg["Qa"] <= 17 and deg["Qs"] == 18 and deg["Q12"] == 18
    assert deg["Q1"] == 24 and deg["Q2"] == 24
    L, S = aux_polys(q)
    assert UPoly(L, eps).degree <= 17 and UPoly(S, eps).degree <= 16


def test_weight_homogeneity_structure(web):
    _, _, _, q = web
    for n in Q_NAMES:
        assert q.polys[n].homogeneous() and q.polys[n].W == WEIGHTS[n]
    assert WEIGHTS["Qa"] == WEIGHTS["Qs"] == WEIGHTS["Q12"] == 26


def test_weight_rescaling(web):
    _, kd5, _, _ = web
    s = 2
    vals = k_values(kd5)
    scaled = {k: v * s ** (len(k) + 1) for k, v in vals.items()}
    base = _q_raw({n: Evaluator(vals).poly(n) for n in V_NAMES})
    other = _q_raw({n: Evaluator(scaled).poly(n) for n in V_NAMES})
    for p, r in zip(base, other):
        for k, (a, b) in enumerate(zip(p, r)):
            assert abs(b - a * s ** (26 - k)) <= mpf(10) ** -60 * max(abs(b), 1)


def test_field_components():
    _, _, kd6, _ = pipeline(*WEBS["generic"])
    vals = {w: v.value for w, v in kd6.items()}
    f1, f2 = field_values(vals, 1), field_values(vals, 2)
    K = vals[""]
    assert f1[""] == vals["1"] and f2[""] == vals["2"]
    assert abs(f2["1"] - (vals["12"] + K * K)) < 1e-70
    assert abs(f1["2"] - (vals["12"] - K * K)) < 1e-70


@pytest.mark.parametrize("index", [1, 2])
def test_delta_hat_oracle_matches_jet_route(web, index):
    _, kd5, kd6, q = web
    qa, dhat = delta_hat_K_oracle(index, kd6)
    assert maxrel(qa, q.polys["Qa"].values()) < mpf(10) ** -60
    ev = Evaluator(k_values(kd5))
    V = {n: ev.poly(n) for n in ("V0", f"V{index}")}
    oracle = padd(pmul(pderiv(qa), V[f"V{index}"]), pmul(V["V0"], dhat))
    jet = q.polys[f"Q{index}"].values()
    assert maxrel(oracle, jet) < mpf(10) ** -30


def test_linear_web_annihilates_Q():
    fr, _, _, q = pipeline(LINEAR3, LINEAR3_POINT)
    x, y = mpf(1), mpf(1) / 2
    u = 1 / (x + sqrt(x * x - y))
    for n in Q_NAMES:
        p = q.upoly(n)
        scale = sum(abs(c) * u ** k for k, c in enumerate(p.coeffs))
        assert abs(p(u)) <= mpf(10) ** -40 * scale


def test_linear_web_compatibility():
    fr, kd5, _, _ = pipeline(LINEAR3, LINEAR3_POINT)
    K = {w: v.value for w, v in kd5.items()}
    assert all(abs(r) < mpf(10) ** -60 for r in compat_functions(fr, kd5, "1/(x+sqrt(x^2-y))"))
    u = 1 / (1 + sqrt(mpf(1) / 2))
    p1 = p2 = K[""]
    g = g_system(fr, kd5)
    assert abs(g.G1(u, p1, p2)) < 1e-60 and abs(g.G2(u, p1, p2)) < 1e-60
    gij = gij_system(fr, kd5)
    for name in ("G11", "G12s", "G12a", "G22"):
        assert abs(gij.form(name, u, p1, p2)) < 1e-60
    p11, p12, p22 = pij_system(K, u, p1, p2)
    assert all(abs(r) < 1e-60 for r in _I(K, u, p1, p2, p11, p12, p22))


def test_constant_mu_is_not_a_solution():
    fr, kd5, _, _ = pipeline(EX6, EX6_POINT)
    assert max(abs(r) for r in compat_functions(fr, kd5, "1/3")) > 1e-3


def test_gij_determinant_coefficient():
    fr, kd5, _, _ = pipeline(*WEBS["generic"])
    gij = gij_system(fr, kd5)
    p = gij.quad["G12a.p1p2"]
    assert p[0] == 0 and abs(p[1] - mpf(39) / 4) < 1e-70


def test_pij_scaling():
    _, kd5, _, _ = pipeline(*WEBS["generic"])
    K = {w: v.value for w, v in kd5.items()}
    u, p1, p2 = mpf("0.37"), mpf("-1.3"), mpf("0.42")
    s = 3
    Ks = {w: v * s ** (2 + len(w)) for w, v in K.items()}
    a = pij_system(K, u, p1, p2)
    b = pij_system(Ks, s * u, s * s * p1, s * s * p2)
    assert all(abs(y - x * s ** 3) < mpf(10) ** -60 * abs(y) for x, y in zip(a, b))


def test_pij_tau_symmetry():
    _, kd5, _, _ = pipeline(*WEBS["generic"])
    K = {w: v.value for w, v in kd5.items()}
    T = {w: v.value for w, v in tau(kd5).items()}
    u, p1, p2 = mpf("0.37"), mpf("-1.3"), mpf("0.42")
    p11, p12, p22 = pij_system(K, u, p1, p2)
    # tau sends p_i to -p_ibar
    q11, q12, q22 = pij_system(T, -u, -p2, -p1)
    assert abs(q11 + p22) < 1e-60 and abs(q22 + p11) < 1e-60 and abs(q12 + p12) < 1e-60


def test_ag_residuals():
    fr = web_frame(LINEAR3, LINEAR3_POINT, 8)
    assert all(abs(r) < 1e-60 for r in ag_residuals(fr, "0", "0", "1/(x+sqrt(x^2-y))"))
    fr = web_frame(EX6, EX6_POINT, 8)
    r = ag_residuals(fr, "0", "0", "0")
    assert abs(r[0] + fr.K.value) < 1e-70 and abs(r[3] + fr.K.value) < 1e-70
    assert r[1] == 0 and r[2] == 0


def test_blaschke_invariants_linear_web():
    _, _, _, q = pipeline(LINEAR3, LINEAR3_POINT)
    inv = blaschke_invariants(q, "order8")
    assert len(inv) == 18


def test_verdict_linear_web():
    rep = linearizability_verdict(LINEAR3, LINEAR3_POINT, invariants="order8")
    target = 1 / (1 + sqrt(mpf(1) / 2))
    assert rep.verdict == "Linearizable" and rep.gcd_degree >= 1
    assert any(abs(r - target) < mpf(10) ** -30 for r in rep.roots)
    assert 1 <= rep.bound <= 15
    assert rep.invariants_relative < mpf(10) ** -40


def test_verdict_generic_web():
    rep = linearizability_verdict(GENERIC, ("3/10", "7/10"))
    assert rep.verdict == "NotLinearizable" and rep.roots == []
    assert rep.tolerances["closest_residual"] > 1e-3


@pytest.mark.parametrize("f,point,mu", [(EX6, EX6_POINT, "3*(x+y)/((x-y)*(2*x+y)*(x+2*y))"),
                                         (EX5, EX7_POINT, "exp(x)/(1-x-y)")])
def test_examples_admit_common_root(f, point, mu):
    # the five polynomials share a real root, and it comes from an exact solution
    # of the compatibility system, so both webs pass the criterion
    rep = linearizability_verdict(f, point)
    fr, kd5, _, _ = pipeline(f, point)
    u = el.evaluate(el.parse(mu), *point)
    assert rep.verdict == "Linearizable"
    assert any(abs(r - u) < mpf(10) ** -30 * abs(u) for r in rep.roots)
    scale = max(abs(v.value) for v in kd5.values()) ** 2
    assert all(abs(r) < mpf(10) ** -60 * scale for r in compat_functions(fr, kd5, mu))


@pytest.mark.parametrize("point", [("1/3", 2), ("2", "1/5")])
def test_example6_mu_solves_compatibility_elsewhere(point):
    fr = web_frame(EX6, point, 10)
    kd = k_table(fr, 5)
    res = compat_functions(fr, kd, "3*(x+y)/((x-y)*(2*x+y)*(x+2*y))")
    scale = max(abs(v.value) for v in kd.values()) ** 2
    assert all(abs(r) < mpf(10) ** -60 * scale for r in res)


def test_degenerate_paths():
    with pytest.raises(Parallelizable):
        linearizability_verdict("x+y", (1, 2))
    with pytest.raises(DegenerateWeb):
        linearizability_verdict("y^2+x", (0, 0))


def test_u_zero_root_is_excluded():
    a = UPoly.from_roots([0, mpf(1) / 3, 2])
    b = UPoly.from_roots([0, mpf(1) / 3, -5, 7])
    G, roots, _, _ = candidate_roots({"Qa": a, "Qs": b}, eps_half())
    assert G.degree == 2
    assert len(roots) == 1 and abs(roots[0] - mpf(1) / 3) < 1e-60
    _, roots, _, _ = candidate_roots({"Qa": UPoly.from_roots([0, 1]), "Qs": UPoly.from_roots([0, 2])}, eps_half())
    assert roots == []
