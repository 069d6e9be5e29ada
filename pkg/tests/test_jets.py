import pytest
from mpmath import mpf

from weblin import exprlang as el
from weblin.jets import Jet2, jet_elem, jet_lift, jet_partial
from cases import EX6, EX7

BASE = (mpf(1) / 3, mpf(2) / 7)


def lift(src, point, order):
    return jet_lift(el.parse(src), point, order)


def close(a, b, tol=mpf(2) ** -128):
    return all(abs(x - y) <= tol * max(1, abs(y)) for x, y in zip(a.c, b.c))


def test_lift_exp():
    j = lift("exp(x)", (0, 0), 3)
    for i in range(4):
        assert abs(j.coef(i, 0) - 1 / mpf(__import__("math").factorial(i))) < 1e-70
        for k in range(1, 4 - i):
            assert j.coef(i, k) == 0


def test_lift_example6_polynomial():
    j = lift(EX6, ("1/10", "1"), 2)
    expect = {(0, 0): "1.11", (1, 0): "1.2", (0, 1): "2.1", (2, 0): 1, (1, 1): 1, (0, 2): 1}
    for (i, k), v in expect.items():
        assert abs(j.coef(i, k) - mpf(v)) < 1e-70


def test_lift_sqrt_web():
    j = lift("x+sqrt(x^2-y)", (0, -1), 1)
    assert j.coef(0, 0) == 1 and j.coef(1, 0) == 1 and j.coef(0, 1) == mpf(-1) / 2


def test_domain_errors():
    with pytest.raises(el.EvalDomainError):
        lift("sqrt(x)", (-1, 0), 2)
    with pytest.raises(el.EvalDomainError):
        lift("1/x", (0, 1), 2)


def test_partials():
    j = lift("x*y", BASE, 4)
    assert close(jet_partial(j, "x"), lift("y", BASE, 3))
    g = lift("sin(x*y)+exp(x-y^2)", BASE, 6)
    assert close(jet_partial(jet_partial(g, "x"), "y"), jet_partial(jet_partial(g, "y"), "x"))
    assert all(c == 0 for c in jet_partial(Jet2.const(BASE, 3, 5), "x").c)


def test_arithmetic_identities():
    a = lift("1+x+y^2+sin(x*y)", BASE, 6)
    b = lift("exp(x)-y", BASE, 6)
    assert (a * b).value == a.value * b.value
    unit = a / a
    assert abs(unit.value - 1) < 1e-70 and all(abs(c) < 1e-70 for c in unit.c[1:])
    assert close(jet_elem("exp", jet_elem("log", a)), a)


def test_product_rule():
    a = lift("x^3*y+cos(y)", BASE, 7)
    b = lift("log(2+x*y)", BASE, 7)
    lhs = jet_partial(a * b, "x")
    rhs = jet_partial(a, "x") * b + a * jet_partial(b, "x")
    assert close(lhs, rhs)


def test_truncation_consistency():
    hi = lift(EX7, ("0", "1/10"), 10).truncate(5)
    lo = lift(EX7, ("0", "1/10"), 5)
    assert close(hi, lo)


@pytest.mark.parametrize("src,point", [(EX6, ("1/10", "1")), (EX7, ("0", "1/10"))])
def test_jets_match_symbolic_derivatives(src, point):
    e = el.parse(src)
    j = jet_lift(e, point, 6)
    cur = {(0, 0): e}
    for n in range(1, 7):
        for i in range(n + 1):
            k = n - i
            cur[(i, k)] = el.diff(cur[(i - 1, k)], "x") if i else el.diff(cur[(i, k - 1)], "y")
    for (i, k), d in cur.items():
        ref = el.evaluate(d, *point)
        got = j.derivative_value(i, k)
        assert abs(got - ref) <= mpf(10) ** -50 * max(1, abs(ref))
