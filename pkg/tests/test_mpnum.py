import random

import pytest
from mpmath import mp, mpf

from weblin.mpnum import (UPoly, approx_gcd, complex_roots, eps_half, generalized_resultants,
                          invariant_count, real_roots, relative_resultant, resultant, to_big)


def P(*c):
    return UPoly(list(c))


def test_resultant_linear():
    assert resultant(P(-2, 1), P(-5, 1)) == 3 or resultant(P(-2, 1), P(-5, 1)) == -3
    a, b = mpf(2), mpf(5)
    assert resultant(P(-a, 1), P(-b, 1)) == b - a or resultant(P(-a, 1), P(-b, 1)) == a - b


def test_resultant_shared_root():
    f = UPoly.from_roots([1, 2])
    assert abs(resultant(f, P(-1, 1))) < mpf(10) ** -60


def test_resultant_antisymmetry():
    rng = random.Random(7)
    for _ in range(5):
        f = UPoly([mpf(rng.uniform(-1, 1)) for _ in range(rng.randint(2, 6))])
        g = UPoly([mpf(rng.uniform(-1, 1)) for _ in range(rng.randint(2, 6))])
        lhs = resultant(f, g)
        rhs = (-1) ** (f.degree * g.degree) * resultant(g, f)
        assert abs(lhs - rhs) <= eps_half() * abs(lhs)


def test_resultant_vanishes_iff_common_factor():
    rng = random.Random(11)
    for planted in (True, False):
        for _ in range(3):
            a = [mpf(rng.uniform(-2, 2)) for _ in range(3)]
            b = [mpf(rng.uniform(-2, 2)) for _ in range(3)]
            common = [mpf(rng.uniform(-2, 2))] if planted else []
            f, g = UPoly.from_roots(a + common), UPoly.from_roots(b + common)
            r = relative_resultant(f, g)
            g_deg = approx_gcd([f, g]).degree
            assert (abs(r) <= eps_half()) == planted
            assert (g_deg >= 1) == planted


def test_generalized_resultants_examples():
    T = UPoly.from_roots([1, 2])
    R = generalized_resultants(T, [P(-1, 1), P(-2, 1)])
    assert set(R) == {(2, 0), (1, 1), (0, 2)}
    assert abs(R[(2, 0)]) < 1e-60 and abs(R[(0, 2)]) < 1e-60
    assert abs(R[(1, 1)] + 1) < 1e-60
    R = generalized_resultants(T, [P(-1, 1), UPoly.from_roots([1, -3])])
    assert all(abs(v) < 1e-60 for v in R.values())


def test_generalized_resultant_counts_and_reduction():
    assert invariant_count(2, 17) == 18
    assert invariant_count(4, 17) == 1140
    T = UPoly.from_roots([mpf(k) / 7 for k in range(1, 18)])
    R = generalized_resultants(T, [P(3, 1), P(1, 0, 1)])
    assert len(R) == 18
    f, g = UPoly.from_roots([1, 3, 4]), P(1, 2, 1, 5)
    one = generalized_resultants(f, [g])
    assert abs(one[(3,)] - resultant(f, g)) <= eps_half() * abs(one[(3,)])


def test_gcd_examples():
    g = approx_gcd([P(-1, 0, 1), P(1, -2, 1)])
    assert g.degree == 1 and abs(g(1)) < 1e-60
    assert approx_gcd([P(1, 0, 1), P(-3, 1)]).degree == 0


def test_real_roots_examples():
    assert real_roots(P(1, 0, 1)) == []
    roots = [r for r, _ in real_roots(P(0, -1, 0, 1))]
    assert [float(r) for r in roots] == pytest.approx([-1, 0, 1], abs=1e-60)
    (r, m), = real_roots(P(-to_big("3/7"), 1))
    assert abs(r - to_big("3/7")) < 1e-70 and m == 1


def test_real_roots_multiplicity():
    (r, m), = real_roots(UPoly.from_roots([mpf(1) / 3, mpf(1) / 3]))
    assert m == 2 and abs(r - mpf(1) / 3) < 1e-30


def test_complex_roots_examples():
    roots = sorted(complex_roots(P(-2, 0, 1)), key=lambda z: z.real)
    assert abs(roots[0] + mp.sqrt(2)) < 1e-70 and abs(roots[1] - mp.sqrt(2)) < 1e-70
    cluster = complex_roots(UPoly.from_roots([1, 1, 1]))
    assert all(abs(z - 1) < 1e-20 for z in cluster) and len(cluster) == 3
    r17 = complex_roots(UPoly([1] + [0] * 16 + [1]))
    assert len(r17) == 17 and all(abs(abs(z) - 1) < 1e-70 for z in r17)


def test_complex_roots_reconstruct():
    f = UPoly([mpf(c) for c in (3, -1, 4, 1, -5, 9)])
    g = UPoly.from_roots(complex_roots(f), f.lc)
    for a, b in zip(f.coeffs, g.coeffs):
        assert abs(a - b) <= eps_half() * f.norm()
