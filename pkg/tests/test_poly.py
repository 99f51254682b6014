import random
from fractions import Fraction

import pytest

from telescoper.errors import InexactDivisionError, VariableMismatchError
from telescoper.poly import MultiPoly, integer_roots, poly_gcd, poly_lcm

VARS = ("n", "k")


def random_poly(rng, variables=VARS, max_deg=3, max_terms=4, allow_zero=True):
    terms = {}
    for _ in range(rng.randint(0 if allow_zero else 1, max_terms)):
        exps = tuple(rng.randint(0, max_deg) for _ in variables)
        terms[exps] = Fraction(rng.randint(-6, 6), rng.randint(1, 4))
    return MultiPoly(variables, terms)


def random_point(rng, variables=VARS):
    return {v: Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for v in variables}


def test_constructor_drops_zero_terms():
    p = MultiPoly(VARS, {(1, 0): Fraction(0), (0, 1): Fraction(2)})
    assert p.terms == {(0, 1): Fraction(2)}


def test_add_zero_is_identity():
    rng = random.Random(1)
    for _ in range(50):
        p = random_poly(rng)
        assert p + MultiPoly.zero(VARS) == p


def test_evaluation_homomorphism():
    # Oracle: Fraction arithmetic on evaluated operands.
    rng = random.Random(2)
    for _ in range(120):
        p = random_poly(rng)
        q = random_poly(rng)
        pt = random_point(rng)
        assert (p + q).evaluate(pt) == p.evaluate(pt) + q.evaluate(pt)
        assert (p - q).evaluate(pt) == p.evaluate(pt) - q.evaluate(pt)
        assert (p * q).evaluate(pt) == p.evaluate(pt) * q.evaluate(pt)


def test_exact_div_round_trip():
    rng = random.Random(3)
    for _ in range(120):
        p = random_poly(rng)
        q = random_poly(rng, allow_zero=False)
        if q.is_zero():
            continue
        assert (p * q).exact_div(q) == p


def test_exact_div_rejects_non_factor():
    n = MultiPoly.var(VARS, "n")
    k = MultiPoly.var(VARS, "k")
    with pytest.raises(InexactDivisionError):
        (n * n + 1).exact_div(k + 1)
    with pytest.raises(InexactDivisionError):
        (n + 1).exact_div(n + 2)


def test_gcd_simple():
    x = MultiPoly.var(("x",), "x")
    assert poly_gcd(x * x - 1, x - 1) == x - 1


def test_gcd_of_constants_is_unit():
    one = MultiPoly.const(VARS, 1)
    assert poly_gcd(MultiPoly.const(VARS, 6), MultiPoly.const(VARS, 4)) == one
    p = MultiPoly.var(VARS, "n") + 2
    assert poly_gcd(p, MultiPoly.const(VARS, 3)) == one
    assert poly_gcd(p, MultiPoly.zero(VARS)) == p


def test_gcd_recovers_planted_factor():
    rng = random.Random(4)
    for _ in range(100):
        g = random_poly(rng, max_deg=2, max_terms=3, allow_zero=False)
        if g.is_zero() or g.is_constant():
            continue
        a = random_poly(rng, max_deg=2, max_terms=3, allow_zero=False)
        b = random_poly(rng, max_deg=2, max_terms=3, allow_zero=False)
        got = poly_gcd(a * g, b * g)
        # The planted factor divides the gcd; the gcd divides both products.
        assert g.primitive().divides(got)
        assert got.divides(a * g)
        assert got.divides(b * g)


def test_gcd_is_primitive_and_positive():
    rng = random.Random(5)
    for _ in range(60):
        a = random_poly(rng, allow_zero=False)
        b = random_poly(rng, allow_zero=False)
        if a.is_zero() or b.is_zero():
            continue
        g = poly_gcd(a, b)
        assert g.content() == 1
        assert g.leading()[1] > 0


def test_lcm_times_gcd_matches_product():
    rng = random.Random(6)
    for _ in range(40):
        a = random_poly(rng, max_deg=2, allow_zero=False).primitive()
        b = random_poly(rng, max_deg=2, allow_zero=False).primitive()
        if a.is_zero() or b.is_zero():
            continue
        g = poly_gcd(a, b)
        l = poly_lcm(a, b)
        lhs = (g * l).primitive()
        rhs = (a * b).primitive()
        assert lhs == rhs or lhs == -rhs


def test_canonical_equality_matches_evaluation():
    rng = random.Random(7)
    for _ in range(100):
        p = random_poly(rng)
        q = random_poly(rng)
        r = (p + q) * (p - q)
        s = p * p - q * q
        assert r == s  # structural equality of canonical forms
        pt = random_point(rng)
        assert r.evaluate(pt) == s.evaluate(pt)


def test_substitute_shift():
    n = MultiPoly.var(VARS, "n")
    k = MultiPoly.var(VARS, "k")
    p = n * n - k
    assert p.shift("n") == (n + 1) * (n + 1) - k
    assert p.substitute({"k": n * n}) == MultiPoly.zero(VARS)


def test_derivative():
    x = MultiPoly.var(("x", "u"), "x")
    u = MultiPoly.var(("x", "u"), "u")
    p = x * x * u + 3 * x
    assert p.derivative("x") == 2 * x * u + 3
    assert p.derivative("u") == x * x


def test_universe_mismatch_raises():
    p = MultiPoly.var(("n",), "n")
    q = MultiPoly.var(("n", "k"), "n")
    with pytest.raises(VariableMismatchError):
        p + q
    with pytest.raises(VariableMismatchError):
        p * q


def test_embed():
    p = MultiPoly.var(("n",), "n") + 1
    q = p.embed(("k", "n"))
    assert q.variables == ("k", "n")
    assert q == MultiPoly.var(("k", "n"), "n") + 1


def test_integer_roots():
    n = MultiPoly.var(("n",), "n")
    assert integer_roots(n + 1, "n") == [-1]
    assert integer_roots((n - 3) * (n + 2) * n, "n") == [-2, 0, 3]
    assert integer_roots(2 * n - 1, "n") == []
    assert integer_roots(MultiPoly.const(("n",), 5), "n") == []


def test_leading_term_is_graded_lex():
    n = MultiPoly.var(VARS, "n")
    k = MultiPoly.var(VARS, "k")
    p = n * k + n * n * n + k * k
    exps, coeff = p.leading()
    assert exps == (3, 0) and coeff == 1
    # ties in total degree break toward the earlier variable
    q = n * k * k + n * n * k
    assert q.leading()[0] == (2, 1)
