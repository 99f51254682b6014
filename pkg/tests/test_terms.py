"""Term model checks against independent oracles.

Shift quotients are compared with math.comb ratios, derivative
quotients with float finite differences, and evaluation with directly
computed factorial products.
"""

import math
import random
from fractions import Fraction

import pytest

from telescoper.errors import (
    CertificatePoleError,
    NonIntegerArgumentError,
    PoleError,
    SupportError,
)
from telescoper.linform import LinForm
from telescoper.poly import MultiPoly
from telescoper.ratfun import RatFun
from telescoper.support import (
    affine_box,
    certify_nonzero_on_box,
    check_certificate_poles,
    support_bounds,
)
from telescoper.terms import (
    ExpFactor,
    FactorialFactor,
    HyperTerm,
    PowerFactor,
    TermValue,
    eval_term,
    gamma_value,
    word_quotient,
)


def lin(var_coeffs=None, param_coeffs=None, const=0):
    return LinForm(var_coeffs, param_coeffs, const)


def binomial_term():
    """n! / (k! (n-k)!) with outer n and inner k."""
    return HyperTerm(
        "n",
        inner_discrete=("k",),
        factorials=(
            FactorialFactor("factorial", lin({"n": 1}), 1),
            FactorialFactor("factorial", lin({"k": 1}), -1),
            FactorialFactor("factorial", lin({"n": 1, "k": -1}), -1),
        ),
    )


def trinomial_term():
    """n! / (j! k! (n-j-k)!)."""
    return HyperTerm(
        "n",
        inner_discrete=("j", "k"),
        factorials=(
            FactorialFactor("factorial", lin({"n": 1}), 1),
            FactorialFactor("factorial", lin({"j": 1}), -1),
            FactorialFactor("factorial", lin({"k": 1}), -1),
            FactorialFactor("factorial", lin({"n": 1, "j": -1, "k": -1}), -1),
        ),
    )


def hille_hardy_term():
    """The Laguerre product generating-function integrand.

    (1-u)^(-a-1-2m) exp(-(x+y)u/(1-u)) (x y u)^m u^(-n-1) / (m! gamma(a+1+m))
    with outer n, discrete inner m, continuous inner u and parameters
    x, y, a.
    """
    universe = ("n", "m", "u", "x", "y", "a")
    u = RatFun.var(universe, "u")
    x = RatFun.var(universe, "x")
    y = RatFun.var(universe, "y")
    one = RatFun.one(universe)
    return HyperTerm(
        "n",
        inner_discrete=("m",),
        inner_continuous=("u",),
        parameters=("x", "y", "a"),
        factorials=(
            FactorialFactor("factorial", lin({"m": 1}), -1),
            FactorialFactor("gamma", lin({"m": 1}, {"a": 1}, 1), -1),
        ),
        powers=(
            PowerFactor(one - u, lin({"m": -2}, {"a": -1}, -1)),
            PowerFactor(x * y * u, lin({"m": 1})),
            PowerFactor(u, lin({"n": -1}, const=-1)),
        ),
        exps=(ExpFactor(-(x + y) * u / (one - u)),),
    )


def comb_ratio(a, b):
    if b == 0:
        raise ZeroDivisionError
    return Fraction(a, b)


class TestGammaValue:
    def test_positive_integers(self):
        for a in range(1, 8):
            order, unit = gamma_value(a)
            assert order == 0
            assert unit == math.factorial(a - 1)

    def test_pole_units(self):
        for m in range(0, 7):
            order, unit = gamma_value(-m)
            assert order == -1
            assert unit == Fraction((-1) ** m, math.factorial(m))

    def test_non_integer_rejected(self):
        with pytest.raises(NonIntegerArgumentError):
            gamma_value(Fraction(1, 2))


class TestShiftQuotients:
    def test_binomial_inner_shift_matches_comb(self):
        F = binomial_term()
        q = F.shift_quotient("k")
        for n0 in range(1, 11):
            for k0 in range(0, n0):
                want = comb_ratio(math.comb(n0, k0 + 1), math.comb(n0, k0))
                assert q.evaluate({"n": n0, "k": k0}) == want

    def test_binomial_outer_shift_matches_comb(self):
        F = binomial_term()
        q = F.shift_quotient("n")
        for n0 in range(0, 11):
            for k0 in range(0, n0 + 1):
                want = comb_ratio(math.comb(n0 + 1, k0), math.comb(n0, k0))
                assert q.evaluate({"n": n0, "k": k0}) == want

    def test_binomial_shift_closed_forms(self):
        F = binomial_term()
        uni = F.universe
        n = RatFun.var(uni, "n")
        k = RatFun.var(uni, "k")
        one = RatFun.one(uni)
        assert F.shift_quotient("k") == (n - k) / (k + one)
        assert F.shift_quotient("n") == (n + one) / (n + one - k)

    def test_hille_hardy_inner_shift(self):
        F = hille_hardy_term()
        uni = F.universe
        u = RatFun.var(uni, "u")
        x = RatFun.var(uni, "x")
        y = RatFun.var(uni, "y")
        m = RatFun.var(uni, "m")
        a = RatFun.var(uni, "a")
        one = RatFun.one(uni)
        want = x * y * u / ((one - u) ** 2 * (m + one) * (a + m + one))
        assert F.shift_quotient("m") == want

    def test_quotient_soundness_random(self):
        # F(k+1) == q(k) * F(k) wherever both sides evaluate.
        rng = random.Random(20260814)
        F = binomial_term()
        q = F.shift_quotient("k")
        checked = 0
        for _ in range(140):
            n0 = rng.randrange(0, 9)
            k0 = rng.randrange(-2, n0 + 3)
            point = {"n": n0, "k": k0}
            try:
                ratio = q.evaluate(point)
            except PoleError:
                continue
            lhs = eval_term(F, {"n": n0, "k": k0 + 1}).exact()
            rhs = ratio * eval_term(F, point).exact()
            assert lhs == rhs
            checked += 1
        assert checked >= 100


class TestDerivativeQuotients:
    def test_power_exp_closed_form(self):
        # F = x^(2k) exp(x^2/2): F'/F = 2k/x + x.
        universe = ("n", "k", "x")
        x = RatFun.var(universe, "x")
        F = HyperTerm(
            "n",
            inner_discrete=("k",),
            inner_continuous=("x",),
            powers=(PowerFactor(x, lin({"k": 2})),),
            exps=(ExpFactor(x * x / RatFun.const(universe, 2)),),
        )
        got = F.derivative_quotient("x")
        k = RatFun.var(universe, "k")
        want = (k + k) / x + x
        assert got == want

    def test_finite_difference_oracle(self):
        universe = ("n", "k", "x")
        x = RatFun.var(universe, "x")
        one = RatFun.one(universe)
        F = HyperTerm(
            "n",
            inner_discrete=("k",),
            inner_continuous=("x",),
            powers=(
                PowerFactor(x, lin({"k": 2})),
                PowerFactor(one - x, lin({"k": -1}, const=-1)),
            ),
            exps=(ExpFactor(x * x / RatFun.const(universe, 2)),),
        )
        q = F.derivative_quotient("x")

        def fval(n0, k0, x0):
            num = x0 ** (2 * k0) * (1 - x0) ** (-k0 - 1)
            return num * math.exp(x0 * x0 / 2)

        h = 1e-6
        for n0, k0, x0 in [(0, 1, 0.3), (0, 2, 0.7), (0, 3, 0.4), (0, 1, 0.55)]:
            expect = (fval(n0, k0, x0 + h) - fval(n0, k0, x0 - h)) / (
                2 * h * fval(n0, k0, x0)
            )
            got = q.evaluate({"n": n0, "k": k0, "x": Fraction(x0)})
            assert abs(float(got) - expect) < 1e-4

    def test_hille_hardy_derivative_finite_difference(self):
        F = hille_hardy_term()
        q = F.derivative_quotient("u")

        def fval(u0, n0=0, m0=0, x0=1.0, y0=1.0, a0=0.0):
            return (
                (1 - u0) ** (-a0 - 1 - 2 * m0)
                * math.exp(-(x0 + y0) * u0 / (1 - u0))
                * (x0 * y0 * u0) ** m0
                * u0 ** (-n0 - 1)
                / (math.factorial(m0) * math.gamma(a0 + 1 + m0))
            )

        h = 1e-6
        for u0 in (0.25, 0.5, 0.75):
            expect = (fval(u0 + h) - fval(u0 - h)) / (2 * h * fval(u0))
            got = q.evaluate(
                {"n": 0, "m": 0, "u": Fraction(u0), "x": 1, "y": 1, "a": 0}
            )
            assert abs(float(got) - expect) < 1e-3


class TestWordQuotients:
    def test_binomial_diagonal_word(self):
        F = binomial_term()
        got = word_quotient(F, (1, (1,), ()))
        uni = F.universe
        n = RatFun.var(uni, "n")
        k = RatFun.var(uni, "k")
        one = RatFun.one(uni)
        assert got == (n + one) / (k + one)

    def test_empty_word_is_one(self):
        F = binomial_term()
        assert word_quotient(F, (0, (0,), ())) == RatFun.one(F.universe)

    def test_double_derivative_word(self):
        # exp(x^2/2): (d/dx)^2 F / F = 1 + x^2.
        universe = ("n", "x")
        x = RatFun.var(universe, "x")
        F = HyperTerm(
            "n",
            inner_continuous=("x",),
            exps=(ExpFactor(x * x / RatFun.const(universe, 2)),),
        )
        got = word_quotient(F, (0, (), (2,)))
        assert got == RatFun.one(universe) + x * x

    def test_word_quotient_soundness_random(self):
        # Evaluate word quotients of the binomial and compare with the
        # comb ratio of the shifted point, over 100+ random cases.
        rng = random.Random(7)
        F = binomial_term()
        checked = 0
        for _ in range(160):
            a = rng.randrange(0, 3)
            b = rng.randrange(0, 3)
            n0 = rng.randrange(b, 9)
            k0 = rng.randrange(0, n0 + 1)
            q = word_quotient(F, (a, (b,), ()))
            point = {"n": n0, "k": k0}
            try:
                ratio = q.evaluate(point)
            except PoleError:
                continue
            denom = math.comb(n0, k0)
            if denom == 0:
                continue
            want = Fraction(math.comb(n0 + a, k0 + b), denom)
            assert ratio == want
            checked += 1
        assert checked >= 100

    def test_mixed_word_on_product_term(self):
        # F = C(n,k) x^k: (N K F)/F picks up one factor of x.
        universe = ("n", "k", "x")
        x = RatFun.var(universe, "x")
        F = HyperTerm(
            "n",
            inner_discrete=("k",),
            inner_continuous=("x",),
            factorials=(
                FactorialFactor("factorial", lin({"n": 1}), 1),
                FactorialFactor("factorial", lin({"k": 1}), -1),
                FactorialFactor("factorial", lin({"n": 1, "k": -1}), -1),
            ),
            powers=(PowerFactor(x, lin({"k": 1})),),
        )
        got = word_quotient(F, (1, (1,), (0,)))
        n = RatFun.var(universe, "n")
        k = RatFun.var(universe, "k")
        one = RatFun.one(universe)
        assert got == x * (n + one) / (k + one)


class TestEvaluate:
    def test_binomial_values(self):
        F = binomial_term()
        assert eval_term(F, {"n": 4, "k": 2}).exact() == 6
        assert eval_term(F, {"n": 5, "k": 7}).exact() == 0
        assert eval_term(F, {"n": 5, "k": -1}).exact() == 0
        assert eval_term(F, {"n": 6, "k": 0}).exact() == 1

    def test_binomial_against_comb_random(self):
        rng = random.Random(99)
        F = binomial_term()
        for _ in range(120):
            n0 = rng.randrange(0, 12)
            k0 = rng.randrange(-3, 15)
            want = math.comb(n0, k0) if 0 <= k0 <= n0 else 0
            assert eval_term(F, {"n": n0, "k": k0}).exact() == want

    def test_pole_detection(self):
        # gamma(n) in the numerator alone poles at n <= 0.
        F = HyperTerm(
            "n",
            factorials=(FactorialFactor("gamma", lin({"n": 1}), 1),),
        )
        assert eval_term(F, {"n": 3}).exact() == 2
        with pytest.raises(PoleError):
            eval_term(F, {"n": 0})

    def test_pole_cancellation_ratio(self):
        # gamma(k - 5)/gamma(k - 7) = (k-6)(k-7) stays finite at k = 3.
        F = HyperTerm(
            "n",
            inner_discrete=("k",),
            factorials=(
                FactorialFactor("gamma", lin({"k": 1}, const=-5), 1),
                FactorialFactor("gamma", lin({"k": 1}, const=-7), -1),
            ),
        )
        assert eval_term(F, {"n": 0, "k": 3}).exact() == (3 - 6) * (3 - 7)
        q = F.shift_quotient("k")
        for k0 in range(-4, 12):
            if k0 in (5, 6, 7):
                continue
            want = Fraction((k0 - 5) * (k0 - 6), 1)
            assert eval_term(F, {"n": 0, "k": k0}).exact() == (k0 - 6) * (k0 - 7)
            assert q.evaluate({"n": 0, "k": k0}) == Fraction(k0 - 5, k0 - 7)

    def test_hille_hardy_point(self):
        F = hille_hardy_term()
        got = eval_term(
            F, {"n": 0, "m": 0, "u": Fraction(1, 2), "x": 1, "y": 1, "a": 0}
        )
        assert got == TermValue(Fraction(4), Fraction(-2))
        assert abs(float(got) - 4 * math.exp(-2)) < 1e-12

    def test_exact_rejects_transcendental(self):
        F = hille_hardy_term()
        got = eval_term(
            F, {"n": 0, "m": 0, "u": Fraction(1, 2), "x": 1, "y": 1, "a": 0}
        )
        with pytest.raises(ValueError):
            got.exact()

    def test_pochhammer_desugar(self):
        # (3)_k = gamma(3+k)/gamma(3) = (k+2)!/2.
        F = HyperTerm(
            "n",
            inner_discrete=("k",),
            factorials=(FactorialFactor("pochhammer", lin({"k": 1}), 1, lin(const=3)),),
        )
        for k0 in range(0, 7):
            want = Fraction(math.factorial(k0 + 2), 2)
            assert eval_term(F, {"n": 0, "k": k0}).exact() == want

    def test_unbound_and_non_integer_rejected(self):
        F = binomial_term()
        from telescoper.errors import UnboundParameterError

        with pytest.raises(UnboundParameterError):
            eval_term(F, {"n": 4})
        with pytest.raises(NonIntegerArgumentError):
            eval_term(F, {"n": 4, "k": Fraction(1, 2)})


class TestTermAlgebra:
    def test_divided_by_shift(self):
        # F(n+1,k)/F(n,k) computed via divided_by on a pinned pair must
        # match shift_quotient at sample points.
        F = binomial_term()
        q = F.shift_quotient("n")
        for n0 in range(0, 6):
            for k0 in range(0, n0 + 1):
                assert q.evaluate({"n": n0, "k": k0}) == Fraction(
                    math.comb(n0 + 1, k0), math.comb(n0, k0)
                )

    def test_scaled(self):
        F = binomial_term()
        uni = F.universe
        k = RatFun.var(uni, "k")
        one = RatFun.one(uni)
        G = F.scaled(k + one)
        assert eval_term(G, {"n": 4, "k": 2}).exact() == 18

    def test_signature_equality(self):
        A = binomial_term()
        B = binomial_term()
        assert A == B
        assert hash(A) == hash(B)
        C = B.scaled(RatFun.const(B.universe, 2))
        assert A != C

    def test_pin_outer(self):
        # Slicing C(n,k) at n = 5 gives a k-only term with the same values.
        F = binomial_term()
        G = F.pin_outer(5, "k")
        for k0 in range(-1, 8):
            assert (
                eval_term(G, {"k": k0}).exact()
                == eval_term(F, {"n": 5, "k": k0}).exact()
            )


class TestSupport:
    def test_binomial_box(self):
        F = binomial_term()
        assert support_bounds(F, 7) == {"k": (0, 7)}
        assert support_bounds(F, 0) == {"k": (0, 0)}

    def test_trinomial_box(self):
        F = trinomial_term()
        box = support_bounds(F, 5)
        assert box["j"] == (0, 5)
        assert box["k"] == (0, 5)

    def test_coupled_constraints(self):
        # 1/((k-j)! (j)! (n-k)!): j <= k <= n and 0 <= j gives both boxes.
        F = HyperTerm(
            "n",
            inner_discrete=("j", "k"),
            factorials=(
                FactorialFactor("factorial", lin({"k": 1, "j": -1}), -1),
                FactorialFactor("factorial", lin({"j": 1}), -1),
                FactorialFactor("factorial", lin({"n": 1, "k": -1}), -1),
            ),
        )
        box = support_bounds(F, 6)
        assert box["j"] == (0, 6)
        assert box["k"] == (0, 6)

    def test_geometric_not_compact(self):
        universe = ("n", "k", "z")
        F = HyperTerm(
            "n",
            inner_discrete=("k",),
            parameters=("z",),
            powers=(PowerFactor(RatFun.var(universe, "z"), lin({"k": 1})),),
        )
        with pytest.raises(SupportError):
            support_bounds(F, 4)

    def test_one_sided_not_compact(self):
        # 1/k! bounds k below only.
        F = HyperTerm(
            "n",
            inner_discrete=("k",),
            factorials=(FactorialFactor("factorial", lin({"k": 1}), -1),),
        )
        with pytest.raises(SupportError):
            support_bounds(F, 3)

    def test_support_soundness_random(self):
        # The binomial-style family vanishes outside the reported box.
        rng = random.Random(20260401)
        checked = 0
        for _ in range(110):
            c1 = rng.randrange(0, 3)
            c2 = rng.randrange(1, 3)
            F = HyperTerm(
                "n",
                inner_discrete=("k",),
                factorials=(
                    FactorialFactor("factorial", lin({"n": 1}), 1),
                    FactorialFactor("factorial", lin({"k": 1}, const=c1), -1),
                    FactorialFactor("factorial", lin({"n": c2, "k": -1}), -1),
                ),
            )
            n0 = rng.randrange(0, 7)
            lo, hi = support_bounds(F, n0)["k"]
            for k0 in range(lo - 3, hi + 4):
                value = eval_term(F, {"n": n0, "k": k0}).exact()
                if not (lo <= k0 <= hi):
                    assert value == 0
            checked += 1
        assert checked >= 100

    def test_affine_box_binomial(self):
        F = binomial_term()
        box = affine_box(F)
        lowers, uppers = box["k"]
        assert any(aff.slope == 0 and aff.const == 0 for aff in lowers)
        assert any(aff.slope == 1 and aff.const == 0 for aff in uppers)

    def test_certify_nonzero(self):
        F = binomial_term()
        box = affine_box(F)
        # n - k + 1 >= 1 on 0 <= k <= n.
        assert certify_nonzero_on_box(lin({"n": 1, "k": -1}, const=1), "n", box)
        # k - 1 hits zero at k = 1.
        assert not certify_nonzero_on_box(lin({"k": 1}, const=-1), "n", box)
        # k + alpha is generically nonzero.
        assert certify_nonzero_on_box(lin({"k": 1}, {"alpha": 1}), "n", box)

    def test_certificate_pole_check(self):
        F = binomial_term()
        uni = F.universe
        n = RatFun.var(uni, "n")
        k = RatFun.var(uni, "k")
        one = RatFun.one(uni)
        check_certificate_poles(F, {"k": -k / (n - k + one)})
        with pytest.raises(CertificatePoleError):
            check_certificate_poles(F, {"k": one / (n - k)})
