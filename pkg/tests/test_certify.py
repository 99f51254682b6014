"""Verifier checks: residuals, traces, and pair certificates.

The Laguerre generating-function certificate exercises the mixed
shift/derivative path; the pair examples are brute-forced with exact
arithmetic as an independent oracle.
"""

import random
import time
from fractions import Fraction

import pytest

from telescoper.certify import (
    Verdict,
    WZTuple,
    residual,
    verify,
    verify_wz_tuple,
    wz_residual,
)
from telescoper.errors import MismatchError
from telescoper.linform import LinForm
from telescoper.ore import UnivarOperator
from telescoper.poly import MultiPoly
from telescoper.ratfun import RatFun
from telescoper.telescope import TelescopeCertificate, creative_telescope
from telescoper.terms import (
    ExpFactor,
    FactorialFactor,
    HyperTerm,
    PowerFactor,
    eval_term,
)

from test_telescope import binomial_squared_term
from test_terms import binomial_term, lin, trinomial_term


def laguerre_product_term():
    """The generating-function integrand with the first argument outer.

    (1-u)^(-a-1-2m) exp(-(x+y)u/(1-u)) (x y u)^m u^(-n-1) / (m! gamma(a+1+m))
    with continuous outer x, discrete inner m, continuous inner u and
    parameters n, y, a.
    """
    universe = ("x", "m", "u", "n", "y", "a")
    u = RatFun.var(universe, "u")
    x = RatFun.var(universe, "x")
    y = RatFun.var(universe, "y")
    one = RatFun.one(universe)
    return HyperTerm(
        "x",
        inner_discrete=("m",),
        inner_continuous=("u",),
        parameters=("n", "y", "a"),
        factorials=(
            FactorialFactor("factorial", lin({"m": 1}), -1),
            FactorialFactor("gamma", lin({"m": 1}, {"a": 1}, 1), -1),
        ),
        powers=(
            PowerFactor(one - u, lin({"m": -2}, {"a": -1}, -1)),
            PowerFactor(x * y * u, lin({"m": 1})),
            PowerFactor(u, lin(param_coeffs={"n": -1}, const=-1)),
        ),
        exps=(ExpFactor(-(x + y) * u / (one - u)),),
        outer_continuous=True,
    )


def laguerre_certificate(F):
    """n F = Delta_m(R F) + D_u(S F) - ((a+1-x) D_x + x D_x^2) F."""
    uni = F.universe
    coeffs = ("x", "n", "y", "a")
    x = MultiPoly.var(coeffs, "x")
    n = MultiPoly.var(coeffs, "n")
    a = MultiPoly.var(coeffs, "a")
    one = MultiPoly.const(coeffs, 1)
    P = UnivarOperator({0: n, 1: a + one - x, 2: x}, coeffs)
    xf = RatFun.var(uni, "x")
    mf = RatFun.var(uni, "m")
    af = RatFun.var(uni, "a")
    uf = RatFun.var(uni, "u")
    R = {"m": -mf * (af + mf) / xf}
    S = {"u": -uf}
    return TelescopeCertificate(P=P, R=R, S=S, term=F)


class TestVerifyDiscrete:
    def test_binomial_round_trip(self):
        F = binomial_term()
        cert = creative_telescope(F)
        verdict = verify(F, cert)
        assert verdict.valid
        assert verdict.residual.is_zero()
        lines = verdict.trace.splitlines()
        assert len(lines) == 2
        assert lines[0].startswith("Dividing by F reduces the relation to:")
        assert lines[1] == (
            "The numerator after clearing denominators is identically 0."
        )

    def test_binomial_squared_round_trip(self):
        cert = creative_telescope(binomial_squared_term())
        assert verify(cert.term, cert).valid

    def test_trinomial_round_trip(self):
        cert = creative_telescope(trinomial_term())
        assert verify(cert.term, cert).valid

    def test_perturbed_certificate_fails(self):
        F = binomial_term()
        cert = creative_telescope(F)
        one = RatFun.one(F.universe)
        bad = TelescopeCertificate(
            P=cert.P, R={"k": cert.R["k"] + one}, S={}, term=F
        )
        verdict = verify(F, bad)
        assert not verdict.valid
        assert not verdict.residual.is_zero()
        assert "not 0" in verdict.trace

    def test_perturbed_operator_fails(self):
        F = binomial_term()
        cert = creative_telescope(F)
        coeffs = cert.P.universe
        three = MultiPoly.const(coeffs, 3)
        bad_P = UnivarOperator(
            {1: MultiPoly.const(coeffs, 1), 0: -three}, coeffs
        )
        bad = TelescopeCertificate(P=bad_P, R=cert.R, S={}, term=F)
        assert not verify(F, bad).valid

    def test_scaling_invariance(self):
        # Multiplying the operator and every certificate by one nonzero
        # polynomial preserves validity.
        F = binomial_term()
        cert = creative_telescope(F)
        coeffs = cert.P.universe
        n5 = MultiPoly.var(coeffs, "n") + MultiPoly.const(coeffs, 5)
        n5f = RatFun.var(F.universe, "n") + RatFun.const(F.universe, 5)
        scaled = TelescopeCertificate(
            P=cert.P.scale(n5),
            R={k: v * n5f for k, v in cert.R.items()},
            S={},
            term=F,
        )
        assert verify(F, scaled).valid

    def test_perturbation_completeness_random(self):
        # Any rational perturbation of the certificate must be caught.
        rng = random.Random(41)
        F = binomial_term()
        cert = creative_telescope(F)
        n = RatFun.var(F.universe, "n")
        k = RatFun.var(F.universe, "k")
        one = RatFun.one(F.universe)
        caught = 0
        for _ in range(120):
            c = Fraction(rng.randrange(-9, 10), rng.randrange(1, 7))
            e = (rng.randrange(0, 3), rng.randrange(0, 3))
            noise = RatFun.const(F.universe, c) * n ** e[0] * k ** e[1]
            if noise.is_zero():
                continue
            den = one + k * k if rng.random() < 0.5 else one
            bad = TelescopeCertificate(
                P=cert.P, R={"k": cert.R["k"] + noise / den}, S={}, term=F
            )
            assert not verify(F, bad).valid
            caught += 1
        assert caught >= 100

    def test_mismatched_universe_rejected(self):
        F = binomial_term()
        cert = creative_telescope(F)
        other = trinomial_term()
        with pytest.raises(MismatchError):
            residual(other, cert)

    def test_unknown_certificate_variable_rejected(self):
        F = binomial_term()
        cert = creative_telescope(F)
        bad = TelescopeCertificate(
            P=cert.P, R={"z": RatFun.one(F.universe)}, S={}, term=None
        )
        with pytest.raises(MismatchError):
            residual(F, bad)

    def test_vacuous_certificate_flagged(self):
        F = binomial_term()
        coeffs = ("n",)
        vac = TelescopeCertificate(
            P=UnivarOperator({}, coeffs),
            R={"k": RatFun.zero(F.universe)},
            S={},
            term=F,
        )
        verdict = verify(F, vac)
        assert verdict.valid
        assert "vacuous" in verdict.trace


class TestVerifyMixed:
    def test_laguerre_certificate_x(self):
        start = time.time()
        F = laguerre_product_term()
        cert = laguerre_certificate(F)
        verdict = verify(F, cert)
        assert verdict.valid
        assert time.time() - start < 2.0

    def test_laguerre_certificate_y(self):
        # The same relation with the roles of the two arguments swapped.
        start = time.time()
        universe = ("y", "m", "u", "n", "x", "a")
        u = RatFun.var(universe, "u")
        x = RatFun.var(universe, "x")
        y = RatFun.var(universe, "y")
        one = RatFun.one(universe)
        F = HyperTerm(
            "y",
            inner_discrete=("m",),
            inner_continuous=("u",),
            parameters=("n", "x", "a"),
            factorials=(
                FactorialFactor("factorial", lin({"m": 1}), -1),
                FactorialFactor("gamma", lin({"m": 1}, {"a": 1}, 1), -1),
            ),
            powers=(
                PowerFactor(one - u, lin({"m": -2}, {"a": -1}, -1)),
                PowerFactor(x * y * u, lin({"m": 1})),
                PowerFactor(u, lin(param_coeffs={"n": -1}, const=-1)),
            ),
            exps=(ExpFactor(-(x + y) * u / (one - u)),),
            outer_continuous=True,
        )
        coeffs = ("y", "n", "x", "a")
        yc = MultiPoly.var(coeffs, "y")
        n = MultiPoly.var(coeffs, "n")
        a = MultiPoly.var(coeffs, "a")
        one_c = MultiPoly.const(coeffs, 1)
        P = UnivarOperator({0: n, 1: a + one_c - yc, 2: yc}, coeffs)
        mf = RatFun.var(universe, "m")
        af = RatFun.var(universe, "a")
        cert = TelescopeCertificate(
            P=P, R={"m": -mf * (af + mf) / y}, S={"u": -u}, term=F
        )
        verdict = verify(F, cert)
        assert verdict.valid
        assert time.time() - start < 2.0

    def test_laguerre_perturbations_fail(self):
        F = laguerre_product_term()
        good = laguerre_certificate(F)
        one = RatFun.one(F.universe)
        uf = RatFun.var(F.universe, "u")
        # Wrong continuous certificate.
        bad1 = TelescopeCertificate(
            P=good.P, R=good.R, S={"u": -uf * uf}, term=F
        )
        assert not verify(F, bad1).valid
        # Wrong shift certificate.
        bad2 = TelescopeCertificate(
            P=good.P, R={"m": good.R["m"] + one}, S=good.S, term=F
        )
        assert not verify(F, bad2).valid
        # Wrong operator coefficient.
        coeffs = good.P.universe
        P = UnivarOperator(
            {
                0: MultiPoly.var(coeffs, "n") + MultiPoly.const(coeffs, 1),
                1: good.P.coefficient(1),
                2: good.P.coefficient(2),
            },
            coeffs,
        )
        bad3 = TelescopeCertificate(P=P, R=good.R, S=good.S, term=F)
        assert not verify(F, bad3).valid

    def test_trace_mentions_derivative_symbol(self):
        F = laguerre_product_term()
        verdict = verify(F, laguerre_certificate(F))
        assert "D_x" in verdict.trace
        assert "D_u" in verdict.trace
        assert "Delta_m" in verdict.trace


def halved_binomial_term():
    """C(n,k) / 2^n."""
    return HyperTerm(
        "n",
        inner_discrete=("k",),
        factorials=(
            FactorialFactor("factorial", lin({"n": 1}), 1),
            FactorialFactor("factorial", lin({"k": 1}), -1),
            FactorialFactor("factorial", lin({"n": 1, "k": -1}), -1),
        ),
        powers=(PowerFactor(RatFun.const(("n", "k"), 2), lin({"n": -1})),),
    )


class TestWZTuples:
    def test_halved_binomial_pair(self):
        F = halved_binomial_term()
        n = RatFun.var(F.universe, "n")
        k = RatFun.var(F.universe, "k")
        one = RatFun.one(F.universe)
        two = RatFun.const(F.universe, 2)
        G = {"k": -k / (two * (n - k + one))}
        verdict = verify_wz_tuple(WZTuple(term=F, G=G, H={}))
        assert verdict.valid
        assert verdict.residual.is_zero()
        assert "(N - 1) F/F" in verdict.trace

    def test_pair_relation_brute_force(self):
        # Independent oracle: evaluate both sides pointwise.  The
        # product G F has the closed form -C(n, k-1)/2^(n+1); writing it
        # that way keeps the check meaningful at k = n+1, where G alone
        # has a pole that the vanishing term cancels.
        import math

        F = halved_binomial_term()

        def comb0(a, b):
            return math.comb(a, b) if 0 <= b <= a else 0

        def f(n0, k0):
            value = eval_term(F, {"n": n0, "k": k0}).exact()
            assert value == Fraction(comb0(n0, k0), 2**n0)
            return value

        def gf(n0, k0):
            return Fraction(-comb0(n0, k0 - 1), 2 ** (n0 + 1))

        checked = 0
        for n0 in range(0, 9):
            for k0 in range(0, n0 + 2):
                lhs = f(n0 + 1, k0) - f(n0, k0)
                rhs = gf(n0, k0 + 1) - gf(n0, k0)
                assert lhs == rhs
                checked += 1
        assert checked == 54

    def test_negated_pair_fails(self):
        F = halved_binomial_term()
        n = RatFun.var(F.universe, "n")
        k = RatFun.var(F.universe, "k")
        one = RatFun.one(F.universe)
        two = RatFun.const(F.universe, 2)
        G = {"k": k / (two * (n - k + one))}
        verdict = verify_wz_tuple(WZTuple(term=F, G=G, H={}))
        assert not verdict.valid
        assert "not 0" in verdict.trace

    def test_wz_residual_matches_definition(self):
        F = halved_binomial_term()
        zero = wz_residual(WZTuple(term=F, G={"k": RatFun.zero(F.universe)}, H={}))
        # Delta_n F / F = (1 - k/(n+1-k))/2 - 1 is not identically 0.
        assert not zero.is_zero()
