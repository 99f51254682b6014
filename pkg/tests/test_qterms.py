"""q-term model checks against direct q-factorial computation."""

import random
from fractions import Fraction

import pytest

from telescoper.errors import NonIntegerArgumentError, SupportError
from telescoper.linform import LinForm
from telescoper.ratfun import RatFun
from telescoper.qterms import (
    GeomFactor,
    QHyperTerm,
    QPochFactor,
    QPowFactor,
    QuadForm,
    q_eval_term,
    q_shift_quotient,
    q_support_bounds,
    q_word_quotient,
)


def lin(var_coeffs=None, const=0):
    return LinForm(var_coeffs, None, const)


def qpoch_direct(a, q, m):
    """(a; q)_m with the standard negative-length extension."""
    a, q = Fraction(a), Fraction(q)
    if m >= 0:
        out = Fraction(1)
        for t in range(m):
            out *= 1 - a * q**t
        return out
    out = Fraction(1)
    for t in range(1, -m + 1):
        out /= 1 - a * q**-t
    return out


def qbin_direct(n, k, q):
    if k < 0 or k > n:
        return Fraction(0)
    q = Fraction(q)
    return qpoch_direct(q, q, n) / (qpoch_direct(q, q, k) * qpoch_direct(q, q, n - k))


def qbinomial_term(extra_params=()):
    universe = ("q", "q^n", "q^k") + tuple(extra_params)
    one = RatFun.one(universe)
    return QHyperTerm(
        "n",
        inner=("k",),
        parameters=tuple(extra_params),
        pochhammers=(
            QPochFactor(one, lin(const=1), lin({"n": 1}), 1),
            QPochFactor(one, lin(const=1), lin({"k": 1}), -1),
            QPochFactor(one, lin(const=1), lin({"n": 1, "k": -1}), -1),
        ),
    )


def gauss_summand(z_name="z"):
    """qbin(n,k) * q^(k(k-1)/2) * z^k."""
    universe = ("q", "q^n", "q^k", z_name)
    one = RatFun.one(universe)
    return QHyperTerm(
        "n",
        inner=("k",),
        parameters=(z_name,),
        pochhammers=(
            QPochFactor(one, lin(const=1), lin({"n": 1}), 1),
            QPochFactor(one, lin(const=1), lin({"k": 1}), -1),
            QPochFactor(one, lin(const=1), lin({"n": 1, "k": -1}), -1),
        ),
        qpowers=(
            QPowFactor(QuadForm.build({("k", "k"): Fraction(1, 2)}, {"k": Fraction(-1, 2)})),
        ),
        geoms=(GeomFactor(RatFun.var(universe, z_name), lin({"k": 1})),),
    )


class TestQuadForm:
    def test_binomial_exponent_increment(self):
        form = QuadForm.build({("k", "k"): Fraction(1, 2)}, {"k": Fraction(-1, 2)})
        inc = form.increment("k")
        assert inc == lin({"k": 1})
        for k0 in range(0, 9):
            assert form.value({"k": k0}) == k0 * (k0 - 1) // 2

    def test_non_integer_increment_rejected(self):
        form = QuadForm.build({("k", "k"): Fraction(1, 3)})
        with pytest.raises(NonIntegerArgumentError):
            form.increment("k")

    def test_cross_terms(self):
        form = QuadForm.build({("j", "k"): 2}, {"j": 1}, 5)
        assert form.increment("k") == lin({"j": 2})
        assert form.increment("j") == lin({"k": 2}, 1)
        assert form.value({"j": 3, "k": 4}) == 2 * 12 + 3 + 5


class TestQShiftQuotients:
    def test_qbinomial_inner_structural(self):
        F = qbinomial_term()
        uni = F.universe
        q = RatFun.var(uni, "q")
        w = RatFun.var(uni, "q^n")
        x = RatFun.var(uni, "q^k")
        one = RatFun.one(uni)
        # (1 - q^{n-k})/(1 - q^{k+1}) = (x - w)/(x (1 - q x)).
        assert q_shift_quotient(F, "k") == (x - w) / (x * (one - q * x))
        # Outer shift: (1 - q^{n+1})/(1 - q^{n+1-k}) = x(1 - qw)/(x - qw).
        assert q_shift_quotient(F, "n") == x * (one - q * w) / (x - q * w)

    def test_qbinomial_quotient_evaluation_oracle(self):
        F = qbinomial_term()
        ratio = q_shift_quotient(F, "k")
        q0 = Fraction(2, 3)
        for n0 in range(1, 9):
            for k0 in range(0, n0):
                point = {
                    "q": q0,
                    "q^n": q0**n0,
                    "q^k": q0**k0,
                }
                want = qbin_direct(n0, k0 + 1, q0) / qbin_direct(n0, k0, q0)
                assert ratio.evaluate(point) == want

    def test_qpower_quotient_is_monomial(self):
        universe = ("q", "q^n", "q^k")
        F = QHyperTerm(
            "n",
            inner=("k",),
            qpowers=(
                QPowFactor(
                    QuadForm.build({("k", "k"): Fraction(1, 2)}, {"k": Fraction(-1, 2)})
                ),
            ),
        )
        x = RatFun.var(universe, "q^k")
        assert q_shift_quotient(F, "k") == x
        q0 = Fraction(1, 2)
        for k0 in range(0, 7):
            point = {"q": q0, "q^n": Fraction(1), "q^k": q0**k0}
            got = q_shift_quotient(F, "k").evaluate(point)
            want = q0 ** (k0 * (k0 + 1) // 2) / q0 ** (k0 * (k0 - 1) // 2)
            assert got == want

    def test_geometric_quotient(self):
        universe = ("q", "q^n", "q^k", "z")
        F = QHyperTerm(
            "n",
            inner=("k",),
            parameters=("z",),
            geoms=(GeomFactor(RatFun.var(universe, "z"), lin({"k": 1})),),
        )
        assert q_shift_quotient(F, "k") == RatFun.var(universe, "z")
        assert q_shift_quotient(F, "n") == RatFun.one(universe)

    def test_parameter_base_pochhammer(self):
        # (-z; q)_n shifted in n multiplies by (1 + z q^n) = (1 + z w).
        universe = ("q", "q^n", "z")
        z = RatFun.var(universe, "z")
        F = QHyperTerm(
            "n",
            parameters=("z",),
            pochhammers=(QPochFactor(-z, lin(const=0), lin({"n": 1}), 1),),
        )
        w = RatFun.var(universe, "q^n")
        assert q_shift_quotient(F, "n") == RatFun.one(universe) + z * w


class TestQEvaluate:
    def test_qbinomial_values_symbolic(self):
        F = qbinomial_term()
        got = q_eval_term(F, {"n": 4, "k": 2})
        # [4 choose 2]_q = 1 + q + 2q^2 + q^3 + q^4.
        uni = ("q",)
        q = RatFun.var(uni, "q")
        one = RatFun.one(uni)
        want = one + q + 2 * q**2 + q**3 + q**4
        assert got == want

    def test_qbinomial_against_direct_random(self):
        rng = random.Random(3)
        F = qbinomial_term()
        q0 = Fraction(2, 3)
        for _ in range(120):
            n0 = rng.randrange(0, 9)
            k0 = rng.randrange(-3, 12)
            got = q_eval_term(F, {"n": n0, "k": k0}).evaluate({"q": q0})
            assert got == qbin_direct(n0, k0, q0)

    def test_vanishes_outside_range(self):
        F = qbinomial_term()
        assert q_eval_term(F, {"n": 5, "k": -1}).is_zero()
        assert q_eval_term(F, {"n": 5, "k": 6}).is_zero()

    def test_gauss_summand_sums_to_product(self):
        # sum_k qbin(n,k) q^(k(k-1)/2) z^k = prod_{j<n} (1 + z q^j).
        F = gauss_summand()
        q0 = Fraction(2, 3)
        for z0 in (Fraction(1), Fraction(5, 7)):
            for n0 in range(0, 9):
                lo, hi = q_support_bounds(F, n0)["k"]
                total = sum(
                    F.evaluate_at({"n": n0, "k": k0}, q0, {"z": z0})
                    for k0 in range(lo, hi + 1)
                )
                want = Fraction(1)
                for j in range(n0):
                    want *= 1 + z0 * q0**j
                assert total == want

    def test_word_quotient_soundness_random(self):
        rng = random.Random(11)
        F = qbinomial_term()
        q0 = Fraction(2, 3)
        checked = 0
        for _ in range(140):
            a = rng.randrange(0, 3)
            b = rng.randrange(0, 3)
            n0 = rng.randrange(0, 7)
            k0 = rng.randrange(0, n0 + 1)
            denom = qbin_direct(n0, k0, q0)
            if denom == 0:
                continue
            quotient = q_word_quotient(F, (a, (b,)))
            point = {"q": q0, "q^n": q0**n0, "q^k": q0**k0}
            got = quotient.evaluate(point)
            assert got == qbin_direct(n0 + a, k0 + b, q0) / denom
            checked += 1
        assert checked >= 100


class TestQSupport:
    def test_qbinomial_box(self):
        F = qbinomial_term()
        assert q_support_bounds(F, 7) == {"k": (0, 7)}

    def test_geometric_alone_not_compact(self):
        universe = ("q", "q^n", "q^k", "z")
        F = QHyperTerm(
            "n",
            inner=("k",),
            parameters=("z",),
            geoms=(GeomFactor(RatFun.var(universe, "z"), lin({"k": 1})),),
        )
        with pytest.raises(SupportError):
            q_support_bounds(F, 4)

    def test_support_soundness_random(self):
        rng = random.Random(17)
        F = gauss_summand()
        q0 = Fraction(2, 3)
        for _ in range(110):
            n0 = rng.randrange(0, 8)
            lo, hi = q_support_bounds(F, n0)["k"]
            k0 = rng.choice(
                [lo - 1 - rng.randrange(0, 3), hi + 1 + rng.randrange(0, 3)]
            )
            got = F.evaluate_at({"n": n0, "k": k0}, q0, {"z": Fraction(3, 2)})
            assert got == 0
