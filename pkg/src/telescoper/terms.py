"""Hypergeometric-hyperexponential term model.

A HyperTerm is a product of gamma-type factors with integer-linear
arguments in the discrete variables, power factors whose bases are free
of the discrete variables, exponential factors, and a rational cofactor.
The class of terms is closed under shifting any discrete variable and
differentiating any continuous variable, and the corresponding
quotients (shifted or differentiated term divided by the term itself)
are rational functions; that closure is what every algorithm downstream
relies on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    NonIntegerArgumentError,
    PoleError,
    UnboundParameterError,
    VariableMismatchError,
)
from .linform import LinForm
from .poly import MultiPoly
from .ratfun import RatFun


@dataclass(frozen=True)
class FactorialFactor:
    """factorial(arg), gamma(arg) or pochhammer(base, arg) to a power.

    For the pochhammer kind, `argument` is the length and `base` the
    parameter-affine starting point; otherwise `base` is None.
    Internally everything reduces to gamma factors via
    x! = gamma(x + 1) and (c)_L = gamma(c + L)/gamma(c).
    """

    kind: str
    argument: LinForm
    exponent: int
    base: "LinForm | None" = None

    def __post_init__(self):
        if self.kind not in ("factorial", "gamma", "pochhammer"):
            raise ValueError("unknown factorial kind %r" % self.kind)
        if self.exponent == 0:
            raise ValueError("factor exponent must be nonzero")
        if (self.base is not None) != (self.kind == "pochhammer"):
            raise ValueError("base is for the pochhammer kind only")
        if self.base is not None and self.base.var_coeffs:
            raise NonIntegerArgumentError(
                "pochhammer base must be parameter-affine, got %s" % self.base
            )

    def gammas(self):
        """Desugared (argument, exponent) gamma pairs."""
        if self.kind == "factorial":
            return [(self.argument + 1, self.exponent)]
        if self.kind == "gamma":
            return [(self.argument, self.exponent)]
        return [
            (self.base + self.argument, self.exponent),
            (self.base, -self.exponent),
        ]


@dataclass(frozen=True)
class PowerFactor:
    """base**exponent with base free of the discrete variables."""

    base: RatFun
    exponent: LinForm

    def __post_init__(self):
        if self.base.is_zero():
            raise ValueError("power base must be nonzero")


@dataclass(frozen=True)
class ExpFactor:
    """exp(argument) with argument free of the discrete variables."""

    argument: RatFun


@dataclass(frozen=True)
class TermValue:
    """Exact evaluation result: cofactor * exp(exp_argument)."""

    cofactor: Fraction
    exp_argument: Fraction = Fraction(0)

    def exact(self):
        if self.exp_argument != 0 and self.cofactor != 0:
            raise ValueError("value has a transcendental factor exp(%s)" % self.exp_argument)
        return self.cofactor

    def __float__(self):
        return float(self.cofactor) * math.exp(self.exp_argument)


_factorial_cache = {0: 1, 1: 1}


def _factorial(n):
    if n not in _factorial_cache:
        _factorial_cache[n] = n * _factorial(n - 1)
    return _factorial_cache[n]


def gamma_value(arg):
    """(order, unit) of gamma at a rational point.

    order 0 means the finite nonzero value `unit`; order -1 marks the
    simple pole at a nonpositive integer, with `unit` the residue-style
    coefficient (-1)**m / m! at argument -m, so that ratios of gamma
    factors take their limit values.
    """
    arg = Fraction(arg)
    if arg.denominator != 1:
        raise NonIntegerArgumentError("gamma argument %s is not an integer" % arg)
    a = int(arg)
    if a >= 1:
        return 0, Fraction(_factorial(a - 1))
    m = -a
    unit = Fraction((-1) ** m, _factorial(m))
    return -1, unit


class HyperTerm:
    """A proper term in one outer variable, inner variables and parameters.

    All rational functions produced from a term live in its `universe`,
    the symbol tuple (outer, inner discrete, inner continuous,
    parameters) in declaration order.
    """

    def __init__(
        self,
        outer,
        inner_discrete=(),
        inner_continuous=(),
        parameters=(),
        factorials=(),
        powers=(),
        exps=(),
        rational=None,
        outer_continuous=False,
    ):
        self.outer = outer
        self.outer_continuous = bool(outer_continuous)
        self.inner_discrete = tuple(inner_discrete)
        self.inner_continuous = tuple(inner_continuous)
        self.parameters = tuple(parameters)
        names = (outer,) + self.inner_discrete + self.inner_continuous + self.parameters
        if len(set(names)) != len(names):
            raise VariableMismatchError("duplicate symbol in %r" % (names,))
        self.universe = names
        if rational is None:
            rational = RatFun.one(self.universe)
        elif isinstance(rational, MultiPoly):
            rational = RatFun(rational.embed(self.universe))
        else:
            rational = rational.embed(self.universe)
        if rational.is_zero():
            raise ValueError("rational cofactor must be nonzero")
        self.factorials = tuple(factorials)
        self.powers = tuple(
            PowerFactor(p.base.embed(self.universe), p.exponent) for p in powers
        )
        self.exps = tuple(ExpFactor(e.argument.embed(self.universe)) for e in exps)
        self.rational = rational
        self._validate()
        self._wq_cache = {}

    # -- role helpers ------------------------------------------------------

    @property
    def discrete_variables(self):
        base = self.inner_discrete
        return base if self.outer_continuous else (self.outer,) + base

    @property
    def continuous_variables(self):
        base = self.inner_continuous
        return (self.outer,) + base if self.outer_continuous else base

    def coeff_symbols(self):
        """Universe of operator coefficients: outer plus parameters."""
        return (self.outer,) + self.parameters

    def degree_symbol(self):
        """Symbol whose degree the coefficient budget bounds."""
        return self.outer

    def collect_symbols(self):
        """Symbols the ansatz equations are collected against."""
        return self.inner_discrete + self.inner_continuous

    def _validate(self):
        discrete = set(self.discrete_variables)
        continuous = set(self.continuous_variables)
        params = set(self.parameters)
        for f in self.factorials:
            for lin in (f.argument, f.base):
                if lin is None:
                    continue
                bad = set(lin.var_coeffs) - discrete
                if bad:
                    raise VariableMismatchError(
                        "factorial argument %s uses non-discrete symbols %r"
                        % (lin, sorted(bad))
                    )
                bad = set(lin.param_coeffs) - params
                if bad:
                    raise VariableMismatchError(
                        "factorial argument %s uses undeclared parameters %r"
                        % (lin, sorted(bad))
                    )
        for p in self.powers:
            bad = p.base.num.active_variables() | p.base.den.active_variables()
            bad -= continuous | params
            if bad:
                raise VariableMismatchError(
                    "power base %s depends on discrete symbols %r" % (p.base, sorted(bad))
                )
            if set(p.exponent.var_coeffs) - discrete or set(p.exponent.param_coeffs) - params:
                raise VariableMismatchError(
                    "power exponent %s is not discrete-linear" % p.exponent
                )
        for e in self.exps:
            bad = e.argument.num.active_variables() | e.argument.den.active_variables()
            bad -= continuous | params
            if bad:
                raise VariableMismatchError(
                    "exp argument %s depends on discrete symbols %r"
                    % (e.argument, sorted(bad))
                )

    # -- canonical signature ------------------------------------------------

    def gamma_factors(self):
        """Merged desugared gamma multiset as a dict LinForm -> exponent."""
        merged = {}
        for f in self.factorials:
            for arg, e in f.gammas():
                merged[arg] = merged.get(arg, 0) + e
        return {arg: e for arg, e in merged.items() if e != 0}

    def merged_powers(self):
        merged = {}
        for p in self.powers:
            if p.base in merged:
                merged[p.base] = merged[p.base] + p.exponent
            else:
                merged[p.base] = p.exponent
        return {
            b: e
            for b, e in merged.items()
            if e.var_coeffs or e.param_coeffs or e.const != 0
        }

    def exp_argument(self):
        total = RatFun.zero(self.universe)
        for e in self.exps:
            total = total + e.argument
        return total

    def signature(self):
        gammas = tuple(
            sorted(
                ((str(arg), e) for arg, e in self.gamma_factors().items()),
            )
        )
        powers = tuple(
            sorted((str(b), str(e)) for b, e in self.merged_powers().items())
        )
        return (
            self.outer,
            self.outer_continuous,
            self.inner_discrete,
            self.inner_continuous,
            self.parameters,
            gammas,
            powers,
            str(self.exp_argument()),
            str(self.rational),
        )

    def __eq__(self, other):
        if not isinstance(other, HyperTerm):
            return NotImplemented
        return self.signature() == other.signature()

    def __hash__(self):
        return hash(self.signature())

    def __repr__(self):
        return "HyperTerm(outer=%r, signature=%r)" % (self.outer, self.signature()[5:])

    # -- term algebra ----------------------------------------------------------

    def scaled(self, rat):
        """The term multiplied by a rational function of its symbols."""
        if isinstance(rat, (int, Fraction)):
            rat = RatFun.const(self.universe, rat)
        return HyperTerm(
            self.outer,
            self.inner_discrete,
            self.inner_continuous,
            self.parameters,
            self.factorials,
            self.powers,
            self.exps,
            self.rational * rat.embed(self.universe),
            self.outer_continuous,
        )

    def divided_by(self, other):
        """self / other for a closed form over (outer, parameters) only."""
        extra = set(other.universe) - set(self.universe)
        if extra or other.inner_discrete or other.inner_continuous:
            raise VariableMismatchError(
                "cannot divide by a term with its own bound variables"
            )
        factorials = list(self.factorials)
        for f in other.factorials:
            factorials.append(
                FactorialFactor(f.kind, f.argument, -f.exponent, f.base)
            )
        powers = list(self.powers)
        for p in other.powers:
            powers.append(PowerFactor(p.base.embed(self.universe), p.exponent * -1))
        exps = list(self.exps)
        arg = other.exp_argument()
        if not arg.is_zero():
            exps.append(ExpFactor(-arg.embed(self.universe)))
        return HyperTerm(
            self.outer,
            self.inner_discrete,
            self.inner_continuous,
            self.parameters,
            tuple(factorials),
            tuple(powers),
            tuple(exps),
            self.rational / other.rational.embed(self.universe),
            self.outer_continuous,
        )

    def pin_outer(self, value, new_outer):
        """Slice the term at outer = value, promoting an inner variable.

        Used for boundary terms of companion identities.
        """
        value = int(value)
        if new_outer not in self.inner_discrete + self.inner_continuous:
            raise VariableMismatchError("%r is not an inner variable" % new_outer)
        old = self.outer
        sub = {old: MultiPoly.const(self.universe, value)}

        def fix_lin(lin):
            if lin is None:
                return None
            return (lin - LinForm({old: lin.coefficient(old)})) + (
                lin.coefficient(old) * value
            )

        factorials = tuple(
            FactorialFactor(f.kind, fix_lin(f.argument), f.exponent, fix_lin(f.base))
            for f in self.factorials
        )
        new_universe = tuple(s for s in self.universe if s != old)
        new_universe = (new_outer,) + tuple(s for s in new_universe if s != new_outer)

        def fix_rat(r):
            return r.substitute(sub).embed(new_universe)

        powers = tuple(
            PowerFactor(fix_rat(p.base), fix_lin(p.exponent)) for p in self.powers
        )
        exps = tuple(ExpFactor(fix_rat(e.argument)) for e in self.exps)
        return HyperTerm(
            new_outer,
            tuple(v for v in self.inner_discrete if v != new_outer),
            tuple(v for v in self.inner_continuous if v != new_outer),
            self.parameters,
            factorials,
            powers,
            exps,
            fix_rat(self.rational),
            outer_continuous=new_outer in self.inner_continuous,
        )

    # -- quotients ---------------------------------------------------------------

    def shift_quotient(self, name):
        """F(name+1)/F(name) as a rational function of the symbols."""
        if name not in self.discrete_variables:
            raise VariableMismatchError("%r is not a discrete variable" % name)
        result = RatFun.one(self.universe)
        for arg, e in self.gamma_factors().items():
            a = arg.coefficient(name)
            if a:
                result = result * gamma_shift_ratio(arg, a, self.universe) ** e
        for base, exponent in self.merged_powers().items():
            a = exponent.coefficient(name)
            if a:
                result = result * base ** a
        if not self.rational.is_constant():
            result = result * (self.rational.shift(name) / self.rational)
        return result

    def derivative_quotient(self, name):
        """(d/dname F)/F as a rational function of the symbols."""
        if name not in self.continuous_variables:
            raise VariableMismatchError("%r is not a continuous variable" % name)
        total = RatFun.zero(self.universe)
        for base, exponent in self.merged_powers().items():
            d = base.derivative(name)
            if not d.is_zero():
                total = total + exponent.to_ratfun(self.universe) * (d / base)
        for e in self.exps:
            total = total + e.argument.derivative(name)
        if not self.rational.is_constant():
            total = total + self.rational.derivative(name) / self.rational
        return total

    def shift_substitute(self, fun, name):
        """Apply this term's shift action in `name` to a rational function."""
        return fun.shift(name)

    def word_quotient(self, word):
        """(word applied to F)/F for a word (a, k-shifts, y-derivatives)."""
        word = (
            int(word[0]),
            tuple(int(x) for x in word[1]),
            tuple(int(x) for x in word[2]),
        )
        cached = self._wq_cache.get(word)
        if cached is not None:
            return cached
        a, b, c = word
        if a == 0 and not any(b) and not any(c):
            result = RatFun.one(self.universe)
        elif any(c):
            j = max(i for i, x in enumerate(c) if x)
            name = self.inner_continuous[j]
            sub = self.word_quotient(
                (a, b, c[:j] + (c[j] - 1,) + c[j + 1 :])
            )
            result = sub.derivative(name) + sub * self.derivative_quotient(name)
        elif a:
            sub = self.word_quotient((a - 1, b, c))
            if self.outer_continuous:
                result = sub.derivative(self.outer) + sub * self.derivative_quotient(
                    self.outer
                )
            else:
                result = self.shift_substitute(sub, self.outer) * self.shift_quotient(
                    self.outer
                )
        else:
            i = max(i for i, x in enumerate(b) if x)
            name = self.inner_discrete[i]
            sub = self.word_quotient((a, b[:i] + (b[i] - 1,) + b[i + 1 :], c))
            result = self.shift_substitute(sub, name) * self.shift_quotient(name)
        self._wq_cache[word] = result
        return result

    # -- evaluation -----------------------------------------------------------------

    def evaluate(self, point):
        """Exact value at a point assigning every symbol.

        Discrete variables take integers; a denominator gamma factor at
        a nonpositive integer annihilates the term, a numerator one is
        a pole.  Terms with exponential factors report the exp argument
        separately in the TermValue.
        """
        for v in self.discrete_variables:
            if v not in point:
                raise UnboundParameterError("no value for variable %r" % v)
            if Fraction(point[v]).denominator != 1:
                raise NonIntegerArgumentError(
                    "discrete variable %r needs an integer value" % v
                )
        for p in self.parameters:
            if p not in point:
                raise UnboundParameterError("unbound parameter %r" % p)
        order = 0
        unit = Fraction(1)
        zero = False
        for arg, e in self.gamma_factors().items():
            o, u = gamma_value(arg.evaluate(point))
            order += o * e
            unit *= u ** e
        for base, exponent in self.merged_powers().items():
            exp_val = exponent.evaluate(point)
            if exp_val.denominator != 1:
                raise NonIntegerArgumentError(
                    "power exponent %s = %s is not an integer" % (exponent, exp_val)
                )
            exp_val = int(exp_val)
            den_val = base.den.evaluate(point)
            if den_val == 0:
                raise PoleError("power base %s undefined at %r" % (base, point))
            num_val = base.num.evaluate(point)
            if num_val == 0:
                if exp_val > 0:
                    zero = True
                elif exp_val < 0:
                    raise PoleError("zero power base %s with negative exponent" % base)
            else:
                unit *= Fraction(num_val, den_val) ** exp_val
        rden = self.rational.den.evaluate(point)
        if rden == 0:
            raise PoleError("cofactor denominator vanishes at %r" % (point,))
        rnum = self.rational.num.evaluate(point)
        if rnum == 0:
            zero = True
        else:
            unit *= rnum / rden
        if order < 0:
            raise PoleError("pole of term at %r" % (point,))
        if order > 0 or zero:
            return TermValue(Fraction(0))
        exp_arg = Fraction(0)
        for e in self.exps:
            exp_arg += e.argument.evaluate(point)
        return TermValue(unit, exp_arg)


def gamma_shift_ratio(arg, step, universe):
    """gamma(arg + step)/gamma(arg) as a rational function."""
    one = RatFun.one(universe)
    result = one
    base = arg.to_ratfun(universe)
    if step >= 0:
        for t in range(step):
            result = result * (base + t)
    else:
        for t in range(1, -step + 1):
            result = result / (base - t)
    return result


# -- module-level operation names -----------------------------------------------


def shift_quotient(term, name):
    return term.shift_quotient(name)


def derivative_quotient(term, name):
    return term.derivative_quotient(name)


def word_quotient(term, word):
    return term.word_quotient(word)


def eval_term(term, point):
    return term.evaluate(point)
