"""Rational functions as reduced pairs of multivariate polynomials.

Normal form: numerator and denominator share no non-unit factor, both
have integer coefficients whose joint content is 1, and the denominator
has a positive leading coefficient in the graded-lex order.  Structural
equality of normal forms is mathematical equality.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import DegenerateSubstitutionError, PoleError
from .poly import MultiPoly, poly_gcd


class RatFun:
    """Immutable quotient of two MultiPoly values over one universe."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        if den is None:
            den = MultiPoly.const(num.variables, 1)
        if num.variables != den.variables:
            num._check(den)  # raises VariableMismatchError
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            den = MultiPoly.const(num.variables, 1)
        else:
            g = poly_gcd(num, den)
            if not (g.is_constant() and g.constant_value() == 1):
                num = num.exact_div(g)
                den = den.exact_div(g)
            cn, cd = num.content(), den.content()
            scale = Fraction(
                math.gcd(cn.numerator * cd.denominator, cd.numerator * cn.denominator),
                cn.denominator * cd.denominator,
            )
            if scale != 1:
                num = num * (1 / scale)
                den = den * (1 / scale)
            if den.leading()[1] < 0:
                num, den = -num, -den
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("RatFun is immutable")

    # -- constructors ----------------------------------------------------

    @classmethod
    def const(cls, variables, value):
        value = Fraction(value)
        return cls(
            MultiPoly.const(variables, value.numerator),
            MultiPoly.const(variables, value.denominator),
        )

    @classmethod
    def var(cls, variables, name):
        return cls(MultiPoly.var(variables, name))

    @classmethod
    def zero(cls, variables):
        return cls(MultiPoly.zero(variables))

    @classmethod
    def one(cls, variables):
        return cls(MultiPoly.const(variables, 1))

    # -- queries -----------------------------------------------------------

    @property
    def variables(self):
        return self.num.variables

    def is_zero(self):
        return self.num.is_zero()

    def is_constant(self):
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self):
        return self.num.constant_value() / self.den.constant_value()

    def is_polynomial(self):
        return self.den.is_constant()

    def as_poly(self):
        """The numerator scaled by 1/den when the denominator is constant."""
        if not self.is_polynomial():
            raise ValueError("%s is not a polynomial" % self)
        return self.num * (1 / self.den.constant_value())

    # -- arithmetic ----------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, RatFun):
            return other
        if isinstance(other, MultiPoly):
            return RatFun(other)
        if isinstance(other, (int, Fraction)):
            return RatFun.const(self.variables, other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        g = poly_gcd(self.den, other.den)
        right = other.den.exact_div(g)
        left = self.den.exact_div(g)
        return RatFun(self.num * right + other.num * left, self.den * right)

    __radd__ = __add__

    def __neg__(self):
        return RatFun(-self.num, self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        g1 = poly_gcd(self.num, other.den)
        g2 = poly_gcd(other.num, self.den)
        return RatFun(
            self.num.exact_div(g1) * other.num.exact_div(g2),
            self.den.exact_div(g2) * other.den.exact_div(g1),
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return self * RatFun(other.den, other.num)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        return other / self

    def __pow__(self, n):
        if n == 0:
            return RatFun.one(self.variables)
        if n < 0:
            if self.is_zero():
                raise ZeroDivisionError("negative power of zero")
            return RatFun(self.den, self.num) ** (-n)
        return RatFun(self.num ** n, self.den ** n)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __bool__(self):
        return not self.is_zero()

    # -- calculus, substitution, evaluation -----------------------------------

    def derivative(self, name):
        num = self.num.derivative(name) * self.den - self.num * self.den.derivative(
            name
        )
        return RatFun(num, self.den * self.den)

    def substitute(self, mapping):
        """Apply a variable substitution; reject ones that kill the denominator."""
        num = self.num.substitute(mapping)
        den = self.den.substitute(mapping)
        if den.is_zero():
            raise DegenerateSubstitutionError(
                "substitution sends denominator %s to zero" % self.den
            )
        return RatFun(num, den)

    def shift(self, name, step=1):
        return self.substitute(
            {name: MultiPoly.var(self.variables, name) + step}
        )

    def evaluate(self, point):
        d = self.den.evaluate(point)
        if d == 0:
            raise PoleError("denominator %s vanishes at %r" % (self.den, point))
        return self.num.evaluate(point) / d

    def embed(self, variables):
        return RatFun(self.num.embed(variables), self.den.embed(variables))

    # -- rendering --------------------------------------------------------------

    def __str__(self):
        if self.den.is_constant() and self.den.constant_value() == 1:
            return str(self.num)
        num = str(self.num)
        den = str(self.den)
        if len(self.num.terms) > 1:
            num = "(%s)" % num
        if len(self.den.terms) > 1:
            den = "(%s)" % den
        return "%s/%s" % (num, den)

    def __repr__(self):
        return "RatFun(%s)" % self
