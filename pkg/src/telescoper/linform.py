"""Integer-linear forms in discrete variables with parameter-affine constants.

A LinForm is  sum_i a_i*v_i + sum_p c_p*p + c0  where the v_i are discrete
variables with integer coefficients a_i, the p are parameters with rational
coefficients, and c0 is rational.  This is the shape every factorial-type
argument and power exponent must have.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import NonIntegerArgumentError, UnboundParameterError
from .poly import MultiPoly
from .ratfun import RatFun


class LinForm:
    __slots__ = ("var_coeffs", "param_coeffs", "const")

    def __init__(self, var_coeffs=None, param_coeffs=None, const=0):
        vc = {}
        for name, c in (var_coeffs or {}).items():
            c = Fraction(c)
            if c.denominator != 1:
                raise NonIntegerArgumentError(
                    "coefficient of discrete variable %r must be an integer, got %s"
                    % (name, c)
                )
            if c != 0:
                vc[name] = int(c)
        pc = {}
        for name, c in (param_coeffs or {}).items():
            c = Fraction(c)
            if c != 0:
                pc[name] = c
        object.__setattr__(self, "var_coeffs", vc)
        object.__setattr__(self, "param_coeffs", pc)
        object.__setattr__(self, "const", Fraction(const))

    def __setattr__(self, name, value):
        raise AttributeError("LinForm is immutable")

    @classmethod
    def variable(cls, name):
        return cls({name: 1})

    @classmethod
    def constant(cls, value):
        return cls(const=value)

    # -- structure ---------------------------------------------------------

    def coefficient(self, name):
        return self.var_coeffs.get(name, 0)

    def is_constant(self):
        return not self.var_coeffs and not self.param_coeffs

    def has_parameters(self):
        return bool(self.param_coeffs)

    def names(self):
        return set(self.var_coeffs) | set(self.param_coeffs)

    def integer_constant(self):
        """The constant part when it is a parameter-free integer, else None."""
        if self.param_coeffs or self.const.denominator != 1:
            return None
        return int(self.const)

    # -- arithmetic -----------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LinForm.constant(other)
        vc = dict(self.var_coeffs)
        for k, v in other.var_coeffs.items():
            vc[k] = vc.get(k, 0) + v
        pc = dict(self.param_coeffs)
        for k, v in other.param_coeffs.items():
            pc[k] = pc.get(k, Fraction(0)) + v
        return LinForm(vc, pc, self.const + other.const)

    __radd__ = __add__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LinForm.constant(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, scalar):
        scalar = Fraction(scalar)
        return LinForm(
            {k: v * scalar for k, v in self.var_coeffs.items()},
            {k: v * scalar for k, v in self.param_coeffs.items()},
            self.const * scalar,
        )

    __rmul__ = __mul__

    def shift(self, name, step=1):
        """The form after substituting name -> name + step."""
        return self + LinForm.constant(self.coefficient(name) * step)

    def __eq__(self, other):
        if not isinstance(other, LinForm):
            return NotImplemented
        return (
            self.var_coeffs == other.var_coeffs
            and self.param_coeffs == other.param_coeffs
            and self.const == other.const
        )

    def __hash__(self):
        return hash(
            (
                frozenset(self.var_coeffs.items()),
                frozenset(self.param_coeffs.items()),
                self.const,
            )
        )

    # -- conversions --------------------------------------------------------------

    def to_poly(self, variables):
        terms = {}
        zero = (0,) * len(variables)
        for name, c in list(self.var_coeffs.items()) + list(self.param_coeffs.items()):
            i = variables.index(name)
            exps = zero[:i] + (1,) + zero[i + 1 :]
            terms[exps] = Fraction(c)
        if self.const != 0:
            terms[zero] = self.const
        return MultiPoly(variables, terms)

    def to_ratfun(self, variables):
        return RatFun(self.to_poly(variables))

    def evaluate(self, point):
        total = self.const
        for name, c in self.var_coeffs.items():
            if name not in point:
                raise UnboundParameterError("no value for %r" % name)
            total += c * Fraction(point[name])
        for name, c in self.param_coeffs.items():
            if name not in point:
                raise UnboundParameterError("unbound parameter %r" % name)
            total += c * Fraction(point[name])
        return total

    # -- rendering ------------------------------------------------------------------

    def render(self, order=None):
        """Deterministic human/DSL form, e.g. '2*n - k + 1'."""
        items = []
        names = sorted(self.var_coeffs) + sorted(self.param_coeffs)
        if order is not None:
            ranked = {name: i for i, name in enumerate(order)}
            names.sort(key=lambda s: (ranked.get(s, len(ranked)), s))
        for name in names:
            if name in self.var_coeffs:
                c = Fraction(self.var_coeffs[name])
            else:
                c = self.param_coeffs[name]
            items.append((c, name))
        parts = []
        for c, name in items:
            mag = abs(c)
            body = name if mag == 1 else "%s*%s" % (mag, name)
            if not parts:
                parts.append(body if c > 0 else "-" + body)
            else:
                parts.append(("+ " if c > 0 else "- ") + body)
        if self.const != 0 or not parts:
            mag = abs(self.const)
            if not parts:
                parts.append(str(self.const))
            else:
                parts.append(("+ " if self.const > 0 else "- ") + str(mag))
        return " ".join(parts)

    def __str__(self):
        return self.render()

    def __repr__(self):
        return "LinForm(%s)" % self
