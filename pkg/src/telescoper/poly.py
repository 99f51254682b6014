"""Sparse multivariate polynomials with exact rational coefficients.

A polynomial is a mapping from exponent tuples to nonzero Fractions,
together with an ordered tuple of variable names the exponents refer to.
Two polynomials interoperate only when their variable tuples are equal;
`embed` lifts a polynomial into a larger universe by name.

The monomial order used everywhere (leading terms, canonical signs) is
graded lexicographic over the declared variable order: higher total
degree first, ties broken lexicographically on the exponent tuple.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import InexactDivisionError, VariableMismatchError

Exponent = "tuple[int, ...]"


def _grlex_key(exponents):
    return (sum(exponents), exponents)


class MultiPoly:
    """Immutable sparse polynomial over Fraction coefficients."""

    __slots__ = ("variables", "terms")

    def __init__(self, variables, terms):
        variables = tuple(variables)
        clean = {}
        nvars = len(variables)
        for exps, coeff in terms.items():
            if len(exps) != nvars:
                raise VariableMismatchError(
                    "exponent tuple %r does not match variables %r" % (exps, variables)
                )
            if not isinstance(coeff, Fraction):
                coeff = Fraction(coeff)
            if coeff != 0:
                key = tuple(int(e) for e in exps)
                clean[key] = clean.get(key, Fraction(0)) + coeff
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "terms", {e: c for e, c in clean.items() if c != 0})

    def __setattr__(self, name, value):
        raise AttributeError("MultiPoly is immutable")

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, variables):
        return cls(variables, {})

    @classmethod
    def const(cls, variables, value):
        variables = tuple(variables)
        return cls(variables, {(0,) * len(variables): Fraction(value)})

    @classmethod
    def var(cls, variables, name, power=1):
        variables = tuple(variables)
        if name not in variables:
            raise VariableMismatchError("unknown variable %r in %r" % (name, variables))
        exps = tuple(power if v == name else 0 for v in variables)
        return cls(variables, {exps: Fraction(1)})

    @classmethod
    def monomial(cls, variables, exps, coeff=1):
        return cls(variables, {tuple(exps): Fraction(coeff)})

    # -- basic queries -------------------------------------------------

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return all(all(e == 0 for e in exps) for exps in self.terms)

    def constant_value(self):
        if not self.terms:
            return Fraction(0)
        if not self.is_constant():
            raise ValueError("polynomial %s is not constant" % self)
        return next(iter(self.terms.values()))

    def degree(self, name):
        """Degree in a single variable, -1 for the zero polynomial."""
        if not self.terms:
            return -1
        i = self.variables.index(name)
        return max(e[i] for e in self.terms)

    def total_degree(self):
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def leading(self):
        """(exponent, coefficient) of the graded-lex leading term."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        exps = max(self.terms, key=_grlex_key)
        return exps, self.terms[exps]

    def active_variables(self):
        used = set()
        for exps in self.terms:
            for name, e in zip(self.variables, exps):
                if e:
                    used.add(name)
        return used

    def coefficient(self, name, power):
        """Coefficient of name**power, a polynomial in the same universe."""
        i = self.variables.index(name)
        picked = {}
        for exps, coeff in self.terms.items():
            if exps[i] == power:
                picked[exps[:i] + (0,) + exps[i + 1 :]] = coeff
        return MultiPoly(self.variables, picked)

    # -- arithmetic ----------------------------------------------------

    def _check(self, other):
        if self.variables != other.variables:
            raise VariableMismatchError(
                "variable universes differ: %r vs %r" % (self.variables, other.variables)
            )

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = MultiPoly.const(self.variables, other)
        self._check(other)
        terms = dict(self.terms)
        for exps, coeff in other.terms.items():
            terms[exps] = terms.get(exps, Fraction(0)) + coeff
        return MultiPoly(self.variables, terms)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = MultiPoly.const(self.variables, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return MultiPoly.zero(self.variables)
            return MultiPoly(
                self.variables, {e: c * other for e, c in self.terms.items()}
            )
        self._check(other)
        terms = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                exps = tuple(a + b for a, b in zip(e1, e2))
                acc = terms.get(exps)
                terms[exps] = c1 * c2 if acc is None else acc + c1 * c2
        return MultiPoly(self.variables, terms)

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = MultiPoly.const(self.variables, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = MultiPoly.const(self.variables, other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.variables == other.variables and self.terms == other.terms

    def __hash__(self):
        return hash((self.variables, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    # -- division and gcd ----------------------------------------------

    def exact_div(self, other):
        """Divide by an exact factor; raise InexactDivisionError otherwise."""
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return self * Fraction(1, 1) / Fraction(other)
        self._check(other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if other.is_constant():
            return self * (1 / other.constant_value())
        quotient = {}
        rem = dict(self.terms)
        lead_e, lead_c = other.leading()
        while rem:
            exps = max(rem, key=_grlex_key)
            coeff = rem[exps]
            q_exps = tuple(a - b for a, b in zip(exps, lead_e))
            if any(e < 0 for e in q_exps):
                raise InexactDivisionError(
                    "%s is not divisible by %s" % (self, other)
                )
            q_coeff = coeff / lead_c
            quotient[q_exps] = q_coeff
            for e2, c2 in other.terms.items():
                t = tuple(a + b for a, b in zip(q_exps, e2))
                new = rem.get(t, Fraction(0)) - q_coeff * c2
                if new == 0:
                    rem.pop(t, None)
                else:
                    rem[t] = new
        return MultiPoly(self.variables, quotient)

    def divides(self, other):
        try:
            other.exact_div(self)
            return True
        except InexactDivisionError:
            return False

    def content(self):
        """Positive rational c with self/c integer-coefficient, content 1."""
        if not self.terms:
            return Fraction(1)
        num = 0
        den = 1
        for coeff in self.terms.values():
            num = math.gcd(num, coeff.numerator)
            den = den * coeff.denominator // math.gcd(den, coeff.denominator)
        return Fraction(num, den)

    def primitive(self):
        """self divided by its content (zero polynomial stays zero)."""
        if not self.terms:
            return self
        return self * (1 / self.content())

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return self * (Fraction(1) / Fraction(other))
        return self.exact_div(other)

    # -- calculus and substitution --------------------------------------

    def derivative(self, name):
        i = self.variables.index(name)
        terms = {}
        for exps, coeff in self.terms.items():
            if exps[i] == 0:
                continue
            new = exps[:i] + (exps[i] - 1,) + exps[i + 1 :]
            terms[new] = terms.get(new, Fraction(0)) + coeff * exps[i]
        return MultiPoly(self.variables, terms)

    def substitute(self, mapping):
        """Replace variables by polynomials (all in this universe).

        mapping: name -> MultiPoly | Fraction | int.  Unmapped variables
        stand for themselves.
        """
        images = {}
        for name in self.variables:
            if name in mapping:
                value = mapping[name]
                if isinstance(value, (int, Fraction)):
                    value = MultiPoly.const(self.variables, value)
                else:
                    self._check(value)
                images[name] = value
        if not images:
            return self
        result = MultiPoly.zero(self.variables)
        power_cache = {}

        def power_of(name, e):
            key = (name, e)
            if key not in power_cache:
                base = images.get(name)
                if base is None:
                    base = MultiPoly.var(self.variables, name)
                power_cache[key] = base ** e
            return power_cache[key]

        for exps, coeff in self.terms.items():
            piece = MultiPoly.const(self.variables, coeff)
            for name, e in zip(self.variables, exps):
                if e:
                    piece = piece * power_of(name, e)
            result = result + piece
        return result

    def shift(self, name, step=1):
        """Substitute name -> name + step."""
        image = MultiPoly.var(self.variables, name) + MultiPoly.const(
            self.variables, step
        )
        return self.substitute({name: image})

    def evaluate(self, point):
        """Evaluate at a rational point; every active variable needs a value."""
        total = Fraction(0)
        idx = [
            Fraction(point[name]) if name in point else None
            for name in self.variables
        ]
        for exps, coeff in self.terms.items():
            value = coeff
            for i, e in enumerate(exps):
                if e:
                    if idx[i] is None:
                        raise VariableMismatchError(
                            "no value for variable %r" % self.variables[i]
                        )
                    value *= idx[i] ** e
            total += value
        return total

    def embed(self, variables):
        """Re-express over another universe, by variable name.

        The target must contain every variable this polynomial actually
        uses; unused variables may be dropped.
        """
        variables = tuple(variables)
        active = self.active_variables()
        positions = {}
        for i, name in enumerate(self.variables):
            if name in variables:
                positions[i] = variables.index(name)
            elif name in active:
                raise VariableMismatchError(
                    "variable %r missing from universe %r" % (name, variables)
                )
        terms = {}
        for exps, coeff in self.terms.items():
            new = [0] * len(variables)
            for i, e in enumerate(exps):
                if e:
                    new[positions[i]] = e
            key = tuple(new)
            terms[key] = terms.get(key, Fraction(0)) + coeff
        return MultiPoly(variables, terms)

    # -- rendering -------------------------------------------------------

    def _monomial_str(self, exps):
        parts = []
        for name, e in zip(self.variables, exps):
            if e == 1:
                parts.append(name)
            elif e > 1:
                parts.append("%s^%d" % (name, e))
        return "*".join(parts)

    def __str__(self):
        if not self.terms:
            return "0"
        chunks = []
        for exps in sorted(self.terms, key=_grlex_key, reverse=True):
            coeff = self.terms[exps]
            mono = self._monomial_str(exps)
            if not mono:
                body = str(abs(coeff))
            elif abs(coeff) == 1:
                body = mono
            else:
                body = "%s*%s" % (abs(coeff), mono)
            if not chunks:
                chunks.append(body if coeff > 0 else "-" + body)
            else:
                chunks.append(("+ " if coeff > 0 else "- ") + body)
        return " ".join(chunks)

    def __repr__(self):
        return "MultiPoly(%r, %s)" % (self.variables, str(self))


# -- gcd -----------------------------------------------------------------


def _strip_monomial(p):
    """Split off the largest monomial factor; return (exponents, reduced)."""
    mins = None
    for exps in p.terms:
        if mins is None:
            mins = list(exps)
        else:
            mins = [min(a, b) for a, b in zip(mins, exps)]
    if mins is None or not any(mins):
        return (0,) * len(p.variables), p
    terms = {
        tuple(a - b for a, b in zip(exps, mins)): c for exps, c in p.terms.items()
    }
    return tuple(mins), MultiPoly(p.variables, terms)


def _to_univar(p, name):
    """View p as a univariate polynomial in name: degree -> coefficient."""
    i = p.variables.index(name)
    coeffs = {}
    for exps, coeff in p.terms.items():
        d = exps[i]
        rest = exps[:i] + (0,) + exps[i + 1 :]
        bucket = coeffs.setdefault(d, {})
        bucket[rest] = bucket.get(rest, Fraction(0)) + coeff
    return {d: MultiPoly(p.variables, body) for d, body in coeffs.items()}


def _from_univar(coeffs, name, variables):
    i = variables.index(name)
    terms = {}
    for d, poly in coeffs.items():
        for exps, coeff in poly.terms.items():
            new = exps[:i] + (d,) + exps[i + 1 :]
            terms[new] = terms.get(new, Fraction(0)) + coeff
    return MultiPoly(variables, terms)


def _poly_content(coeffs):
    """gcd of the coefficient polynomials of a univariate view."""
    result = None
    for poly in coeffs.values():
        result = poly if result is None else poly_gcd(result, poly)
        if result.is_constant():
            break
    return result


def _pseudo_rem(a, b):
    """Pseudo-remainder of univariate views a mod b (dicts degree->poly)."""
    db = max(b)
    lb = b[db]
    rem = dict(a)
    while rem and max(rem) >= db:
        dr = max(rem)
        lr = rem[dr]
        shift = dr - db
        new = {}
        for d, c in rem.items():
            new[d] = c * lb
        for d, c in b.items():
            t = d + shift
            new[t] = new.get(t, MultiPoly.zero(lr.variables)) - lr * c
        rem = {d: c for d, c in new.items() if not c.is_zero()}
    return rem


def _normalize_sign(p):
    if p.is_zero():
        return p
    _, lead = p.leading()
    return -p if lead < 0 else p


def poly_gcd(a, b):
    """Greatest common divisor, primitive with positive leading coefficient.

    Constant nonzero inputs act as units: gcd(c, p) for c != 0 is 1 unless
    both are zero.  Computed by primitive-part recursion on a main variable.
    """
    if a.variables != b.variables:
        raise VariableMismatchError(
            "variable universes differ: %r vs %r" % (a.variables, b.variables)
        )
    if a.is_zero():
        return _normalize_sign(b.primitive())
    if b.is_zero():
        return _normalize_sign(a.primitive())
    if a.is_constant() or b.is_constant():
        return MultiPoly.const(a.variables, 1)

    mono_a, a = _strip_monomial(a)
    mono_b, b = _strip_monomial(b)
    common = tuple(min(x, y) for x, y in zip(mono_a, mono_b))

    if a.is_constant() or b.is_constant():
        g = MultiPoly.const(a.variables, 1)
    elif a == b:
        g = a.primitive()
    else:
        active = sorted(a.active_variables() & b.active_variables())
        if not active:
            g = MultiPoly.const(a.variables, 1)
        else:
            name = min(active, key=lambda v: min(a.degree(v), b.degree(v)))
            ua = _to_univar(a, name)
            ub = _to_univar(b, name)
            cont_a = _poly_content(ua)
            cont_b = _poly_content(ub)
            cont_g = poly_gcd(cont_a, cont_b)
            pa = {d: c.exact_div(cont_a) for d, c in ua.items()}
            pb = {d: c.exact_div(cont_b) for d, c in ub.items()}
            if max(pa) < max(pb):
                pa, pb = pb, pa
            while True:
                rem = _pseudo_rem(pa, pb)
                if not rem:
                    break
                cont = _poly_content(rem)
                pa = pb
                pb = {d: c.exact_div(cont) for d, c in rem.items()}
                if max(pb) == 0:
                    break
            if max(pb) == 0:
                g = cont_g
            else:
                g = _from_univar(pb, name, a.variables) * cont_g
    g = g * MultiPoly.monomial(a.variables, common)
    return _normalize_sign(g.primitive())


def poly_lcm(a, b):
    if a.is_zero() or b.is_zero():
        return MultiPoly.zero(a.variables)
    g = poly_gcd(a, b)
    return _normalize_sign((a * b.exact_div(g)).primitive())


def integer_roots(p, name):
    """All integer roots of a nonzero polynomial, in one variable of it.

    The polynomial may not involve any other variable.
    """
    if p.is_zero():
        raise ValueError("zero polynomial has every integer as a root")
    extra = p.active_variables() - {name}
    if extra:
        raise VariableMismatchError(
            "polynomial involves %r besides %r" % (sorted(extra), name)
        )
    uni = _to_univar(p.primitive(), name)
    degrees = sorted(uni)
    roots = set()
    low = degrees[0]
    if low > 0:
        roots.add(0)
    trail_int = abs(uni[low].constant_value().numerator)
    for cand in _divisors(trail_int):
        for r in (cand, -cand):
            value = Fraction(0)
            for d in degrees:
                value += uni[d].constant_value() * Fraction(r) ** (d - low)
            if value == 0:
                roots.add(r)
    return sorted(roots)


def _divisors(n):
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
        d += 1
    return sorted(out)
