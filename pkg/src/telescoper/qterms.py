"""q-analogue term model.

A q-hypergeometric term in an outer variable n and inner variables k_i
is tracked through the symbols w = q^n and x_i = q^{k_i}; every shift
quotient is a rational function of (q, w, x_1.., parameters).  Shifting
a variable acts on rational functions by the substitution that
multiplies its symbol by q.

Factor classes:

  * QPochFactor: (A q^{L1}; q)_{L2} with A rational in (q, parameters),
    L1 and L2 integer forms in the discrete variables.
  * QPowFactor: q^{Q} for an integer-valued quadratic form Q. Quadratic
    exponents like k(k-1)/2 are what make q-binomial identities work;
    only their increments need to be integer linear forms.
  * GeomFactor: base^{L} with base rational in (q, parameters).

Evaluation keeps q symbolic and returns rational functions of
(q, parameters), so downstream proofs hold for every q where the stated
denominators are nonzero (in particular for all q that are not roots of
unity).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    CertificatePoleError,
    NonIntegerArgumentError,
    PoleError,
    UnboundParameterError,
    VariableMismatchError,
)
from .linform import LinForm
from .poly import MultiPoly
from .ratfun import RatFun


def q_symbol(name):
    """Symbol tracking q**name for a discrete variable."""
    return "q^" + name


@dataclass(frozen=True)
class QuadForm:
    """Integer-valued quadratic-plus-linear form in discrete variables.

    quad maps ordered name pairs (a, b) with a <= b to coefficients of
    a*b; lin and const complete the form.  Coefficients may be half
    integers (as in k(k-1)/2) as long as all unit increments and the
    values at 0/1 points are integers.
    """

    quad: tuple = ()
    lin: tuple = ()
    const: Fraction = Fraction(0)

    @staticmethod
    def build(quad=None, lin=None, const=0):
        qd = {}
        for (a, b), c in (quad or {}).items():
            a, b = sorted((a, b))
            c = Fraction(c)
            if c:
                qd[(a, b)] = qd.get((a, b), Fraction(0)) + c
        ln = {}
        for a, c in (lin or {}).items():
            c = Fraction(c)
            if c:
                ln[a] = c
        return QuadForm(
            tuple(sorted(qd.items())), tuple(sorted(ln.items())), Fraction(const)
        )

    def names(self):
        out = set()
        for (a, b), _ in self.quad:
            out.add(a)
            out.add(b)
        for a, _ in self.lin:
            out.add(a)
        return out

    def is_zero(self):
        return not self.quad and not self.lin and self.const == 0

    def increment(self, name):
        """Q(.., name+1, ..) - Q(..) as a LinForm; must have integer data."""
        coeffs = {}
        const = Fraction(0)
        for (a, b), c in self.quad:
            if a == b == name:
                coeffs[name] = coeffs.get(name, Fraction(0)) + 2 * c
                const += c
            elif a == name:
                coeffs[b] = coeffs.get(b, Fraction(0)) + c
            elif b == name:
                coeffs[a] = coeffs.get(a, Fraction(0)) + c
        for a, c in self.lin:
            if a == name:
                const += c
        for v, c in coeffs.items():
            if c.denominator != 1:
                raise NonIntegerArgumentError(
                    "increment of q-power form in %r has non-integer coefficient" % name
                )
        if const.denominator != 1:
            raise NonIntegerArgumentError(
                "increment of q-power form in %r has non-integer constant" % name
            )
        return LinForm({v: c for v, c in coeffs.items()}, None, const)

    def value(self, point):
        total = self.const
        for (a, b), c in self.quad:
            total += c * Fraction(point[a]) * Fraction(point[b])
        for a, c in self.lin:
            total += c * Fraction(point[a])
        if total.denominator != 1:
            raise NonIntegerArgumentError(
                "q-power exponent %s is not an integer at %r" % (total, point)
            )
        return int(total)


@dataclass(frozen=True)
class QPochFactor:
    """(prefactor * q^{shift}; q)_{length} raised to an integer power."""

    prefactor: RatFun
    shift: LinForm
    length: LinForm
    exponent: int = 1

    def __post_init__(self):
        if self.exponent == 0:
            raise ValueError("factor exponent must be nonzero")
        if self.prefactor.is_zero():
            raise ValueError("q-Pochhammer prefactor must be nonzero")
        for lin in (self.shift, self.length):
            if lin.param_coeffs or lin.const.denominator != 1:
                raise NonIntegerArgumentError(
                    "q-Pochhammer exponent data must be integer forms, got %s" % lin
                )


@dataclass(frozen=True)
class QPowFactor:
    """q raised to an integer-valued quadratic form."""

    form: QuadForm


@dataclass(frozen=True)
class GeomFactor:
    """base^{exponent} with base free of the discrete symbols."""

    base: RatFun
    exponent: LinForm

    def __post_init__(self):
        if self.base.is_zero():
            raise ValueError("geometric base must be nonzero")
        if self.exponent.param_coeffs or self.exponent.const.denominator != 1:
            raise NonIntegerArgumentError(
                "geometric exponent must be an integer form, got %s" % self.exponent
            )


class QHyperTerm:
    """q-proper term with outer n, inner discrete k_i and parameters."""

    def __init__(
        self,
        outer,
        inner=(),
        parameters=(),
        pochhammers=(),
        qpowers=(),
        geoms=(),
        rational=None,
    ):
        self.outer = outer
        self.inner_discrete = tuple(inner)
        self.inner_continuous = ()
        self.outer_continuous = False
        self.parameters = tuple(parameters)
        names = (outer,) + self.inner_discrete + self.parameters
        if len(set(names)) != len(names):
            raise VariableMismatchError("duplicate symbol in %r" % (names,))
        self.variables = names
        self.universe = (
            ("q", q_symbol(outer))
            + tuple(q_symbol(v) for v in self.inner_discrete)
            + self.parameters
        )
        self.scalar_universe = ("q",) + self.parameters
        if rational is None:
            rational = RatFun.one(self.universe)
        elif isinstance(rational, MultiPoly):
            rational = RatFun(rational.embed(self.universe))
        else:
            rational = rational.embed(self.universe)
        if rational.is_zero():
            raise ValueError("rational cofactor must be nonzero")
        self.rational = rational
        self.pochhammers = tuple(
            QPochFactor(p.prefactor.embed(self.universe), p.shift, p.length, p.exponent)
            for p in pochhammers
        )
        self.qpowers = tuple(qpowers)
        self.geoms = tuple(
            GeomFactor(g.base.embed(self.universe), g.exponent) for g in geoms
        )
        self._validate()
        self._wq_cache = {}

    @property
    def discrete_variables(self):
        return (self.outer,) + self.inner_discrete

    def coeff_symbols(self):
        """Symbols allowed in operator coefficients: q, w and parameters."""
        return ("q", q_symbol(self.outer)) + self.parameters

    def degree_symbol(self):
        """The budgeted coefficient degree counts powers of q^outer."""
        return q_symbol(self.outer)

    def collect_symbols(self):
        return tuple(q_symbol(v) for v in self.inner_discrete)

    def _validate(self):
        discrete = set(self.discrete_variables)
        params = set(self.parameters)
        scalar_ok = {"q"} | set(self.parameters)
        for p in self.pochhammers:
            for lin in (p.shift, p.length):
                bad = set(lin.var_coeffs) - discrete
                if bad:
                    raise VariableMismatchError(
                        "q-Pochhammer form %s uses undeclared variables %r"
                        % (lin, sorted(bad))
                    )
            bad = (
                p.prefactor.num.active_variables()
                | p.prefactor.den.active_variables()
            ) - scalar_ok
            if bad:
                raise VariableMismatchError(
                    "q-Pochhammer prefactor depends on discrete symbols %r"
                    % sorted(bad)
                )
        for g in self.geoms:
            bad = (
                g.base.num.active_variables() | g.base.den.active_variables()
            ) - scalar_ok
            if bad:
                raise VariableMismatchError(
                    "geometric base depends on discrete symbols %r" % sorted(bad)
                )
            if set(g.exponent.var_coeffs) - discrete:
                raise VariableMismatchError(
                    "geometric exponent %s uses undeclared variables" % g.exponent
                )
        for p in self.qpowers:
            bad = p.form.names() - discrete
            if bad:
                raise VariableMismatchError(
                    "q-power form uses undeclared variables %r" % sorted(bad)
                )
            for v in p.form.names():
                p.form.increment(v)
            probe = {v: 0 for v in self.discrete_variables}
            p.form.value(probe)

    # -- symbol helpers -----------------------------------------------------

    def monomial(self, lin):
        """q^{lin} as a RatFun in the term's symbols."""
        if lin.param_coeffs:
            raise NonIntegerArgumentError(
                "cannot express q^(%s) with parameter coefficients" % lin
            )
        if lin.const.denominator != 1:
            raise NonIntegerArgumentError("cannot express q^(%s)" % lin)
        result = RatFun.var(self.universe, "q") ** int(lin.const)
        for v, c in lin.var_coeffs.items():
            result = result * RatFun.var(self.universe, q_symbol(v)) ** c
        return result

    def _poch_one_step(self, prefactor, shift_value):
        """1 - prefactor * q^{shift_value} where shift_value is a LinForm."""
        return RatFun.one(self.universe) - prefactor * self.monomial(shift_value)

    # -- canonical identity ---------------------------------------------------

    def signature(self):
        poch = sorted(
            (str(p.prefactor), str(p.shift), str(p.length), p.exponent)
            for p in self.pochhammers
        )
        qp = sorted(str(p.form) for p in self.qpowers)
        geo = sorted((str(g.base), str(g.exponent)) for g in self.geoms)
        return (
            self.universe,
            tuple(poch),
            tuple(qp),
            tuple(geo),
            str(self.rational),
        )

    def __eq__(self, other):
        if not isinstance(other, QHyperTerm):
            return NotImplemented
        return self.signature() == other.signature()

    def __hash__(self):
        return hash(self.signature())

    def __repr__(self):
        return "QHyperTerm(outer=%r, inner=%r)" % (self.outer, self.inner_discrete)

    # -- quotients ----------------------------------------------------------

    def shift_quotient(self, name):
        """F(name+1)/F(name) as a RatFun in (q, w, x.., parameters)."""
        if name not in self.discrete_variables:
            raise VariableMismatchError("%r is not a discrete variable" % name)
        result = RatFun.one(self.universe)
        for p in self.pochhammers:
            a = p.shift.coefficient(name)
            b = p.length.coefficient(name)
            if not a and not b:
                continue
            piece = RatFun.one(self.universe)
            # (A q^{L1+a}; q)_{L2+b} / (A q^{L1+a}; q)_{L2}: b boundary factors
            # at exponents L1 + a + L2 (+t).
            base = p.shift + a
            if b >= 0:
                for t in range(b):
                    piece = piece * self._poch_one_step(p.prefactor, base + p.length + t)
            else:
                for t in range(1, -b + 1):
                    piece = piece / self._poch_one_step(p.prefactor, base + p.length - t)
            # (A q^{L1+a}; q)_{L2} / (A q^{L1}; q)_{L2}: a ratio steps.
            if a >= 0:
                for t in range(a):
                    piece = piece * (
                        self._poch_one_step(p.prefactor, p.shift + p.length + t)
                        / self._poch_one_step(p.prefactor, p.shift + t)
                    )
            else:
                for t in range(1, -a + 1):
                    piece = piece * (
                        self._poch_one_step(p.prefactor, p.shift - t)
                        / self._poch_one_step(p.prefactor, p.shift + p.length - t)
                    )
            result = result * piece ** p.exponent
        for p in self.qpowers:
            inc = p.form.increment(name)
            if not (inc.is_constant() and inc.const == 0):
                result = result * self.monomial(inc)
        for g in self.geoms:
            a = g.exponent.coefficient(name)
            if a:
                result = result * g.base ** a
        if not self.rational.is_constant():
            result = result * (
                self.shift_substitute(self.rational, name) / self.rational
            )
        return result

    def shift_substitute(self, fun, name):
        """The shift in `name` acts on symbol functions by x -> q*x."""
        sym = q_symbol(name)
        image = MultiPoly.var(self.universe, "q") * MultiPoly.var(self.universe, sym)
        return fun.substitute({sym: image})

    def word_quotient(self, word):
        """(word applied to F)/F for a word (outer count, inner counts)."""
        word = (int(word[0]), tuple(int(x) for x in word[1]))
        cached = self._wq_cache.get(word)
        if cached is not None:
            return cached
        a, b = word
        if a == 0 and not any(b):
            result = RatFun.one(self.universe)
        elif a:
            sub = self.word_quotient((a - 1, b))
            result = self.shift_substitute(sub, self.outer) * self.shift_quotient(
                self.outer
            )
        else:
            i = max(i for i, x in enumerate(b) if x)
            name = self.inner_discrete[i]
            sub = self.word_quotient((a, b[:i] + (b[i] - 1,) + b[i + 1 :]))
            result = self.shift_substitute(sub, name) * self.shift_quotient(name)
        self._wq_cache[word] = result
        return result

    # -- evaluation -----------------------------------------------------------

    def _scalar(self, fun):
        """Project a RatFun free of w/x symbols down to (q, parameters)."""
        return fun.embed(self.scalar_universe)

    def evaluate(self, point):
        """Exact value at integer discrete values, as a RatFun in (q, params).

        The result stays symbolic in q and the parameters; zero means
        the term vanishes identically there, and a genuine pole (an
        identically-zero denominator product) raises PoleError.
        """
        for v in self.discrete_variables:
            if v not in point:
                raise UnboundParameterError("no value for variable %r" % v)
            if Fraction(point[v]).denominator != 1:
                raise NonIntegerArgumentError(
                    "discrete variable %r needs an integer value" % v
                )
        point = {v: int(point[v]) for v in self.discrete_variables}
        q = RatFun.var(self.scalar_universe, "q")
        one = RatFun.one(self.scalar_universe)
        order = 0
        unit = one
        for p in self.pochhammers:
            shift_val = int(p.shift.evaluate(point))
            length_val = int(p.length.evaluate(point))
            pre = self._scalar(p.prefactor)
            o, u = _qpoch_value(pre, shift_val, length_val, q, one)
            order += o * p.exponent
            unit = unit * u ** p.exponent
        for p in self.qpowers:
            unit = unit * q ** p.form.value(point)
        for g in self.geoms:
            e = int(g.exponent.evaluate(point))
            if e:
                unit = unit * self._scalar(g.base) ** e
        if not self.rational.is_constant():
            num = _laurent_eval(self.rational.num, self, point)
            den = _laurent_eval(self.rational.den, self, point)
            if den.is_zero():
                raise PoleError("cofactor denominator vanishes at %r" % (point,))
            if num.is_zero():
                return RatFun.zero(self.scalar_universe)
            unit = unit * num / den
        if order < 0:
            raise PoleError("pole of q-term at %r" % (point,))
        if order > 0:
            return RatFun.zero(self.scalar_universe)
        return unit

    def evaluate_at(self, point, q_value, params=None):
        """Rational value at a specific q and parameter assignment."""
        sym = self.evaluate(point)
        values = {"q": Fraction(q_value)}
        for p in self.parameters:
            if params is None or p not in params:
                raise UnboundParameterError("unbound parameter %r" % p)
            values[p] = Fraction(params[p])
        return sym.evaluate(values)


def _qpoch_value(pre, shift_val, length_val, q, one):
    """(order, unit) of (pre*q^{shift}; q)_{length} over (q, params).

    A factor 1 - pre*q^j that is identically zero (pre == q^{-j})
    raises the order by one; anything else multiplies the unit.
    Negative lengths use (a; q)_{-m} = 1 / prod_{t=1..m} (1 - a q^{-t}).
    """
    order = 0
    unit = one
    if length_val >= 0:
        for t in range(length_val):
            f = one - pre * q ** (shift_val + t)
            if f.is_zero():
                order += 1
            else:
                unit = unit * f
        return order, unit
    for t in range(1, -length_val + 1):
        f = one - pre * q ** (shift_val - t)
        if f.is_zero():
            order -= 1
        else:
            unit = unit / f
    return order, unit


def _laurent_eval(poly, term, point):
    """Evaluate a symbol polynomial at w=q^{n0}, x_i=q^{k_i}, exactly.

    Negative discrete values give Laurent monomials in q, so the result
    is a RatFun over (q, parameters).
    """
    target = term.scalar_universe
    exps_of = {}
    for i, name in enumerate(poly.variables):
        if name == "q":
            exps_of[i] = ("q", 1)
        elif name in term.parameters:
            exps_of[i] = (name, None)
        else:
            var = name[2:] if name.startswith("q^") else name
            exps_of[i] = ("q", point[var])
    q = RatFun.var(target, "q")
    total = RatFun.zero(target)
    for exps, coeff in poly.terms.items():
        q_exp = 0
        mono = RatFun.const(target, coeff)
        for i, e in enumerate(exps):
            if not e:
                continue
            kind, mult = exps_of[i]
            if kind == "q" and mult is not None:
                q_exp += e * mult
            else:
                mono = mono * RatFun.var(target, kind) ** e
        total = total + mono * q ** q_exp
    return total


def q_support_constraints(term):
    """LinForms L with 'L >= 1 on the support' semantics.

    Only reciprocal factors of the shape 1/(q^c; q)_{L} with integer
    c >= 1 force anything: they vanish exactly when c + L <= 0.
    """
    out = []
    one = RatFun.one(term.universe)
    for p in term.pochhammers:
        if p.exponent >= 0:
            continue
        if p.prefactor != one:
            continue
        if p.shift.var_coeffs or p.shift.param_coeffs:
            continue
        c = p.shift.integer_constant()
        if c is None or c < 1:
            continue
        out.append(p.length + c)
    return out


def q_support_bounds(term, outer_value):
    """Bounding box for the inner variables at a fixed outer value."""
    from .support import numeric_box

    return numeric_box(
        term.inner_discrete, term.outer, q_support_constraints(term), outer_value
    )


def q_affine_box(term, n_min=0):
    from .support import symbolic_box

    return symbolic_box(
        term.inner_discrete, term.outer, q_support_constraints(term), n_min
    )


def q_check_certificate_poles(term, certificates, n_min=0):
    """Certify that certificate denominators stay nonzero on the box.

    A denominator value at a lattice point is a sum of parameter
    monomials times q powers; it can only vanish identically in q when
    two of its monomials land on the same q exponent.  For each pair of
    monomials with equal parameter parts, the exponent difference is a
    linear form in the discrete variables, and the classical nonzero
    certificate on the support box rules the collision out.  The check
    is conservative: an unexcluded collision is reported as a possible
    pole even if the colliding coefficients would not actually cancel.
    """
    from .support import certify_nonzero_on_box

    box = q_affine_box(term, n_min)
    inner_syms = {q_symbol(v): v for v in term.inner_discrete}
    outer_sym = q_symbol(term.outer)
    for var, fun in certificates.items():
        den = fun.den
        if den.is_constant():
            continue
        classes = {}
        for exps, _coeff in den.terms.items():
            lin = {}
            const = 0
            params = []
            for i, e in enumerate(exps):
                name = den.variables[i]
                if name == "q":
                    const = e
                elif name == outer_sym:
                    lin[term.outer] = e
                elif name in inner_syms:
                    lin[inner_syms[name]] = e
                else:
                    params.append((name, e))
            classes.setdefault(tuple(params), []).append(
                LinForm(lin, const=const)
            )
        for forms in classes.values():
            for i in range(len(forms)):
                for j in range(i + 1, len(forms)):
                    gap = forms[i] - forms[j]
                    if not certify_nonzero_on_box(gap, term.outer, box, n_min):
                        raise CertificatePoleError(
                            "certificate for %s has denominator %s whose "
                            "exponents can collide on the support box (%s)"
                            % (var, den, gap)
                        )
    return box


# -- module-level operation names ---------------------------------------------


def q_shift_quotient(term, name):
    return term.shift_quotient(name)


def q_word_quotient(term, word):
    return term.word_quotient(word)


def q_eval_term(term, point):
    return term.evaluate(point)
