"""Identity statements, proofs, refutations and companions.

A statement asserts that a bound sum of a term equals either a closed
form in the outer variable or another bound sum.  The proof route is
the classical one: certify a recurrence for the left side by summing
the telescoped relation over the support, check the right side against
the same recurrence, and match enough initial values.  Refutations
carry a witnessing outer value where exact evaluation differs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .certify import WZTuple, _describe_lhs, _describe_rhs, verify, verify_wz_tuple
from .errors import (
    CertificatePoleError,
    NotApplicableError,
    SupportError,
    UnboundParameterError,
    VariableMismatchError,
)
from .ore import UnivarOperator
from .poly import MultiPoly, integer_roots
from .qterms import (
    QHyperTerm,
    _laurent_eval,
    q_check_certificate_poles,
    q_support_bounds,
)
from .qtelescope import q_creative_telescope, q_verify
from .ratfun import RatFun
from .support import check_certificate_poles, support_bounds
from .telescope import DEFAULT_MAX_UNKNOWNS, creative_telescope
from .terms import HyperTerm

COMPAT_WINDOW = 10


@dataclass(frozen=True)
class BoundSum:
    """A term summed (and formally integrated) over its inner variables."""

    term: object
    bound: tuple

    def __post_init__(self):
        inner = set(self.term.inner_discrete) | set(self.term.inner_continuous)
        if set(self.bound) != inner:
            raise VariableMismatchError(
                "bound variables %r must be exactly the inner variables %r"
                % (self.bound, tuple(sorted(inner)))
            )


@dataclass(frozen=True)
class ClosedForm:
    """A finite sum of closed-form terms of the outer variable alone."""

    terms: tuple

    def __post_init__(self):
        for t in self.terms:
            if t.inner_discrete or t.inner_continuous:
                raise VariableMismatchError(
                    "closed form may not carry bound variables"
                )

    def is_zero(self):
        return not self.terms


@dataclass(frozen=True)
class IdentityStatement:
    """lhs = rhs, quantified over the outer variable.

    When difference_in is set the statement is a companion: it asserts
    that the forward difference of the left sum in that variable equals
    the right side (the boundary slice that survives telescoping).
    source_pair then carries the pair the companion came from, which
    numeric checking uses to evaluate the summand without touching
    certificate poles.
    """

    lhs: BoundSum
    rhs: object
    outer: str
    difference_in: str = None
    source_pair: object = field(default=None, compare=False)

    def __post_init__(self):
        if self.difference_in is None and self.outer != self.lhs.term.outer:
            raise VariableMismatchError(
                "statement outer %r does not match term outer %r"
                % (self.outer, self.lhs.term.outer)
            )


@dataclass(frozen=True)
class Recurrence:
    """P annihilates the sum; subject says which sum."""

    P: UnivarOperator
    subject: str

    def __post_init__(self):
        if self.P.is_zero():
            raise ValueError("a recurrence needs a nonzero operator")


@dataclass
class Proof:
    certificate: object
    recurrence: Recurrence
    initial_values: tuple
    text: str


@dataclass
class Refutation:
    outer_value: int
    lhs_value: object
    rhs_value: object
    text: str


@dataclass(frozen=True)
class CheckRow:
    outer_value: int
    lhs: object
    rhs: object
    ok: bool


def _is_q(term):
    return isinstance(term, QHyperTerm)


# -- exact evaluation of statement sides ---------------------------------------


def _box_points(box):
    names = sorted(box)
    ranges = [range(box[v][0], box[v][1] + 1) for v in names]
    for combo in itertools.product(*ranges):
        yield dict(zip(names, combo))


def sum_values(bound_sum, outer_value, assignments=None):
    """Exact value of the bound sum at one outer value.

    Classical sums give a Fraction (parameters must be assigned);
    q-sums stay symbolic in q and the parameters.
    """
    term = bound_sum.term
    if term.inner_continuous or term.outer_continuous:
        raise SupportError("cannot evaluate integrals numerically")
    if _is_q(term):
        box = q_support_bounds(term, outer_value)
        total = RatFun.zero(term.scalar_universe)
        for point in _box_points(box):
            point[term.outer] = outer_value
            total = total + term.evaluate(point)
        return total
    box = support_bounds(term, outer_value)
    total = Fraction(0)
    for point in _box_points(box):
        point[term.outer] = outer_value
        if assignments:
            point.update(assignments)
        total += term.evaluate(point).exact()
    return total


def closed_values(closed, outer_value, assignments=None, q_case=False,
                  scalar_universe=None):
    """Exact value of a closed form at one outer value."""
    if not closed.terms:
        if q_case:
            return RatFun.zero(scalar_universe)
        return Fraction(0)
    total = None
    for t in closed.terms:
        point = {t.outer: outer_value}
        if _is_q(t):
            value = t.evaluate(point)
        else:
            if assignments:
                point.update(assignments)
            value = t.evaluate(point).exact()
        total = value if total is None else total + value
    return total


def _side_value(side, outer_value, assignments=None, q_case=False,
                scalar_universe=None):
    if isinstance(side, BoundSum):
        return sum_values(side, outer_value, assignments)
    return closed_values(side, outer_value, assignments, q_case, scalar_universe)


# -- Corollary A ----------------------------------------------------------------


def recurrence_for_sum(cert, F, n_min=0):
    """The recurrence P f = 0 for f(outer) = sum of F over its support.

    Valid because the support box is compact and every certificate is
    pole-free on it, so summing the telescoped relation kills the right
    side.
    """
    if F.inner_continuous or F.outer_continuous:
        raise SupportError(
            "Corollary A hypothesis fails: only purely discrete sums "
            "can be summed over their support"
        )
    try:
        if _is_q(F):
            q_check_certificate_poles(F, cert.R, n_min)
        else:
            check_certificate_poles(F, cert.R, n_min)
    except SupportError as e:
        raise SupportError("Corollary A hypothesis fails: %s" % e) from e
    except CertificatePoleError as e:
        raise CertificatePoleError("certificate pole on support: %s" % e) from e
    subject = "f(%s) = sum over %s of the certified term" % (
        F.outer,
        ", ".join(F.inner_discrete),
    )
    return Recurrence(P=cert.P, subject=subject)


# -- operator evaluation helpers -------------------------------------------------


def _coeff_value(coeff, F, outer_value, assignments=None):
    """Value of an operator coefficient at one outer value.

    For q-terms the result is a rational function of (q, parameters);
    classically it is a Fraction.
    """
    if _is_q(F):
        return _laurent_eval(coeff, F, {F.outer: outer_value})
    point = {F.outer: outer_value}
    if assignments:
        point.update(assignments)
    return coeff.evaluate(point)


def _apply_operator_to_values(P, F, values, start, outer_value, assignments=None):
    """P applied to a tabulated sequence at one outer value."""
    total = None
    for a, coeff in P.sorted_coeffs():
        c = _coeff_value(coeff, F, outer_value, assignments)
        v = c * values[outer_value + a - start]
        total = v if total is None else total + v
    return total


def _leading_nonzero_at(P, F, outer_value, assignments=None):
    value = _coeff_value(P.coefficient(P.order()), F, outer_value, assignments)
    if isinstance(value, RatFun):
        return not value.is_zero()
    return value != 0


def _leading_roots(P, F, n_min, scan_limit):
    """Outer values >= n_min where the leading coefficient vanishes.

    Classically the integer roots are located exactly.  For q-terms a
    vanishing value of the leading coefficient needs two powers of
    q^outer to collide, which can only happen while the outer value is
    small; scanning up to the exponent spread is exhaustive.
    """
    lead = P.coefficient(P.order())
    if _is_q(F):
        w = F.degree_symbol()
        if w not in lead.active_variables():
            return []
        spread = lead.total_degree() + 1
        bound = max(scan_limit, n_min + spread * (spread + 1))
        return [
            v
            for v in range(n_min, bound + 1)
            if _laurent_eval(lead, F, {F.outer: v}).is_zero()
        ]
    active = lead.active_variables()
    if not active:
        return []
    if active <= {F.outer}:
        return [r for r in integer_roots(lead, F.outer) if r >= n_min]
    # Leading coefficients involving parameters are generically nonzero.
    return []


# -- the proof route --------------------------------------------------------------


def prove_identity(stmt, max_unknowns=DEFAULT_MAX_UNKNOWNS, assignments=None):
    """Prove or refute the statement; NotFoundError when out of budget.

    The flow: certify a recurrence for the left sum, check the right
    side satisfies it (symbolically for a single closed term, on a
    numeric window otherwise), then match initial values, one for each
    order of the recurrence plus one for each skipped leading-root.
    """
    if stmt.difference_in is not None:
        raise NotApplicableError(
            "companion statements are checked numerically, not re-proved"
        )
    F = stmt.lhs.term
    if F.outer_continuous:
        raise NotApplicableError(
            "continuous outer variables are verify-only; provide a certificate"
        )
    q_case = _is_q(F)
    scalar = F.scalar_universe if q_case else None
    cert = (
        q_creative_telescope(F, max_unknowns)
        if q_case
        else creative_telescope(F, max_unknowns)
    )
    recurrence = recurrence_for_sum(cert, F)
    P = cert.P
    d = P.order()

    def lhs_at(v):
        return sum_values(stmt.lhs, v, assignments)

    def rhs_at(v):
        return _side_value(stmt.rhs, v, assignments, q_case, scalar)

    def refute(v):
        lv, rv = lhs_at(v), rhs_at(v)
        text = "Refuted at %s = %d: left side %s, right side %s." % (
            stmt.outer,
            v,
            lv,
            rv,
        )
        return Refutation(outer_value=v, lhs_value=lv, rhs_value=rv, text=text)

    def witness_scan(limit):
        for v in range(0, limit + 1):
            if lhs_at(v) != rhs_at(v):
                return refute(v)
        return None

    single_closed = isinstance(stmt.rhs, ClosedForm) and len(stmt.rhs.terms) == 1
    if single_closed:
        g = stmt.rhs.terms[0]
        quotient = None
        r = len(g.inner_discrete)
        for a, coeff in P.sorted_coeffs():
            part = RatFun(coeff.embed(g.universe)) * g.word_quotient(
                (a, (0,) * r, ()) if not _is_q(g) else (a, ())
            )
            quotient = part if quotient is None else quotient + part
        if quotient is not None and not quotient.is_zero():
            found = witness_scan(d + COMPAT_WINDOW)
            if found is not None:
                return found
            raise NotApplicableError(
                "the right side fails the recurrence %s symbolically but "
                "no witness below %d distinguishes the sides"
                % (P.render(), d + COMPAT_WINDOW)
            )
    else:
        window = range(0, d + COMPAT_WINDOW + 1)
        rhs_tab = [rhs_at(v) for v in range(0, window.stop + d)]
        for v in window:
            out = _apply_operator_to_values(P, F, rhs_tab, 0, v, assignments)
            bad = (not out.is_zero()) if isinstance(out, RatFun) else out != 0
            if bad:
                found = witness_scan(v + d)
                if found is not None:
                    return found
                raise NotApplicableError(
                    "the right side fails the recurrence %s at %s = %d but "
                    "the sides agree there" % (P.render(), stmt.outer, v)
                )

    n_start = 0
    while not _leading_nonzero_at(P, F, n_start, assignments):
        n_start += 1
    roots = _leading_roots(P, F, n_start, d + COMPAT_WINDOW)
    match_at = sorted(
        set(range(0, n_start + d)) | {r + d for r in roots if r >= n_start}
    )
    initial = []
    for v in match_at:
        lv = lhs_at(v)
        rv = rhs_at(v)
        if lv != rv:
            return refute(v)
        initial.append((v, lv))

    verdict = (q_verify if q_case else verify)(F, cert)
    if not verdict.valid:
        raise AssertionError("internal: produced certificate failed to verify")
    proof = Proof(
        certificate=cert,
        recurrence=recurrence,
        initial_values=tuple(initial),
        text="",
    )
    proof.text = proof_text(proof)
    return proof


# -- explicit evaluations: pairs and companions -----------------------------------


def to_wz_tuple(stmt, cert=None, max_unknowns=DEFAULT_MAX_UNKNOWNS):
    """Normalize lhs by the closed right side and look for P = N - 1.

    The passed certificate is not reused: dividing by the right side
    changes every outer-shift quotient, so the finder runs again on the
    normalized term.
    """
    F = stmt.lhs.term
    if _is_q(F):
        raise NotApplicableError("pair normalization applies to classical terms")
    if not isinstance(stmt.rhs, ClosedForm) or stmt.rhs.is_zero():
        raise NotApplicableError("cannot normalize by zero right side")
    if len(stmt.rhs.terms) != 1:
        raise NotApplicableError(
            "pair normalization needs a single closed term on the right"
        )
    hat = F.divided_by(stmt.rhs.terms[0])
    cert2 = creative_telescope(hat, max_unknowns)
    uni = cert2.P.universe
    one = MultiPoly.const(uni, 1)
    expected = UnivarOperator({1: one, 0: -one}, uni)
    if cert2.P != expected:
        raise NotApplicableError(
            "the found operator is %s, not N - 1" % cert2.P.render(),
            found=cert2.P,
        )
    return WZTuple(term=hat, G=cert2.R, H=cert2.S)


def _reoriented(term, new_outer):
    """The same term with an inner discrete variable as the new outer."""
    inner = (term.outer,) + tuple(
        v for v in term.inner_discrete if v != new_outer
    )
    new_universe = (
        (new_outer,) + inner + term.inner_continuous + term.parameters
    )
    from .terms import ExpFactor, PowerFactor

    powers = tuple(
        PowerFactor(p.base.embed(new_universe), p.exponent) for p in term.powers
    )
    exps = tuple(ExpFactor(e.argument.embed(new_universe)) for e in term.exps)
    return HyperTerm(
        new_outer,
        inner,
        term.inner_continuous,
        term.parameters,
        term.factorials,
        powers,
        exps,
        term.rational.embed(new_universe),
        outer_continuous=False,
    )


def companions(t, keep):
    """The identity obtained by summing the pair relation over all
    variables except the kept one.

    Keeping the outer variable reproduces the statement the pair came
    from; keeping an inner variable k gives a new statement, that the
    k-difference of the (formal) sum of G_k F over the other variables
    equals the boundary slice -F at the smallest outer value.
    """
    F = t.term
    if _is_q(F):
        raise NotApplicableError("companions apply to classical pairs")
    names = (F.outer,) + F.inner_discrete + F.inner_continuous
    if keep not in names:
        raise VariableMismatchError("unknown variable %r" % keep)
    if F.inner_continuous:
        raise NotApplicableError(
            "companions over continuous directions are not supported"
        )
    if keep == F.outer:
        one = HyperTerm(F.outer, parameters=F.parameters)
        return IdentityStatement(
            lhs=BoundSum(F, F.inner_discrete),
            rhs=ClosedForm((one,)),
            outer=F.outer,
        )
    if not verify_wz_tuple(t).valid:
        raise ValueError("refusing to build companions of an invalid pair")
    summand = _reoriented(F.scaled(t.G[keep]), keep)
    boundary = F.pin_outer(0, keep).scaled(-1)
    others = tuple(v for v in F.inner_discrete if v != keep)
    rhs = BoundSum(boundary, others) if others else ClosedForm((boundary,))
    return IdentityStatement(
        lhs=BoundSum(summand, (F.outer,) + others),
        rhs=rhs,
        outer=keep,
        difference_in=keep,
        source_pair=t,
    )


def _pair_product_value(t, outer_value, keep_value, keep, assignments=None):
    """(G_keep F)(outer_value, keep_value) through the pair relation.

    G F itself is a hypergeometric term, finite even where G alone has
    a pole; summing the verified relation over the tail of the kept
    variable expresses it through plain values of F.
    """
    F = t.term
    others = [v for v in F.inner_discrete if v != keep]
    if others:
        raise NotApplicableError(
            "partial sums for multisum companions are not supported"
        )
    hi = max(
        support_bounds(F, v)[keep][1] for v in (outer_value, outer_value + 1)
    )
    total = Fraction(0)
    for j in range(keep_value, hi + 1):
        for sign, v in ((1, outer_value + 1), (-1, outer_value)):
            point = {F.outer: v, keep: j}
            if assignments:
                point.update(assignments)
            total += sign * F.evaluate(point).exact()
    return -total


def _companion_partial_sum(stmt, keep_value, horizon, assignments=None):
    t = stmt.source_pair
    total = Fraction(0)
    for n0 in range(0, horizon + 1):
        total += _pair_product_value(
            t, n0, keep_value, stmt.difference_in, assignments
        )
    return total


# -- the independent numeric oracle ------------------------------------------------


def numeric_check(
    stmt,
    outer_range,
    assignments=None,
    q_value=None,
    horizon=40,
    tolerance=Fraction(1, 10**6),
):
    """Exact evaluation of both sides over the range; lists mismatches.

    Companion statements are checked through partial sums up to the
    horizon, within the tolerance; everything else is compared exactly.
    q-statements are evaluated at the given q value (and parameter
    assignments) when one is supplied, symbolically otherwise.
    """
    term = stmt.lhs.term
    q_case = _is_q(term)
    scalar = term.scalar_universe if q_case else None
    rows = []
    for v in outer_range:
        try:
            if stmt.difference_in is not None:
                here = _companion_partial_sum(stmt, v, horizon, assignments)
                there = _companion_partial_sum(stmt, v + 1, horizon, assignments)
                lhs = there - here
                rhs = _side_value(stmt.rhs, v, assignments, q_case, scalar)
                ok = abs(lhs - rhs) <= tolerance
            else:
                lhs = _side_value(stmt.lhs, v, assignments, q_case, scalar)
                rhs = _side_value(stmt.rhs, v, assignments, q_case, scalar)
                if q_case and q_value is not None:
                    point = {"q": Fraction(q_value)}
                    point.update(
                        {k: Fraction(x) for k, x in (assignments or {}).items()}
                    )
                    lhs = lhs.evaluate(point)
                    rhs = rhs.evaluate(point)
                ok = lhs == rhs
        except UnboundParameterError as e:
            raise UnboundParameterError(
                "assign parameters for numeric check: %s" % e
            ) from e
        rows.append(CheckRow(outer_value=v, lhs=lhs, rhs=rhs, ok=ok))
    return rows


# -- rendering ---------------------------------------------------------------------


def _follows_clause(cert):
    term = cert.term
    parts = []
    for name in term.inner_continuous:
        parts.append("integrating w.r.t. %s" % name)
    for name in term.inner_discrete:
        parts.append("summing w.r.t. %s" % name)
    return " and ".join(parts) if parts else "reading off the relation"


def proof_text(p):
    """Two lines: the certified relation, then how it proves the claim."""
    cert = p.certificate
    line1 = "It is routinely verifiable that %s = %s." % (
        _describe_lhs(cert.term, cert),
        _describe_rhs(cert.term, cert),
    )
    vacuous = cert.P.is_zero() and all(
        v.is_zero() for v in list(cert.R.values()) + list(cert.S.values())
    )
    if vacuous:
        line1 += " (vacuous)"
    if p.initial_values:
        matched = ", ".join(
            "f(%d) = %s" % (v, value) for v, value in p.initial_values
        )
        line2 = (
            "The result follows by %s and matching the initial values %s."
            % (_follows_clause(cert), matched)
        )
    else:
        line2 = "The result follows by %s." % _follows_clause(cert)
    return "%s\n%s" % (line1, line2)
