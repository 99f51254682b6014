"""Support boxes for purely discrete terms, and certificate pole checks.

A denominator gamma factor 1/gamma(L) vanishes whenever L is a
nonpositive integer, so every integer-linear form L appearing that way
forces L >= 1 on the support of the term.  Interval propagation over
those constraints yields a bounding box for the inner variables, either
numerically for a fixed outer value or with affine-in-outer endpoints.
The affine form is what the summation step uses to certify that
certificate denominators stay nonzero on the closed box for every outer
value from some point on.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import CertificatePoleError, InexactDivisionError, SupportError
from .poly import MultiPoly, integer_roots
from .ratfun import RatFun

_MAX_ROUNDS = 8
_MAX_COMBOS = 128


@dataclass(frozen=True)
class Aff:
    """slope * outer + const, the endpoint shape of symbolic boxes."""

    slope: Fraction
    const: Fraction

    def at(self, n):
        return self.slope * n + self.const

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Aff(Fraction(0), Fraction(other))
        return Aff(self.slope + other.slope, self.const + other.const)

    def scale(self, c):
        c = Fraction(c)
        return Aff(self.slope * c, self.const * c)

    def __str__(self):
        if self.slope == 0:
            return str(self.const)
        if self.const == 0:
            return "%s*n" % self.slope if self.slope != 1 else "n"
        return "%s*n %s %s" % (
            "" if self.slope == 1 else str(self.slope) + "",
            "+" if self.const > 0 else "-",
            abs(self.const),
        )


def support_constraints(term):
    """LinForms L with 'L >= 1 on the support' semantics.

    Only parameter-free integer forms from denominator gamma factors
    qualify; anything else gives no usable constraint.
    """
    out = []
    for arg, e in term.gamma_factors().items():
        if e >= 0:
            continue
        if arg.param_coeffs or arg.const.denominator != 1:
            continue
        out.append(arg)
    return out


def numeric_box(inner, outer, lins, outer_value):
    """Bounding box {inner var: (lo, hi)} from 'lin >= 1' constraints.

    Raises SupportError when a variable stays unbounded on either side.
    """
    outer_value = int(outer_value)
    constraints = []
    for lin in lins:
        coeffs = {v: lin.coefficient(v) for v in inner if lin.coefficient(v)}
        if not coeffs:
            continue
        rhs = 1 - int(lin.const) - lin.coefficient(outer) * outer_value
        constraints.append((coeffs, rhs))
    lo = {v: None for v in inner}
    hi = {v: None for v in inner}
    for _ in range(_MAX_ROUNDS):
        changed = False
        for coeffs, rhs in constraints:
            for v, a in coeffs.items():
                acc = rhs
                ok = True
                for w, b in coeffs.items():
                    if w == v:
                        continue
                    limit = hi[w] if b > 0 else lo[w]
                    if limit is None:
                        ok = False
                        break
                    acc -= b * limit
                if not ok:
                    continue
                if a > 0:
                    cand = math.ceil(Fraction(acc, a))
                    if lo[v] is None or cand > lo[v]:
                        lo[v] = cand
                        changed = True
                else:
                    cand = math.floor(Fraction(acc, a))
                    if hi[v] is None or cand < hi[v]:
                        hi[v] = cand
                        changed = True
        if not changed:
            break
    unbounded = sorted(v for v in inner if lo[v] is None or hi[v] is None)
    if unbounded:
        raise SupportError(
            "support is not compact: no finite bounds for %s" % ", ".join(unbounded)
        )
    return {v: (lo[v], hi[v]) for v in inner}


def support_bounds(term, outer_value):
    """Bounding box of a purely discrete term at a fixed outer value."""
    if term.inner_continuous or term.outer_continuous:
        raise SupportError("support boxes exist for purely discrete terms only")
    return numeric_box(
        term.inner_discrete, term.outer, support_constraints(term), outer_value
    )


def symbolic_box(inner, outer, lins, n_min=0):
    """Box with affine-in-outer endpoints from 'lin >= 1' constraints.

    Returns {inner var: (list of lower Affs, list of upper Affs)}; the
    true support lies inside every listed bound for all outer >= n_min.
    """
    constraints = []
    for lin in lins:
        coeffs = {v: lin.coefficient(v) for v in inner if lin.coefficient(v)}
        if not coeffs:
            continue
        rhs = Aff(Fraction(-lin.coefficient(outer)), Fraction(1 - int(lin.const)))
        constraints.append((coeffs, rhs))
    lowers = {v: [] for v in inner}
    uppers = {v: [] for v in inner}
    for _ in range(_MAX_ROUNDS):
        changed = False
        for coeffs, rhs in constraints:
            for v, a in coeffs.items():
                others = [w for w in coeffs if w != v]
                pools = []
                for w in others:
                    pool = uppers[w] if coeffs[w] > 0 else lowers[w]
                    if not pool:
                        pools = None
                        break
                    pools.append(pool)
                if pools is None:
                    continue
                combos = itertools.product(*pools) if pools else [()]
                for combo in itertools.islice(combos, _MAX_COMBOS):
                    acc = rhs
                    for w, aff in zip(others, combo):
                        acc = acc + aff.scale(-coeffs[w])
                    cand = acc.scale(Fraction(1, a))
                    target = lowers[v] if a > 0 else uppers[v]
                    if cand not in target:
                        if len(target) < 6:
                            target.append(cand)
                            changed = True
        if not changed:
            break
    unbounded = sorted(v for v in inner if not lowers[v] or not uppers[v])
    if unbounded:
        raise SupportError(
            "support is not compact: no finite bounds for %s" % ", ".join(unbounded)
        )
    return {v: (lowers[v], uppers[v]) for v in inner}


def affine_box(term, n_min=0):
    """Symbolic support box of a purely discrete term."""
    if term.inner_continuous or term.outer_continuous:
        raise SupportError("support boxes exist for purely discrete terms only")
    return symbolic_box(
        term.inner_discrete, term.outer, support_constraints(term), n_min
    )


def _certified_extreme(lin, outer, box, n_min, want_min):
    """Candidate Affs bounding lin over the box (below if want_min)."""
    base = Aff(Fraction(lin.coefficient(outer)), lin.const)
    pools = []
    names = []
    for v, (los, his) in box.items():
        a = lin.coefficient(v)
        if not a:
            continue
        pick_lower = (a > 0) == want_min
        pool = los if pick_lower else his
        if not pool:
            return []
        pools.append([aff.scale(a) for aff in pool])
        names.append(v)
    results = []
    combos = itertools.product(*pools) if pools else [()]
    for combo in itertools.islice(combos, _MAX_COMBOS):
        acc = base
        for aff in combo:
            acc = acc + aff
        results.append(acc)
    return results


def certify_nonzero_on_box(lin, outer, box, n_min=0):
    """True when the integer form lin cannot vanish on the box, any outer >= n_min.

    Forms with a parameter part or a non-integer constant cannot hit
    zero at integer points for generic parameters and pass outright.
    """
    if lin.param_coeffs:
        return True
    if lin.const.denominator != 1:
        return True
    for aff in _certified_extreme(lin, outer, box, n_min, want_min=True):
        if aff.slope >= 0 and aff.at(n_min) >= 1:
            return True
    for aff in _certified_extreme(lin, outer, box, n_min, want_min=False):
        if aff.slope <= 0 and aff.at(n_min) <= -1:
            return True
    return False


def matches_constraint_shift(lin, constraints):
    """True when lin is +-(C + c) for a support constraint C and c >= 0.

    Constraints carry 'C >= 1 on the support' semantics, so such a form
    stays at least 1 away from zero there even when the interval box
    relaxation cannot see it (coupled constraints like j + k <= n).
    """
    for C in constraints:
        diff = lin - C
        if diff.is_constant() and diff.const >= 0:
            return True
        total = lin + C
        if total.is_constant() and total.const <= 0:
            return True
    return False


def candidate_linear_forms(term, span=16):
    """Integer shifts of the term's gamma arguments, for trial division."""
    seen = []
    for arg in term.gamma_factors():
        for t in range(-span, span + 1):
            cand = arg + t
            if cand not in seen and not cand.is_constant():
                seen.append(cand)
    return seen


def trial_linear_factors(den, candidates, universe):
    """Split den into linear factors from the candidate list.

    Returns (factors, leftover) where factors is a list of LinForms with
    multiplicity and leftover is the unfactored remainder polynomial.
    """
    rem = den
    factors = []
    for lin in candidates:
        if rem.is_constant():
            break
        p = lin.to_poly(universe)
        while True:
            try:
                quo = rem.exact_div(p)
            except InexactDivisionError:
                break
            rem = quo
            factors.append(lin)
    return factors, rem


def check_certificate_poles(term, certificates, n_min=0):
    """Certify that certificate denominators stay nonzero on the box.

    `certificates` maps inner discrete variable names to RatFun values.
    Raises CertificatePoleError naming the first factor that could
    vanish, or SupportError if the box itself does not exist.
    """
    box = affine_box(term, n_min)
    # The term itself must stay finite: numerator gamma factors may not
    # reach nonpositive integers over the box.
    for arg, e in term.gamma_factors().items():
        if e <= 0:
            continue
        if not certify_nonzero_on_box(arg, term.outer, box, n_min):
            raise SupportError(
                "term factor gamma(%s) can reach a pole on the support box" % arg
            )
        lo = _certified_extreme(arg, term.outer, box, n_min, want_min=True)
        if not any(aff.slope >= 0 and aff.at(n_min) >= 1 for aff in lo):
            raise SupportError(
                "term factor gamma(%s) is not positive on the support box" % arg
            )
    candidates = candidate_linear_forms(term)
    constraints = support_constraints(term)
    for var in sorted(certificates):
        den = certificates[var].den
        if den.is_constant():
            continue
        factors, leftover = trial_linear_factors(den, candidates, term.universe)
        for lin in factors:
            if matches_constraint_shift(lin, constraints):
                continue
            if not certify_nonzero_on_box(lin, term.outer, box, n_min):
                raise CertificatePoleError(
                    "certificate for %s has denominator factor (%s) that can "
                    "vanish on the support box" % (var, lin)
                )
        if not leftover.is_constant():
            active = leftover.active_variables()
            if active <= {term.outer}:
                bad = [r for r in integer_roots(leftover, term.outer) if r >= n_min]
                if bad:
                    raise CertificatePoleError(
                        "certificate for %s has a denominator zero at %s = %d"
                        % (var, term.outer, bad[0])
                    )
            elif active & set(term.inner_discrete):
                raise CertificatePoleError(
                    "certificate for %s has unrecognized denominator factor %s"
                    % (var, leftover)
                )
            # Parameter-only leftovers vanish only for special parameter
            # values; generic parameters pass.
    return box
