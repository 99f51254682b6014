"""The verifier: certificates reduce to polynomial identities.

Dividing the telescoped relation by F turns every side into a rational
function of the declared symbols; subtracting and clearing denominators
leaves one polynomial, the residual.  A certificate is valid exactly
when the residual is the zero polynomial, which is a mechanical check.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import MismatchError
from .ratfun import RatFun


@dataclass(frozen=True)
class Verdict:
    valid: bool
    residual: object
    trace: str


@dataclass(frozen=True)
class WZTuple:
    """(F, G, H) with Delta_n F = sum_i Delta_{k_i}(G_i F) + sum_j D_{y_j}(H_j F)."""

    term: object
    G: dict
    H: dict


def _lhs_quotient(F, P):
    """P(N, n) F / F as a rational function."""
    total = RatFun.zero(F.universe)
    s = len(F.inner_continuous)
    r = len(F.inner_discrete)
    for a, coeff in P.sorted_coeffs():
        q = F.word_quotient((a, (0,) * r, (0,) * s))
        total = total + RatFun(coeff.embed(F.universe)) * q
    return total


def forward_difference_quotient(F, name, multiplier):
    """Delta_{name}(multiplier * F) / F as a rational function."""
    shifted = F.shift_substitute(multiplier, name)
    return shifted * F.shift_quotient(name) - multiplier


def derivative_term_quotient(F, name, multiplier):
    """D_{name}(multiplier * F) / F as a rational function."""
    return multiplier.derivative(name) + multiplier * F.derivative_quotient(name)


def _rhs_quotient(F, R, S):
    total = RatFun.zero(F.universe)
    for name in F.inner_discrete:
        if name in R:
            total = total + forward_difference_quotient(F, name, R[name])
    for name in F.inner_continuous:
        if name in S:
            total = total + derivative_term_quotient(F, name, S[name])
    return total


def residual(F, cert):
    """Numerator polynomial of (P F - telescoped sum)/F; zero iff valid."""
    if cert.term is not None and cert.term.universe != F.universe:
        raise MismatchError(
            "certificate was issued for %r, not %r"
            % (cert.term.universe, F.universe)
        )
    for name in cert.R:
        if name not in F.inner_discrete:
            raise MismatchError("certificate names unknown shift variable %r" % name)
    for name in cert.S:
        if name not in F.inner_continuous:
            raise MismatchError(
                "certificate names unknown continuous variable %r" % name
            )
    diff = _lhs_quotient(F, cert.P) - _rhs_quotient(F, cert.R, cert.S)
    return diff.num


def verify(F, cert):
    """Verdict for the telescoped relation, with a two-line trace."""
    res = residual(F, cert)
    valid = res.is_zero()
    vacuous = cert.P.is_zero() and all(
        v.is_zero() for v in list(cert.R.values()) + list(cert.S.values())
    )
    lines = []
    lhs = _describe_lhs(F, cert)
    rhs = _describe_rhs(F, cert)
    lines.append("Dividing by F reduces the relation to: %s = %s." % (lhs, rhs))
    if valid:
        lines.append("The numerator after clearing denominators is identically 0.")
    else:
        lines.append(
            "The numerator after clearing denominators is %s, not 0." % res
        )
    if vacuous:
        lines.append("(vacuous: zero operator and zero certificates)")
    return Verdict(valid=valid, residual=res, trace="\n".join(lines))


def _describe_lhs(F, cert):
    sym = "D_%s" % F.outer if F.outer_continuous else "N"
    return "(%s) F/F" % cert.P.render(sym)


def _describe_rhs(F, cert):
    parts = []
    for name in F.inner_discrete:
        if name in cert.R and not cert.R[name].is_zero():
            parts.append("Delta_%s((%s) F)/F" % (name, cert.R[name]))
    for name in F.inner_continuous:
        if name in cert.S and not cert.S[name].is_zero():
            parts.append("D_%s((%s) F)/F" % (name, cert.S[name]))
    if not parts:
        return "0"
    return " + ".join(parts)


def wz_residual(t):
    """Residual of Delta_n F = sum Delta_{k_i}(G_i F) + sum D_{y_j}(H_j F)."""
    F = t.term
    one = RatFun.one(F.universe)
    lhs = F.shift_quotient(F.outer) - one
    rhs = _rhs_quotient(F, t.G, t.H)
    return (lhs - rhs).num


def verify_wz_tuple(t):
    res = wz_residual(t)
    valid = res.is_zero()
    lines = [
        "Dividing by F reduces the pair relation to: (N - 1) F/F = %s."
        % _describe_rhs(t.term, _WZView(t)),
    ]
    if valid:
        lines.append("The numerator after clearing denominators is identically 0.")
    else:
        lines.append(
            "The numerator after clearing denominators is %s, not 0." % res
        )
    return Verdict(valid=valid, residual=res, trace="\n".join(lines))


class _WZView:
    """Adapter so the rhs renderer accepts both certificate shapes."""

    def __init__(self, t):
        self.R = t.G
        self.S = t.H
