"""q-analogue of the finder and verifier.

The ansatz machinery is shared with the classical case: a q-term
exposes the same word-quotient interface, with coefficients living in
(q, w, parameters) where w tracks q raised to the outer variable.  Only
shift words occur; there is no continuous direction.
"""

from __future__ import annotations

from dataclasses import dataclass

from .certify import Verdict, residual
from .ore import UnivarOperator
from .telescope import DEFAULT_MAX_UNKNOWNS, creative_telescope


@dataclass
class QTelescopeCertificate:
    """P(N, q, w) F = sum_i Delta_{k_i}(R_i F) with w = q^outer."""

    P: UnivarOperator
    R: dict
    term: object

    # The classical verifier reads S; q-certificates never carry one.
    @property
    def S(self):
        return {}

    def n_order(self):
        return self.P.order()


def q_creative_telescope(F, max_unknowns=DEFAULT_MAX_UNKNOWNS):
    """Annihilator and telescoping certificates for a q-term."""
    cert = creative_telescope(F, max_unknowns)
    return QTelescopeCertificate(P=cert.P, R=cert.R, term=F)


def q_residual(F, cert):
    return residual(F, cert)


def q_verify(F, cert):
    """Verdict for the q-telescoped relation, with a two-line trace."""
    res = q_residual(F, cert)
    valid = res.is_zero()
    vacuous = cert.P.is_zero() and all(v.is_zero() for v in cert.R.values())
    parts = []
    for name in F.inner_discrete:
        if name in cert.R and not cert.R[name].is_zero():
            parts.append("Delta_%s((%s) F)/F" % (name, cert.R[name]))
    rhs = " + ".join(parts) if parts else "0"
    lines = [
        "Dividing by F reduces the relation to: (%s) F/F = %s."
        % (cert.P.render(), rhs)
    ]
    if valid:
        lines.append("The numerator after clearing denominators is identically 0.")
    else:
        lines.append("The numerator after clearing denominators is %s, not 0." % res)
    if vacuous:
        lines.append("(vacuous: zero operator and zero certificates)")
    return Verdict(valid=valid, residual=res, trace="\n".join(lines))
