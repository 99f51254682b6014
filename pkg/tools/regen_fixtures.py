"""Regenerate the committed certificate files under fixtures/.

Certificates for the summation fixtures come out of the finder; the two
Laguerre-product certificates have a continuous outer variable, which
the finder does not handle, so they are stated here and verified before
being written.

Run from the repository root:  python3 tools/regen_fixtures.py
"""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from telescoper import dsl
from telescoper.certfile import write_certificate
from telescoper.certify import verify
from telescoper.identities import prove_identity
from telescoper.ore import UnivarOperator
from telescoper.poly import MultiPoly
from telescoper.ratfun import RatFun
from telescoper.telescope import TelescopeCertificate

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


def laguerre_certificate(term):
    """outer F = Delta_m(R F) + D_u(S F) - ((a+1-x) D_x + x D_x^2) F,

    written for either orientation: x stands for the outer argument.
    """
    uni = term.universe
    coeffs = term.coeff_symbols()
    x = MultiPoly.var(coeffs, term.outer)
    n = MultiPoly.var(coeffs, "n")
    a = MultiPoly.var(coeffs, "a")
    one = MultiPoly.const(coeffs, 1)
    P = UnivarOperator({0: n, 1: a + one - x, 2: x}, coeffs)
    xf = RatFun.var(uni, term.outer)
    mf = RatFun.var(uni, "m")
    af = RatFun.var(uni, "a")
    uf = RatFun.var(uni, "u")
    return TelescopeCertificate(
        P=P, R={"m": -mf * (af + mf) / xf}, S={"u": -uf}, term=term
    )


def write(name, cert):
    path = FIXTURES / name
    path.write_bytes(write_certificate(cert))
    print("wrote %s" % path.relative_to(FIXTURES.parent))


def main():
    for stem in ("binomial_sum", "halved_binomial", "gauss_qbinomial"):
        stmt = dsl.parse((FIXTURES / (stem + ".id")).read_text())
        proof = prove_identity(stmt)
        write(stem + ".cert.json", proof.certificate)

    for stem in ("hille_hardy", "hille_hardy_y"):
        term = dsl.parse((FIXTURES / (stem + ".id")).read_text())
        cert = laguerre_certificate(term)
        verdict = verify(term, cert)
        if not verdict.valid:
            raise SystemExit("%s certificate does not verify" % stem)
        write(stem + ".cert.json", cert)


if __name__ == "__main__":
    main()
