"""Reading and writing certificates as JSON documents.

A certificate file is a single UTF-8 JSON object:

    {
      "format_version": 1,
      "mode": "classical",
      "term": "sum(k) factorial(n) * ...",
      "operator_variables": ["n"],
      "operator": [
        {"n_power": 0, "coeff": [{"exponents": [0], "coeff": "-2"}]},
        {"n_power": 1, "coeff": [{"exponents": [0], "coeff": "1"}]}
      ],
      "certificate_variables": ["n", "k"],
      "certificates": {"k": {"num": [...], "den": [...]}}
    }

The term is canonical DSL text.  Polynomials are sparse monomial
lists; exponents align with the variable lists declared once at the
top, and coefficients are exact decimal strings "a" or "a/b".  Output
is deterministic: keys sorted, two-space indent, sorted monomials,
trailing newline.  read_certificate(write_certificate(c)) reproduces c
and the reverse composition reproduces the bytes, so files can be
diffed and committed.

Malformed input raises CertificateFormatError naming the first
offending path, e.g. "operator[0].coeff[2].exponents".
"""

from __future__ import annotations

import json
import re
from fractions import Fraction

from . import dsl
from .errors import CertificateFormatError, ParseError
from .ore import UnivarOperator
from .poly import MultiPoly
from .qtelescope import QTelescopeCertificate
from .qterms import QHyperTerm
from .ratfun import RatFun
from .telescope import TelescopeCertificate
from .terms import HyperTerm

FORMAT_VERSION = 1

_COEFF_RE = re.compile(r"^-?[0-9]+(/[1-9][0-9]*)?$")


# -- writing -------------------------------------------------------------------


def _poly_doc(poly):
    monos = []
    for exps, coeff in poly.terms.items():
        monos.append({"exponents": list(exps), "coeff": str(coeff)})
    monos.sort(key=lambda m: m["exponents"])
    return monos


def _ratfun_doc(rf):
    return {"num": _poly_doc(rf.num), "den": _poly_doc(rf.den)}


def write_certificate(cert):
    """Serialize a telescoping certificate to deterministic JSON bytes."""
    if cert.P.is_zero():
        raise ValueError("refusing to write a certificate with a zero operator")
    term = cert.term
    doc = {
        "format_version": FORMAT_VERSION,
        "mode": "q" if isinstance(term, QHyperTerm) else "classical",
        "term": dsl.render(term),
        "operator_variables": list(term.coeff_symbols()),
        "operator": [
            {"n_power": a, "coeff": _poly_doc(c)}
            for a, c in sorted(cert.P.coeffs.items())
        ],
        "certificate_variables": list(term.universe),
        "certificates": {
            var: _ratfun_doc(rf)
            for var, rf in list(cert.R.items()) + list(cert.S.items())
        },
    }
    return (json.dumps(doc, sort_keys=True, indent=2) + "\n").encode("utf-8")


# -- reading -------------------------------------------------------------------


def _need(doc, key, kind, path):
    if key not in doc:
        raise CertificateFormatError("missing", "%s%s" % (path, key))
    value = doc[key]
    if not isinstance(value, kind) or isinstance(value, bool):
        raise CertificateFormatError(
            "expected %s" % kind.__name__, "%s%s" % (path, key)
        )
    return value


def _read_exponents(entry, width, path):
    exps = entry.get("exponents")
    if not isinstance(exps, list) or len(exps) != width:
        raise CertificateFormatError(
            "expected a list of %d exponents" % width, path + ".exponents"
        )
    for i, e in enumerate(exps):
        if not isinstance(e, int) or isinstance(e, bool) or e < 0:
            raise CertificateFormatError(
                "exponents are non-negative integers", path + ".exponents"
            )
    return tuple(exps)


def _read_poly(monos, variables, path):
    if not isinstance(monos, list):
        raise CertificateFormatError("expected a monomial list", path)
    terms = {}
    for i, entry in enumerate(monos):
        here = "%s[%d]" % (path, i)
        if not isinstance(entry, dict):
            raise CertificateFormatError("expected a monomial object", here)
        exps = _read_exponents(entry, len(variables), here)
        coeff = entry.get("coeff")
        if not isinstance(coeff, str) or not _COEFF_RE.match(coeff):
            raise CertificateFormatError(
                'coefficients are strings "a" or "a/b"', here + ".coeff"
            )
        if exps in terms:
            raise CertificateFormatError("duplicate exponents", here + ".exponents")
        terms[exps] = Fraction(coeff)
    return MultiPoly(variables, terms)


def _read_names(doc, key, expected, path):
    names = _need(doc, key, list, path)
    if names != list(expected):
        raise CertificateFormatError(
            "expected %r to match the term, %r" % (names, list(expected)),
            "%s%s" % (path, key),
        )
    return tuple(names)


def read_certificate(data):
    """Parse certificate bytes (or text) back into a certificate."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as e:
            raise CertificateFormatError("not valid UTF-8: %s" % e) from e
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as e:
        raise CertificateFormatError("not valid JSON: %s" % e) from e
    if not isinstance(doc, dict):
        raise CertificateFormatError("expected a JSON object at the top level")

    version = _need(doc, "format_version", int, "")
    if version != FORMAT_VERSION:
        raise CertificateFormatError(
            "unsupported version %r" % version, "format_version"
        )
    mode = _need(doc, "mode", str, "")
    if mode not in ("classical", "q"):
        raise CertificateFormatError('expected "classical" or "q"', "mode")

    text = _need(doc, "term", str, "")
    try:
        term = dsl.parse(text)
    except ParseError as e:
        raise CertificateFormatError("does not parse: %s" % e, "term") from e
    if not isinstance(term, (HyperTerm, QHyperTerm)):
        raise CertificateFormatError("expected a term, not a statement", "term")
    if isinstance(term, QHyperTerm) != (mode == "q"):
        raise CertificateFormatError("term does not match the declared mode", "term")

    op_vars = _read_names(doc, "operator_variables", term.coeff_symbols(), "")
    entries = _need(doc, "operator", list, "")
    coeffs = {}
    for i, entry in enumerate(entries):
        here = "operator[%d]" % i
        if not isinstance(entry, dict):
            raise CertificateFormatError("expected an operator entry", here)
        power = entry.get("n_power")
        if not isinstance(power, int) or isinstance(power, bool) or power < 0:
            raise CertificateFormatError(
                "n_power is a non-negative integer", here + ".n_power"
            )
        if power in coeffs:
            raise CertificateFormatError("duplicate n_power", here + ".n_power")
        coeffs[power] = _read_poly(entry.get("coeff"), op_vars, here + ".coeff")
    P = UnivarOperator(coeffs, op_vars)
    if P.is_zero():
        raise CertificateFormatError("operator is zero", "operator")

    cert_vars = _read_names(doc, "certificate_variables", term.universe, "")
    table = _need(doc, "certificates", dict, "")
    inner_discrete = set(term.inner_discrete)
    inner_continuous = set(term.inner_continuous)
    R = {}
    S = {}
    for var in sorted(table):
        here = "certificates.%s" % var
        if var not in inner_discrete and var not in inner_continuous:
            raise CertificateFormatError(
                "%r is not an inner variable of the term" % var, here
            )
        entry = table[var]
        if not isinstance(entry, dict):
            raise CertificateFormatError("expected {num, den}", here)
        num = _read_poly(entry.get("num"), cert_vars, here + ".num")
        den = _read_poly(entry.get("den"), cert_vars, here + ".den")
        if den.is_zero():
            raise CertificateFormatError("zero denominator", here + ".den")
        (R if var in inner_discrete else S)[var] = RatFun(num, den)

    if mode == "q":
        return QTelescopeCertificate(P=P, R=R, term=term)
    return TelescopeCertificate(P=P, R=R, S=S, term=term)
