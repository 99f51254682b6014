"""Command-line front end.

Four commands cover the workflow:

    telescoper prove <file> [--q] [--max-unknowns U] [--out cert.json]
                     [--format text|json]
    telescoper verify <idfile> <certfile>
    telescoper companion <certfile> --keep <var>
    telescoper check <idfile> --range a..b [--assign sym=rat ...]

Exit status: 0 proven or verified, 1 refuted or invalid certificate,
2 nothing found within the unknown budget, 3 input error.  Diagnostics
go to stderr; results go to stdout, byte for byte deterministic for
identical inputs and flags.

The optional environment variable TELESCOPE_MAX_UNKNOWNS overrides the
default ansatz budget when --max-unknowns is not given.
"""

import argparse
import json
import os
import re
import sys
from fractions import Fraction

from . import dsl
from .certfile import read_certificate, write_certificate
from .certify import WZTuple, verify
from .errors import (
    CertificateFormatError,
    NotApplicableError,
    NotFoundError,
    ParseError,
    TelescoperError,
    UnboundParameterError,
)
from .identities import (
    IdentityStatement,
    Refutation,
    companions,
    numeric_check,
    prove_identity,
)
from .ore import UnivarOperator
from .poly import MultiPoly
from .qtelescope import q_verify
from .qterms import QHyperTerm
from .telescope import DEFAULT_MAX_UNKNOWNS

EXIT_PROVEN = 0
EXIT_REFUTED = 1
EXIT_NOT_FOUND = 2
EXIT_INPUT = 3

_RANGE_RE = re.compile(r"^(-?[0-9]+)\.\.(-?[0-9]+)$")
_ASSIGN_RE = re.compile(r"^([A-Za-z][A-Za-z0-9_]*)=(-?[0-9]+(?:/[0-9]+)?)$")


class UsageError(Exception):
    """A problem with the invocation or its input files."""


class _ArgumentParser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags, which this tool
    # reserves for exhausted search budgets; route through UsageError.
    def error(self, message):
        raise UsageError(message)


def _read_text(path):
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _read_bytes(path):
    with open(path, "rb") as fh:
        return fh.read()


def _parse_statement(path):
    parsed = dsl.parse(_read_text(path))
    if not isinstance(parsed, IdentityStatement):
        raise UsageError("%s contains a term, not an identity" % path)
    return parsed


def _budget(args):
    if args.max_unknowns is not None:
        if args.max_unknowns <= 0:
            raise UsageError("--max-unknowns must be positive")
        return args.max_unknowns
    raw = os.environ.get("TELESCOPE_MAX_UNKNOWNS")
    if raw is None:
        return DEFAULT_MAX_UNKNOWNS
    try:
        value = int(raw)
    except ValueError:
        value = 0
    if value <= 0:
        raise UsageError(
            "TELESCOPE_MAX_UNKNOWNS must be a positive integer, got %r" % raw
        )
    return value


def _assignments(pairs):
    table = {}
    for pair in pairs or ():
        m = _ASSIGN_RE.match(pair)
        if m is None:
            raise UsageError(
                "--assign takes name=value with a rational value, got %r" % pair
            )
        try:
            table[m.group(1)] = Fraction(m.group(2))
        except ZeroDivisionError:
            raise UsageError("zero denominator in --assign %s" % pair) from None
    return table


def _cmd_prove(args):
    stmt = _parse_statement(args.file)
    q_case = isinstance(stmt.lhs.term, QHyperTerm)
    if args.q and not q_case:
        raise UsageError(
            "--q was given, but the file describes a classical identity"
        )
    result = prove_identity(stmt, max_unknowns=_budget(args))
    if isinstance(result, Refutation):
        print(result.text)
        return EXIT_REFUTED
    data = write_certificate(result.certificate)
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(data)
    if args.format == "json":
        payload = {
            "certificate": json.loads(data.decode("utf-8")),
            "proof": {
                "initial_values": [
                    [v, str(value)] for v, value in result.initial_values
                ],
                "order": result.certificate.P.order(),
                "text": result.text,
            },
        }
        print(json.dumps(payload, sort_keys=True, indent=2))
    else:
        print(result.text)
    return EXIT_PROVEN


def _cmd_verify(args):
    parsed = dsl.parse(_read_text(args.idfile))
    term = parsed.lhs.term if isinstance(parsed, IdentityStatement) else parsed
    cert = read_certificate(_read_bytes(args.certfile))
    if cert.term != term:
        raise UsageError(
            "the certificate was issued for a different term than %s"
            % args.idfile
        )
    if isinstance(term, QHyperTerm):
        verdict = q_verify(term, cert)
    else:
        verdict = verify(term, cert)
    print(verdict.trace)
    return EXIT_PROVEN if verdict.valid else EXIT_REFUTED


def _cmd_companion(args):
    cert = read_certificate(_read_bytes(args.certfile))
    uni = cert.P.universe
    one = MultiPoly.const(uni, 1)
    if cert.P != UnivarOperator({1: one, 0: -one}, uni):
        raise UsageError(
            "companions need a pair certificate with operator N - 1, got %s"
            % cert.P.render()
        )
    pair = WZTuple(term=cert.term, G=cert.R, H=dict(cert.S))
    try:
        stmt = companions(pair, args.keep)
    except ValueError as e:
        print(str(e), file=sys.stderr)
        return EXIT_REFUTED
    print(dsl.render(stmt))
    return EXIT_PROVEN


def _cmd_check(args):
    stmt = _parse_statement(args.idfile)
    m = _RANGE_RE.match(args.range)
    if m is None:
        raise UsageError("--range takes a..b with integers, got %r" % args.range)
    lo, hi = int(m.group(1)), int(m.group(2))
    if hi < lo:
        raise UsageError("--range is empty: %s" % args.range)
    assignments = _assignments(args.assign)
    q_value = assignments.pop("q", None)
    rows = numeric_check(
        stmt,
        range(lo, hi + 1),
        assignments=assignments or None,
        q_value=q_value,
    )
    bad = [row for row in rows if not row.ok]
    if not bad:
        print("all equal for %s = %d..%d" % (stmt.outer, lo, hi))
        return EXIT_PROVEN
    for row in bad:
        print(
            "mismatch at %s = %d: lhs = %s, rhs = %s"
            % (stmt.outer, row.outer_value, row.lhs, row.rhs)
        )
    return EXIT_REFUTED


def _build_parser():
    parser = _ArgumentParser(
        prog="telescoper",
        description="Find and check telescoping certificates for "
        "hypergeometric identities.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    prove = sub.add_parser("prove", help="prove or refute an identity file")
    prove.add_argument("file")
    prove.add_argument("--q", action="store_true",
                       help="insist that the file is a q-identity")
    prove.add_argument("--max-unknowns", type=int, default=None,
                       help="ansatz size budget")
    prove.add_argument("--out", default=None,
                       help="write the certificate to this file")
    prove.add_argument("--format", choices=("text", "json"), default="text")
    prove.set_defaults(run=_cmd_prove)

    ver = sub.add_parser("verify", help="check a certificate against a term")
    ver.add_argument("idfile")
    ver.add_argument("certfile")
    ver.set_defaults(run=_cmd_verify)

    comp = sub.add_parser(
        "companion", help="derive a companion identity from a pair certificate"
    )
    comp.add_argument("certfile")
    comp.add_argument("--keep", required=True, metavar="VAR")
    comp.set_defaults(run=_cmd_companion)

    check = sub.add_parser("check", help="compare both sides numerically")
    check.add_argument("idfile")
    check.add_argument("--range", required=True, metavar="a..b")
    check.add_argument("--assign", action="append", metavar="NAME=VALUE",
                       help="parameter value, repeatable")
    check.set_defaults(run=_cmd_check)
    return parser


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.run(args)
    except UsageError as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_INPUT
    except (ParseError, CertificateFormatError) as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_INPUT
    except NotFoundError as e:
        print("not found: %s" % e, file=sys.stderr)
        return EXIT_NOT_FOUND
    except NotApplicableError as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_INPUT
    except UnboundParameterError as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_INPUT
    except OSError as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_INPUT
    except TelescoperError as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
