"""The finder: annihilating operators and telescoping certificates.

The ansatz is the multisum version of Sister Celine's method: propose
T = sum over words c_word(n) * N^a K^b D^c, divide T F by F so every
word becomes its rational word quotient, clear the common denominator,
and collect the numerator against monomials in the inner variables.
Each monomial gives one linear equation over the field of rational
functions in (outer, parameters); a nullspace vector is an annihilator.

Iterative deepening over ansatz bounds replaces a priori order bounds:
the schedule enumerates every bound shape below a configurable unknown
cap in order of system size, so any annihilator small enough to afford
is eventually found.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import math

from .errors import AnsatzTooLargeError, NotFoundError, VariableMismatchError
from .linsolve import nullspace
from .ore import OreOperator, UnivarOperator, decompose
from .poly import MultiPoly, poly_lcm
from .ratfun import RatFun

DEFAULT_MAX_UNKNOWNS = 120


@dataclass(frozen=True)
class AnsatzBounds:
    """Word-order limits and the coefficient-degree budget."""

    max_n: int
    max_k: tuple
    max_d: tuple = ()
    coeff_deg: int = 1

    def __post_init__(self):
        if self.max_n < 0 or self.coeff_deg < 0:
            raise ValueError("bounds must be non-negative")
        if any(x < 0 for x in self.max_k) or any(x < 0 for x in self.max_d):
            raise ValueError("bounds must be non-negative")

    def word_count(self):
        total = self.max_n + 1
        for x in self.max_k:
            total *= x + 1
        for x in self.max_d:
            total *= x + 1
        return total

    def unknowns(self):
        return self.word_count() * (self.coeff_deg + 1)


@dataclass
class TelescopeCertificate:
    """P(N, n) F = sum_i Delta_{k_i}(R_i F) + sum_j D_{y_j}(S_j F)."""

    P: UnivarOperator
    R: dict
    S: dict
    term: object

    def n_order(self):
        return self.P.order()


def ansatz_schedule(F, max_unknowns=DEFAULT_MAX_UNKNOWNS):
    """All bound shapes affordable under the cap, smallest systems first."""
    r = len(F.inner_discrete)
    s = len(F.inner_continuous)
    per_axis = range(1, 7)
    degs = range(1, 9)
    out = []
    for max_n in range(1, 7):
        for max_k in itertools.product(per_axis, repeat=r):
            for max_d in itertools.product(range(1, 5), repeat=s):
                for deg in degs:
                    b = AnsatzBounds(max_n, max_k, max_d, deg)
                    if b.unknowns() <= max_unknowns:
                        out.append(b)
    out.sort(
        key=lambda b: (
            b.unknowns(),
            b.max_n,
            sum(b.max_k),
            sum(b.max_d),
            b.coeff_deg,
            b.max_k,
            b.max_d,
        )
    )
    return out


def _split_poly(poly, inner_names, coeff_universe):
    """Group a polynomial by its inner-variable monomials.

    Returns {inner exponent tuple: MultiPoly over coeff_universe}.
    """
    inner_idx = [poly.variables.index(v) for v in inner_names]
    coeff_idx = [
        i for i, v in enumerate(poly.variables) if v not in set(inner_names)
    ]
    coeff_names = tuple(poly.variables[i] for i in coeff_idx)
    if coeff_names != coeff_universe:
        raise VariableMismatchError(
            "coefficient symbols %r do not match %r" % (coeff_names, coeff_universe)
        )
    groups = {}
    for exps, coeff in poly.terms.items():
        key = tuple(exps[i] for i in inner_idx)
        rest = tuple(exps[i] for i in coeff_idx)
        bucket = groups.setdefault(key, {})
        bucket[rest] = bucket.get(rest, Fraction(0)) + coeff
    out = {}
    for key, bucket in groups.items():
        total = MultiPoly.zero(coeff_universe)
        for rest, coeff in bucket.items():
            total = total + MultiPoly.monomial(coeff_universe, rest, coeff)
        if not total.is_zero():
            out[key] = total
    return out


def _words_for(F, bounds):
    r = len(F.inner_discrete)
    s = len(F.inner_continuous)
    if len(bounds.max_k) != r:
        raise VariableMismatchError(
            "bounds declare %d shift axes, term has %d" % (len(bounds.max_k), r)
        )
    if len(bounds.max_d) != s:
        raise VariableMismatchError(
            "bounds declare %d derivative axes, term has %d" % (len(bounds.max_d), s)
        )
    axes = [range(bounds.max_n + 1)]
    axes += [range(m + 1) for m in bounds.max_k]
    axes += [range(m + 1) for m in bounds.max_d]
    words = []
    for combo in itertools.product(*axes):
        words.append((combo[0], combo[1 : 1 + r], combo[1 + r :]))
    return words


def _candidate_key(op, deg_symbol):
    P, _tees, _hats = decompose(op)
    return (
        P.is_zero(),
        op.n_order(),
        op.word_count(),
        op.coeff_degree(deg_symbol),
    )


def _solve_shape(F, bounds):
    """Nullspace operators for the word shape, before any degree filter."""
    words = _words_for(F, bounds)
    coeff_universe = F.coeff_symbols()
    inner_names = F.collect_symbols()

    quotients = [F.word_quotient(w) for w in words]
    den = MultiPoly.const(F.universe, 1)
    for q in quotients:
        den = poly_lcm(den, q.den)
    numerators = [q.num * den.exact_div(q.den) for q in quotients]

    row_keys = set()
    split = []
    for p in numerators:
        groups = _split_poly(p, inner_names, coeff_universe)
        split.append(groups)
        row_keys.update(groups)
    row_keys = sorted(row_keys)
    if not row_keys:
        return []
    matrix = []
    for key in row_keys:
        matrix.append(
            [
                groups.get(key, MultiPoly.zero(coeff_universe))
                for groups in split
            ]
        )
    basis = nullspace(matrix)
    out = []
    for vec in basis:
        op = OreOperator({w: c for w, c in zip(words, vec)}, coeff_universe)
        if not op.is_zero():
            out.append(op)
    return out


def find_annihilator(F, bounds, max_unknowns=None, _shape_cache=None):
    """Smallest annihilator within the word bounds, or None.

    Candidates whose coefficients exceed the coefficient-degree budget
    in the outer variable are not considered (they belong to a later
    schedule entry).  Among the rest, operators with a nonzero
    telescoped part P come first, then fewer N-orders, words and lower
    degrees.
    """
    if max_unknowns is not None and bounds.unknowns() > max_unknowns:
        raise AnsatzTooLargeError(
            "ansatz too large: %d unknowns exceeds the cap %d"
            % (bounds.unknowns(), max_unknowns)
        )
    shape = (bounds.max_n, bounds.max_k, bounds.max_d)
    if _shape_cache is not None and shape in _shape_cache:
        raw = _shape_cache[shape]
    else:
        raw = _solve_shape(F, bounds)
        if _shape_cache is not None:
            _shape_cache[shape] = raw
    deg_symbol = F.degree_symbol()
    candidates = [
        op for op in raw if op.coeff_degree(deg_symbol) <= bounds.coeff_deg
    ]
    if not candidates:
        return None
    keyed = sorted(
        enumerate(candidates),
        key=lambda ic: (_candidate_key(ic[1], deg_symbol), ic[0]),
    )
    return keyed[0][1]


def extract_certificates(F, T_list, hat_list):
    """Certificates R_i, S_j with G_i = R_i F = -T_i F (same for S)."""

    def combine(op):
        total = RatFun.zero(F.universe)
        for word, coeff in op.sorted_words():
            embedded = RatFun(coeff.embed(F.universe))
            total = total + embedded * F.word_quotient(word)
        return -total

    R = {}
    for name, op in zip(F.inner_discrete, T_list):
        R[name] = combine(op)
    S = {}
    for name, op in zip(F.inner_continuous, hat_list):
        S[name] = combine(op)
    return R, S


def _normalize_certificate(P, R, S):
    """Make P integer-primitive with a positive leading coefficient.

    The joint rational scale taken out of P divides the certificates so
    the telescoped relation keeps holding verbatim.
    """
    if P.is_zero():
        return P, R, S
    content = None
    for _a, c in P.sorted_coeffs():
        cc = c.content()
        if content is None:
            content = cc
        else:
            content = Fraction(
                math.gcd(
                    content.numerator * cc.denominator,
                    cc.numerator * content.denominator,
                ),
                content.denominator * cc.denominator,
            )
    lead = P.coefficient(P.order())
    scale = content if content else Fraction(1)
    if lead.leading()[1] < 0:
        scale = -scale
    inv = 1 / scale
    P2 = P.scale(MultiPoly.const(P.universe, inv))
    R2 = {k: v * inv for k, v in R.items()}
    S2 = {k: v * inv for k, v in S.items()}
    return P2, R2, S2


def creative_telescope(F, max_unknowns=DEFAULT_MAX_UNKNOWNS):
    """Full pipeline: find T, decompose, extract and normalize certificates.

    Degenerate decompositions with P = 0 trigger a retry with larger
    bounds.  Raises NotFoundError carrying the last bounds tried once
    the schedule is exhausted.
    """
    last = None
    shape_cache = {}
    for bounds in ansatz_schedule(F, max_unknowns):
        last = bounds
        op = find_annihilator(F, bounds, _shape_cache=shape_cache)
        if op is None:
            continue
        P, tees, hats = decompose(op)
        if P.is_zero():
            continue
        R, S = extract_certificates(F, tees, hats)
        P, R, S = _normalize_certificate(P, R, S)
        return TelescopeCertificate(P=P, R=R, S=S, term=F)
    raise NotFoundError(
        "no annihilator within %d unknowns" % max_unknowns, bounds=last
    )
