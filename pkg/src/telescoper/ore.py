"""Operator words and the telescoping decomposition.

An annihilator is a sum of words N^a K^b D^c with coefficients that are
polynomials in the outer variable and parameters only.  Because the
coefficients are free of the inner variables, K_i and D_j commute with
them, which is what makes the decomposition

    T = P(N) + sum_i (K_i - 1) T_i + sum_j D_j T_j'

a matter of successive division: strip one D_j from every word that
contains it, then divide the K_i dependence by (K_i - 1) with remainder
K_i = 1.
"""

from __future__ import annotations

from .poly import MultiPoly


class OreOperator:
    """words -> coefficient; each word is (a, k-shift powers, D powers)."""

    def __init__(self, words, universe):
        clean = {}
        for word, coeff in words.items():
            a, b, c = word
            key = (int(a), tuple(int(x) for x in b), tuple(int(x) for x in c))
            if coeff.variables != universe:
                raise ValueError("coefficient universe mismatch")
            if not coeff.is_zero():
                clean[key] = clean.get(key, MultiPoly.zero(universe)) + coeff
        self.words = {w: c for w, c in clean.items() if not c.is_zero()}
        self.universe = universe

    def is_zero(self):
        return not self.words

    def n_order(self):
        return max((w[0] for w in self.words), default=0)

    def word_count(self):
        return len(self.words)

    def coeff_degree(self, name):
        return max((c.degree(name) for c in self.words.values()), default=-1)

    def sorted_words(self):
        return sorted(self.words.items(), key=lambda wc: wc[0])

    def __eq__(self, other):
        if not isinstance(other, OreOperator):
            return NotImplemented
        return self.words == other.words and self.universe == other.universe

    def __repr__(self):
        return "OreOperator(%d words, order %d)" % (len(self.words), self.n_order())

    def map_coeffs(self, fun):
        return OreOperator(
            {w: fun(c) for w, c in self.words.items()}, self.universe
        )

    def left_mul_shift(self, i):
        """K_i * self (coefficients commute with the inner shifts)."""
        out = {}
        for (a, b, c), coeff in self.words.items():
            nb = list(b)
            nb[i] += 1
            out[(a, tuple(nb), c)] = coeff
        return OreOperator(out, self.universe)

    def left_mul_derivative(self, j):
        out = {}
        for (a, b, c), coeff in self.words.items():
            nc = list(c)
            nc[j] += 1
            out[(a, b, tuple(nc))] = coeff
        return OreOperator(out, self.universe)

    def plus(self, other):
        out = dict(self.words)
        for w, c in other.words.items():
            out[w] = out.get(w, MultiPoly.zero(self.universe)) + c
        return OreOperator(out, self.universe)


class UnivarOperator:
    """P(N) = sum_a coeff_a * N^a with polynomial coefficients."""

    def __init__(self, coeffs, universe):
        self.coeffs = {
            int(a): c for a, c in coeffs.items() if not c.is_zero()
        }
        self.universe = universe

    def is_zero(self):
        return not self.coeffs

    def order(self):
        if not self.coeffs:
            return 0
        return max(self.coeffs)

    def coefficient(self, a):
        return self.coeffs.get(a, MultiPoly.zero(self.universe))

    def sorted_coeffs(self):
        return sorted(self.coeffs.items())

    def scale(self, factor):
        return UnivarOperator(
            {a: c * factor for a, c in self.coeffs.items()}, self.universe
        )

    def __eq__(self, other):
        if not isinstance(other, UnivarOperator):
            return NotImplemented
        return self.coeffs == other.coeffs and self.universe == other.universe

    def __repr__(self):
        return "UnivarOperator(order %d)" % self.order()

    def render(self, shift_symbol="N"):
        if not self.coeffs:
            return "0"
        pieces = []
        for a, c in sorted(self.coeffs.items(), reverse=True):
            if a == 0:
                shift = ""
            elif a == 1:
                shift = shift_symbol
            else:
                shift = "%s^%d" % (shift_symbol, a)
            body = str(c)
            negative = False
            if len(c.terms) == 1:
                if body.startswith("-"):
                    negative, body = True, body[1:]
            else:
                body = "(%s)" % body
            if not shift:
                piece = body
            elif body == "1":
                piece = shift
            else:
                piece = "%s*%s" % (body, shift)
            pieces.append((negative, piece))
        negative, out = pieces[0]
        if negative:
            out = "-" + out
        for negative, piece in pieces[1:]:
            out += (" - " if negative else " + ") + piece
        return out

    def as_operator(self, r, s):
        words = {
            (a, (0,) * r, (0,) * s): c for a, c in self.coeffs.items()
        }
        return OreOperator(words, self.universe)


def decompose(T):
    """Split T into (P, [T_i], [T_j']) with T = P + sum (K_i-1)T_i + sum D_j T_j'.

    Always possible because the coefficients commute with every K and D.
    """
    universe = T.universe
    if not T.words:
        return UnivarOperator({}, universe), [], []
    some_word = next(iter(T.words))
    r = len(some_word[1])
    s = len(some_word[2])

    hats = [dict() for _ in range(s)]
    rest = {}
    for (a, b, c), coeff in T.words.items():
        placed = False
        for j in range(s):
            if c[j] > 0:
                nc = list(c)
                nc[j] -= 1
                key = (a, b, tuple(nc))
                target = hats[j]
                target[key] = target.get(key, MultiPoly.zero(universe)) + coeff
                placed = True
                break
        if not placed:
            rest[(a, b, c)] = coeff

    tees = [dict() for _ in range(r)]
    for i in range(r):
        next_rest = {}
        for (a, b, c), coeff in rest.items():
            m = b[i]
            base = list(b)
            base[i] = 0
            base = tuple(base)
            # K^m = (K-1)(K^{m-1} + .. + 1) + 1 applied to the K_i part.
            for t in range(m):
                wb = list(base)
                wb[i] = t
                key = (a, tuple(wb), c)
                tees[i][key] = tees[i].get(key, MultiPoly.zero(universe)) + coeff
            key = (a, base, c)
            next_rest[key] = next_rest.get(key, MultiPoly.zero(universe)) + coeff
        rest = next_rest

    p_coeffs = {}
    for (a, b, c), coeff in rest.items():
        if any(b) or any(c):
            raise AssertionError("decomposition left inner-variable words behind")
        p_coeffs[a] = p_coeffs.get(a, MultiPoly.zero(universe)) + coeff

    P = UnivarOperator(p_coeffs, universe)
    T_list = [OreOperator(d, universe) for d in tees]
    hat_list = [OreOperator(d, universe) for d in hats]
    return P, T_list, hat_list


def recompose(P, T_list, hat_list, r, s):
    """Re-expand a decomposition; used to validate decompose."""
    universe = P.universe
    total = P.as_operator(r, s)
    for i, Ti in enumerate(T_list):
        shifted = Ti.left_mul_shift(i)
        minus = Ti.map_coeffs(lambda c: -c)
        total = total.plus(shifted).plus(minus)
    for j, Tj in enumerate(hat_list):
        total = total.plus(Tj.left_mul_derivative(j))
    return total
