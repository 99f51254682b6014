"""Text syntax for terms and identity statements.

A file is a few declarations followed by a quantified product of
factors, optionally equated to a right side:

    param none;
    sum(k) factorial(n) * factorial(k)^-1 * factorial(n - k)^-1 = 2^n

Factors: factorial(lin), gamma(lin), pochhammer(start, length),
binom(lin, lin), base^exponent, exp(rational), qpoch(first, length),
qbin(lin, lin), qpow(quadratic), and plain rational expressions.  The
named q factors, or any use of the symbol q, put the whole file in
q mode; q is reserved and cannot name a variable or parameter.  binom,
pochhammer and qbin desugar into gamma-type factors.

Roles are resolved, not declared: sum(...) and int(...) bind the inner
variables, declared parameters stay symbolic, and the one remaining
free symbol is the outer variable (continuous when listed under cont).
A bare unquantified product instead takes its first free symbol as
outer and the rest as inner.  Coefficients of discrete variables must
be integers; that is what separates these arguments from arbitrary
expressions, and violations are reported with a source span.

render() produces canonical text and parse() inverts it structurally
for every term and statement this package builds, with two caveats:
q-Pochhammer factors must keep their q-power content in the shift
rather than the prefactor, and difference-form statements produced by
companions() render as the underlying sum (the difference marker has
no surface syntax and is emitted as a comment line).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import NonIntegerArgumentError, ParseError, TelescoperError
from .identities import BoundSum, ClosedForm, IdentityStatement
from .linform import LinForm
from .qterms import (
    GeomFactor,
    QHyperTerm,
    QPochFactor,
    QPowFactor,
    QuadForm,
    q_symbol,
)
from .ratfun import RatFun
from .terms import ExpFactor, FactorialFactor, HyperTerm, PowerFactor


@dataclass(frozen=True)
class SourceSpan:
    """Location of a token in the input: 1-based line and column plus
    byte offsets [start, end)."""

    line: int
    column: int
    start: int
    end: int

    def __post_init__(self):
        if min(self.line, self.column, self.start, self.end) < 0:
            raise ValueError("source positions are non-negative")
        if self.end < self.start:
            raise ValueError("span ends before it starts")

    def __str__(self):
        return "line %d, column %d" % (self.line, self.column)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    span: SourceSpan


_OPS = set("()+-*/^=,;")

_NAMED_FACTORS = {
    "factorial": 1,
    "gamma": 1,
    "pochhammer": 2,
    "binom": 2,
    "exp": 1,
    "qpoch": 2,
    "qbin": 2,
    "qpow": 1,
}

_Q_FACTORS = ("qpoch", "qbin", "qpow")


def tokenize(text):
    out = []
    i = 0
    line = 1
    col = 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start = i
        scol = col
        if c.isdigit():
            while i < n and text[i].isdigit():
                i += 1
                col += 1
            out.append(_Token("int", text[start:i], SourceSpan(line, scol, start, i)))
            continue
        if c.isalpha() or c == "_":
            while i < n and (text[i].isalnum() or text[i] == "_"):
                i += 1
                col += 1
            out.append(_Token("name", text[start:i], SourceSpan(line, scol, start, i)))
            continue
        if c in _OPS:
            i += 1
            col += 1
            out.append(_Token("op", c, SourceSpan(line, scol, start, i)))
            continue
        raise ParseError("unexpected character %r" % c, SourceSpan(line, col, i, i + 1))
    out.append(_Token("end", "", SourceSpan(line, col, n, n)))
    return out


# -- parse trees ---------------------------------------------------------------
#
# Arithmetic is kept as small tuples until roles are known:
#   ("num", Fraction)          ("sym", name, span)       ("neg", a)
#   ("+"|"-"|"*"|"/", a, b)    ("pow", a, int | ast)     ("paren", a)
# A "pow" exponent is an int when written as a literal and an ast when
# parenthesized; q^(n+1) must survive until the factor's role decides
# whether it is exponent data or a value.  "paren" nodes keep written
# grouping visible so that splitting a q-Pochhammer first argument into
# prefactor and shift respects it.


@dataclass(frozen=True)
class _FactorIR:
    kind: str
    args: tuple
    exponent: object
    span: SourceSpan


@dataclass(frozen=True)
class _ProductIR:
    factors: tuple
    span: SourceSpan


@dataclass(frozen=True)
class _SideIR:
    sums: tuple
    ints: tuple
    products: tuple
    span: SourceSpan


@dataclass(frozen=True)
class _FileIR:
    params: tuple
    cont: tuple
    lhs: _SideIR
    rhs: object


class _Parser:
    def __init__(self, text):
        self.tokens = tokenize(text)
        self.pos = 0
        self.symbol_order = []
        self.symbol_spans = {}
        self.q_factors = False

    def peek(self, ahead=0):
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self):
        tok = self.tokens[self.pos]
        if tok.kind != "end":
            self.pos += 1
        return tok

    def at(self, text):
        return self.peek().text == text

    def expect(self, text, what=None):
        tok = self.next()
        if tok.text != text:
            raise ParseError(
                "expected %s, got %r" % (what or repr(text), tok.text or "end of input"),
                tok.span,
            )
        return tok

    def _note_symbol(self, name, span):
        if name not in self.symbol_spans:
            self.symbol_spans[name] = span
            self.symbol_order.append(name)

    # -- file structure ------------------------------------------------------

    def file(self):
        params = self._decl("param")
        cont = self._decl("cont")
        lhs = self._side()
        rhs = None
        if self.at("="):
            self.next()
            rhs = self._side()
        tok = self.peek()
        if tok.kind != "end":
            raise ParseError("unexpected trailing input %r" % tok.text, tok.span)
        return _FileIR(params, cont, lhs, rhs)

    def _decl(self, keyword):
        if not (self.peek().kind == "name" and self.peek().text == keyword):
            return ()
        self.next()
        ids = []
        while self.peek().kind == "name":
            tok = self.next()
            if tok.text == "q":
                raise ParseError("q is reserved and cannot be declared", tok.span)
            if tok.text in ids:
                raise ParseError(
                    "duplicate symbol %r in %s declaration" % (tok.text, keyword),
                    tok.span,
                )
            ids.append(tok.text)
            if self.at(","):
                self.next()
        self.expect(";", "';' after the %s declaration" % keyword)
        if ids == ["none"]:
            return ()
        return tuple(ids)

    def _id_list(self, what):
        self.expect("(")
        ids = []
        while self.peek().kind == "name":
            tok = self.next()
            if tok.text in ids:
                raise ParseError(
                    "duplicate variable %r in %s(...)" % (tok.text, what), tok.span
                )
            ids.append(tok.text)
            if self.at(","):
                self.next()
        if not ids:
            raise ParseError("empty %s variable list" % what, self.peek().span)
        self.expect(")")
        return tuple(ids)

    def _side(self):
        span = self.peek().span
        sums = ()
        ints = ()
        if self.peek().text == "sum" and self.peek(1).text == "(":
            self.next()
            sums = self._id_list("sum")
        if self.peek().text == "int" and self.peek(1).text == "(":
            self.next()
            ints = self._id_list("int")
        products = [self._product()]
        while self.at("+") or self.at("-"):
            negate = self.next().text == "-"
            prod = self._product()
            if negate:
                minus = _FactorIR("scalar", (("num", Fraction(-1)),), 1, prod.span)
                prod = _ProductIR(prod.factors + (minus,), prod.span)
            products.append(prod)
        return _SideIR(sums, ints, tuple(products), span)

    def _product(self):
        span = self.peek().span
        factors = [self._factor(1)]
        while self.at("*") or self.at("/"):
            inverted = self.next().text == "/"
            factors.append(self._factor(-1 if inverted else 1))
        return _ProductIR(tuple(factors), span)

    def _factor(self, sign):
        tok = self.peek()
        if tok.kind == "name" and tok.text in _NAMED_FACTORS \
                and self.peek(1).text == "(":
            return self._named_factor(sign)
        base = self._primary()
        if self.at("^"):
            self.next()
            exponent = self._factor_exponent()
            return _FactorIR("power", (base, exponent), sign, tok.span)
        return _FactorIR("scalar", (base,), sign, tok.span)

    def _named_factor(self, sign):
        tok = self.next()
        name = tok.text
        if name in _Q_FACTORS:
            self.q_factors = True
        self.expect("(")
        args = [self._additive()]
        while self.at(","):
            self.next()
            args.append(self._additive())
        arity = _NAMED_FACTORS[name]
        if len(args) != arity:
            raise ParseError(
                "%s takes %d argument%s" % (name, arity, "s" if arity > 1 else ""),
                tok.span,
            )
        self.expect(")")
        exponent = sign
        if self.at("^"):
            self.next()
            exponent = sign * self._int_literal()
        return _FactorIR(name, tuple(args), exponent, tok.span)

    def _int_literal(self):
        negate = False
        parens = False
        if self.at("("):
            self.next()
            parens = True
        if self.at("-"):
            self.next()
            negate = True
        tok = self.next()
        if tok.kind != "int":
            raise ParseError("expected an integer exponent", tok.span)
        if parens:
            self.expect(")")
        value = int(tok.text)
        return -value if negate else value

    def _factor_exponent(self):
        """Exponent of a standalone power factor: a primary or -primary,
        so that bare forms like 2^n and (1 + z)^(n - k) both parse."""
        if self.at("-"):
            self.next()
            return ("neg", self._factor_exponent())
        return self._primary()

    # -- expressions ---------------------------------------------------------

    def _additive(self):
        node = self._multiplicative()
        while self.at("+") or self.at("-"):
            op = self.next().text
            node = (op, node, self._multiplicative())
        return node

    def _multiplicative(self):
        node = self._unary()
        while self.at("*") or self.at("/"):
            op = self.next().text
            node = (op, node, self._unary())
        return node

    def _unary(self):
        if self.at("-"):
            self.next()
            return ("neg", self._unary())
        return self._power()

    def _power(self):
        node = self._primary()
        if self.at("^"):
            self.next()
            if self.at("("):
                self.next()
                exponent = self._additive()
                self.expect(")")
            else:
                negate = False
                if self.at("-"):
                    self.next()
                    negate = True
                tok = self.next()
                if tok.kind != "int":
                    raise ParseError(
                        "expected an integer or a parenthesized exponent", tok.span
                    )
                exponent = -int(tok.text) if negate else int(tok.text)
            node = ("pow", node, exponent)
        return node

    def _primary(self):
        tok = self.next()
        if tok.kind == "int":
            return ("num", Fraction(tok.text))
        if tok.kind == "name":
            self._note_symbol(tok.text, tok.span)
            # q^k denotes the Laurent symbol tracking q**k, written the
            # way rational content prints it.
            if tok.text == "q" and self.at("^") and self.peek(1).kind == "name":
                self.next()
                var = self.next()
                self._note_symbol(var.text, var.span)
                return ("sym", q_symbol(var.text), tok.span)
            return ("sym", tok.text, tok.span)
        if tok.text == "(":
            node = self._additive()
            self.expect(")")
            return ("paren", node)
        raise ParseError(
            "expected a value, got %r" % (tok.text or "end of input"), tok.span
        )


# -- parse-tree evaluation ------------------------------------------------------


def _ast_span(node, fallback):
    if node[0] == "sym":
        return node[2]
    if node[0] in ("neg", "paren", "+", "-", "*", "/", "pow"):
        return _ast_span(node[1], fallback)
    return fallback


def _pow_int(exponent, span):
    """Integer value of a power exponent written as a literal or as a
    parenthesized constant expression."""
    if isinstance(exponent, int):
        return exponent
    value = _eval_lin(exponent, span)
    if not value.is_constant() or value.const.denominator != 1:
        raise ParseError(
            "exponent must be a constant integer here", _ast_span(exponent, span)
        )
    return int(value.const)


class _LinValue:
    """Linear form under construction: symbol coefficients plus a constant,
    before symbols are classified as variables or parameters."""

    __slots__ = ("coeffs", "const")

    def __init__(self, coeffs=None, const=Fraction(0)):
        self.coeffs = dict(coeffs or {})
        self.const = Fraction(const)

    def is_constant(self):
        return not self.coeffs

    def combine(self, other, sign):
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, Fraction(0)) + sign * v
        return _LinValue(out, self.const + sign * other.const)

    def scale(self, c):
        return _LinValue({k: v * c for k, v in self.coeffs.items()}, self.const * c)


def _eval_lin(node, span):
    kind = node[0]
    if kind == "num":
        return _LinValue(const=node[1])
    if kind == "sym":
        return _LinValue({node[1]: Fraction(1)})
    if kind == "paren":
        return _eval_lin(node[1], span)
    if kind == "neg":
        return _eval_lin(node[1], span).scale(Fraction(-1))
    if kind in ("+", "-"):
        a = _eval_lin(node[1], span)
        b = _eval_lin(node[2], span)
        return a.combine(b, 1 if kind == "+" else -1)
    if kind == "*":
        a = _eval_lin(node[1], span)
        b = _eval_lin(node[2], span)
        if a.is_constant():
            return b.scale(a.const)
        if b.is_constant():
            return a.scale(b.const)
        raise ParseError("argument is not linear", _ast_span(node, span))
    if kind == "/":
        a = _eval_lin(node[1], span)
        b = _eval_lin(node[2], span)
        if not b.is_constant() or b.const == 0:
            raise ParseError(
                "can only divide by a nonzero constant here", _ast_span(node, span)
            )
        return a.scale(1 / b.const)
    if kind == "pow":
        if _pow_int(node[2], span) == 1:
            return _eval_lin(node[1], span)
        raise ParseError("argument is not linear", _ast_span(node, span))
    raise ParseError("argument is not linear", span)


def _eval_poly(node, span):
    """Polynomial as {sorted tuple of symbol names: coefficient}."""

    def mul(p1, p2):
        out = {}
        for m1, c1 in p1.items():
            for m2, c2 in p2.items():
                m = tuple(sorted(m1 + m2))
                out[m] = out.get(m, Fraction(0)) + c1 * c2
        return out

    kind = node[0]
    if kind == "num":
        return {(): node[1]}
    if kind == "sym":
        return {(node[1],): Fraction(1)}
    if kind == "paren":
        return _eval_poly(node[1], span)
    if kind == "neg":
        return {m: -c for m, c in _eval_poly(node[1], span).items()}
    if kind in ("+", "-"):
        out = dict(_eval_poly(node[1], span))
        sign = 1 if kind == "+" else -1
        for m, c in _eval_poly(node[2], span).items():
            out[m] = out.get(m, Fraction(0)) + sign * c
        return out
    if kind == "*":
        return mul(_eval_poly(node[1], span), _eval_poly(node[2], span))
    if kind == "/":
        den = _eval_poly(node[2], span)
        if any(m != () for m in den):
            raise ParseError(
                "can only divide by a nonzero constant here", _ast_span(node, span)
            )
        c = den.get((), Fraction(0))
        if c == 0:
            raise ParseError("division by zero", _ast_span(node, span))
        return {m: v / c for m, v in _eval_poly(node[1], span).items()}
    if kind == "pow":
        e = _pow_int(node[2], span)
        if e < 0:
            raise ParseError(
                "negative powers are not allowed here", _ast_span(node, span)
            )
        out = {(): Fraction(1)}
        base = _eval_poly(node[1], span)
        for _ in range(e):
            out = mul(out, base)
        return out
    raise ParseError("unsupported expression", span)


def _eval_rat(node, universe, span, forbidden=(), what="this expression"):
    kind = node[0]
    if kind == "num":
        return RatFun.const(universe, node[1])
    if kind == "sym":
        name = node[1]
        if name in forbidden:
            raise ParseError(
                "%s may not involve the discrete variable %s" % (what, name), node[2]
            )
        if name not in universe:
            raise ParseError("unknown symbol %r" % name, node[2])
        return RatFun.var(universe, name)
    if kind == "paren":
        return _eval_rat(node[1], universe, span, forbidden, what)
    if kind == "neg":
        return -_eval_rat(node[1], universe, span, forbidden, what)
    if kind in ("+", "-", "*", "/"):
        a = _eval_rat(node[1], universe, span, forbidden, what)
        b = _eval_rat(node[2], universe, span, forbidden, what)
        if kind == "+":
            return a + b
        if kind == "-":
            return a - b
        if kind == "*":
            return a * b
        if b.is_zero():
            raise ParseError("division by zero", _ast_span(node, span))
        return a / b
    if kind == "pow":
        e = _pow_int(node[2], span)
        base = _eval_rat(node[1], universe, span, forbidden, what)
        if base.is_zero() and e < 0:
            raise ParseError("division by zero", _ast_span(node, span))
        return base**e
    raise ParseError("unsupported expression", span)


# -- role resolution -------------------------------------------------------------


class _Resolver:
    def __init__(self, parser, ir):
        self.ir = ir
        self.spans = parser.symbol_spans
        self.order = parser.symbol_order
        self.q_mode = parser.q_factors or "q" in self.spans
        self.params = ir.params
        self.cont = set(ir.cont)

    def resolve(self):
        ir = self.ir
        bound = ir.lhs.sums + ir.lhs.ints
        rhs_bound = () if ir.rhs is None else ir.rhs.sums + ir.rhs.ints
        free = [
            s
            for s in self.order
            if s not in bound
            and s not in rhs_bound
            and s not in self.params
            and s != "q"
        ]
        if ir.rhs is None and not bound:
            return self._bare_term(free)
        if not free:
            raise ParseError(
                "no free symbol left to act as the outer variable", ir.lhs.span
            )
        if len(free) > 1:
            raise ParseError(
                "undeclared symbol %r (not bound, not a parameter, and %r is "
                "already the outer variable)" % (free[1], free[0]),
                self.spans[free[1]],
            )
        outer = free[0]
        lhs_term = self._side_term(ir.lhs, outer)
        if ir.rhs is None:
            return lhs_term
        lhs = BoundSum(lhs_term, bound)
        if rhs_bound:
            rhs = BoundSum(self._side_term(ir.rhs, outer), rhs_bound)
        else:
            terms = []
            for prod in ir.rhs.products:
                if self._is_zero_scalar(prod):
                    continue
                terms.append(self._build_term(prod, outer, (), ()))
            rhs = ClosedForm(tuple(terms))
        try:
            return IdentityStatement(lhs=lhs, rhs=rhs, outer=outer)
        except TelescoperError as e:
            raise ParseError(str(e), ir.lhs.span) from e

    def _bare_term(self, free):
        ir = self.ir
        if not free:
            raise ParseError(
                "no free symbol left to act as the outer variable", ir.lhs.span
            )
        if len(ir.lhs.products) != 1:
            raise ParseError("a term is a single product", ir.lhs.span)
        outer, inner = free[0], tuple(free[1:])
        return self._build_term(
            ir.lhs.products[0],
            outer,
            tuple(v for v in inner if v not in self.cont),
            tuple(v for v in inner if v in self.cont),
        )

    @staticmethod
    def _is_zero_scalar(prod):
        if len(prod.factors) != 1:
            return False
        f = prod.factors[0]
        return f.kind == "scalar" and f.args[0] == ("num", Fraction(0))

    def _side_term(self, side, outer):
        if len(side.products) != 1:
            raise ParseError("a bound sum takes a single product term", side.span)
        return self._build_term(side.products[0], outer, side.sums, side.ints)

    def _build_term(self, prod, outer, inner_discrete, inner_continuous):
        if self.q_mode:
            return self._q_term(prod, outer, inner_discrete, inner_continuous)
        return self._classical_term(prod, outer, inner_discrete, inner_continuous)

    def _lin_form(self, ast, discrete, span, where):
        value = _eval_lin(ast, span)
        var_coeffs = {}
        param_coeffs = {}
        for name, c in value.coeffs.items():
            if name in discrete:
                if c.denominator != 1:
                    raise ParseError(
                        "non-integer coefficient of discrete variable %s in %s"
                        % (name, where),
                        _ast_span(ast, span),
                    )
                var_coeffs[name] = c
            elif name in self.params:
                param_coeffs[name] = c
            else:
                raise ParseError(
                    "unknown symbol %r in %s" % (name, where),
                    self.spans.get(name, span),
                )
        return LinForm(var_coeffs, param_coeffs, value.const)

    # -- classical assembly --------------------------------------------------

    def _classical_term(self, prod, outer, inner_discrete, inner_continuous):
        discrete = set(inner_discrete)
        if outer not in self.cont:
            discrete.add(outer)
        universe = (outer,) + inner_discrete + inner_continuous + self.params
        factorials = []
        powers = []
        exps = []
        rational = RatFun.one(universe)
        for f in prod.factors:
            try:
                if f.kind in ("factorial", "gamma"):
                    arg = self._lin_form(f.args[0], discrete, f.span, f.kind)
                    factorials.append(FactorialFactor(f.kind, arg, f.exponent))
                elif f.kind == "pochhammer":
                    start = self._lin_form(f.args[0], discrete, f.span, "pochhammer")
                    length = self._lin_form(f.args[1], discrete, f.span, "pochhammer")
                    factorials.append(
                        FactorialFactor("pochhammer", length, f.exponent, start)
                    )
                elif f.kind == "binom":
                    top = self._lin_form(f.args[0], discrete, f.span, "binom")
                    low = self._lin_form(f.args[1], discrete, f.span, "binom")
                    factorials.append(FactorialFactor("factorial", top, f.exponent))
                    factorials.append(FactorialFactor("factorial", low, -f.exponent))
                    factorials.append(
                        FactorialFactor("factorial", top - low, -f.exponent)
                    )
                elif f.kind == "exp":
                    arg = _eval_rat(
                        f.args[0], universe, f.span, discrete, "an exp argument"
                    )
                    if f.exponent != 1:
                        arg = arg * f.exponent
                    exps.append(ExpFactor(arg))
                elif f.kind == "power":
                    base_ast, exp_ast = f.args
                    base = _eval_rat(
                        base_ast, universe, f.span, discrete, "a power base"
                    )
                    exponent = self._lin_form(exp_ast, discrete, f.span, "a power")
                    if f.exponent != 1:
                        exponent = exponent * f.exponent
                    powers.append(PowerFactor(base, exponent))
                elif f.kind == "scalar":
                    value = _eval_rat(f.args[0], universe, f.span)
                    if value.is_zero():
                        raise ParseError("a term cannot be zero", f.span)
                    rational = rational * value**f.exponent
                else:
                    raise ParseError(
                        "%s is a q factor; classical terms cannot use it" % f.kind,
                        f.span,
                    )
            except (NonIntegerArgumentError, ValueError) as e:
                raise ParseError(str(e), f.span) from e
        try:
            return HyperTerm(
                outer,
                inner_discrete,
                inner_continuous,
                self.params,
                tuple(factorials),
                tuple(powers),
                tuple(exps),
                rational,
                outer_continuous=outer in self.cont,
            )
        except TelescoperError as e:
            raise ParseError(str(e), prod.span) from e

    # -- q assembly ------------------------------------------------------------

    def _q_term(self, prod, outer, inner_discrete, inner_continuous):
        if inner_continuous or outer in self.cont:
            raise ParseError(
                "q terms are purely discrete; remove int(...) and cont", prod.span
            )
        discrete = {outer} | set(inner_discrete)
        universe = (
            ("q", q_symbol(outer))
            + tuple(q_symbol(v) for v in inner_discrete)
            + self.params
        )
        pochhammers = []
        qpowers = []
        geoms = []
        rational = RatFun.one(universe)
        for f in prod.factors:
            try:
                if f.kind == "qpoch":
                    pre_ast, shift = self._split_qpoch_first(
                        f.args[0], discrete, f.span
                    )
                    if pre_ast is None:
                        pre = RatFun.one(universe)
                    else:
                        pre = _eval_rat(
                            pre_ast,
                            universe,
                            f.span,
                            discrete,
                            "a q-Pochhammer prefactor",
                        )
                    length = self._lin_form(f.args[1], discrete, f.span, "qpoch")
                    pochhammers.append(QPochFactor(pre, shift, length, f.exponent))
                elif f.kind == "qbin":
                    top = self._lin_form(f.args[0], discrete, f.span, "qbin")
                    low = self._lin_form(f.args[1], discrete, f.span, "qbin")
                    one = RatFun.one(universe)
                    unit = LinForm.constant(1)
                    pochhammers.append(QPochFactor(one, unit, top, f.exponent))
                    pochhammers.append(QPochFactor(one, unit, low, -f.exponent))
                    pochhammers.append(
                        QPochFactor(one, unit, top - low, -f.exponent)
                    )
                elif f.kind == "qpow":
                    form = self._quad_form(f.args[0], discrete, f.span)
                    if f.exponent != 1:
                        form = _scale_quad(form, f.exponent)
                    qpowers.append(QPowFactor(form))
                elif f.kind == "power":
                    base_ast, exp_ast = f.args
                    if base_ast[0] == "sym" and base_ast[1] == "q":
                        form = self._quad_form(exp_ast, discrete, f.span)
                        if f.exponent != 1:
                            form = _scale_quad(form, f.exponent)
                        qpowers.append(QPowFactor(form))
                        continue
                    base = _eval_rat(
                        base_ast, universe, f.span, discrete, "a geometric base"
                    )
                    exponent = self._lin_form(exp_ast, discrete, f.span, "a power")
                    if f.exponent != 1:
                        exponent = exponent * f.exponent
                    geoms.append(GeomFactor(base, exponent))
                elif f.kind == "scalar":
                    value = _eval_rat(
                        f.args[0], universe, f.span, discrete, "a scalar factor"
                    )
                    if value.is_zero():
                        raise ParseError("a term cannot be zero", f.span)
                    rational = rational * value**f.exponent
                else:
                    raise ParseError(
                        "%s is a classical factor; q terms cannot use it" % f.kind,
                        f.span,
                    )
            except (NonIntegerArgumentError, ValueError) as e:
                raise ParseError(str(e), f.span) from e
        try:
            return QHyperTerm(
                outer,
                inner_discrete,
                self.params,
                tuple(pochhammers),
                tuple(qpowers),
                tuple(geoms),
                rational,
            )
        except TelescoperError as e:
            raise ParseError(str(e), prod.span) from e

    def _split_qpoch_first(self, ast, discrete, span):
        """Split `pre * q^lin` into a prefactor tree and a shift LinForm.

        Plain q contributes 1 to the shift, q^(lin) the form itself and
        q^v the variable v; whatever remains multiplies into the
        prefactor."""
        chain = []

        def flatten(node):
            if node[0] == "*":
                flatten(node[1])
                flatten(node[2])
            else:
                chain.append(node)

        flatten(ast)
        shift = LinForm()
        pre_parts = []
        for part in chain:
            if part[0] == "sym" and part[1] == "q":
                shift = shift + 1
            elif part[0] == "sym" and part[1].startswith("q^") \
                    and part[1][2:] in discrete:
                shift = shift + LinForm.variable(part[1][2:])
            elif part[0] == "pow" and part[1][0] == "sym" and part[1][1] == "q":
                if isinstance(part[2], int):
                    shift = shift + part[2]
                else:
                    shift = shift + self._lin_form(
                        part[2], discrete, span, "a q-Pochhammer shift"
                    )
            elif part[0] == "pow" and part[1][0] == "sym" \
                    and part[1][1].startswith("q^") and part[1][1][2:] in discrete:
                shift = shift + LinForm.variable(part[1][1][2:]) * _pow_int(
                    part[2], span
                )
            else:
                pre_parts.append(part)
        node = None
        for part in pre_parts:
            node = part if node is None else ("*", node, part)
        return node, shift

    def _quad_form(self, ast, discrete, span):
        poly = _eval_poly(ast, span)
        quad = {}
        lin = {}
        const = Fraction(0)
        for mono, c in poly.items():
            bad = [s for s in mono if s not in discrete]
            if bad:
                raise ParseError(
                    "q-power exponents may use discrete variables only, got %r"
                    % bad[0],
                    _ast_span(ast, span),
                )
            if len(mono) == 0:
                const += c
            elif len(mono) == 1:
                lin[mono[0]] = lin.get(mono[0], Fraction(0)) + c
            elif len(mono) == 2:
                quad[mono] = quad.get(mono, Fraction(0)) + c
            else:
                raise ParseError(
                    "q-power exponent must be quadratic at most", _ast_span(ast, span)
                )
        return QuadForm.build(quad, lin, const)


def _scale_quad(form, e):
    return QuadForm.build(
        {pair: c * e for pair, c in form.quad},
        {v: c * e for v, c in form.lin},
        form.const * e,
    )


def parse(text):
    """Parse DSL text into a term or an identity statement."""
    parser = _Parser(text)
    ir = parser.file()
    return _Resolver(parser, ir).resolve()


# -- rendering ---------------------------------------------------------------------


def _rat_str(r):
    if r.den.is_constant() and r.den.constant_value() == 1:
        return "(%s)" % r.num
    return "(%s)/(%s)" % (r.num, r.den)


def _base_str(r):
    """A power base as a single primary, so `^` cannot split it."""
    if r.den.is_constant() and r.den.constant_value() == 1:
        return "(%s)" % r.num
    return "((%s)/(%s))" % (r.num, r.den)


def _exp_suffix(e):
    if e == 1:
        return ""
    return "^%d" % e if e >= 0 else "^(%d)" % e


def _quad_str(form):
    parts = []
    for (a, b), c in form.quad:
        parts.append((c, "%s*%s" % (a, b)))
    for v, c in form.lin:
        parts.append((c, v))
    if form.const or not parts:
        parts.append((form.const, None))
    chunks = []
    for c, body in parts:
        mag = abs(c)
        if body is None:
            piece = str(mag)
        elif mag == 1:
            piece = body
        else:
            piece = "%s*%s" % (mag, body)
        if not chunks:
            chunks.append(piece if c >= 0 else "-" + piece)
        else:
            chunks.append(("+ " if c >= 0 else "- ") + piece)
    return " ".join(chunks)


def _classical_body(term):
    order = term.universe
    parts = []
    for f in term.factorials:
        if f.kind == "pochhammer":
            parts.append(
                "pochhammer(%s, %s)%s"
                % (f.base.render(order), f.argument.render(order),
                   _exp_suffix(f.exponent))
            )
        else:
            parts.append(
                "%s(%s)%s"
                % (f.kind, f.argument.render(order), _exp_suffix(f.exponent))
            )
    for p in term.powers:
        parts.append("%s^(%s)" % (_base_str(p.base), p.exponent.render(order)))
    for e in term.exps:
        parts.append("exp(%s)" % _rat_str(e.argument))
    if not parts or term.rational != RatFun.one(term.universe):
        parts.append(_rat_str(term.rational))
    return " * ".join(parts)


def _q_body(term):
    order = term.variables
    parts = []
    one = RatFun.one(term.universe)
    for p in term.pochhammers:
        if p.prefactor == one:
            if p.shift == LinForm.constant(1):
                first = "q"
            else:
                first = "q^(%s)" % p.shift.render(order)
        elif p.shift.is_constant() and p.shift.const == 0:
            first = _rat_str(p.prefactor)
        else:
            first = "%s * q^(%s)" % (_rat_str(p.prefactor), p.shift.render(order))
        parts.append(
            "qpoch(%s, %s)%s"
            % (first, p.length.render(order), _exp_suffix(p.exponent))
        )
    for p in term.qpowers:
        parts.append("qpow(%s)" % _quad_str(p.form))
    for g in term.geoms:
        parts.append("%s^(%s)" % (_base_str(g.base), g.exponent.render(order)))
    if not parts or term.rational != one:
        parts.append(_rat_str(term.rational))
    return " * ".join(parts)


def _term_body(term):
    if isinstance(term, QHyperTerm):
        return _q_body(term)
    return _classical_body(term)


def _decl_lines(term):
    lines = []
    if term.parameters:
        lines.append("param %s;" % " ".join(term.parameters))
    if not isinstance(term, QHyperTerm) and term.outer_continuous:
        lines.append("cont %s;" % term.outer)
    return lines


def _quantifier(term):
    parts = []
    if term.inner_discrete:
        parts.append("sum(%s)" % ", ".join(term.inner_discrete))
    if term.inner_continuous:
        parts.append("int(%s)" % ", ".join(term.inner_continuous))
    return parts


def render(obj):
    """Canonical DSL text for a term or statement.

    parse() inverts this structurally, except that a difference-form
    statement loses its difference marker (emitted as a comment)."""
    if isinstance(obj, IdentityStatement):
        lhs_term = obj.lhs.term
        lines = _decl_lines(lhs_term)
        if obj.difference_in is not None:
            lines.insert(
                0, "# first difference in %s of the left side" % obj.difference_in
            )
        side = _quantifier(lhs_term) + [_term_body(lhs_term)]
        if isinstance(obj.rhs, BoundSum):
            rt = obj.rhs.term
            rhs = " ".join(_quantifier(rt) + [_term_body(rt)])
        elif not obj.rhs.terms:
            rhs = "0"
        else:
            rhs = " + ".join(_term_body(t) for t in obj.rhs.terms)
        lines.append("%s = %s" % (" ".join(side), rhs))
        return "\n".join(lines)
    lines = _decl_lines(obj)
    lines.append(" ".join(_quantifier(obj) + [_term_body(obj)]))
    return "\n".join(lines)
