"""Exact arithmetic for the free biword algebra over Z[t,t^-1,q,q^-1].

A biword is a 2xn array of letters (positive integers); it is the
universal monomial here.  Coefficients are Laurent polynomials in t and q
with arbitrary-precision integer coefficients, stored as finitely
supported exponent->coefficient maps, so all arithmetic is exact.
Expressions are finitely supported formal sums biword -> coefficient.

Everything in this module is immutable after construction and safe to
share between threads.
"""

from __future__ import annotations

from typing import Iterable, Iterator, NamedTuple, Union


class ParseError(ValueError):
    """Raised when expression or biword text does not match the grammar."""


Word = tuple[int, ...]


def word(letters: Union[str, Iterable[int]]) -> Word:
    """Coerce a word given as digits ("213") or an iterable of letters."""
    if isinstance(letters, str):
        out = tuple(int(c) for c in letters)
    else:
        out = tuple(int(x) for x in letters)
    if any(x < 1 for x in out):
        raise ValueError("letters must be positive integers")
    return out


def inversions(w: Iterable[int]) -> int:
    """Number of pairs i<j with w[i] > w[j]."""
    w = tuple(w)
    n = len(w)
    return sum(1 for i in range(n) for j in range(i + 1, n) if w[i] > w[j])


def sorted_word(w: Iterable[int]) -> Word:
    """Non-decreasing rearrangement of a word."""
    return tuple(sorted(w))


class Biword(NamedTuple):
    """A pair (top word, bottom word) of equal length."""

    top: Word
    bottom: Word

    def __len__(self) -> int:
        return len(self.top)

    @property
    def length(self) -> int:
        return len(self.top)

    def columns(self) -> Iterator[tuple[int, int]]:
        return zip(self.top, self.bottom)

    def concat(self, other: "Biword") -> "Biword":
        return Biword(self.top + other.top, self.bottom + other.bottom)

    def max_letter(self) -> int:
        return max(self.top + self.bottom, default=0)

    def render(self) -> str:
        return render_biword(self)

    def __str__(self) -> str:
        return render_biword(self)


EMPTY_BIWORD = Biword((), ())


def biword(top: Union[str, Iterable[int]], bottom: Union[str, Iterable[int]]) -> Biword:
    """Build a validated biword; top and bottom must have equal length."""
    t, b = word(top), word(bottom)
    if len(t) != len(b):
        raise ValueError("top and bottom words must have equal length")
    return Biword(t, b)


def biword_key(bw: Biword) -> tuple:
    """Canonical term order: length, then top word, then bottom word."""
    return (len(bw.top), bw.top, bw.bottom)


ExpPair = tuple[int, int]  # (t exponent, q exponent)


class LaurentPoly:
    """Element of Z[t,t^-1,q,q^-1], normalized (no zero coefficients)."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[ExpPair, int], _normalized: bool = False):
        if not _normalized:
            terms = {e: c for e, c in terms.items() if c}
        self.terms = terms

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero() -> "LaurentPoly":
        return _P_ZERO

    @staticmethod
    def const(n: int) -> "LaurentPoly":
        if n == 0:
            return _P_ZERO
        if n == 1:
            return _P_ONE
        return LaurentPoly({(0, 0): n}, _normalized=True)

    @staticmethod
    def monomial(coeff: int, t_exp: int = 0, q_exp: int = 0) -> "LaurentPoly":
        if coeff == 0:
            return _P_ZERO
        return LaurentPoly({(t_exp, q_exp): coeff}, _normalized=True)

    @staticmethod
    def q_power(k: int) -> "LaurentPoly":
        return LaurentPoly.monomial(1, 0, k)

    @staticmethod
    def tq_power(t_exp: int, q_exp: int) -> "LaurentPoly":
        return LaurentPoly.monomial(1, t_exp, q_exp)

    # -- predicates ----------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_one(self) -> bool:
        return self.terms == {(0, 0): 1}

    def is_constant(self) -> bool:
        return all(e == (0, 0) for e in self.terms)

    def constant_value(self) -> int:
        """Integer value of a constant polynomial (0 for the zero poly)."""
        if not self.is_constant():
            raise ValueError("polynomial is not constant: %s" % self)
        return self.terms.get((0, 0), 0)

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        if not self.terms:
            return other
        if not other.terms:
            return self
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                del out[e]
        return LaurentPoly(out, _normalized=True)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({e: -c for e, c in self.terms.items()}, _normalized=True)

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        if not self.terms or not other.terms:
            return _P_ZERO
        out: dict[ExpPair, int] = {}
        for (t1, q1), c1 in self.terms.items():
            for (t2, q2), c2 in other.terms.items():
                e = (t1 + t2, q1 + q2)
                s = out.get(e, 0) + c1 * c2
                if s:
                    out[e] = s
                else:
                    del out[e]
        return LaurentPoly(out, _normalized=True)

    def scale(self, n: int) -> "LaurentPoly":
        if n == 0:
            return _P_ZERO
        if n == 1:
            return self
        return LaurentPoly({e: n * c for e, c in self.terms.items()}, _normalized=True)

    # -- identity ------------------------------------------------------

    def key(self) -> tuple:
        return tuple(sorted(self.terms.items()))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, LaurentPoly) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(self.key())

    def __str__(self) -> str:
        return render_poly(self)

    def __repr__(self) -> str:
        return "LaurentPoly(%s)" % render_poly(self)


_P_ZERO = LaurentPoly({}, _normalized=True)
_P_ONE = LaurentPoly({(0, 0): 1}, _normalized=True)

P_ONE = _P_ONE
P_ZERO = _P_ZERO
P_Q = LaurentPoly.q_power(1)
P_QINV = LaurentPoly.q_power(-1)
P_T = LaurentPoly.tq_power(1, 0)


def _as_poly(c) -> LaurentPoly:
    return LaurentPoly.const(c) if isinstance(c, int) else c


class Expression:
    """Finitely supported formal sum biword -> LaurentPoly, normalized."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[Biword, LaurentPoly], _normalized: bool = False):
        if not _normalized:
            terms = {bw: c for bw, c in terms.items() if not c.is_zero}
        self.terms = terms

    @staticmethod
    def zero() -> "Expression":
        return Expression({}, _normalized=True)

    @staticmethod
    def one() -> "Expression":
        return Expression({EMPTY_BIWORD: _P_ONE}, _normalized=True)

    @staticmethod
    def single(bw: Biword, coeff=1) -> "Expression":
        c = _as_poly(coeff)
        if c.is_zero:
            return Expression.zero()
        return Expression({bw: c}, _normalized=True)

    # -- structure -----------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def support(self) -> list[Biword]:
        return sorted(self.terms, key=biword_key)

    def items_canonical(self) -> list[tuple[Biword, LaurentPoly]]:
        return [(bw, self.terms[bw]) for bw in self.support()]

    def term_count(self) -> int:
        return len(self.terms)

    def length_part(self, n: int) -> "Expression":
        """Homogeneous part supported on biwords of length n."""
        return Expression(
            {bw: c for bw, c in self.terms.items() if len(bw.top) == n},
            _normalized=True,
        )

    def lengths(self) -> set[int]:
        return {len(bw.top) for bw in self.terms}

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other: "Expression") -> "Expression":
        if not self.terms:
            return other
        if not other.terms:
            return self
        out = dict(self.terms)
        for bw, c in other.terms.items():
            s = out.get(bw, _P_ZERO) + c
            if s.is_zero:
                out.pop(bw, None)
            else:
                out[bw] = s
        return Expression(out, _normalized=True)

    def __neg__(self) -> "Expression":
        return Expression({bw: -c for bw, c in self.terms.items()}, _normalized=True)

    def __sub__(self, other: "Expression") -> "Expression":
        return self + (-other)

    def scale(self, coeff) -> "Expression":
        c = _as_poly(coeff)
        if c.is_zero or not self.terms:
            return Expression.zero()
        if c.is_one:
            return self
        return Expression({bw: c * p for bw, p in self.terms.items()}, _normalized=True)

    def __mul__(self, other: "Expression") -> "Expression":
        """Bilinear extension of biword concatenation."""
        out: dict[Biword, LaurentPoly] = {}
        for a, ca in self.terms.items():
            for b, cb in other.terms.items():
                ab = a.concat(b)
                s = out.get(ab, _P_ZERO) + ca * cb
                if s.is_zero:
                    out.pop(ab, None)
                else:
                    out[ab] = s
        return Expression(out, _normalized=True)

    def map_terms(self, f) -> "Expression":
        """Apply (biword, coeff) -> (biword, coeff) termwise and re-normalize."""
        out: dict[Biword, LaurentPoly] = {}
        for bw, c in self.terms.items():
            nbw, nc = f(bw, c)
            s = out.get(nbw, _P_ZERO) + nc
            if s.is_zero:
                out.pop(nbw, None)
            else:
                out[nbw] = s
        return Expression(out, _normalized=True)

    # -- identity ------------------------------------------------------

    def key(self) -> tuple:
        return tuple((bw, self.terms[bw].key()) for bw in self.support())

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Expression) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(self.key())

    def __str__(self) -> str:
        return render_expression(self)

    def __repr__(self) -> str:
        return "Expression(%s)" % render_expression(self)


# ---------------------------------------------------------------------------
# Rendering.  Text grammar:
#   expression := "0" | term { ('+'|'-') term }
#   term       := [sign] [coef '*'] biword
#   coef       := Laurent polynomial, parenthesized when it has several terms
#   biword     := '(' topword '|' bottomword ')'
# Words use contiguous digits for letters <= 9, comma-separated integers
# otherwise.  A term on the empty biword is rendered as its bare coefficient.
# ---------------------------------------------------------------------------


def render_word(w: Word) -> str:
    if any(x > 9 for x in w):
        return ",".join(str(x) for x in w)
    return "".join(str(x) for x in w)


def render_biword(bw: Biword) -> str:
    letters = bw.top + bw.bottom
    if any(x > 9 for x in letters):
        top = ",".join(str(x) for x in bw.top)
        bot = ",".join(str(x) for x in bw.bottom)
    else:
        top = "".join(str(x) for x in bw.top)
        bot = "".join(str(x) for x in bw.bottom)
    return "(%s|%s)" % (top, bot)


def _monomial_pieces(mag: int, t_exp: int, q_exp: int) -> str:
    pieces = []
    if mag != 1 or (t_exp == 0 and q_exp == 0):
        pieces.append(str(mag))
    if t_exp:
        pieces.append("t" if t_exp == 1 else "t^%d" % t_exp)
    if q_exp:
        pieces.append("q" if q_exp == 1 else "q^%d" % q_exp)
    return "*".join(pieces)


def poly_monomials_desc(p: LaurentPoly) -> list[tuple[int, int, int]]:
    """Monomials as (t_exp, q_exp, coeff), highest exponents first."""
    return [
        (e[0], e[1], p.terms[e])
        for e in sorted(p.terms, key=lambda e: (-e[0], -e[1]))
    ]


def render_poly(p: LaurentPoly) -> str:
    if p.is_zero:
        return "0"
    parts = []
    for t_exp, q_exp, c in poly_monomials_desc(p):
        body = _monomial_pieces(abs(c), t_exp, q_exp)
        if not parts:
            parts.append("-" + body if c < 0 else body)
        else:
            parts.append((" - " if c < 0 else " + ") + body)
    return "".join(parts)


def _render_term(bw: Biword, p: LaurentPoly) -> tuple[str, str]:
    """Return (sign, body) for one expression term; sign is '+' or '-'."""
    mono = poly_monomials_desc(p)
    if len(mono) == 1:
        t_exp, q_exp, c = mono[0]
        sign = "-" if c < 0 else "+"
        body = _monomial_pieces(abs(c), t_exp, q_exp)
        if len(bw.top) == 0:
            return sign, body
        if body == "1":
            return sign, render_biword(bw)
        return sign, "%s*%s" % (body, render_biword(bw))
    coef = "(%s)" % render_poly(p)
    if len(bw.top) == 0:
        return "+", coef
    return "+", "%s*%s" % (coef, render_biword(bw))


def render_expression(expr: Expression) -> str:
    if expr.is_zero:
        return "0"
    out = []
    for bw, p in expr.items_canonical():
        sign, body = _render_term(bw, p)
        if not out:
            out.append(body if sign == "+" else "-" + body)
        else:
            out.append((" + " if sign == "+" else " - ") + body)
    return "".join(out)


def expression_records(expr: Expression) -> list[dict]:
    """Structured report: one record per (biword, monomial), canonical order."""
    records = []
    for bw, p in expr.items_canonical():
        for t_exp, q_exp, c in poly_monomials_desc(p):
            records.append(
                {
                    "tExp": t_exp,
                    "qExp": q_exp,
                    "coef": c,
                    "top": render_word(bw.top),
                    "bottom": render_word(bw.bottom),
                }
            )
    return records


def expression_from_records(records: Iterable[dict]) -> Expression:
    out = Expression.zero()
    for rec in records:
        bw = biword(_parse_word_text(rec["top"]), _parse_word_text(rec["bottom"]))
        c = LaurentPoly.monomial(rec["coef"], rec["tExp"], rec["qExp"])
        out = out + Expression.single(bw, c)
    return out


# ---------------------------------------------------------------------------
# Parsing.
# ---------------------------------------------------------------------------


def _parse_word_text(text: str) -> Word:
    text = text.strip()
    if not text:
        return ()
    if "," in text:
        parts = [p.strip() for p in text.split(",")]
        if any(not p.isdigit() for p in parts):
            raise ParseError("bad word %r" % text)
        letters = tuple(int(p) for p in parts)
    else:
        if not text.isdigit():
            raise ParseError("bad word %r" % text)
        letters = tuple(int(c) for c in text)
    if any(x < 1 for x in letters):
        raise ParseError("letters must be >= 1 in %r" % text)
    return letters


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self) -> str:
        c = self.peek()
        self.pos += 1
        return c

    def expect(self, c: str) -> None:
        got = self.take()
        if got != c:
            raise ParseError("expected %r at position %d, got %r" % (c, self.pos, got))

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def take_int(self) -> int:
        self.skip_ws()
        start = self.pos
        if self.peek() == "-":
            self.pos += 1
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start or self.text[start:self.pos] == "-":
            raise ParseError("expected integer at position %d" % start)
        return int(self.text[start:self.pos])

    def paren_is_biword(self) -> bool:
        """At '(': does the group contain '|' (biword) or not (coefficient)?"""
        depth = 0
        for c in self.text[self.pos:]:
            if c == "(":
                depth += 1
            elif c == ")":
                depth -= 1
                if depth == 0:
                    return False
            elif c == "|" and depth == 1:
                return True
        raise ParseError("unbalanced parenthesis")


def _parse_biword(sc: _Scanner) -> Biword:
    sc.expect("(")
    bar = sc.text.find("|", sc.pos)
    close = sc.text.find(")", sc.pos)
    if bar == -1 or close == -1 or close < bar:
        raise ParseError("malformed biword near position %d" % sc.pos)
    top = _parse_word_text(sc.text[sc.pos:bar])
    bottom = _parse_word_text(sc.text[bar + 1:close])
    sc.pos = close + 1
    if len(top) != len(bottom):
        raise ParseError("biword rows differ in length near position %d" % sc.pos)
    return Biword(top, bottom)


def _parse_poly_factor(sc: _Scanner) -> LaurentPoly:
    """One monomial: integer and/or t/q powers joined by '*'."""
    coeff = 1
    t_exp = 0
    q_exp = 0
    saw = False
    while True:
        c = sc.peek()
        if c.isdigit():
            coeff *= sc.take_int()
            saw = True
        elif c in ("t", "q"):
            sc.take()
            e = 1
            if sc.peek() == "^":
                sc.take()
                e = sc.take_int()
            if c == "t":
                t_exp += e
            else:
                q_exp += e
            saw = True
        else:
            break
        if sc.peek() == "*":
            # lookahead: '*' may bind to a following biword, handled by caller
            save = sc.pos
            sc.take()
            nxt = sc.peek()
            if nxt == "(" and sc.paren_is_biword():
                sc.pos = save
                break
            if not (nxt.isdigit() or nxt in ("t", "q")):
                sc.pos = save
                break
        else:
            break
    if not saw:
        raise ParseError("expected coefficient at position %d" % sc.pos)
    return LaurentPoly.monomial(coeff, t_exp, q_exp)


def _parse_poly_group(sc: _Scanner) -> LaurentPoly:
    """Parenthesized multi-term coefficient."""
    sc.expect("(")
    total = _P_ZERO
    sign = 1
    if sc.peek() == "-":
        sc.take()
        sign = -1
    while True:
        total = total + _parse_poly_factor(sc).scale(sign)
        c = sc.peek()
        if c == "+":
            sc.take()
            sign = 1
        elif c == "-":
            sc.take()
            sign = -1
        elif c == ")":
            sc.take()
            return total
        else:
            raise ParseError("expected '+', '-' or ')' at position %d" % sc.pos)


def _parse_term(sc: _Scanner, sign: int) -> tuple[Biword, LaurentPoly]:
    coeff = _P_ONE
    c = sc.peek()
    if c == "(" and not sc.paren_is_biword():
        coeff = _parse_poly_group(sc)
        if sc.peek() == "*":
            sc.take()
    elif c.isdigit() or c in ("t", "q"):
        coeff = _parse_poly_factor(sc)
        if sc.peek() == "*":
            sc.take()
    if sc.peek() == "(":
        bw = _parse_biword(sc)
    else:
        bw = EMPTY_BIWORD  # bare coefficient term
    return bw, coeff.scale(sign)


def parse_expression(text: str, r: int | None = None) -> Expression:
    """Parse the expression grammar; validate letters <= r when given."""
    sc = _Scanner(text)
    if sc.peek() == "0":
        save = sc.pos
        sc.take()
        if sc.at_end():
            return Expression.zero()
        sc.pos = save
    out: dict[Biword, LaurentPoly] = {}
    sign = 1
    if sc.peek() == "-":
        sc.take()
        sign = -1
    elif sc.peek() == "+":
        sc.take()
    while True:
        bw, coeff = _parse_term(sc, sign)
        s = out.get(bw, _P_ZERO) + coeff
        if s.is_zero:
            out.pop(bw, None)
        else:
            out[bw] = s
        if sc.at_end():
            break
        c = sc.take()
        if c == "+":
            sign = 1
        elif c == "-":
            sign = -1
        else:
            raise ParseError("unexpected %r at position %d" % (c, sc.pos))
    expr = Expression(out, _normalized=True)
    if r is not None:
        for bw in expr.terms:
            if bw.max_letter() > r:
                raise ParseError(
                    "letter %d exceeds alphabet size r=%d" % (bw.max_letter(), r)
                )
    return expr


def parse_biword_text(text: str, r: int | None = None) -> Biword:
    sc = _Scanner(text)
    bw = _parse_biword(sc)
    if not sc.at_end():
        raise ParseError("trailing input after biword")
    if r is not None and bw.max_letter() > r:
        raise ParseError("letter %d exceeds alphabet size r=%d" % (bw.max_letter(), r))
    return bw
