"""Combinatorial statistics on biwords and the induced weight maps.

Three statistics drive the weighted identities:

* ``inv_diff``       inv(bottom) - inv(top); may be negative.
* ``exceedances``    number of columns whose bottom letter exceeds its top.
* ``denert``         Denert's statistic, defined here only on biwords whose
                     top word is non-decreasing (the normal forms of the
                     sign-dispatched system): the sum of the exceedance
                     positions, plus the weak inversions (>=) of the bottom
                     subword on exceedance positions, plus the strict
                     inversions of the bottom subword on the complement.
                     On tie-free bottoms this is the classical
                     position-sum formula; the weak count on the
                     exceedance side is forced by requiring the pair
                     (exceedances, denert) to be constant on rewrite
                     congruence classes once letters repeat.

Each statistic lifts to a linear weight map on expressions; ``denert_image``
additionally projects every biword to its top word, landing in the word
algebra (``WordExpression``).
"""

from __future__ import annotations

from typing import Iterable, NamedTuple

from .algebra import (
    Biword,
    Expression,
    LaurentPoly,
    P_ZERO,
    ParseError,
    Word,
    _parse_word_text,
    inversions,
    poly_monomials_desc,
    render_poly,
    render_word,
)


class NonSortedTop(ValueError):
    """Denert's statistic is only defined on sorted-top biwords here."""


def inv_diff(bw: Biword) -> int:
    """inv(bottom word) - inv(top word)."""
    return inversions(bw.bottom) - inversions(bw.top)


def exceedances(bw: Biword) -> int:
    """Number of columns i with bottom_i > top_i."""
    return sum(1 for x, a in bw.columns() if a > x)


def is_circuit(bw: Biword) -> bool:
    """True iff the top word is a rearrangement of the bottom word."""
    return sorted(bw.top) == sorted(bw.bottom)


def weak_inversions(w: Iterable[int]) -> int:
    """Number of pairs i<j with w[i] >= w[j] (ties count)."""
    w = tuple(w)
    n = len(w)
    return sum(1 for i in range(n) for j in range(i + 1, n) if w[i] >= w[j])


def _is_sorted(w: Word) -> bool:
    return all(w[i] <= w[i + 1] for i in range(len(w) - 1))


def denert(bw: Biword) -> int:
    """Denert's statistic on a sorted-top biword.

    With Exc = {i : bottom_i > top_i} (positions 1-based), returns
    sum(Exc) + weak_inversions(bottom restricted to Exc)
             + inversions(bottom restricted to the complement).
    Raises :class:`NonSortedTop` on a top descent: no formula of this
    shape is invariant under top-swap rewriting there.
    """
    if not _is_sorted(bw.top):
        raise NonSortedTop("top word %s is not non-decreasing" % (bw.top,))
    exc_positions = [i for i, (x, a) in enumerate(bw.columns(), start=1) if a > x]
    exc_set = set(exc_positions)
    exc_sub = [a for i, a in enumerate(bw.bottom, start=1) if i in exc_set]
    non_sub = [a for i, a in enumerate(bw.bottom, start=1) if i not in exc_set]
    return sum(exc_positions) + weak_inversions(exc_sub) + inversions(non_sub)


class StatPair(NamedTuple):
    exc: int
    den: int


def stat_pair(bw: Biword) -> StatPair:
    return StatPair(exceedances(bw), denert(bw))


# ---------------------------------------------------------------------------
# Weight maps.
# ---------------------------------------------------------------------------


def q_inv_weight(expr: Expression) -> Expression:
    """Attach q^inv_diff to every term (the q-weight transport map)."""
    return expr.map_terms(
        lambda bw, c: (bw, c * LaurentPoly.q_power(inv_diff(bw)))
    )


def tq_weight(expr: Expression) -> Expression:
    """Attach t^exceedances * q^inv_diff to every term."""
    return expr.map_terms(
        lambda bw, c: (bw, c * LaurentPoly.tq_power(exceedances(bw), inv_diff(bw)))
    )


class WordExpression:
    """Finitely supported formal sum word -> LaurentPoly, normalized."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[Word, LaurentPoly], _normalized: bool = False):
        if not _normalized:
            terms = {w: c for w, c in terms.items() if not c.is_zero}
        self.terms = terms

    @staticmethod
    def zero() -> "WordExpression":
        return WordExpression({}, _normalized=True)

    @staticmethod
    def one() -> "WordExpression":
        return WordExpression({(): LaurentPoly.const(1)}, _normalized=True)

    @staticmethod
    def single(w: Word, coeff: LaurentPoly) -> "WordExpression":
        if coeff.is_zero:
            return WordExpression.zero()
        return WordExpression({w: coeff}, _normalized=True)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "WordExpression") -> "WordExpression":
        out = dict(self.terms)
        for w, c in other.terms.items():
            s = out.get(w, P_ZERO) + c
            if s.is_zero:
                out.pop(w, None)
            else:
                out[w] = s
        return WordExpression(out, _normalized=True)

    def __neg__(self) -> "WordExpression":
        return WordExpression({w: -c for w, c in self.terms.items()}, _normalized=True)

    def __sub__(self, other: "WordExpression") -> "WordExpression":
        return self + (-other)

    def items_canonical(self) -> list[tuple[Word, LaurentPoly]]:
        return [(w, self.terms[w]) for w in sorted(self.terms, key=lambda w: (len(w), w))]

    def key(self) -> tuple:
        return tuple((w, c.key()) for w, c in self.items_canonical())

    def __eq__(self, other: object) -> bool:
        return isinstance(other, WordExpression) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(self.key())

    def __str__(self) -> str:
        return render_word_expression(self)

    def __repr__(self) -> str:
        return "WordExpression(%s)" % render_word_expression(self)


def denert_image(expr: Expression) -> WordExpression:
    """Map every term c*(u|v) to c * t^exc * q^den * u in the word algebra.

    Distinct biwords with equal top words merge.  Raises NonSortedTop if
    any support biword has a top descent.
    """
    out: dict[Word, LaurentPoly] = {}
    for bw, c in expr.terms.items():
        weight = LaurentPoly.tq_power(exceedances(bw), denert(bw))
        s = out.get(bw.top, P_ZERO) + c * weight
        if s.is_zero:
            out.pop(bw.top, None)
        else:
            out[bw.top] = s
    return WordExpression(out, _normalized=True)


def denert_image_records(expr: Expression) -> list[dict]:
    """Unmerged record list: one (sign, t, q, word) record per support term."""
    records = []
    for bw, c in sorted(expr.terms.items(), key=lambda kv: (len(kv[0].top), kv[0].top, kv[0].bottom)):
        weight = LaurentPoly.tq_power(exceedances(bw), denert(bw))
        for t_exp, q_exp, coeff in poly_monomials_desc(c * weight):
            records.append(
                {
                    "tExp": t_exp,
                    "qExp": q_exp,
                    "coef": coeff,
                    "word": render_word(bw.top),
                    "bottom": render_word(bw.bottom),
                }
            )
    return records


def render_word_expression(expr: WordExpression) -> str:
    if expr.is_zero:
        return "0"
    from .algebra import _monomial_pieces  # shared monomial formatting

    out = []
    for w, p in expr.items_canonical():
        mono = poly_monomials_desc(p)
        if len(mono) == 1:
            t_exp, q_exp, c = mono[0]
            sign = "-" if c < 0 else "+"
            body = _monomial_pieces(abs(c), t_exp, q_exp)
            if w:
                body = "(%s)" % render_word(w) if body == "1" else "%s*(%s)" % (body, render_word(w))
        else:
            sign = "+"
            body = "(%s)" % render_poly(p)
            if w:
                body = "%s*(%s)" % (body, render_word(w))
        if not out:
            out.append(body if sign == "+" else "-" + body)
        else:
            out.append((" + " if sign == "+" else " - ") + body)
    return "".join(out)


def word_expression_records(expr: WordExpression) -> list[dict]:
    records = []
    for w, p in expr.items_canonical():
        for t_exp, q_exp, c in poly_monomials_desc(p):
            records.append(
                {"tExp": t_exp, "qExp": q_exp, "coef": c, "word": render_word(w)}
            )
    return records
