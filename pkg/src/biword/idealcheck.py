"""Graded ideal membership over exact rationals.

The two-sided ideal generated by the rewrite differences (lhs - rhs) is
graded by biword length, because every rule preserves length.  The
degree-n piece is therefore the rational span of the finitely many
embedded generators b1*(lhs - rhs)*b2 of total length n, and membership
is a linear-algebra question over the biword basis of degree n.

Every built-in rule permutes the top letters and the bottom letters of
the matched pair separately, so the span splits over invariant blocks
keyed by the (top multiset, bottom multiset) of a biword.  Membership is
decided block by block with an integer row echelon: rows are combined as
pivot*row - value*pivot_row and divided by their content, keeping all
arithmetic exact (division is always exact).

This route deliberately never touches the leftmost-reduction operator,
so the weak identities are certified independently of the strong ones.
The weak q=1 checks stay over coefficient-free rules; membership with
symbolic q coefficients is out of scope (the q-identities are certified
through their vanishing leftmost reductions instead).
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from math import gcd
from typing import Optional, Union

from .algebra import Biword, Expression, biword_key
from .rewrite import ReductionSystem, all_biwords, builtin_system
from .series import IncompatiblePairing, Variant, default_max_degree, product_slice


class DegreeMismatch(ValueError):
    """Expression degree does not match the generator set's degree."""


class NonConstantCoefficients(ValueError):
    """Membership is only decided for t,q-free (integer) coefficients."""


WEAK_SYSTEMS = ("sm", "sf", "sr", "sh")


@dataclass
class GradedGeneratorSet:
    """All homogeneous generators b1*(lhs - rhs)*b2 of one degree."""

    system: str
    r: int
    degree: int
    generators: list[Expression]
    _echelons: dict = field(default_factory=dict, repr=False)

    def __len__(self) -> int:
        return len(self.generators)


def matched_pairs(system: ReductionSystem, r: int):
    """All length-2 first components over letters 1..r with their rules."""
    system = builtin_system(system)
    out = []
    for x, y, a, b in itertools.product(range(1, r + 1), repeat=4):
        m = system.match(x, y, a, b)
        if m is not None:
            out.append((Biword((x, y), (a, b)), m[1]))
    return out


def graded_generators(system: Union[str, ReductionSystem], r: int, n: int) -> GradedGeneratorSet:
    """Enumerate the degree-n generators (empty below degree 2)."""
    system = builtin_system(system)
    if n < 1:
        raise ValueError("degree must be >= 1")
    gens: list[Expression] = []
    if n >= 2:
        pairs = matched_pairs(system, r)
        for left_len in range(n - 1):
            right_len = n - 2 - left_len
            lefts = list(all_biwords(r, left_len))
            rights = list(all_biwords(r, right_len))
            for lhs, repls in pairs:
                diff_terms: dict[Biword, int] = {lhs: 1}
                for coeff, tops, bottoms in repls:
                    rbw = Biword(tops, bottoms)
                    diff_terms[rbw] = diff_terms.get(rbw, 0) - coeff.constant_value()
                for b1 in lefts:
                    for b2 in rights:
                        gens.append(
                            Expression(
                                {
                                    Biword(
                                        b1.top + bw.top + b2.top,
                                        b1.bottom + bw.bottom + b2.bottom,
                                    ): _const(c)
                                    for bw, c in diff_terms.items()
                                    if c
                                },
                                _normalized=True,
                            )
                        )
    return GradedGeneratorSet(system.name, r, n, gens)


def _const(c: int):
    from .algebra import LaurentPoly

    return LaurentPoly.const(c)


# ---------------------------------------------------------------------------
# Integer row echelon with content normalization.
# ---------------------------------------------------------------------------

Row = dict[Biword, int]


def _normalize(row: Row) -> Row:
    if not row:
        return row
    g = 0
    for v in row.values():
        g = gcd(g, v)
    pivot = max(row, key=biword_key)
    if row[pivot] < 0:
        g = -g
    if g != 1:
        row = {bw: v // g for bw, v in row.items()}
    return row


class _Echelon:
    """Rows indexed by pivot biword (the canonically largest column)."""

    __slots__ = ("rows",)

    def __init__(self):
        self.rows: dict[Biword, Row] = {}

    def reduce(self, row: Row) -> Row:
        while row:
            pivot = max(row, key=biword_key)
            ref = self.rows.get(pivot)
            if ref is None:
                return row
            vp = ref[pivot]
            vr = row[pivot]
            new: Row = {}
            for bw, v in row.items():
                new[bw] = v * vp
            for bw, v in ref.items():
                s = new.get(bw, 0) - v * vr
                if s:
                    new[bw] = s
                else:
                    new.pop(bw, None)
            row = _normalize(new)
        return row

    def add(self, row: Row) -> None:
        row = self.reduce(_normalize(dict(row)))
        if row:
            self.rows[max(row, key=biword_key)] = row


def _block_key(bw: Biword) -> tuple:
    return (tuple(sorted(bw.top)), tuple(sorted(bw.bottom)))


def _expression_rows(expr: Expression) -> dict[tuple, Row]:
    """Split an integer-coefficient expression into per-block rows."""
    blocks: dict[tuple, Row] = {}
    for bw, c in expr.terms.items():
        if not c.is_constant():
            raise NonConstantCoefficients(
                "coefficient of %s involves t or q" % (bw,)
            )
        blocks.setdefault(_block_key(bw), {})[bw] = c.constant_value()
    return blocks


def _echelon_for_block(gens: GradedGeneratorSet, key: tuple) -> _Echelon:
    cache = gens._echelons
    if not cache:
        grouped: dict[tuple, list[Row]] = {}
        for g in gens.generators:
            rows = _expression_rows(g)
            if len(rows) != 1:
                raise AssertionError("generator spans several blocks: %s" % g)
            (bkey, row), = rows.items()
            grouped.setdefault(bkey, []).append(row)
        for bkey, rows in grouped.items():
            ech = _Echelon()
            for row in rows:
                ech.add(row)
            cache[bkey] = ech
    return cache.get(key) or _Echelon()


def member(expr: Expression, gens: GradedGeneratorSet) -> bool:
    """Is expr in the rational span of the degree-n generators?"""
    if expr.is_zero:
        return True
    lengths = expr.lengths()
    if lengths != {gens.degree}:
        raise DegreeMismatch(
            "expression has lengths %s, generators degree %d"
            % (sorted(lengths), gens.degree)
        )
    for key, row in _expression_rows(expr).items():
        residual = _echelon_for_block(gens, key).reduce(_normalize(row))
        if residual:
            return False
    return True


# ---------------------------------------------------------------------------
# Weak identity driver.
# ---------------------------------------------------------------------------


@dataclass
class WeakMasterReport:
    """Per-degree ideal membership of the product slices."""

    system: str
    r: int
    max_degree: int
    in_span: dict[int, bool]
    generator_counts: dict[int, int]
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return all(self.in_span.values())

    def to_dict(self) -> dict:
        return {
            "system": self.system,
            "r": self.r,
            "maxDegree": self.max_degree,
            "kind": "weak",
            "inSpan": {str(n): ok for n, ok in sorted(self.in_span.items())},
            "generatorCounts": {
                str(n): c for n, c in sorted(self.generator_counts.items())
            },
            "pass": self.passed,
            "wallTime": self.wall_time,
        }


def verify_weak_master(
    system: Union[str, ReductionSystem],
    r: int,
    max_degree: Optional[int] = None,
) -> WeakMasterReport:
    """Check product_slice(r, n) - [n = 0] lies in the degree-n ideal piece.

    Only the coefficient-free q=1 systems are supported; this is the
    mod-ideal form of the identity, meaningful even where the leftmost
    reduction does not reach 1 (the sign-dispatched system).
    """
    system = builtin_system(system)
    if system.name not in WEAK_SYSTEMS:
        raise IncompatiblePairing(
            "weak membership is checked for %s only" % (", ".join(WEAK_SYSTEMS))
        )
    if max_degree is None:
        max_degree = min(default_max_degree(r), 4)
    start = time.perf_counter()
    in_span: dict[int, bool] = {}
    counts: dict[int, int] = {}
    for n in range(1, max_degree + 1):
        gens = graded_generators(system, r, n)
        counts[n] = len(gens)
        in_span[n] = member(product_slice(r, n, Variant.ONE), gens)
    return WeakMasterReport(
        system.name, r, max_degree, in_span, counts, time.perf_counter() - start
    )
