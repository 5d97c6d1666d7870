"""Degree-truncated Boson and Fermion series and the identity drivers.

The Boson is the weighted sum, over all words w, of the biword
(sorted(w) | w); the Fermion is the signed, weighted sum over subsets J of
the alphabet and permutations s of J of the biword (s | sorted J).  The
infinite Boson is never materialized: only degree slices exist, and the
product is handled slice by slice.

Weight variants:

* ``ONE``  both factors carry weight 1 (plain signs on the Fermion side).
* ``Q``    Boson words carry q^inv(w); Fermion permutations carry
           (-q^-1)^inv(s).  This is exactly the image of the ONE variant
           under the q-weight transport map, which is what makes the
           q-identities reduce to the unweighted ones.
* ``TQ``   additionally t^exceedances on every term (image under the
           (t,q)-weight map).

The q-exponent on the Fermion is -inv(s): a permutation biword has
inv(bottom) - inv(top) = -inv(s), and the degree-2 slice at r=2 reduces to
zero under ``sr_q`` only with that exponent, which pins the convention.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Union

from .algebra import Biword, Expression, LaurentPoly, biword, inversions
from .rewrite import (
    ReductionSystem,
    builtin_system,
    enumerate_normal_forms,
    leftmost_reduce,
)
from .stats import WordExpression, denert_image, exceedances


class Variant(Enum):
    ONE = "one"
    Q = "q"
    TQ = "tq"


def as_variant(v: Union[Variant, str]) -> Variant:
    if isinstance(v, Variant):
        return v
    try:
        return Variant(v.lower())
    except ValueError:
        raise ValueError(
            "unknown variant %r (expected one, q or tq)" % (v,)
        ) from None


class IncompatiblePairing(ValueError):
    """A (system, variant) pair the identities are not stated for."""


# The variant each system's identity is stated with.
PAIRINGS = {
    "sm": Variant.ONE,
    "sf": Variant.ONE,
    "sf_q": Variant.TQ,
    "sq_q": Variant.Q,
    "sr": Variant.ONE,
    "sr_q": Variant.Q,
}


@lru_cache(maxsize=None)
def bos_slice(r: int, n: int, variant: Variant = Variant.ONE) -> Expression:
    """Degree-n Boson slice: sum over all r^n words w of (sorted(w) | w)."""
    variant = as_variant(variant)
    terms: dict[Biword, LaurentPoly] = {}
    for w in itertools.product(range(1, r + 1), repeat=n):
        bw = Biword(tuple(sorted(w)), w)
        if variant is Variant.ONE:
            c = LaurentPoly.const(1)
        elif variant is Variant.Q:
            c = LaurentPoly.q_power(inversions(w))
        else:
            c = LaurentPoly.tq_power(exceedances(bw), inversions(w))
        terms[bw] = c
    return Expression(terms, _normalized=True)


@lru_cache(maxsize=None)
def ferm(r: int, variant: Variant = Variant.ONE) -> Expression:
    """The full (finite) Fermion expression over the alphabet 1..r."""
    variant = as_variant(variant)
    terms: dict[Biword, LaurentPoly] = {}
    for size in range(r + 1):
        subset_sign = (-1) ** size
        for bottom in itertools.combinations(range(1, r + 1), size):
            for top in itertools.permutations(bottom):
                bw = Biword(top, bottom)
                inv_s = inversions(top)
                sign = subset_sign * ((-1) ** inv_s)
                if variant is Variant.ONE:
                    c = LaurentPoly.const(sign)
                elif variant is Variant.Q:
                    c = LaurentPoly.monomial(sign, 0, -inv_s)
                else:
                    c = LaurentPoly.monomial(sign, exceedances(bw), -inv_s)
                terms[bw] = c
    return Expression(terms, _normalized=True)


def ferm_term_count(r: int) -> int:
    """Closed-form count of Fermion terms: sum over l of C(r,l)*l!."""
    import math

    return sum(math.comb(r, l) * math.factorial(l) for l in range(r + 1))


@lru_cache(maxsize=None)
def product_slice(r: int, n: int, variant: Variant = Variant.ONE) -> Expression:
    """Degree-n part of Fermion x truncated Boson."""
    variant = as_variant(variant)
    fermion = ferm(r, variant)
    total = Expression.zero()
    for l in range(min(n, r) + 1):
        part = fermion.length_part(l)
        if part.is_zero:
            continue
        total = total + part * bos_slice(r, n - l, variant)
    return total


def default_max_degree(r: int) -> int:
    """Truncation defaults: 6 for r <= 3, 4 for larger alphabets."""
    return 6 if r <= 3 else 4


# ---------------------------------------------------------------------------
# Verification drivers.
# ---------------------------------------------------------------------------


@dataclass
class VerificationReport:
    """Per-degree residuals of one identity check."""

    system: str
    variant: str
    r: int
    max_degree: int
    residuals: dict[int, Expression]
    psi_images: Optional[dict[int, WordExpression]] = None
    wall_time: float = 0.0

    @property
    def kind(self) -> str:
        return "semi-strong" if self.psi_images is not None else "strong"

    @property
    def nonzero_residual_degrees(self) -> list[int]:
        return [n for n in sorted(self.residuals) if n >= 1 and not self.residuals[n].is_zero]

    @property
    def passed(self) -> bool:
        if self.psi_images is not None:
            if self.psi_images.get(0) != WordExpression.one():
                return False
            return all(
                self.psi_images[n].is_zero for n in self.psi_images if n >= 1
            )
        if self.residuals.get(0) != Expression.one():
            return False
        return all(self.residuals[n].is_zero for n in self.residuals if n >= 1)

    def to_dict(self) -> dict:
        from .algebra import expression_records
        from .stats import word_expression_records

        out = {
            "system": self.system,
            "variant": self.variant,
            "kind": self.kind,
            "r": self.r,
            "maxDegree": self.max_degree,
            "residuals": {
                str(n): {
                    "text": str(e),
                    "terms": expression_records(e),
                }
                for n, e in sorted(self.residuals.items())
            },
            "pass": self.passed,
            "wallTime": self.wall_time,
        }
        if self.psi_images is not None:
            out["projectedResiduals"] = {
                str(n): {
                    "text": str(w),
                    "terms": word_expression_records(w),
                }
                for n, w in sorted(self.psi_images.items())
            }
            out["nonzeroResidualDegrees"] = self.nonzero_residual_degrees
        return out


def verify_master(
    system: Union[str, ReductionSystem],
    r: int,
    max_degree: Optional[int] = None,
    variant: Optional[Union[Variant, str]] = None,
    budget: Optional[int] = None,
) -> VerificationReport:
    """Leftmost-reduce every product slice; pass iff all degrees vanish.

    Each system is paired with the variant its identity is stated for
    (see ``PAIRINGS``); other pairings are rejected rather than silently
    computed.  ``sh`` has no vanishing-residual form; use
    :func:`verify_semi_strong`.
    """
    system = builtin_system(system)
    if system.name not in PAIRINGS:
        raise IncompatiblePairing(
            "%s has no strong identity; use verify_semi_strong" % system.name
        )
    expected = PAIRINGS[system.name]
    if variant is None:
        variant = expected
    else:
        variant = as_variant(variant)
        if variant is not expected:
            raise IncompatiblePairing(
                "system %s is verified with variant %s, not %s"
                % (system.name, expected.value, variant.value)
            )
    if max_degree is None:
        max_degree = default_max_degree(r)
    start = time.perf_counter()
    residuals: dict[int, Expression] = {}
    for n in range(max_degree + 1):
        residuals[n] = leftmost_reduce(system, product_slice(r, n, variant), budget)
    return VerificationReport(
        system.name,
        variant.value,
        r,
        max_degree,
        residuals,
        wall_time=time.perf_counter() - start,
    )


def verify_semi_strong(
    r: int,
    max_degree: Optional[int] = None,
    budget: Optional[int] = None,
) -> VerificationReport:
    """Two-step check for ``sh``: leftmost-reduce, then project.

    The leftmost reduction of the product does not vanish (for r >= 3 the
    degree-3 slice already leaves a nonzero irreducible residual), but its
    image under the exceedance/Denert projection does; pass requires the
    projected residuals of every positive degree to be zero.
    """
    if max_degree is None:
        max_degree = default_max_degree(r)
    sh = builtin_system("sh")
    start = time.perf_counter()
    residuals: dict[int, Expression] = {}
    psi_images: dict[int, WordExpression] = {}
    for n in range(max_degree + 1):
        residual = leftmost_reduce(sh, product_slice(r, n, Variant.ONE), budget)
        residuals[n] = residual
        psi_images[n] = denert_image(residual)
    return VerificationReport(
        "sh",
        Variant.ONE.value,
        r,
        max_degree,
        residuals,
        psi_images=psi_images,
        wall_time=time.perf_counter() - start,
    )


# ---------------------------------------------------------------------------
# Subalgebra checks.
# ---------------------------------------------------------------------------


SUBALGEBRA_TARGETS = {
    "sm": "sr",
    "sf": "sr",
    "sh": "sr",
    "sf_q": "sr_q",
    "sq_q": "sr_q",
}


@dataclass
class SubalgebraReport:
    system: str
    target: str
    r: int
    relations_checked: int
    failures: list[tuple[Biword, Expression]] = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "system": self.system,
            "target": self.target,
            "r": self.r,
            "relationsChecked": self.relations_checked,
            "failures": [
                {"relationLhs": str(bw), "difference": str(d)} for bw, d in self.failures
            ],
            "pass": self.passed,
            "wallTime": self.wall_time,
        }


def check_subalgebra(
    system: Union[str, ReductionSystem],
    target: Union[str, ReductionSystem, None] = None,
    r: int = 3,
) -> SubalgebraReport:
    """Do the target system's relations hold in the quotient by ``system``?

    For every instantiation of a target rule over letters 1..r, forms
    (left side - right side) and asks whether some rewrite strategy of
    ``system`` takes the difference to zero; if so the relation holds in
    the quotient algebra and the quotient embeds the target's.
    """
    system = builtin_system(system)
    if target is None:
        if system.name not in SUBALGEBRA_TARGETS:
            raise IncompatiblePairing(
                "no subalgebra claim for %s" % system.name
            )
        target = SUBALGEBRA_TARGETS[system.name]
    target = builtin_system(target)
    if SUBALGEBRA_TARGETS.get(system.name) != target.name:
        raise IncompatiblePairing(
            "subalgebra claim pairs %s with %s"
            % (system.name, SUBALGEBRA_TARGETS.get(system.name))
        )
    start = time.perf_counter()
    checked = 0
    failures: list[tuple[Biword, Expression]] = []
    letters = range(1, r + 1)
    for x, y, a, b in itertools.product(letters, repeat=4):
        m = target.match(x, y, a, b)
        if m is None:
            continue
        checked += 1
        lhs = Biword((x, y), (a, b))
        rhs = Expression.zero()
        for coeff, (t1, t2), (b1, b2) in m[1]:
            rhs = rhs + Expression.single(Biword((t1, t2), (b1, b2)), coeff)
        diff = Expression.single(lhs) - rhs
        nfs = enumerate_normal_forms(system, diff)
        if not any(form.is_zero for form in nfs.forms):
            failures.append((lhs, diff))
    return SubalgebraReport(
        system.name, target.name, r, checked, failures,
        time.perf_counter() - start,
    )


# ---------------------------------------------------------------------------
# Commutative numeric oracle.
# ---------------------------------------------------------------------------


@dataclass
class OracleTrial:
    values: dict[tuple[int, int], Fraction]
    error: Fraction
    bound: Fraction

    @property
    def passed(self) -> bool:
        return abs(self.error) <= self.bound


@dataclass
class OracleReport:
    r: int
    max_degree: int
    seed: int
    trials: list[OracleTrial] = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return all(t.passed for t in self.trials)

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "maxDegree": self.max_degree,
            "seed": self.seed,
            "trials": [
                {
                    "error": str(t.error),
                    "bound": str(t.bound),
                    "pass": t.passed,
                }
                for t in self.trials
            ],
            "pass": self.passed,
            "wallTime": self.wall_time,
        }


def scalar_image(expr: Expression, values: dict[tuple[int, int], Fraction]) -> Fraction:
    """Evaluate an integer-coefficient expression with commuting columns."""
    total = Fraction(0)
    for bw, coeff in expr.terms.items():
        prod = Fraction(coeff.constant_value())
        for col in bw.columns():
            prod *= values[col]
        total += prod
    return total


def geometric_tail(ratio: Fraction, after: int) -> Fraction:
    """Exact sum of ratio^n over n > after, for 0 <= ratio < 1."""
    if ratio == 0:
        return Fraction(0)
    return ratio ** (after + 1) / (1 - ratio)


def numeric_oracle(
    r: int,
    max_degree: Optional[int] = None,
    trials: int = 20,
    seed: int = 0,
    denominator: int = 64,
) -> OracleReport:
    """Independent commutative check of Fermion x Boson = 1.

    Each biletter (x|a) gets an exact rational value with |c| <= 1/(4r),
    so the truncated Boson's tail is dominated by the geometric series in
    r*max|c| <= 1/4.  The scalar product of the Fermion with the truncated
    Boson must be within that exact tail bound of 1.
    """
    if max_degree is None:
        max_degree = default_max_degree(r)
    rng = random.Random(seed)
    start = time.perf_counter()
    fermion = ferm(r, Variant.ONE)
    report = OracleReport(r, max_degree, seed)
    for _ in range(trials):
        values = {
            (x, a): Fraction(rng.randint(-denominator, denominator), denominator * 4 * r)
            for x in range(1, r + 1)
            for a in range(1, r + 1)
        }
        f_val = scalar_image(fermion, values)
        b_val = sum(
            (scalar_image(bos_slice(r, n, Variant.ONE), values) for n in range(max_degree + 1)),
            Fraction(0),
        )
        max_abs = max(abs(c) for c in values.values())
        bound = geometric_tail(r * max_abs, max_degree)
        report.trials.append(OracleTrial(values, f_val * b_val - 1, bound))
    report.wall_time = time.perf_counter() - start
    return report
