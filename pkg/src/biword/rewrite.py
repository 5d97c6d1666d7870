"""Reduction systems on adjacent biword columns and the leftmost reduction.

A reduction system is a finite set of guarded rewrite templates on a pair
of adjacent columns ((x over a), (y over b)).  Seven built-in systems are
provided (names ``sm``, ``sf``, ``sf_q``, ``sq_q``, ``sr``, ``sr_q``,
``sh``).  Every template rewrites the matched pair into a linear
combination of column pairs that is strictly smaller in the lexicographic
measure (inv(top), inv(bottom)); since each replacement preserves the top
and bottom letter multisets of the pair, the same measure decreases for
the whole embedded biword, which certifies termination.

``leftmost_reduce`` implements the canonical normal-form operator: it is
linear over terms, fixes irreducible biwords, and always rewrites a
reducible biword at its leftmost matching pair.  ``enumerate_normal_forms``
explores *all* rewrite strategies instead and is the basis of the
reduction-uniqueness harness.
"""

from __future__ import annotations

import heapq
import itertools
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Union

from .algebra import (
    Biword,
    Expression,
    LaurentPoly,
    P_ONE,
    P_Q,
    P_QINV,
    P_ZERO,
    biword_key,
    inversions,
)


class UnknownSystem(ValueError):
    """Raised for a reduction-system name outside the built-in seven."""


class StepBudgetExceeded(RuntimeError):
    """The rewrite step cap was hit; signals a broken rule set."""


class NoMatchAtPosition(ValueError):
    """reduce_at was called at a position whose columns match no rule."""


DEFAULT_STEP_BUDGET = 10**7
DEFAULT_NODE_BUDGET = 200_000

# One replacement term: (coefficient, (top letters), (bottom letters)).
Replacement = tuple[LaurentPoly, tuple[int, int], tuple[int, int]]


class Rule(NamedTuple):
    tag: str
    guard: Callable[[int, int, int, int], bool]
    rhs: Callable[[int, int, int, int], tuple[Replacement, ...]]


class ReductionSystem:
    """Named set of guarded templates; guards are mutually exclusive."""

    __slots__ = ("name", "rules")

    def __init__(self, name: str, rules: tuple[Rule, ...]):
        self.name = name
        self.rules = rules

    def match(self, x: int, y: int, a: int, b: int):
        """Match the column pair ((x|a),(y|b)); return (tag, replacements)."""
        for rule in self.rules:
            if rule.guard(x, y, a, b):
                return rule.tag, rule.rhs(x, y, a, b)
        return None

    def __repr__(self) -> str:
        return "ReductionSystem(%r)" % self.name


def v_sign(x: int, y: int, a: int, b: int) -> int:
    """Sign of (a-x-1/2)(a-y-1/2)(b-x-1/2)(b-y-1/2), denominators cleared.

    Every factor of the integer product is odd, so the product is never
    zero; the two sign cases exhaust all top-descent pairs.
    """
    p = (
        (2 * a - 2 * x - 1)
        * (2 * a - 2 * y - 1)
        * (2 * b - 2 * x - 1)
        * (2 * b - 2 * y - 1)
    )
    assert p != 0
    return 1 if p > 0 else -1


_P_Q2 = LaurentPoly.q_power(2)
_P_Q_MINUS_QINV = P_Q - P_QINV
_P_MINUS_ONE = LaurentPoly.const(-1)
_P_MINUS_QINV = -P_QINV


def _build_systems() -> dict[str, ReductionSystem]:
    def swap(coeff: LaurentPoly):
        return lambda x, y, a, b: ((coeff, (y, x), (b, a)),)

    sm = ReductionSystem(
        "sm",
        (Rule("swap", lambda x, y, a, b: x > y, swap(P_ONE)),),
    )
    sf = ReductionSystem(
        "sf",
        (Rule("swap", lambda x, y, a, b: x > y, swap(P_ONE)),),
    )
    sf_q = ReductionSystem(
        "sf_q",
        (
            Rule("swap", lambda x, y, a, b: x > y and a > b, swap(P_ONE)),
            Rule("swap-q", lambda x, y, a, b: x > y and a == b, swap(P_Q)),
            Rule("swap-q2", lambda x, y, a, b: x > y and a < b, swap(_P_Q2)),
        ),
    )
    sq_q = ReductionSystem(
        "sq_q",
        (
            Rule("bottom-equal", lambda x, y, a, b: x > y and a == b, swap(P_Q)),
            Rule(
                "top-equal",
                lambda x, y, a, b: x == y and a > b,
                lambda x, y, a, b: ((P_Q, (x, x), (b, a)),),
            ),
            Rule("swap", lambda x, y, a, b: x > y and a < b, swap(P_ONE)),
            Rule(
                "swap-plus",
                lambda x, y, a, b: x > y and a > b,
                lambda x, y, a, b: (
                    (P_ONE, (y, x), (b, a)),
                    (_P_Q_MINUS_QINV, (y, x), (a, b)),
                ),
            ),
        ),
    )
    sr = ReductionSystem(
        "sr",
        (
            Rule("bottom-equal", lambda x, y, a, b: x > y and a == b, swap(P_ONE)),
            Rule(
                "bottom-descent",
                lambda x, y, a, b: x > y and a > b,
                lambda x, y, a, b: (
                    (P_ONE, (y, x), (b, a)),
                    (P_ONE, (y, x), (a, b)),
                    (_P_MINUS_ONE, (x, y), (b, a)),
                ),
            ),
        ),
    )
    sr_q = ReductionSystem(
        "sr_q",
        (
            Rule("bottom-equal", lambda x, y, a, b: x > y and a == b, swap(P_Q)),
            Rule(
                "bottom-descent",
                lambda x, y, a, b: x > y and a > b,
                lambda x, y, a, b: (
                    (P_ONE, (y, x), (b, a)),
                    (P_Q, (y, x), (a, b)),
                    (_P_MINUS_QINV, (x, y), (b, a)),
                ),
            ),
        ),
    )
    sh = ReductionSystem(
        "sh",
        (
            Rule(
                "top-swap",
                lambda x, y, a, b: x > y and v_sign(x, y, a, b) > 0,
                lambda x, y, a, b: ((P_ONE, (y, x), (a, b)),),
            ),
            Rule(
                "column-swap",
                lambda x, y, a, b: x > y and v_sign(x, y, a, b) < 0,
                lambda x, y, a, b: ((P_ONE, (y, x), (b, a)),),
            ),
        ),
    )
    return {s.name: s for s in (sm, sf, sf_q, sq_q, sr, sr_q, sh)}


_SYSTEMS = _build_systems()
SYSTEM_NAMES = tuple(_SYSTEMS)


def builtin_system(name: Union[str, ReductionSystem]) -> ReductionSystem:
    if isinstance(name, ReductionSystem):
        return name
    try:
        return _SYSTEMS[name.lower()]
    except KeyError:
        raise UnknownSystem(
            "unknown system %r (expected one of %s)" % (name, ", ".join(SYSTEM_NAMES))
        ) from None


def measure(bw: Biword) -> tuple[int, int]:
    """Termination measure, lexicographic (inv(top), inv(bottom))."""
    return (inversions(bw.top), inversions(bw.bottom))


def leftmost_site(system: ReductionSystem, bw: Biword):
    """First matching adjacent pair, as (0-based index, tag, replacements)."""
    top, bottom = bw.top, bw.bottom
    for i in range(len(top) - 1):
        m = system.match(top[i], top[i + 1], bottom[i], bottom[i + 1])
        if m is not None:
            return i, m[0], m[1]
    return None


def is_irreducible(system: ReductionSystem, bw: Biword) -> bool:
    """True iff no adjacent column pair of bw matches the system."""
    return leftmost_site(builtin_system(system), bw) is None


def expression_is_irreducible(system: ReductionSystem, expr: Expression) -> bool:
    system = builtin_system(system)
    return all(leftmost_site(system, bw) is None for bw in expr.terms)


def _embed(bw: Biword, i: int, repl: Replacement) -> Biword:
    """Replace columns i, i+1 (0-based) of bw by the replacement columns."""
    coeff, (t1, t2), (b1, b2) = repl
    top = bw.top[:i] + (t1, t2) + bw.top[i + 2:]
    bottom = bw.bottom[:i] + (b1, b2) + bw.bottom[i + 2:]
    return Biword(top, bottom)


def reduce_at(system: ReductionSystem, bw: Biword, position: int) -> Expression:
    """Single rewrite at 1-based position, embedded in context."""
    system = builtin_system(system)
    if not 1 <= position < len(bw.top):
        raise NoMatchAtPosition(
            "position %d out of range for length %d" % (position, len(bw.top))
        )
    i = position - 1
    m = system.match(bw.top[i], bw.top[i + 1], bw.bottom[i], bw.bottom[i + 1])
    if m is None:
        raise NoMatchAtPosition(
            "columns %d,%d of %s match no %s rule" % (position, position + 1, bw, system.name)
        )
    out: dict[Biword, LaurentPoly] = {}
    for repl in m[1]:
        nbw = _embed(bw, i, repl)
        s = out.get(nbw, P_ZERO) + repl[0]
        if s.is_zero:
            out.pop(nbw, None)
        else:
            out[nbw] = s
    return Expression(out, _normalized=True)


def leftmost_reduce(
    system: ReductionSystem,
    expr: Union[Expression, Biword],
    budget: Optional[int] = None,
) -> Expression:
    """Normal form of an expression under the leftmost-reduction operator.

    Linear over terms; each reducible support biword is rewritten at its
    leftmost matching pair until every term is irreducible.  Terms are
    processed in decreasing measure order, so coefficients accumulate (and
    cancel) before a biword is expanded and no biword is expanded twice.
    """
    system = builtin_system(system)
    if isinstance(expr, Biword):
        expr = Expression.single(expr)
    if budget is None:
        budget = DEFAULT_STEP_BUDGET
    pending: dict[Biword, LaurentPoly] = dict(expr.terms)
    heap = [
        (-inversions(bw.top), -inversions(bw.bottom), bw) for bw in pending
    ]
    heapq.heapify(heap)
    result: dict[Biword, LaurentPoly] = {}
    steps = 0
    while heap:
        _, _, bw = heapq.heappop(heap)
        coeff = pending.pop(bw, None)
        if coeff is None or coeff.is_zero:
            continue
        site = leftmost_site(system, bw)
        if site is None:
            result[bw] = coeff
            continue
        steps += 1
        if steps > budget:
            raise StepBudgetExceeded(
                "%s exceeded %d rewrite steps" % (system.name, budget)
            )
        i, _tag, repls = site
        for repl in repls:
            nbw = _embed(bw, i, repl)
            add = coeff * repl[0]
            old = pending.get(nbw)
            if old is None:
                pending[nbw] = add
                heapq.heappush(
                    heap, (-inversions(nbw.top), -inversions(nbw.bottom), nbw)
                )
            else:
                pending[nbw] = old + add
    return Expression(result, _normalized=True)


# ---------------------------------------------------------------------------
# All-strategies exploration.
# ---------------------------------------------------------------------------


class Step(NamedTuple):
    """One rewrite choice: which support biword, at which 1-based position."""

    source: Biword
    position: int
    tag: str


@dataclass
class NormalFormSet:
    """Distinct irreducible expressions reachable from a starting point."""

    start: Expression
    forms: list[Expression]
    traces: list[list[Step]]
    complete: bool
    explored: int

    def form_count(self) -> int:
        return len(self.forms)


def _apply_step(expr: Expression, bw: Biword, coeff: LaurentPoly, i: int,
                repls: tuple[Replacement, ...]) -> Expression:
    out = dict(expr.terms)
    del out[bw]
    for repl in repls:
        nbw = _embed(bw, i, repl)
        s = out.get(nbw, P_ZERO) + coeff * repl[0]
        if s.is_zero:
            out.pop(nbw, None)
        else:
            out[nbw] = s
    return Expression(out, _normalized=True)


def _successors(system: ReductionSystem, expr: Expression):
    """All one-step rewrites of expr, deterministically ordered."""
    succs = []
    for bw, coeff in expr.items_canonical():
        top, bottom = bw.top, bw.bottom
        for i in range(len(top) - 1):
            m = system.match(top[i], top[i + 1], bottom[i], bottom[i + 1])
            if m is None:
                continue
            tag, repls = m
            succs.append(
                (Step(bw, i + 1, tag), _apply_step(expr, bw, coeff, i, repls))
            )
    return succs


def enumerate_normal_forms(
    system: ReductionSystem,
    start: Union[Expression, Biword],
    budget: int = DEFAULT_NODE_BUDGET,
) -> NormalFormSet:
    """Breadth-first search over the rewrite graph from ``start``.

    Nodes are normalized expressions (so converging branches merge);
    every node with no reducible support term is a normal form.  Each
    form carries one witnessing sequence of steps.  When the node budget
    is hit the set found so far is returned with ``complete=False``.
    """
    system = builtin_system(system)
    if isinstance(start, Biword):
        start = Expression.single(start)
    start_key = start.key()
    parents: dict[tuple, Optional[tuple]] = {start_key: None}
    exprs = {start_key: start}
    queue = deque([start_key])
    nf_keys: list[tuple] = []
    explored = 0
    complete = True
    while queue:
        if explored >= budget:
            complete = False
            break
        key = queue.popleft()
        explored += 1
        expr = exprs[key]
        succs = _successors(system, expr)
        if not succs:
            nf_keys.append(key)
            continue
        for step, nxt in succs:
            k2 = nxt.key()
            if k2 not in parents:
                parents[k2] = (key, step)
                exprs[k2] = nxt
                queue.append(k2)
    nf_keys.sort()
    forms = [exprs[k] for k in nf_keys]
    traces = []
    for k in nf_keys:
        steps: list[Step] = []
        cur = parents[k]
        while cur is not None:
            pkey, step = cur
            steps.append(step)
            cur = parents[pkey]
        traces.append(list(reversed(steps)))
    return NormalFormSet(start, forms, traces, complete, explored)


def trace_lines(
    system: ReductionSystem,
    start: Union[Expression, Biword],
    steps: list[Step],
    with_tags: bool = False,
) -> list[str]:
    """Replay a witness trace; one line per step: 'pos=i: <expression>'."""
    system = builtin_system(system)
    expr = Expression.single(start) if isinstance(start, Biword) else start
    lines = []
    for step in steps:
        coeff = expr.terms[step.source]
        i = step.position - 1
        bw = step.source
        m = system.match(bw.top[i], bw.top[i + 1], bw.bottom[i], bw.bottom[i + 1])
        if m is None:
            raise NoMatchAtPosition("trace step %r does not apply" % (step,))
        expr = _apply_step(expr, bw, coeff, i, m[1])
        if with_tags:
            lines.append("pos=%d [%s]: %s" % (step.position, step.tag, expr))
        else:
            lines.append("pos=%d: %s" % (step.position, expr))
    return lines


# ---------------------------------------------------------------------------
# Strategy-independence harness.
# ---------------------------------------------------------------------------


def _strategy_outcomes(system: ReductionSystem, bw: Biword, memo: dict):
    """All normal forms of a single biword under arbitrary strategies.

    Returns ("unique", expr) or ("multi", {key: expr, ...}).  When every
    support biword of a one-step successor has a unique outcome, linearity
    collapses the successor's outcome to the combination of those normal
    forms, so the recursion stays at the biword level; a full graph search
    is only needed once some sub-biword is already strategy-dependent.
    """
    hit = memo.get(bw)
    if hit is not None:
        return hit
    top, bottom = bw.top, bw.bottom
    sites = []
    for i in range(len(top) - 1):
        m = system.match(top[i], top[i + 1], bottom[i], bottom[i + 1])
        if m is not None:
            sites.append((i, m[1]))
    if not sites:
        info = ("unique", Expression.single(bw))
        memo[bw] = info
        return info
    outcomes: dict[tuple, Expression] = {}
    for i, repls in sites:
        one_step = _apply_step(Expression.single(bw), bw, P_ONE, i, repls)
        parts = {}
        collapsed = True
        for sub in one_step.terms:
            sub_info = _strategy_outcomes(system, sub, memo)
            if sub_info[0] != "unique":
                collapsed = False
                break
            parts[sub] = sub_info[1]
        if collapsed:
            combined = Expression.zero()
            for sub, c in one_step.terms.items():
                combined = combined + parts[sub].scale(c)
            outcomes[combined.key()] = combined
        else:
            nfs = enumerate_normal_forms(system, one_step)
            for form in nfs.forms:
                outcomes[form.key()] = form
    if len(outcomes) == 1:
        info = ("unique", next(iter(outcomes.values())))
    else:
        info = ("multi", outcomes)
    memo[bw] = info
    return info


def strategy_normal_forms(system: ReductionSystem, bw: Biword, memo=None) -> list[Expression]:
    """Normal forms of bw over all strategies, canonically ordered."""
    system = builtin_system(system)
    if memo is None:
        memo = {}
    info = _strategy_outcomes(system, bw, memo)
    if info[0] == "unique":
        return [info[1]]
    return [info[1][k] for k in sorted(info[1])]


def all_biwords(r: int, n: int):
    """All biwords of length n over letters 1..r, in canonical order."""
    words = list(itertools.product(range(1, r + 1), repeat=n))
    for top in words:
        for bottom in words:
            yield Biword(top, bottom)


def random_biword(rng: random.Random, r: int, n: int) -> Biword:
    top = tuple(rng.randint(1, r) for _ in range(n))
    bottom = tuple(rng.randint(1, r) for _ in range(n))
    return Biword(top, bottom)


def random_circuit(rng: random.Random, r: int, n: int) -> Biword:
    """Random biword whose top is a rearrangement of its bottom."""
    bottom = tuple(rng.randint(1, r) for _ in range(n))
    top = list(bottom)
    rng.shuffle(top)
    return Biword(tuple(top), bottom)


def random_circuit_expression(
    rng: random.Random, r: int, max_len: int, max_terms: int = 4
) -> Expression:
    """Random circuit-supported expression with small monomial coefficients."""
    expr = Expression.zero()
    for _ in range(rng.randint(1, max_terms)):
        bw = random_circuit(rng, r, rng.randint(0, max_len))
        coeff = LaurentPoly.monomial(
            rng.choice([-2, -1, 1, 2]), 0, rng.randint(-1, 1)
        )
        expr = expr + Expression.single(bw, coeff)
    return expr


@dataclass
class UniquenessReport:
    """Outcome of the desk-scale reduction-uniqueness scan."""

    system: str
    r: int
    max_len: int
    scanned: dict[int, tuple[int, str]]  # length -> (count, "exhaustive"/"sampled")
    violation: Optional[Biword]
    violation_forms: list[Expression] = field(default_factory=list)
    c5_checked: int = 0
    c5_failures: list[tuple[Biword, int, int]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.violation is None and not self.c5_failures

    def to_dict(self) -> dict:
        return {
            "system": self.system,
            "r": self.r,
            "maxLen": self.max_len,
            "scanned": {
                str(n): {"count": c, "mode": m} for n, (c, m) in sorted(self.scanned.items())
            },
            "violation": str(self.violation) if self.violation else None,
            "violationForms": [str(f) for f in self.violation_forms],
            "c5Checked": self.c5_checked,
            "c5Failures": [
                {"biword": str(bw), "i": i, "j": j} for bw, i, j in self.c5_failures
            ],
            "pass": self.passed,
        }


def check_reduction_unique(
    system: ReductionSystem,
    r: int,
    max_len: int,
    samples: int = 200,
    seed: int = 0,
    exhaustive_cap: int = 10_000,
    c5_samples: int = 100,
    budget: Optional[int] = None,
) -> UniquenessReport:
    """Scan biwords up to max_len for strategy-dependent normal forms.

    Lengths whose full biword count r^(2n) fits under ``exhaustive_cap``
    are enumerated exhaustively in canonical order (so the first violating
    biword reported is deterministic); longer lengths are sampled.  Also
    spot-checks the factor-substitution law [b1 b2 b3] = [b1 [b2] b3] on
    seeded random factorizations.
    """
    system = builtin_system(system)
    rng = random.Random(seed)
    memo: dict = {}
    scanned: dict[int, tuple[int, str]] = {}
    violation = None
    violation_forms: list[Expression] = []
    for n in range(2, max_len + 1):
        total = r ** (2 * n)
        if total <= exhaustive_cap:
            pool = all_biwords(r, n)
            mode = "exhaustive"
            count = total
        else:
            pool = (random_biword(rng, r, n) for _ in range(samples))
            mode = "sampled"
            count = samples
        scanned[n] = (count, mode)
        for bw in pool:
            forms = strategy_normal_forms(system, bw, memo)
            if len(forms) > 1:
                violation = bw
                violation_forms = forms
                break
        if violation is not None:
            break
    c5_failures: list[tuple[Biword, int, int]] = []
    c5_checked = 0
    for _ in range(c5_samples):
        n = rng.randint(2, max_len)
        bw = random_biword(rng, r, n)
        i = rng.randint(0, n)
        j = rng.randint(i, n)
        b1 = Biword(bw.top[:i], bw.bottom[:i])
        b2 = Biword(bw.top[i:j], bw.bottom[i:j])
        b3 = Biword(bw.top[j:], bw.bottom[j:])
        inner = leftmost_reduce(system, b2, budget)
        spliced = Expression.single(b1) * inner * Expression.single(b3)
        lhs = leftmost_reduce(system, bw, budget)
        rhs = leftmost_reduce(system, spliced, budget)
        c5_checked += 1
        if lhs != rhs:
            c5_failures.append((bw, i, j))
    return UniquenessReport(
        system.name, r, max_len, scanned, violation, violation_forms,
        c5_checked, c5_failures,
    )


def count_irreducible(system: ReductionSystem, r: int, n: int) -> int:
    """Census of irreducible biwords of length n over letters 1..r."""
    system = builtin_system(system)
    return sum(1 for bw in all_biwords(r, n) if leftmost_site(system, bw) is None)
