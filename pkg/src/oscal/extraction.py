"""Subsequence extraction with exactly checkable witnesses.

Given a sequence of continuous functions converging pointwise to a limit
with positive stage values, this module extracts a subsequence, a handful
of points, and positive jumps delta_j, packaged as a WitnessBundle whose
defining inequalities can be re-verified by exact rational arithmetic.
The checkers are deliberately independent of the construction: they only
consume the bundle and the sequence, and every infinite sum they face is
finite in disguise (the generators below have exact, eventually-zero
tails), so a verdict is a certainty about the given data, not an estimate.

Two generator shapes are supported.  ``EventuallyLimit`` lists finitely
many explicit terms and then repeats the limit.  ``MovingStep`` moves a
discontinuity outward: term j agrees with the limit except that any path
entering copy >= j of a moving pattern is cut there, so the value of an
old copy is frozen at the limit node's value.  Both make the tail sums
sum_{j >= m} |f_j(x) - f(x)| computable in closed form, which is what
turns the classical "choose an infinite subset with small tails" steps
into terminating searches.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

from .errors import (
    InternalCheckError,
    PreconditionError,
    SearchExhaustedError,
)
from .func import QFunction, Scalar, is_continuous
from .rationals import (
    GaussianRational,
    IntervalSum,
    Verdict,
    rat,
    rational_abs,
    sqrt_bracket,
    verdict_all,
)
from .space import (
    PointRef,
    PrefixStep,
    RecurringStep,
    TreeSpace,
    descend_path,
    point_at,
    resolve,
    truncate_point,
)
from .transfinite import iterate, level_set_witness, v_pre_step

WITNESS_SCAN_CAP = 1_000_000


def _abs_upper(z: Scalar) -> Fraction:
    """Rational upper bound on |z|, exact whenever |z| is rational."""
    if isinstance(z, GaussianRational):
        a = rational_abs(z)
        return a if a is not None else sqrt_bracket(z.abs_squared())[1]
    return abs(z)


def _add_abs(acc: IntervalSum, z: Scalar) -> None:
    if isinstance(z, GaussianRational):
        acc.add_abs(z)
    else:
        acc.add_rational(abs(z))


# -- copy-indexed functions ---------------------------------------------------


@dataclass(frozen=True)
class CopyTable:
    """Finitely many copy-indexed values, then a constant tail."""

    entries: tuple[tuple[int, Scalar], ...]
    tail: Scalar

    def __post_init__(self) -> None:
        ks = [k for k, _ in self.entries]
        if any(k < 1 for k in ks):
            raise PreconditionError("copy indices start at 1")
        if len(set(ks)) != len(ks):
            raise PreconditionError("duplicate copy index in table")
        object.__setattr__(
            self, "entries", tuple(sorted(self.entries, key=lambda e: e[0]))
        )

    def lookup(self, k: int) -> Scalar:
        for key, v in self.entries:
            if key == k:
                return v
        return self.tail

    def is_constant(self) -> bool:
        return all(v == self.tail for _, v in self.entries)


@dataclass(frozen=True)
class CIFunction:
    """Node function whose value may depend on the copy index of the last
    recurring step of the path (the nearest recurring ancestor); paths with
    no recurring step take the tail value.  Eventually constant in every
    copy index by construction."""

    space: TreeSpace
    tables: dict

    def __post_init__(self) -> None:
        self.space.require_valid()
        fixed = {}
        for i, t in self.tables.items():
            if not isinstance(t, CopyTable):
                raise PreconditionError("node %r: expected a CopyTable" % i)
            fixed[int(i)] = t
        if set(fixed) != set(self.space.node_ids()):
            raise PreconditionError("tables must cover the nodes exactly")
        object.__setattr__(self, "tables", fixed)

    def at_point(self, point: PointRef) -> Scalar:
        node = resolve(self.space, point)
        copy = 0
        for s in point.steps:
            if isinstance(s, RecurringStep):
                copy = s.copy
        table = self.tables[node]
        return table.tail if copy == 0 else table.lookup(copy)

    def is_constant(self) -> bool:
        return all(t.is_constant() for t in self.tables.values())

    def as_qfunction(self) -> QFunction:
        if not self.is_constant():
            raise PreconditionError(
                "copy-indexed function does not reduce to a node function"
            )
        return QFunction(
            self.space, {i: t.tail for i, t in self.tables.items()}
        )


# -- convergent sequences of continuous functions -----------------------------


@dataclass(frozen=True)
class EventuallyLimit:
    """f_1 .. f_J explicit, f_j = limit for j > J."""

    prefix: tuple[QFunction, ...] = ()


@dataclass(frozen=True)
class MovingStep:
    """f_j(x) = limit(cut of x before its first moving copy >= j).

    ``moving`` is a set of pattern-root node ids; None means every
    recurring pattern moves.  With every pattern moving, each f_j is
    locally constant, hence continuous.  A restricted moving set is only
    accepted when the limit is constant on each non-moving pattern's
    subtree (matching the value at the limit node it accumulates to);
    otherwise old copies of a non-moving pattern would keep their shape
    at every stage j and f_j could not be continuous.
    """

    moving: Optional[frozenset[int]] = None


Generator = Union[EventuallyLimit, MovingStep]


@dataclass(frozen=True)
class FunctionSeq:
    """Pointwise-convergent sequence with exact tail bounds."""

    limit: QFunction
    generator: Generator

    def __post_init__(self) -> None:
        sp = self.space
        sp.require_valid()
        if isinstance(self.generator, EventuallyLimit):
            if not is_continuous(self.limit):
                raise PreconditionError(
                    "an eventually-constant sequence of continuous terms "
                    "has a continuous limit; this limit is not"
                )
            for idx, g in enumerate(self.generator.prefix):
                if g.space is not sp and g.space != sp:
                    raise PreconditionError(
                        "prefix term %d lives on a different space" % (idx + 1)
                    )
                if not is_continuous(g):
                    raise PreconditionError(
                        "prefix term %d is not continuous" % (idx + 1)
                    )
        else:
            moving = self.generator.moving
            roots = self._pattern_roots()
            if moving is not None:
                moving = frozenset(int(p) for p in moving)
                object.__setattr__(
                    self, "generator", MovingStep(moving)
                )
                if not moving <= roots:
                    raise PreconditionError(
                        "moving set must consist of recurring pattern roots"
                    )
                self._check_restricted_continuity(moving)

    @property
    def space(self) -> TreeSpace:
        return self.limit.space

    def _pattern_roots(self) -> frozenset[int]:
        sp = self.space
        out = set()
        for i in sp.limit_nodes():
            out.update(sp.node(i).recurring)
        return frozenset(out)

    def _check_restricted_continuity(self, moving: frozenset[int]) -> None:
        # A non-moving pattern repeats with the same values in every copy,
        # so continuity at the node it accumulates to forces the limit to
        # be constant there.  Cuts inside the subtree produce values of
        # the same subtree, so constancy also covers truncated paths.
        sp = self.space
        f = self.limit
        for p in sp.limit_nodes():
            for pat in sp.node(p).recurring:
                if pat in moving:
                    continue
                bad = [
                    y
                    for y in sorted(sp.subtree(pat))
                    if f(y) != f(p)
                ]
                if bad:
                    raise PreconditionError(
                        "pattern %d does not move, so every term keeps its "
                        "values on all copies; continuity then needs the "
                        "limit to be constantly limit(%d) on that subtree "
                        "(differs at node %d)" % (pat, p, bad[0])
                    )

    # evaluation ---------------------------------------------------------

    def eval(self, j: int, x: PointRef) -> Scalar:
        if j < 1:
            raise PreconditionError("sequence indices start at 1")
        g = self.generator
        if isinstance(g, EventuallyLimit):
            if j <= len(g.prefix):
                return g.prefix[j - 1].at_point(x)
            return self.limit.at_point(x)
        cut = truncate_point(self.space, x, j, g.moving)
        return self.limit.at_point(cut)

    def support_threshold(self, x: PointRef) -> int:
        """A threshold T with f_j(x) = limit(x) for every j > T (the
        largest moving copy index along the path, or the prefix length)."""
        g = self.generator
        if isinstance(g, EventuallyLimit):
            return len(g.prefix)
        resolve(self.space, x)
        sp = self.space
        cur = sp.root
        best = 0
        for s in x.steps:
            n = sp.node(cur)
            if isinstance(s, RecurringStep):
                pat = n.recurring[s.pattern]
                if g.moving is None or pat in g.moving:
                    best = max(best, s.copy)
                cur = pat
            else:
                cur = n.prefix[s.child]
        return best

    def tail_terms(self, x: PointRef, m: int) -> list[tuple[int, Scalar]]:
        """All (j, f_j(x) - f(x)) with j >= m and a nonzero difference."""
        if m < 1:
            raise PreconditionError("tail start must be at least 1")
        base = self.limit.at_point(x)
        out = []
        for j in range(m, self.support_threshold(x) + 1):
            d = self.eval(j, x) - base
            if isinstance(d, GaussianRational):
                if not d.is_zero():
                    out.append((j, d))
            elif d != 0:
                out.append((j, d))
        return out

    def tail_bound(self, x: PointRef, m: int) -> Fraction:
        """Rational B >= sum_{j>=m} |f_j(x) - f(x)|; exact when every
        difference has rational modulus (always, for real sequences)."""
        return sum(
            (_abs_upper(d) for _, d in self.tail_terms(x, m)), Fraction(0)
        )

    def uniform_bound(self) -> Fraction:
        """Rational bound on |f_j| over all j and all points."""
        vals = list(self.limit.values.values())
        if isinstance(self.generator, EventuallyLimit):
            for g in self.generator.prefix:
                vals.extend(g.values.values())
        return max(_abs_upper(v) for v in vals)


def seq_eval(seq: FunctionSeq, j: int, x: PointRef) -> Scalar:
    return seq.eval(j, x)


def seq_tail_bound(seq: FunctionSeq, x: PointRef, m: int) -> Fraction:
    return seq.tail_bound(x, m)


# -- subsequence bookkeeping --------------------------------------------------


@dataclass(frozen=True)
class IndexSeq:
    """Strictly increasing index map i -> n_i: an explicit prefix followed
    by the arithmetic tail n_i = i + offset."""

    prefix: tuple[int, ...] = ()
    offset: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "prefix", tuple(int(p) for p in self.prefix))
        vals = list(self.prefix) + [len(self.prefix) + 1 + self.offset]
        if any(v < 1 for v in vals):
            raise PreconditionError("indices must be positive")
        if any(a >= b for a, b in zip(vals, vals[1:])):
            raise PreconditionError("index sequence must be increasing")

    def value(self, i: int) -> int:
        if i < 1:
            raise PreconditionError("positions start at 1")
        if i <= len(self.prefix):
            return self.prefix[i - 1]
        return i + self.offset

    def values_upto(self, s: int) -> list[int]:
        return [self.value(i) for i in range(1, s + 1)]

    def compose(self, inner: "IndexSeq") -> "IndexSeq":
        """(self o inner)(i) = self(inner(i)), again an IndexSeq."""
        cut = max(len(inner.prefix), len(self.prefix) - inner.offset, 0)
        prefix = tuple(self.value(inner.value(i)) for i in range(1, cut + 1))
        return IndexSeq(prefix, self.offset + inner.offset)

    @staticmethod
    def identity() -> "IndexSeq":
        return IndexSeq((), 0)


@dataclass(frozen=True)
class ExtractionPlan:
    """Output of extract_subsequence: indices, the tail descriptor, and a
    witness search bound to the extraction data."""

    seq: FunctionSeq
    x1: PointRef
    level_set: frozenset[int]
    delta: Fraction
    eta: Fraction
    indices: IndexSeq
    count: int
    _witness: Callable[[int], PointRef] = field(repr=False)

    @property
    def index_list(self) -> list[int]:
        return self.indices.values_upto(self.count)

    def tail_indices(self, s: int) -> IndexSeq:
        """The infinite index set left after the first s picks: the
        arithmetic tail {n_s + 1, n_s + 2, ...}."""
        return IndexSeq((), self.indices.value(s))

    def witness(self, m: int) -> PointRef:
        """A point x2 in the level set, realized below x1, satisfying the
        three jump-witness conditions for this m."""
        return self._witness(m)


def _phi(seq: FunctionSeq) -> QFunction:
    return seq.limit.re()


def _scan_copies(
    seq: FunctionSeq,
    x1: PointRef,
    target: int,
    accept: Callable[[PointRef], bool],
    start: int = 1,
) -> PointRef:
    """Realize ``target`` below x1, scanning the copy index upward on the
    new recurring steps until ``accept`` holds."""
    sp = seq.space
    path = descend_path(sp, resolve(sp, x1), target)
    tried = 0
    c = start
    while tried < WITNESS_SCAN_CAP:
        steps = [
            PrefixStep(pos) if slot == "p" else RecurringStep(pos, c)
            for slot, pos in path
        ]
        cand = x1.extend(*steps)
        if accept(cand):
            return cand
        tried += 1
        c += 1
    raise SearchExhaustedError(
        "no witness realization within the copy-index cap", tried=tried
    )


def extract_subsequence(
    seq: FunctionSeq,
    x1: PointRef,
    level_set,
    delta,
    eta,
    s: int,
) -> ExtractionPlan:
    """Pick indices n_1 < ... < n_s and a witness search for points below x1.

    The index choice makes the tail sum at x1 small: n_1 starts the first
    arithmetic tail {a, a+1, ...} whose exact tail sum at x1 is below
    eta*delta, and successive picks take least elements, so the whole
    subsequence is the tail itself.  witness(m) then searches copy
    indices upward for a realization x2 of the best jump target with

      1)  phi(x2) - phi(x1) > (1 - eta) delta
      2)  sum_{i < m} |b_i(x2) - f(x1)| < eta delta
      3)  sum_{i >= m} |b_i(x2) - f(x2)| < eta delta

    with b_i = f_{n_i}; every sum is evaluated exactly.
    """
    delta = rat(delta)
    eta = rat(eta)
    if not 0 < eta < 1:
        raise PreconditionError("eta must lie strictly between 0 and 1")
    if s < 1:
        raise PreconditionError("need at least one index")
    sp = seq.space
    x1_node = resolve(sp, x1)
    if sp.is_leaf(x1_node):
        raise PreconditionError("nothing accumulates at an isolated point")
    level = frozenset(int(y) for y in level_set)
    phi = _phi(seq)
    pool = [y for y in sorted(sp.acc(x1_node)) if y in level]
    if not pool:
        raise PreconditionError("the level set misses Acc(x1)")
    best = max(phi(y) - phi(x1_node) for y in pool)
    if best <= 0:
        raise PreconditionError(
            "no positive jump from x1 into the level set"
        )
    if best != delta:
        raise PreconditionError(
            "delta is %s but the attained maximum is %s" % (delta, best)
        )
    target = min(y for y in pool if phi(y) - phi(x1_node) == best)

    bound = eta * delta
    a = 1
    while seq.tail_bound(x1, a) >= bound:
        a += 1
    indices = IndexSeq((), a - 1)

    f = seq.limit

    def conditions(m: int, x2: PointRef) -> bool:
        fx1 = f.at_point(x1)
        fx2 = f.at_point(x2)
        head = IntervalSum()
        for i in range(1, m):
            _add_abs(head, seq.eval(indices.value(i), x2) - fx1)
        cond2 = head.less_than(bound)
        tail = IntervalSum()
        top = seq.support_threshold(x2)
        i = m
        while indices.value(i) <= top:
            _add_abs(tail, seq.eval(indices.value(i), x2) - fx2)
            i += 1
        cond3 = tail.less_than(bound)
        jump = phi.at_point(x2) - phi.at_point(x1) > (1 - eta) * delta
        c1 = Verdict.TRUE if jump else Verdict.FALSE
        return verdict_all([c1, cond2, cond3]) is Verdict.TRUE

    def witness(m: int) -> PointRef:
        if m < 1:
            raise PreconditionError("positions start at 1")
        return _scan_copies(
            seq, x1, target, lambda cand: conditions(m, cand)
        )

    return ExtractionPlan(
        seq=seq,
        x1=x1,
        level_set=level,
        delta=delta,
        eta=eta,
        indices=indices,
        count=s,
        _witness=witness,
    )


# -- checkers -----------------------------------------------------------------


def check_jump_witness(
    seq: FunctionSeq,
    indices: IndexSeq,
    x1: PointRef,
    x2: PointRef,
    m: int,
    delta,
    eta,
) -> Verdict:
    """The three conditions a single jump witness must satisfy, verified
    exactly against the sequence; three-valued only when complex moduli
    are genuinely irrational and the bracket straddles the bound."""
    delta = rat(delta)
    eta = rat(eta)
    if not 0 < eta < 1:
        raise PreconditionError("eta must lie strictly between 0 and 1")
    if m < 1:
        raise PreconditionError("positions start at 1")
    phi = _phi(seq)
    f = seq.limit
    verdicts = []
    jump = phi.at_point(x2) - phi.at_point(x1) > (1 - eta) * delta
    verdicts.append(Verdict.TRUE if jump else Verdict.FALSE)
    bound = eta * delta
    head = IntervalSum()
    fx1 = f.at_point(x1)
    for i in range(1, m):
        _add_abs(head, seq.eval(indices.value(i), x2) - fx1)
    verdicts.append(head.less_than(bound))
    tail = IntervalSum()
    fx2 = f.at_point(x2)
    top = seq.support_threshold(x2)
    i = m
    while indices.value(i) <= top:
        _add_abs(tail, seq.eval(indices.value(i), x2) - fx2)
        i += 1
    verdicts.append(tail.less_than(bound))
    return verdict_all(verdicts)


@dataclass(frozen=True)
class WitnessBundle:
    """Everything a checker needs.  Jump-chain form: points x_1..x_{2k}
    with t = x_{2k} and jumps delta_1..delta_k.  Difference form (after
    the reduction): points and deltas empty, t and lam carry the data."""

    indices: IndexSeq
    m: tuple[int, ...]
    k: int
    t: PointRef
    eta: Fraction
    lam: Fraction
    points: tuple[PointRef, ...] = ()
    deltas: tuple[Fraction, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "m", tuple(int(v) for v in self.m))
        object.__setattr__(self, "eta", rat(self.eta))
        object.__setattr__(self, "lam", rat(self.lam))
        object.__setattr__(
            self, "deltas", tuple(rat(d) for d in self.deltas)
        )
        if self.k < 1:
            raise PreconditionError("k must be at least 1")
        if not 0 < self.eta < 1:
            raise PreconditionError("eta must lie strictly between 0 and 1")
        if any(a >= b for a, b in zip(self.m, self.m[1:])):
            raise PreconditionError("m must be strictly increasing")
        if self.points:
            if len(self.points) != 2 * self.k:
                raise PreconditionError("need exactly 2k points")
            if len(self.deltas) != self.k:
                raise PreconditionError("need exactly k jumps")
            if len(self.m) != 2 * self.k:
                raise PreconditionError("need exactly 2k block boundaries")
            if self.points[-1] != self.t:
                raise PreconditionError("t must be the final point")
        if self.m and self.m[0] != 1:
            raise PreconditionError("the first block starts at position 1")


@dataclass(frozen=True)
class JumpChainReport:
    """Named verdicts, one per condition of the jump-chain checker."""

    conditions: dict

    @property
    def verdict(self) -> Verdict:
        vs = list(self.conditions.values())
        if any(v is Verdict.FALSE for v in vs):
            return Verdict.FALSE
        if any(v is Verdict.UNDECIDED for v in vs):
            return Verdict.UNDECIDED
        return Verdict.TRUE

    def failed(self) -> list[str]:
        return [
            name
            for name, v in self.conditions.items()
            if v is not Verdict.TRUE
        ]


def check_jump_chain(seq: FunctionSeq, bundle: WitnessBundle) -> JumpChainReport:
    """Verify a jump chain: k jumps (1-eta)-close to their deltas, the
    delta sum inside the (1 +- eta) lambda window, early block sums at t
    close to the limit values along the chain, and a small final tail."""
    if not bundle.points:
        raise PreconditionError("jump-chain form needs the points")
    k = bundle.k
    phi = _phi(seq)
    f = seq.limit
    eta = bundle.eta
    conditions: dict = {}
    conditions["delta_positive"] = (
        Verdict.TRUE if all(d > 0 for d in bundle.deltas) else Verdict.FALSE
    )
    for j in range(1, k + 1):
        hi = phi.at_point(bundle.points[2 * j - 1])
        lo = phi.at_point(bundle.points[2 * j - 2])
        ok = hi - lo > (1 - eta) * bundle.deltas[j - 1]
        conditions["jump_%d" % j] = Verdict.TRUE if ok else Verdict.FALSE
    total = sum(bundle.deltas, Fraction(0))
    ok = (1 - eta) * bundle.lam < total < (1 + eta) * bundle.lam
    conditions["sum_window"] = Verdict.TRUE if ok else Verdict.FALSE
    for j in range(1, 2 * k):
        acc = IntervalSum()
        fxj = f.at_point(bundle.points[j - 1])
        for i in range(bundle.m[j - 1], bundle.m[j]):
            _add_abs(acc, seq.eval(bundle.indices.value(i), bundle.t) - fxj)
        lim = eta * bundle.deltas[(j + 1) // 2 - 1]
        conditions["block_%d" % j] = acc.less_than(lim)
    tail = IntervalSum()
    ft = f.at_point(bundle.t)
    top = seq.support_threshold(bundle.t)
    i = bundle.m[2 * k - 1]
    while bundle.indices.value(i) <= top:
        _add_abs(tail, seq.eval(bundle.indices.value(i), bundle.t) - ft)
        i += 1
    conditions["tail"] = tail.less_than(eta * bundle.deltas[k - 1])
    return JumpChainReport(conditions)


def check_difference_witness(
    seq: FunctionSeq,
    indices: IndexSeq,
    m: Sequence[int],
    t: PointRef,
    k: int,
    lam,
    eta,
) -> Verdict:
    """Difference-sequence form: with b_i = f_{n_i}, e_1 = b_1 and
    e_i = b_i - b_{i-1},

      1)  sum_{j<=k} Re e_{m_{2j}}(t) > (1 - eta) lam
      2)  Re e_{m_{2j}}(t) > 0 for each j
      3)  sum over i outside {m_1, ..., m_{2k}} of |e_i(t)| < eta lam

    The sum in 3) ranges over all positive integers, but e_i(t) vanishes
    once both b_i and b_{i-1} have left the support of t, so the scan
    terminates."""
    lam = rat(lam)
    eta = rat(eta)
    if not 0 < eta < 1:
        raise PreconditionError("eta must lie strictly between 0 and 1")
    if k < 1:
        raise PreconditionError("k must be at least 1")
    m = [int(v) for v in m]
    if len(m) < 2 * k:
        raise PreconditionError("need at least 2k block boundaries")
    if m[0] != 1:
        raise PreconditionError("the first block starts at position 1")
    if any(a >= b for a, b in zip(m, m[1:])):
        raise PreconditionError("m must be strictly increasing")

    def b(i: int) -> Scalar:
        return seq.eval(indices.value(i), t)

    def e(i: int) -> Scalar:
        return b(i) if i == 1 else b(i) - b(i - 1)

    def re(z: Scalar) -> Fraction:
        return z.re if isinstance(z, GaussianRational) else z

    marked = set(m[: 2 * k])
    verdicts = []
    main = sum((re(e(m[2 * j - 1])) for j in range(1, k + 1)), Fraction(0))
    verdicts.append(
        Verdict.TRUE if main > (1 - eta) * lam else Verdict.FALSE
    )
    positive = all(re(e(m[2 * j - 1])) > 0 for j in range(1, k + 1))
    verdicts.append(Verdict.TRUE if positive else Verdict.FALSE)
    off = IntervalSum()
    top = seq.support_threshold(t)
    i = 1
    while True:
        past_support = indices.value(max(i - 1, 1)) > top and i > 1
        if past_support and i > m[2 * k - 1]:
            break
        if i not in marked:
            _add_abs(off, e(i))
        i += 1
    verdicts.append(off.less_than(eta * lam))
    return verdict_all(verdicts)


def difference_witness_from_chain(
    bundle: WitnessBundle,
) -> WitnessBundle:
    """Reduce a jump-chain bundle to difference form.  eta/5 always
    satisfies the reduction's requirement (1 - 3 eta')(1 - eta') >= 1 - eta
    for 0 < eta < 1, so the reduced bundle keeps exactness."""
    if not bundle.points:
        raise PreconditionError("expected a jump-chain bundle")
    return WitnessBundle(
        indices=bundle.indices,
        m=bundle.m,
        k=bundle.k,
        t=bundle.t,
        eta=bundle.eta / 5,
        lam=bundle.lam,
    )


# -- the driver ---------------------------------------------------------------


def _stage_attainer(pre_stage: QFunction, level: Fraction, around: int) -> int:
    """Smallest node in {around} ∪ Acc(around) whose pre-envelope stage
    value attains ``level``; exists because the enveloped stage at
    ``around`` is the maximum of the pre-stage over exactly that set."""
    sp = pre_stage.space
    candidates = {around}
    if not sp.is_leaf(around):
        candidates |= sp.acc(around)
    for y in sorted(candidates):
        if pre_stage(y) == level:
            return y
    raise InternalCheckError("attained stage value lost its attainer")


def build_jump_chain(
    seq: FunctionSeq, alpha: int, x: int, eta
) -> WitnessBundle:
    """Run the extraction at stage alpha in {1, 2} from node x.

    alpha = 1: locate the jump attainer below x, extract a subsequence,
    search one witness point; k = 1.  alpha = 2: split the stage-2 value
    into a first jump (level-set witness) and a stage-1 remainder at the
    witness point, run the stage-1 construction there with copy indices
    aligned to the block boundaries, and concatenate; k = 2.  The bundle
    is re-checked with the requested eta before being returned."""
    eta = rat(eta)
    if not 0 < eta < 1:
        raise PreconditionError("eta must lie strictly between 0 and 1")
    if alpha not in (1, 2):
        raise PreconditionError("only stages 1 and 2 are supported")
    sp = seq.space
    sp.require_valid()
    if x not in sp.nodes:
        raise PreconditionError("unknown node %r" % x)
    phi = _phi(seq)
    trace = iterate(phi, "v", cap=8)
    v1 = trace.stage(1)

    if alpha == 1:
        lam = v1(x)
        if lam <= 0:
            raise PreconditionError(
                "the first stage vanishes at node %d; nothing to extract" % x
            )
        pre1 = v_pre_step(phi, trace.stage(0))
        x1_node = _stage_attainer(pre1, lam, x)
        x1 = point_at(sp, x1_node)
        delta = lam  # attained maximum; sits strictly inside the window
        plan = extract_subsequence(
            seq, x1, frozenset(sp.node_ids()), delta, eta, s=2
        )
        x2 = plan.witness(2)
        bundle = WitnessBundle(
            indices=plan.indices,
            m=(1, 2),
            k=1,
            t=x2,
            eta=eta,
            lam=lam,
            points=(x1, x2),
            deltas=(delta,),
        )
        report = check_jump_chain(seq, bundle)
        if report.verdict is not Verdict.TRUE:
            raise InternalCheckError(
                "constructed bundle failed: %s" % ", ".join(report.failed())
            )
        return bundle

    v2 = trace.stage(2)
    beta = v2(x)
    if beta <= 0:
        raise PreconditionError(
            "the second stage vanishes at node %d; nothing to extract" % x
        )
    if v1(x) >= beta:
        raise PreconditionError(
            "stages 1 and 2 agree at node %d; run the stage-1 form" % x
        )
    run_eta = eta / 3  # (1 -+ eta/3)^2 stays inside the (1 -+ eta) window
    lw = level_set_witness(phi, 1, x, run_eta)
    x1 = point_at(sp, lw.x1)
    plan = extract_subsequence(
        seq, x1, lw.level_set, lw.delta, lw.eta, s=4
    )
    n = plan.indices
    m = (1, 2, 3, 4)
    x2 = plan.witness(2)
    x2_node = resolve(sp, x2)

    # stage-1 data at the witness point
    lam_in = v1(x2_node)
    if lam_in <= 0:
        raise InternalCheckError("level set delivered a stage-0 point")
    pre1 = v_pre_step(phi, trace.stage(0))
    x3_node = _stage_attainer(pre1, lam_in, x2_node)
    delta2 = lam_in

    # copy windows: the step into x3 must absorb the cuts of block 2 and
    # of no later block, and the final step those of block 3 only.
    c3_lo, c3_hi = n.value(m[1]), n.value(m[2])
    c4_lo, c4_hi = n.value(m[2]), n.value(m[3])

    f = seq.limit

    def realize(base: PointRef, target: int, lo: int, hi: int, check) -> PointRef:
        from .space import PrefixStep

        path = descend_path(sp, resolve(sp, base), target)
        for c in range(lo, hi):
            steps = []
            for slot, pos in path:
                steps.append(
                    PrefixStep(pos) if slot == "p" else RecurringStep(pos, c)
                )
            cand = base.extend(*steps)
            if check(cand):
                return cand
        raise SearchExhaustedError(
            "no realization in the copy window [%d, %d)" % (lo, hi),
            tried=max(hi - lo, 0),
        )

    def x3_ok(cand: PointRef) -> bool:
        acc = IntervalSum()
        fx2 = f.at_point(x2)
        for i in range(m[1], m[2]):
            _add_abs(acc, seq.eval(n.value(i), cand) - fx2)
        return acc.less_than(eta * lw.delta) is Verdict.TRUE

    def t_ok(cand: PointRef) -> bool:
        acc = IntervalSum()
        fx3 = f.at_point(x3)
        for i in range(m[2], m[3]):
            _add_abs(acc, seq.eval(n.value(i), cand) - fx3)
        if acc.less_than(eta * delta2) is not Verdict.TRUE:
            return False
        jump = phi.at_point(cand) - phi.at_point(x3) > (1 - eta) * delta2
        if not jump:
            return False
        tail = IntervalSum()
        ft = f.at_point(cand)
        top = seq.support_threshold(cand)
        i = m[3]
        while n.value(i) <= top:
            _add_abs(tail, seq.eval(n.value(i), cand) - ft)
            i += 1
        return tail.less_than(eta * delta2) is Verdict.TRUE

    x3 = realize(x2, x3_node, c3_lo, c3_hi, x3_ok)
    # the jump target under x3: largest increase of phi, smallest id
    jump_pool = sorted(sp.acc(x3_node))
    jump_best = max(phi(y) - phi(x3_node) for y in jump_pool)
    if jump_best != delta2:
        raise InternalCheckError("stage-1 jump is not attained below x3")
    t_node = min(
        y for y in jump_pool if phi(y) - phi(x3_node) == jump_best
    )
    t = realize(x3, t_node, c4_lo, c4_hi, t_ok)

    bundle = WitnessBundle(
        indices=n,
        m=m,
        k=2,
        t=t,
        eta=eta,
        lam=beta,
        points=(x1, x2, x3, t),
        deltas=(lw.delta, delta2),
    )
    report = check_jump_chain(seq, bundle)
    if report.verdict is not Verdict.TRUE:
        raise InternalCheckError(
            "constructed bundle failed: %s" % ", ".join(report.failed())
        )
    return bundle
