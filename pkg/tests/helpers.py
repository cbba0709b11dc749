"""Shared constructors for the test suite."""

import functools
import random
from fractions import Fraction

from oscal.func import QFunction
from oscal.rationals import GaussianRational
from oscal.sampling import DEFAULT_SEED, build_corpus
from oscal.space import (
    PointRef,
    PrefixStep,
    RecurringStep,
    TreeSpace,
    point_at,
    unroll,
)


def qf(space: TreeSpace, *values) -> QFunction:
    """QFunction from values listed in node-id order."""
    ids = space.node_ids()
    assert len(values) == len(ids)
    return QFunction(space, dict(zip(ids, map(Fraction, values))))


def fmax(f: QFunction, g: QFunction) -> QFunction:
    return QFunction(
        f.space, {i: max(f(i), g(i)) for i in f.space.node_ids()}
    )


def leq(f: QFunction, g: QFunction) -> bool:
    """Pointwise f <= g."""
    return all(f(i) <= g(i) for i in f.space.node_ids())


@functools.lru_cache(maxsize=1)
def corpus():
    return build_corpus(DEFAULT_SEED)


def corpus_pairs():
    """Same-space function pairs, consecutive in corpus order."""
    out = []
    c = corpus()
    for sp in c.spaces:
        fns = c.by_space(sp)
        out.extend(zip(fns, fns[1:]))
    return out


def complex_line_function(rng: random.Random, space: TreeSpace) -> QFunction:
    """Gaussian-rational values whose pairwise differences all have exact
    moduli: c_p * w + shift along a Pythagorean direction w."""
    w = rng.choice(
        [
            GaussianRational(Fraction(3), Fraction(4)),
            GaussianRational(Fraction(5), Fraction(-12)),
            GaussianRational(Fraction(1), Fraction(0)),
            GaussianRational(Fraction(0), Fraction(1)),
            GaussianRational(Fraction(-4, 5), Fraction(3, 5)),
        ]
    )
    shift = GaussianRational(
        Fraction(rng.randint(-3, 3)), Fraction(rng.randint(-3, 3))
    )
    values = {}
    for i in space.node_ids():
        c = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
        values[i] = c * w + shift
    return QFunction(space, values)


def original_point(space, unrolled, node_map, k, upoint):
    """Translate a point of unroll(space, k) back to the presented space.

    Prefix children past the original prefix are the materialized pattern
    copies (pattern-major, copy index 1..k); surviving recurring steps sit
    k copies deeper than they claim.
    """
    steps = []
    cur = unrolled.root
    for s in upoint.steps:
        n = unrolled.node(cur)
        orig = space.node(node_map[cur])
        if isinstance(s, PrefixStep):
            if s.child < len(orig.prefix):
                steps.append(PrefixStep(s.child))
            else:
                extra = s.child - len(orig.prefix)
                steps.append(RecurringStep(extra // k, extra % k + 1))
            cur = n.prefix[s.child]
        else:
            steps.append(RecurringStep(s.pattern, s.copy + k))
            cur = n.recurring[s.pattern]
    return PointRef(tuple(steps))


def induced_node_function(seq, j: int, k: int) -> QFunction:
    """Evaluate term j of the sequence on every node class of the k-fold
    unrolled presentation.  Well defined for j <= k: the term is constant
    across the copies a single unrolled node still abbreviates."""
    assert 1 <= j <= k
    unrolled, node_map = unroll(seq.space, k)
    values = {}
    for nid in unrolled.node_ids():
        upoint = point_at(unrolled, nid, 1)
        opoint = original_point(seq.space, unrolled, node_map, k, upoint)
        values[nid] = seq.eval(j, opoint)
    return QFunction(unrolled, values)
