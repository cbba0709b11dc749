"""Subsequence extraction, witness bundles, and the three checkers."""

from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import helpers
from oscal.errors import PreconditionError
from oscal.extraction import (
    CIFunction,
    CopyTable,
    EventuallyLimit,
    FunctionSeq,
    IndexSeq,
    MovingStep,
    WitnessBundle,
    build_jump_chain,
    check_difference_witness,
    check_jump_chain,
    check_jump_witness,
    difference_witness_from_chain,
    extract_subsequence,
    seq_eval,
    seq_tail_bound,
)
from oscal.func import QFunction, is_continuous
from oscal.rationals import Verdict
from oscal.space import PointRef, RecurringStep, chain_space, point_at

IDENT = IndexSeq.identity()
ROOT = PointRef(())


def leaf(c):
    return PointRef((RecurringStep(0, c),))


def pt(*copies):
    return PointRef(tuple(RecurringStep(0, c) for c in copies))


# --- evaluation semantics ---


def test_eval_against_copy_age(g_seq):
    assert seq_eval(g_seq, 3, leaf(5)) == F(-1)  # term too early: cut to root
    assert seq_eval(g_seq, 3, leaf(2)) == F(0)
    assert seq_eval(g_seq, 7, ROOT) == F(-1)


def test_tail_bounds(g_seq):
    assert seq_tail_bound(g_seq, leaf(5), 2) == F(4)
    assert seq_tail_bound(g_seq, leaf(5), 6) == F(0)
    assert g_seq.uniform_bound() == F(1)
    assert g_seq.support_threshold(leaf(5)) == 5


def test_eval_on_alternating_chain(h_seq):
    t = pt(1, 2, 3)
    assert [seq_eval(h_seq, j, t) for j in (1, 2, 3, 4)] == [
        F(-1),
        F(0),
        F(-1),
        F(0),
    ]


# --- index sequences ---


def test_index_seq_values():
    n = IndexSeq((2, 5), 7)
    assert [n.value(i) for i in (1, 2, 3, 4)] == [2, 5, 10, 11]
    assert n.values_upto(3) == [2, 5, 10]
    assert IDENT.value(9) == 9


def test_index_seq_compose():
    n = IndexSeq((2, 5), 7)
    assert [n.compose(IndexSeq((), 1)).value(i) for i in (1, 2, 3)] == [5, 10, 11]
    assert [IndexSeq((), 1).compose(n).value(i) for i in (1, 2, 3)] == [3, 6, 11]


def test_index_seq_must_increase():
    with pytest.raises(PreconditionError):
        IndexSeq((3, 2), 0)


index_seqs = st.builds(
    lambda pre, extra: IndexSeq(
        tuple(sorted(pre)), max(pre, default=0) + extra
    ),
    st.lists(st.integers(1, 30), unique=True, max_size=5),
    st.integers(0, 10),
)


@settings(max_examples=50)
@given(outer=index_seqs, inner=index_seqs, i=st.integers(1, 40))
def test_compose_is_pointwise_substitution(outer, inner, i):
    assert outer.compose(inner).value(i) == outer.value(inner.value(i))


@settings(max_examples=30)
@given(a=index_seqs, b=index_seqs, c=index_seqs, i=st.integers(1, 25))
def test_compose_is_associative(a, b, c, i):
    left = a.compose(b).compose(c)
    right = a.compose(b.compose(c))
    assert left.value(i) == right.value(i)


# --- the extraction pass ---


def test_extract_example_plan(g_seq):
    plan = extract_subsequence(g_seq, ROOT, frozenset({1}), F(1), F(1, 2), 3)
    assert plan.index_list == [1, 2, 3]
    assert plan.witness(4) == leaf(3)
    assert plan.tail_indices(2).value(1) == 3


def test_jump_witness_goldens(g_seq):
    check = check_jump_witness
    assert check(g_seq, IDENT, ROOT, leaf(3), 4, F(1), F(1, 2)) is Verdict.TRUE
    assert check(g_seq, IDENT, ROOT, leaf(1), 4, F(1), F(1, 2)) is Verdict.FALSE
    assert check(g_seq, IDENT, ROOT, leaf(1), 1, F(2), F(1, 2)) is Verdict.FALSE


def test_extraction_preconditions(g_seq):
    with pytest.raises(PreconditionError):
        extract_subsequence(g_seq, ROOT, frozenset({1}), F(2), F(1, 2), 3)
    with pytest.raises(PreconditionError):
        extract_subsequence(g_seq, leaf(1), frozenset({1}), F(1), F(1, 2), 3)
    flat = FunctionSeq(
        QFunction(chain_space(1), {0: F(0), 1: F(0)}), MovingStep(None)
    )
    with pytest.raises(PreconditionError):
        extract_subsequence(flat, ROOT, frozenset({1}), F(0), F(1, 2), 2)


# --- jump chains ---


@pytest.mark.parametrize("eta", [F(1, 2), F(1, 4)])
def test_depth_one_chain(g_seq, eta):
    b = build_jump_chain(g_seq, 1, 0, eta)
    assert (b.k, b.m, b.lam, b.deltas) == (1, (1, 2), F(1), (F(1),))
    assert b.points == (ROOT, leaf(1)) and b.t == leaf(1)
    rep = check_jump_chain(g_seq, b)
    assert rep.verdict is Verdict.TRUE
    assert set(rep.conditions) == {
        "delta_positive",
        "jump_1",
        "sum_window",
        "block_1",
        "tail",
    }


@pytest.mark.parametrize("eta", [F(1, 2), F(1, 4)])
def test_depth_two_chain(h_seq, eta):
    b = build_jump_chain(h_seq, 2, 0, eta)
    assert (b.k, b.m, b.lam) == (2, (1, 2, 3, 4), F(2))
    assert b.deltas == (F(1), F(1))
    assert b.points == (ROOT, pt(1), pt(1, 2), pt(1, 2, 3))
    rep = check_jump_chain(h_seq, b)
    assert rep.verdict is Verdict.TRUE
    assert set(rep.conditions) == {
        "delta_positive",
        "jump_1",
        "jump_2",
        "sum_window",
        "block_1",
        "block_2",
        "block_3",
        "tail",
    }


@pytest.mark.parametrize("eta", [F(1, 2), F(1, 4)])
def test_chain_reduces_to_difference_form(g_seq, h_seq, eta):
    for seq, alpha in ((g_seq, 1), (h_seq, 2)):
        b = build_jump_chain(seq, alpha, 0, eta)
        d = difference_witness_from_chain(b)
        assert d.eta == eta / 5
        verdict = check_difference_witness(
            seq, d.indices, d.m, d.t, d.k, d.lam, d.eta
        )
        assert verdict is Verdict.TRUE


def test_chain_build_preconditions(g_seq):
    with pytest.raises(PreconditionError):
        build_jump_chain(g_seq, 1, 1, F(1, 2))  # leaf: stage vanishes there
    with pytest.raises(PreconditionError):
        build_jump_chain(g_seq, 2, 0, F(1, 2))  # stage 2 adds nothing here


# --- difference-form goldens ---


def test_difference_witness_goldens(g_seq):
    check = check_difference_witness
    assert check(g_seq, IDENT, (1, 3), leaf(2), 1, F(1), F(1, 2)) is Verdict.TRUE
    assert check(g_seq, IDENT, (1, 3), leaf(9), 1, F(1), F(1, 2)) is Verdict.FALSE
    assert check(g_seq, IDENT, (1, 3), leaf(2), 1, F(3), F(1, 2)) is Verdict.FALSE


# --- corrupted bundles name the violated condition ---


def rebuild(b, **changes):
    fields = dict(
        indices=b.indices,
        m=b.m,
        k=b.k,
        t=b.t,
        eta=b.eta,
        lam=b.lam,
        points=b.points,
        deltas=b.deltas,
    )
    fields.update(changes)
    return WitnessBundle(**fields)


def test_overstated_total_jump(h_seq):
    b = build_jump_chain(h_seq, 2, 0, F(1, 2))
    rep = check_jump_chain(h_seq, rebuild(b, lam=F(5)))
    assert rep.failed() == ["sum_window"]


def test_stale_terminal_point(h_seq):
    b = build_jump_chain(h_seq, 2, 0, F(1, 2))
    stale = pt(2, 2, 3)  # first cut now lands at the root during block 2
    rep = check_jump_chain(
        h_seq, rebuild(b, t=stale, points=b.points[:3] + (stale,))
    )
    assert rep.failed() == ["block_2"]


def test_deep_terminal_point_fails(h_seq):
    b = build_jump_chain(h_seq, 2, 0, F(1, 2))
    deep = pt(5, 6, 7)
    rep = check_jump_chain(
        h_seq, rebuild(b, t=deep, points=b.points[:3] + (deep,))
    )
    assert rep.verdict is Verdict.FALSE


# --- bundle shape validation ---


def test_bundle_shape_guards():
    with pytest.raises(PreconditionError):
        WitnessBundle(
            indices=IDENT, m=(1, 2), k=1, t=leaf(1), eta=F(1, 2), lam=F(1),
            points=(ROOT,), deltas=(F(1),),
        )
    with pytest.raises(PreconditionError):
        WitnessBundle(
            indices=IDENT, m=(2, 3), k=1, t=leaf(1), eta=F(1, 2), lam=F(1),
            points=(ROOT, leaf(1)), deltas=(F(1),),
        )
    with pytest.raises(PreconditionError):
        WitnessBundle(
            indices=IDENT, m=(1, 2), k=1, t=leaf(2), eta=F(1, 2), lam=F(1),
            points=(ROOT, leaf(1)), deltas=(F(1),),
        )


# --- eventually-limit sequences ---


def test_eventually_limit_semantics(k2):
    lim = QFunction(k2, {0: F(1), 1: F(1), 2: F(1)})
    pre = QFunction(k2, {0: F(0), 1: F(0), 2: F(0)})
    el = FunctionSeq(lim, EventuallyLimit((pre, pre)))
    p_iso = point_at(k2, 2)
    assert seq_eval(el, 2, p_iso) == F(0)
    assert seq_eval(el, 3, p_iso) == F(1)
    assert seq_tail_bound(el, p_iso, 1) == F(2)
    assert el.support_threshold(p_iso) == 2


def test_eventually_limit_guards(k1, k2):
    disc_lim = QFunction(k1, {0: F(-1), 1: F(0)})
    with pytest.raises(PreconditionError):
        FunctionSeq(disc_lim, EventuallyLimit(()))
    lim = QFunction(k2, {0: F(1), 1: F(1), 2: F(1)})
    disc_pre = QFunction(k2, {0: F(0), 1: F(1), 2: F(0)})
    with pytest.raises(PreconditionError):
        FunctionSeq(lim, EventuallyLimit((disc_pre,)))


# --- restricted moving steps ---


def test_restricted_moving_steps(k2):
    lim = QFunction(k2, {0: F(1), 1: F(1), 2: F(1)})
    ms = FunctionSeq(lim, MovingStep(frozenset({1})))
    assert seq_eval(ms, 1, point_at(k2, 2)) == F(1)
    with pytest.raises(PreconditionError):
        FunctionSeq(
            QFunction(k2, {0: F(0), 1: F(1), 2: F(1)}),
            MovingStep(frozenset()),
        )
    with pytest.raises(PreconditionError):
        FunctionSeq(
            QFunction(chain_space(1), {0: F(-1), 1: F(0)}),
            MovingStep(frozenset({7})),
        )


# --- terms are continuous node functions ---


@pytest.mark.parametrize("j", [1, 2, 3])
def test_terms_induce_continuous_node_functions(g_seq, h_seq, j):
    for seq in (g_seq, h_seq):
        induced = helpers.induced_node_function(seq, j, 3)
        assert is_continuous(induced)


def test_limit_itself_is_discontinuous(g_seq):
    assert not is_continuous(g_seq.limit)


def test_eventually_limit_terms_are_continuous(k2):
    lim = QFunction(k2, {0: F(1), 1: F(1), 2: F(1)})
    pre = QFunction(k2, {0: F(0), 1: F(0), 2: F(0)})
    el = FunctionSeq(lim, EventuallyLimit((pre,)))
    for j in (1, 2, 3):
        assert is_continuous(helpers.induced_node_function(el, j, 3))


# --- copy-indexed functions ---


def test_copy_indexed_lookup(k1):
    ci = CIFunction(
        k1,
        {
            0: CopyTable((), F(-1)),
            1: CopyTable(((1, F(5)), (2, F(5))), F(0)),
        },
    )
    assert ci.at_point(leaf(1)) == F(5)
    assert ci.at_point(leaf(3)) == F(0)
    assert ci.at_point(ROOT) == F(-1)
    assert not ci.is_constant()
    with pytest.raises(PreconditionError):
        ci.as_qfunction()


def test_copy_indexed_reduction(k1):
    ci = CIFunction(
        k1, {0: CopyTable((), F(2)), 1: CopyTable(((3, F(4)),), F(4))}
    )
    assert ci.is_constant()
    q = ci.as_qfunction()
    assert q(0) == F(2) and q(1) == F(4)


def test_copy_table_guard():
    with pytest.raises(PreconditionError):
        CopyTable(((0, F(1)),), F(0))
