"""Iterated oscillation stages, the index and norm they induce, and the
level-set data used by the subsequence extraction.

Starting from the zero function, one step sends a weight w to the upper
envelope of

    x  ↦  max( w(x),  max over y in acc(x) of |f(y) − f(x)| + w(y) )

(leaves keep w).  Iterating yields an increasing chain of upper
semicontinuous stages; on a finitely presented space the chain becomes
stationary after finitely many steps.  The first stage index where two
consecutive stages agree is the index of f; the norm of f is the sup of
|f| + final stage.  The signed variant ("v") drops the absolute value and
measures upward jumps only.

Stages stabilize but the number of steps is not bounded a priori by the
public contract, so iteration carries a cap; hitting the cap is reported
with the :class:`CapExceeded` value rather than an exception.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .errors import InternalCheckError, PreconditionError
from .func import (
    QFunction,
    constant_function,
    is_lsc,
    is_usc,
    usc_envelope,
    zero_function,
    _gap,
)
from .space import TreeSpace

DEFAULT_CAP = 64


@dataclass(frozen=True)
class CapExceeded:
    """Returned when iteration hit the stage cap before stabilizing."""

    cap: int


def osc_pre_step(f: QFunction, w: QFunction) -> QFunction:
    """One oscillation step before taking the upper envelope."""
    w.require_real("stage weight")
    sp = f.space
    out = {}
    for i in sp.node_ids():
        if sp.is_leaf(i):
            out[i] = w(i)
        else:
            out[i] = max(
                [w(i)]
                + [
                    _gap(f(y), f(i), "oscillation step at node %d" % i) + w(y)
                    for y in sp.acc(i)
                ]
            )
    return QFunction(sp, out)


def osc_step(f: QFunction, w: QFunction) -> QFunction:
    return usc_envelope(osc_pre_step(f, w))


def v_pre_step(f: QFunction, w: QFunction) -> QFunction:
    """Signed (upward-jump) step before the upper envelope; f must be real."""
    f.require_real("signed oscillation")
    w.require_real("stage weight")
    sp = f.space
    out = {}
    for i in sp.node_ids():
        if sp.is_leaf(i):
            out[i] = w(i)
        else:
            out[i] = max([w(i)] + [f(y) - f(i) + w(y) for y in sp.acc(i)])
    return QFunction(sp, out)


def v_step(f: QFunction, w: QFunction) -> QFunction:
    return usc_envelope(v_pre_step(f, w))


_STEPS = {"osc": osc_step, "v": v_step}


@dataclass(frozen=True)
class OscTrace:
    """Stages [s_0, s_1, ...] of the iteration together with where (and
    whether) they stabilized.  When ``stabilized_at`` is τ the trace holds
    s_0 .. s_{τ+1} with s_{τ+1} == s_τ; otherwise it holds s_0 .. s_cap."""

    base: QFunction
    kind: str
    stages: tuple[QFunction, ...]
    stabilized_at: Optional[int]
    cap: int

    def stage(self, alpha: int) -> QFunction:
        if alpha < 0:
            raise PreconditionError("stage index must be nonnegative")
        if alpha < len(self.stages):
            return self.stages[alpha]
        if self.stabilized_at is not None:
            return self.stages[-1]
        raise PreconditionError(
            "stage %d not computed (cap %d, not stabilized)" % (alpha, self.cap)
        )


def iterate(f: QFunction, kind: str = "osc", cap: int = DEFAULT_CAP) -> OscTrace:
    if kind not in _STEPS:
        raise PreconditionError("unknown iteration kind %r" % kind)
    if cap < 1:
        raise PreconditionError("cap must be positive")
    step = _STEPS[kind]
    stages = [zero_function(f.space)]
    stabilized: Optional[int] = None
    for n in range(cap):
        nxt = step(f, stages[-1])
        same = nxt.values == stages[-1].values
        stages.append(nxt)
        if same:
            stabilized = n
            break
    return OscTrace(f, kind, tuple(stages), stabilized, cap)


def d_index(f: QFunction, cap: int = DEFAULT_CAP) -> Union[int, CapExceeded]:
    """Stage index at which the oscillation chain stabilizes."""
    tr = iterate(f, "osc", cap)
    if tr.stabilized_at is None:
        return CapExceeded(cap)
    return tr.stabilized_at


def d_norm(f: QFunction, cap: int = DEFAULT_CAP) -> Union[Fraction, CapExceeded]:
    """max over nodes of |f| + final oscillation stage."""
    tr = iterate(f, "osc", cap)
    if tr.stabilized_at is None:
        return CapExceeded(cap)
    final = tr.stages[tr.stabilized_at]
    return (f.abs() + final).sup_abs()


@dataclass(frozen=True)
class Decomposition:
    u: QFunction
    v: QFunction
    norm: Fraction
    checks: dict


def decompose(
    f: QFunction, cap: int = DEFAULT_CAP
) -> Union[Decomposition, CapExceeded]:
    """Split f = u − v with u, v nonnegative lower semicontinuous and
    max(u + v) equal to the norm; the witness that the norm is attained."""
    f.require_real("decomposition")
    tr = iterate(f, "osc", cap)
    if tr.stabilized_at is None:
        return CapExceeded(cap)
    final = tr.stages[tr.stabilized_at]
    lam = (f.abs() + final).sup_abs()
    half = Fraction(1, 2)
    lam_fn = constant_function(f.space, lam)
    u = (lam_fn - final + f).scale(half)
    v = (lam_fn - final - f).scale(half)
    checks = {
        "difference": (u - v).values == f.values,
        "nonnegative": all(val >= 0 for val in u.values.values())
        and all(val >= 0 for val in v.values.values()),
        "lower_semicontinuous": is_lsc(u) and is_lsc(v),
        "sup_norm": (u + v).sup_abs() == lam,
    }
    bad = [name for name, ok in checks.items() if not ok]
    if bad:
        raise InternalCheckError(
            "decomposition violated %s for a stabilized trace" % ", ".join(bad)
        )
    return Decomposition(u, v, lam, checks)


def fixpoint_criterion(f: QFunction, alpha: int, cap: int = DEFAULT_CAP) -> bool:
    """Whether the chain has stopped moving at stage alpha, decided through
    the semicontinuity characterization (stage + f and stage − f both upper
    semicontinuous) and cross-checked against literal stage equality."""
    f.require_real("fixpoint criterion")
    tr = iterate(f, "osc", max(cap, alpha + 2))
    w = tr.stage(alpha)
    by_usc = is_usc(w + f) and is_usc(w - f)
    by_stage = tr.stage(alpha + 1).values == w.values
    if by_usc != by_stage:
        raise InternalCheckError(
            "semicontinuity criterion disagrees with stage equality at %d" % alpha
        )
    return by_usc


# -- level-set witness ---------------------------------------------------------


@dataclass(frozen=True)
class LevelSetWitness:
    """Data located below a strict growth v_α(x) < v_{α+1}(x) = β.

    ``lambda_under`` is the exact level attained by the best accumulating
    node (the finite presentation attains its suprema, so no strict
    undercut is needed), ``delta`` the largest jump of φ from ``x1`` into
    the level set, and ``level_set`` the nodes y with
    lambda_under ≤ v_α(y) < (1+η)β − δ.  ``eta`` is the value actually
    used after shrinking."""

    alpha: int
    x: int
    eta: Fraction
    beta: Fraction
    lambda_under: Fraction
    delta: Fraction
    x1: int
    attainer: int
    level_set: frozenset[int]


def level_set_witness(
    phi: QFunction, alpha: int, x: int, eta, cap: int = DEFAULT_CAP
) -> LevelSetWitness:
    phi.require_real("level-set witness")
    eta = Fraction(eta)
    if not 0 < eta < 1:
        raise PreconditionError("eta must lie strictly between 0 and 1")
    if alpha < 1:
        raise PreconditionError("alpha must be at least 1")
    sp = phi.space
    tr = iterate(phi, "v", max(cap, alpha + 2))
    v_a = tr.stage(alpha)
    v_a1 = tr.stage(alpha + 1)
    beta = v_a1(x)
    if v_a(x) == 0:
        raise PreconditionError("stage %d vanishes at node %d" % (alpha, x))
    if v_a(x) >= beta:
        raise PreconditionError(
            "no strict growth between stages %d and %d at node %d"
            % (alpha, alpha + 1, x)
        )
    # shrink eta until the stage-alpha value sits below (1-eta)*beta
    while v_a(x) >= (1 - eta) * beta:
        eta = eta / 2

    pre = v_pre_step(phi, v_a)  # stage alpha+1 before enveloping
    scope = sorted({x} | sp.acc(x))
    x1 = next(i for i in scope if pre(i) > (1 - eta) * beta)
    if sp.is_leaf(x1):
        raise InternalCheckError("pre-envelope exceeds the bar at a leaf")

    acc1 = sp.acc(x1)
    best = max(phi(y) - phi(x1) + v_a(y) for y in acc1)
    attainer = min(y for y in acc1 if phi(y) - phi(x1) + v_a(y) == best)
    lam = v_a(attainer)

    in_level = [y for y in sorted(acc1 | {x1}) if v_a(y) >= lam]
    delta = max(phi(y) - phi(x1) for y in in_level)

    upper = (1 + eta) * beta - delta
    level_set = frozenset(i for i in sp.node_ids() if lam <= v_a(i) < upper)

    # re-check the three defining conditions exactly
    ok1 = (1 - eta) * beta < lam + delta < (1 + eta) * beta
    ok2 = x1 in level_set or bool(acc1 & level_set)
    inside = [phi(y) - phi(x1) for y in acc1 & level_set]
    ok3 = bool(inside) and max(inside) == delta
    if not (ok1 and ok2 and ok3):
        raise InternalCheckError(
            "level-set conditions failed: %s"
            % [name for name, ok in [("bar", ok1), ("meets", ok2), ("jump", ok3)] if not ok]
        )
    return LevelSetWitness(
        alpha=alpha,
        x=x,
        eta=eta,
        beta=beta,
        lambda_under=lam,
        delta=delta,
        x1=x1,
        attainer=attainer,
        level_set=level_set,
    )
