"""Exact-valued functions on tree-presented spaces, with envelopes.

A :class:`QFunction` assigns one rational (or Gaussian-rational) value per
node class; points of the realized space inherit the value of their node.
Such functions are exactly the functions that are constant on every copy of
every pattern, which is the natural finitely-described class here.

The upper envelope at a limit node sees every value accumulating there:
``U f (p) = max(f(p), max over acc(p) of f)``; the lower envelope is dual.
A function is upper (lower) semicontinuous iff it equals its upper (lower)
envelope, and continuous iff it is constant on {p} ∪ acc(p) at every limit
node p.

``underline_osc`` is the local oscillation: zero at isolated points and the
largest |f(y) − f(p)| over accumulating y at a limit p.  ``osc`` is its
upper envelope, the usual upper-semicontinuous oscillation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Union

from .errors import ExactnessError, MismatchError, PreconditionError
from .rationals import GaussianRational, as_gaussian, rat, require_rational_abs
from .space import PointRef, TreeSpace, resolve

Scalar = Union[Fraction, GaussianRational]


def _coerce(value) -> Scalar:
    if isinstance(value, GaussianRational):
        return value
    return rat(value)


@dataclass(frozen=True)
class QFunction:
    """A function given by one exact value per node class."""

    space: TreeSpace
    values: Mapping[int, Scalar]

    def __post_init__(self):
        vals = {i: _coerce(v) for i, v in self.values.items()}
        missing = set(self.space.nodes) - set(vals)
        extra = set(vals) - set(self.space.nodes)
        if missing:
            raise MismatchError("missing values for nodes %s" % sorted(missing))
        if extra:
            raise MismatchError("values for unknown nodes %s" % sorted(extra))
        object.__setattr__(self, "values", vals)

    # -- evaluation ----------------------------------------------------------

    def __call__(self, node: int) -> Scalar:
        return self.values[node]

    def at_point(self, point: PointRef) -> Scalar:
        return self.values[resolve(self.space, point)]

    def is_complex(self) -> bool:
        return any(isinstance(v, GaussianRational) for v in self.values.values())

    def require_real(self, what: str = "operation") -> None:
        if self.is_complex():
            raise PreconditionError("%s requires a real-valued function" % what)

    # -- pointwise algebra ----------------------------------------------------

    def _zip(self, other: "QFunction", op) -> "QFunction":
        if not isinstance(other, QFunction):
            return NotImplemented
        if self.space is not other.space and self.space != other.space:
            raise MismatchError("functions live on different spaces")
        return QFunction(
            self.space, {i: op(self.values[i], other.values[i]) for i in self.values}
        )

    def __add__(self, other):
        return self._zip(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._zip(other, lambda a, b: a - b)

    def __neg__(self):
        return self.map(lambda v: -v)

    def map(self, fn: Callable[[Scalar], Scalar]) -> "QFunction":
        return QFunction(self.space, {i: fn(v) for i, v in self.values.items()})

    def scale(self, t) -> "QFunction":
        t = _coerce(t)
        return self.map(lambda v: t * v)

    def shift(self, c) -> "QFunction":
        c = _coerce(c)
        return self.map(lambda v: v + c)

    def abs(self) -> "QFunction":
        """Pointwise |f|; exact, so complex values must have rational modulus."""
        out = {}
        for i, v in self.values.items():
            if isinstance(v, GaussianRational):
                out[i] = require_rational_abs(v, "abs at node %d" % i)
            else:
                out[i] = abs(v)
        return QFunction(self.space, out)

    def re(self) -> "QFunction":
        return self.map(lambda v: v.re if isinstance(v, GaussianRational) else v)

    def im(self) -> "QFunction":
        return self.map(
            lambda v: v.im if isinstance(v, GaussianRational) else Fraction(0)
        )

    def sup_abs(self) -> Fraction:
        """max over nodes of |f| (exact)."""
        return max(self.abs().values.values())

    def __le__(self, other: "QFunction") -> bool:
        if self.is_complex() or other.is_complex():
            raise PreconditionError("ordering requires real functions")
        if not isinstance(other, QFunction):
            return NotImplemented
        if self.space is not other.space and self.space != other.space:
            raise MismatchError("functions live on different spaces")
        return all(self.values[i] <= other.values[i] for i in self.values)


def zero_function(space: TreeSpace) -> QFunction:
    return QFunction(space, {i: Fraction(0) for i in space.nodes})


def constant_function(space: TreeSpace, value) -> QFunction:
    value = _coerce(value)
    return QFunction(space, {i: value for i in space.nodes})


# -- envelopes ----------------------------------------------------------------


def usc_envelope(f: QFunction) -> QFunction:
    """Upper envelope: at a limit node, the max of f there and over acc."""
    f.require_real("upper envelope")
    sp = f.space
    out = {}
    for i in sp.node_ids():
        if sp.is_leaf(i):
            out[i] = f(i)
        else:
            out[i] = max(f(i), max(f(y) for y in sp.acc(i)))
    return QFunction(sp, out)


def lsc_envelope(f: QFunction) -> QFunction:
    """Lower envelope, dual to :func:`usc_envelope`."""
    f.require_real("lower envelope")
    sp = f.space
    out = {}
    for i in sp.node_ids():
        if sp.is_leaf(i):
            out[i] = f(i)
        else:
            out[i] = min(f(i), min(f(y) for y in sp.acc(i)))
    return QFunction(sp, out)


def is_usc(f: QFunction) -> bool:
    f.require_real("semicontinuity test")
    return f.values == usc_envelope(f).values


def is_lsc(f: QFunction) -> bool:
    f.require_real("semicontinuity test")
    return f.values == lsc_envelope(f).values


def is_continuous(f: QFunction) -> bool:
    """Constant on {p} ∪ acc(p) at every limit node p (works for complex f)."""
    sp = f.space
    for p in sp.limit_nodes():
        v = f(p)
        if any(f(y) != v for y in sp.acc(p)):
            return False
    return True


def _gap(a: Scalar, b: Scalar, where: str) -> Fraction:
    d = a - b
    if isinstance(d, GaussianRational):
        return require_rational_abs(d, where)
    return abs(d)


def underline_osc(f: QFunction) -> QFunction:
    """Local oscillation: 0 at leaves, max |f(y) − f(p)| over acc(p) at p."""
    sp = f.space
    out = {}
    for i in sp.node_ids():
        if sp.is_leaf(i):
            out[i] = Fraction(0)
        else:
            out[i] = max(
                [Fraction(0)]
                + [_gap(f(y), f(i), "oscillation at node %d" % i) for y in sp.acc(i)]
            )
    return QFunction(sp, out)


def osc(f: QFunction) -> QFunction:
    """Upper-semicontinuous oscillation: the upper envelope of the local one."""
    return usc_envelope(underline_osc(f))
