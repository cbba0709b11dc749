"""Finite presentations of countable compact spaces as rooted trees.

A space is a finite rooted tree.  Leaves stand for isolated points.  An
internal node p is a *limit node*: it carries an ordered list of explicit
``prefix`` children (plain points/subspaces sitting next to p, these do not
accumulate anywhere) and an ordered list of ``recurring`` patterns.  Each
recurring pattern is the root of a subtree; the realized space contains one
copy of that subtree for every copy index k = 1, 2, 3, ... and the copies
accumulate exactly at p.  Several patterns at the same node interleave.

Points of the realized space are finite paths from the root: each step either
enters a prefix child (``PrefixStep``) or enters copy k of a recurring
pattern (``RecurringStep``).  A path may stop at any node; stopping at a
limit node is the limit point itself.  A sequence of points entering copies
of p's patterns with copy indices tending to infinity converges to p.

``rank`` measures accumulation depth: leaves have rank 0, a limit node has
rank 1 + the maximal rank over all nodes of its recurring subtrees.  ``acc``
is the set of node classes accumulating at a limit node: every node of every
recurring subtree (prefix children inside those subtrees included).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from .errors import ResourceCapError, SpaceError

UNROLL_NODE_CAP = 10_000


@dataclass(frozen=True)
class SpaceNode:
    """One node of the presentation tree.

    ``prefix`` and ``recurring`` hold child node ids.  A node with no
    children at all is a leaf (isolated point class).
    """

    ident: int
    prefix: tuple[int, ...] = ()
    recurring: tuple[int, ...] = ()

    def is_leaf(self) -> bool:
        return not self.prefix and not self.recurring

    def children(self) -> tuple[int, ...]:
        return self.prefix + self.recurring


class TreeSpace:
    """A finite rooted tree of :class:`SpaceNode`.

    Construction only checks that the node table is well formed enough to
    traverse (unique ids, root present, child references resolvable).  All
    remaining invariants are reported by :meth:`validate`, so that malformed
    presentations can be loaded and diagnosed rather than rejected opaquely.
    """

    def __init__(self, nodes: Iterable[SpaceNode], root: int):
        table: dict[int, SpaceNode] = {}
        for n in nodes:
            if n.ident in table:
                raise SpaceError("duplicate node id %d" % n.ident)
            table[n.ident] = n
        if root not in table:
            raise SpaceError("root id %d not among nodes" % root)
        for n in table.values():
            for c in n.children():
                if c not in table:
                    raise SpaceError(
                        "node %d references unknown child %d" % (n.ident, c)
                    )
        self.nodes = table
        self.root = root
        self._violations: Optional[list[str]] = None
        self._rank: dict[int, int] = {}
        self._subtree: dict[int, frozenset[int]] = {}
        self._acc: dict[int, frozenset[int]] = {}

    # -- basic access ------------------------------------------------------

    def node(self, ident: int) -> SpaceNode:
        try:
            return self.nodes[ident]
        except KeyError:
            raise SpaceError("no node with id %d" % ident) from None

    def node_ids(self) -> list[int]:
        return sorted(self.nodes)

    def is_leaf(self, ident: int) -> bool:
        return self.node(ident).is_leaf()

    def limit_nodes(self) -> list[int]:
        return [i for i in self.node_ids() if not self.nodes[i].is_leaf()]

    def __len__(self) -> int:
        return len(self.nodes)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TreeSpace):
            return NotImplemented
        return self.root == other.root and self.nodes == other.nodes

    def __repr__(self) -> str:
        return "TreeSpace(%d nodes, root=%d)" % (len(self.nodes), self.root)

    # -- validation --------------------------------------------------------

    def validate(self) -> list[str]:
        """Return all invariant violations, [] iff the presentation is valid.

        Checked: every node has at most one parent, no cycles, every node is
        reachable from the root, and every node with children has at least
        one recurring pattern (otherwise nothing accumulates at it and it
        would not present a limit point).
        """
        if self._violations is not None:
            return list(self._violations)
        out: list[str] = []
        parent: dict[int, int] = {}
        for n in self.nodes.values():
            seen_local: set[int] = set()
            for c in n.children():
                if c in seen_local:
                    out.append(
                        "node %d lists child %d more than once" % (n.ident, c)
                    )
                    continue
                seen_local.add(c)
                if c in parent:
                    out.append(
                        "node %d has two parents (%d and %d)"
                        % (c, parent[c], n.ident)
                    )
                else:
                    parent[c] = n.ident
            if n.prefix and not n.recurring:
                out.append(
                    "node %d has children but no recurring pattern" % n.ident
                )
        if self.root in parent:
            out.append("root %d appears as a child" % self.root)
        # reachability and cycle detection by one DFS from the root
        reached: set[int] = set()
        stack = [self.root]
        path: set[int] = set()

        def dfs(i: int) -> None:
            if i in path:
                out.append("cycle through node %d" % i)
                return
            if i in reached:
                return
            reached.add(i)
            path.add(i)
            for c in self.nodes[i].children():
                dfs(c)
            path.discard(i)

        dfs(self.root)
        for i in self.node_ids():
            if i not in reached:
                out.append("node %d unreachable from root" % i)
        self._violations = out
        return list(out)

    def require_valid(self) -> None:
        bad = self.validate()
        if bad:
            raise SpaceError("invalid space: " + "; ".join(bad))

    # -- structure ---------------------------------------------------------

    def subtree(self, ident: int) -> frozenset[int]:
        """All node ids of the subtree rooted at ``ident`` (inclusive)."""
        self.require_valid()
        got = self._subtree.get(ident)
        if got is not None:
            return got
        acc = {ident}
        for c in self.node(ident).children():
            acc |= self.subtree(c)
        got = frozenset(acc)
        self._subtree[ident] = got
        return got

    def acc(self, ident: int) -> frozenset[int]:
        """Node classes accumulating at a limit node.

        Every node of every recurring subtree, transitively; the prefix
        children of ``ident`` itself are excluded (they do not accumulate).
        Raises for leaves, which have no accumulation.
        """
        self.require_valid()
        got = self._acc.get(ident)
        if got is not None:
            return got
        n = self.node(ident)
        if n.is_leaf():
            raise SpaceError("node %d is a leaf; nothing accumulates" % ident)
        acc: frozenset[int] = frozenset()
        for t in n.recurring:
            acc |= self.subtree(t)
        self._acc[ident] = acc
        return acc

    def rank(self, ident: Optional[int] = None) -> int:
        """Accumulation rank: 0 at leaves, else 1 + max rank over acc."""
        if ident is None:
            ident = self.root
        self.require_valid()
        got = self._rank.get(ident)
        if got is not None:
            return got
        n = self.node(ident)
        if n.is_leaf():
            r = 0
        else:
            r = 1 + max(self.rank(y) for y in self.acc(ident))
        self._rank[ident] = r
        return r

    def acc_cover(self, ident: int) -> frozenset[int]:
        """Maximal elements of acc(ident) under y-accumulates-below-z.

        Constraints "value at ident vs every y in acc" are implied by the
        constraints at the cover elements plus the same constraints at
        deeper limit nodes, because acc is downward closed.  Used to thin
        linear programs without changing their feasible set.
        """
        full = self.acc(ident)
        dominated: set[int] = set()
        for z in full:
            if not self.node(z).is_leaf():
                dominated |= self.acc(z)
        return frozenset(full - dominated)


# -- point references --------------------------------------------------------


@dataclass(frozen=True)
class PrefixStep:
    child: int  # position in the prefix tuple


@dataclass(frozen=True)
class RecurringStep:
    pattern: int  # position in the recurring tuple
    copy: int  # copy index, >= 1


Step = Union[PrefixStep, RecurringStep]


@dataclass(frozen=True)
class PointRef:
    """A point of the realized space: a finite path of steps from the root."""

    steps: tuple[Step, ...] = ()

    def extend(self, *more: Step) -> "PointRef":
        return PointRef(self.steps + tuple(more))

    def truncated(self, length: int) -> "PointRef":
        return PointRef(self.steps[:length])

    def max_copy(self) -> int:
        """Largest copy index on the path (0 if none)."""
        m = 0
        for s in self.steps:
            if isinstance(s, RecurringStep) and s.copy > m:
                m = s.copy
        return m


def resolve(space: TreeSpace, point: PointRef) -> int:
    """Node id reached by following the path; raises on malformed paths."""
    space.require_valid()
    cur = space.root
    for i, s in enumerate(point.steps):
        n = space.node(cur)
        if isinstance(s, PrefixStep):
            if not 0 <= s.child < len(n.prefix):
                raise SpaceError(
                    "step %d: node %d has no prefix child %d"
                    % (i, cur, s.child)
                )
            cur = n.prefix[s.child]
        else:
            if not 0 <= s.pattern < len(n.recurring):
                raise SpaceError(
                    "step %d: node %d has no recurring pattern %d"
                    % (i, cur, s.pattern)
                )
            if s.copy < 1:
                raise SpaceError("step %d: copy index must be >= 1" % i)
            cur = n.recurring[s.pattern]
    return cur


def node_path(space: TreeSpace, point: PointRef) -> list[int]:
    """Node ids visited along the path, including start and end."""
    resolve(space, point)  # validity check
    out = [space.root]
    cur = space.root
    for s in point.steps:
        n = space.node(cur)
        if isinstance(s, PrefixStep):
            cur = n.prefix[s.child]
        else:
            cur = n.recurring[s.pattern]
        out.append(cur)
    return out


def truncate_point(
    space: TreeSpace,
    point: PointRef,
    threshold: int,
    moving: Optional[frozenset[int]] = None,
) -> PointRef:
    """Cut the path just before its first recurring step with copy index
    >= threshold (restricted to steps entering a pattern in ``moving`` when
    given).  Identity when no step qualifies."""
    cur = space.root
    for i, s in enumerate(point.steps):
        n = space.node(cur)
        if isinstance(s, RecurringStep):
            pat_root = n.recurring[s.pattern]
            if s.copy >= threshold and (moving is None or pat_root in moving):
                return point.truncated(i)
            cur = pat_root
        else:
            cur = n.prefix[s.child]
    return point


def descend_path(space: TreeSpace, start: int, target: int) -> list[tuple[str, int]]:
    """Tree path from node ``start`` down to node ``target`` as a list of
    (slot, position) pairs, slot being "p" or "r".  Raises if target is not
    in the subtree of start."""
    space.require_valid()
    if target not in space.subtree(start):
        raise SpaceError("node %d not below node %d" % (target, start))

    out: list[tuple[str, int]] = []

    def walk(cur: int) -> bool:
        if cur == target:
            return True
        n = space.node(cur)
        for pos, c in enumerate(n.prefix):
            if target in space.subtree(c):
                out.append(("p", pos))
                return walk(c)
        for pos, t in enumerate(n.recurring):
            if target in space.subtree(t):
                out.append(("r", pos))
                return walk(t)
        return False

    walk(start)
    return out


def point_at(space: TreeSpace, target: int, copy_index: int = 1) -> PointRef:
    """Canonical realization of a node: follow the tree path from the root,
    taking ``copy_index`` at every recurring step."""
    steps: list[Step] = []
    for slot, pos in descend_path(space, space.root, target):
        if slot == "p":
            steps.append(PrefixStep(pos))
        else:
            steps.append(RecurringStep(pos, copy_index))
    return PointRef(tuple(steps))


# -- unrolling ---------------------------------------------------------------


def unrolled_size(space: TreeSpace, k: int, ident: Optional[int] = None) -> int:
    """Node count of unroll(space, k) without building it."""
    space.require_valid()
    if ident is None:
        ident = space.root
    n = space.node(ident)
    if n.is_leaf():
        return 1
    total = 1
    for c in n.prefix:
        total += unrolled_size(space, k, c)
    for t in n.recurring:
        total += (k + 1) * unrolled_size(space, k, t)
    return total


def unroll(space: TreeSpace, k: int) -> tuple[TreeSpace, dict[int, int]]:
    """Materialize k copies of every recurring pattern as prefix children.

    Every limit node keeps its recurring tail, and additionally gains, for
    each of its patterns in order, k deep copies of the (already unrolled)
    pattern subtree as new prefix children appended after the existing
    prefix children.  Copy c corresponds to copy index c of the pattern.

    Returns the new space together with a map sending every new node id to
    the original node it represents; original ids are preserved and map to
    themselves.  Raises :class:`ResourceCapError` beyond 10_000 nodes.
    """
    space.require_valid()
    if k < 0:
        raise SpaceError("unroll count must be nonnegative")
    size = unrolled_size(space, k)
    if size > UNROLL_NODE_CAP:
        raise ResourceCapError(
            "unroll would create %d nodes (cap %d)" % (size, UNROLL_NODE_CAP)
        )

    node_map: dict[int, int] = {}
    new_nodes: list[SpaceNode] = []
    counter = max(space.nodes) + 1

    def fresh() -> int:
        nonlocal counter
        counter += 1
        return counter - 1

    def spine(orig: int) -> None:
        """Unroll the subtree of ``orig`` keeping its original node ids."""
        n = space.node(orig)
        prefix: list[int] = []
        for c in n.prefix:
            spine(c)
            prefix.append(c)
        copies: list[int] = []
        recurring: list[int] = []
        for t in n.recurring:
            for _ in range(k):
                cid = fresh()
                copy(t, cid)
                copies.append(cid)
            spine(t)
            recurring.append(t)
        node_map[orig] = orig
        new_nodes.append(
            SpaceNode(orig, tuple(prefix) + tuple(copies), tuple(recurring))
        )

    def copy(orig: int, new_id: int) -> None:
        """Unrolled deep copy of the subtree of ``orig`` under a fresh id."""
        n = space.node(orig)
        prefix: list[int] = []
        for c in n.prefix:
            cid = fresh()
            copy(c, cid)
            prefix.append(cid)
        copies: list[int] = []
        recurring: list[int] = []
        for t in n.recurring:
            for _ in range(k):
                cid = fresh()
                copy(t, cid)
                copies.append(cid)
            tid = fresh()
            copy(t, tid)
            recurring.append(tid)
        node_map[new_id] = orig
        new_nodes.append(
            SpaceNode(new_id, tuple(prefix) + tuple(copies), tuple(recurring))
        )

    spine(space.root)
    return TreeSpace(new_nodes, space.root), node_map


# -- canonical presentations -------------------------------------------------


def chain_space(depth: int) -> TreeSpace:
    """The depth-fold accumulation chain: node i recurs node i+1, node
    ``depth`` is the single leaf.  depth=0 is the one-point space."""
    if depth < 0:
        raise SpaceError("depth must be nonnegative")
    nodes = [
        SpaceNode(i, (), (i + 1,) if i < depth else ())
        for i in range(depth + 1)
    ]
    return TreeSpace(nodes, 0)
