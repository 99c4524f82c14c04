"""Online algorithm for continuous (linear / piecewise-linear) waiting costs.

The central object is the *surplus envelope* of a node v: the largest
amount by which some subtree hanging at v can pay for itself at time t,

    surplus_v(t) = waiting(v, t) + sum over children u of
                   max(0, surplus_u(t) - weight(u)).

A node is *ripe* once its surplus reaches its own weight; its ripeness
time is the earliest such moment.  The algorithm fires when a root child
ripens, serves the maximal self-paying subtree under it (the core), and
pads the core level by level with the children that will ripen soonest
(the extras), the same weight-matching rule the deadline algorithm uses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .config import assertions_enabled
from .deadline import growth_bound, is_ratio_decreasing, _is_under
from .engine import OnlineAlgorithm, urgent_select
from .errors import InvariantViolation, UnsupportedCostKind
from .model import ROOT
from .pwl import MonotonePwl

#: slack used when testing "surplus >= weight" at an interpolated time
RIPE_SLACK = 1e-9


def node_cost_fns(tree, pending) -> list[MonotonePwl]:
    """Aggregate waiting-cost curve per node over the pending requests."""
    per_node: list[list[MonotonePwl]] = [[] for _ in range(tree.n)]
    for req in pending:
        per_node[req.node].append(req.waiting_fn())
    return [MonotonePwl.sum_of(fns) for fns in per_node]


def surplus_envelopes(tree, pending) -> list[MonotonePwl]:
    """Surplus curve of every node, bottom-up over the tree."""
    own = node_cost_fns(tree, pending)
    env: list[MonotonePwl | None] = [None] * tree.n
    for v in sorted(range(tree.n), key=lambda u: -tree.depth[u]):
        parts = [own[v]]
        parts.extend(env[u].hinge(tree.weight[u]) for u in tree.children[v])
        env[v] = MonotonePwl.sum_of(parts)
    return env  # type: ignore[return-value]


def ripeness(env: MonotonePwl, weight: float) -> float:
    """Earliest time the surplus curve reaches the node's weight (inf if never)."""
    t = env.first_reach(weight)
    return math.inf if t is None else t


def all_ripeness(tree, pending) -> list[float]:
    env = surplus_envelopes(tree, pending)
    return [ripeness(env[v], tree.weight[v]) for v in range(tree.n)]


def _ripe_at(env: MonotonePwl, weight: float, t: float) -> bool:
    return env.value(t) >= weight - RIPE_SLACK * max(1.0, weight)


def core_subtree(tree, env, anchor: int, t: float) -> frozenset[int]:
    """Maximal self-paying subtree at `anchor` at time t (ties included).

    The anchor itself is always included; the caller is responsible for
    only asking at times when the anchor is ripe.
    """
    out = {anchor}
    stack = [anchor]
    while stack:
        v = stack.pop()
        for u in tree.children[v]:
            if _ripe_at(env[u], tree.weight[u], t):
                out.add(u)
                stack.append(u)
    return frozenset(out)


def set_ripeness(tree, pending, nodes) -> float:
    """Earliest time the requests inside `nodes` pay for the whole set."""
    fns = [r.waiting_fn() for r in pending if r.node in nodes]
    t = MonotonePwl.sum_of(fns).first_reach(tree.set_weight(nodes))
    return math.inf if t is None else t


class MaturityAlgorithm(OnlineAlgorithm):
    name = "general"

    def __init__(self, ratio: float | None = None):
        self.ratio = ratio

    def start(self, instance):
        super().start(instance)
        if not instance.all_continuous():
            raise UnsupportedCostKind(
                "general algorithm needs linear or pwl costs; smooth deadlines first"
            )
        self._checked = self.ratio is not None and is_ratio_decreasing(
            instance.tree, self.ratio
        )

    def _anchor_ripeness(self, env):
        tree = self.instance.tree
        best = None
        for c in tree.children[ROOT]:
            t = ripeness(env[c], tree.weight[c])
            if best is None or (t, c) < best:
                best = (t, c)
        return best  # (time, root child) or None when the root has no children

    def next_trigger(self, t, pending):
        if not pending:
            return None
        if any(r.node == ROOT for r in pending):
            # a request at the root is served instantly and for free
            return t
        env = surplus_envelopes(self.instance.tree, pending)
        best = self._anchor_ripeness(env)
        if best is None or math.isinf(best[0]):
            return None
        return best[0]

    def build_service(self, t, pending):
        tree = self.instance.tree
        if any(r.node == ROOT for r in pending):
            return frozenset({ROOT}), {
                "kind": "root-flush",
                "anchor": ROOT,
                "core": frozenset({ROOT}),
                "extras": frozenset(),
            }
        env = surplus_envelopes(tree, pending)
        when, anchor = self._anchor_ripeness(env)
        if assertions_enabled() and when > t + 1e-6 * max(1.0, abs(t)):
            raise InvariantViolation(
                f"service fired at t={t} before anchor ripeness {when}"
            )
        core = core_subtree(tree, env, anchor, t)
        ripe_time = {v: ripeness(env[v], tree.weight[v]) for v in range(tree.n)}
        extras: set[int] = set()
        for level in range(2, tree.max_depth + 1):
            taken = core | extras
            frontier = [
                w
                for w in range(tree.n)
                if tree.depth[w] == level
                and tree.parent[w] in taken
                and w not in taken
            ]
            for v in sorted(taken, key=lambda u: (tree.depth[u], u)):
                if tree.depth[v] >= level or not frontier:
                    continue
                mine = [w for w in frontier if _is_under(tree, v, w)]
                picked = urgent_select(
                    mine,
                    tree.weight[v],
                    lambda w: ripe_time[w],
                    lambda w: tree.weight[w],
                )
                extras.update(picked)
                frontier = [w for w in frontier if w not in picked]
        nodes = frozenset({ROOT} | core | extras)
        if self._checked and assertions_enabled():
            cap = growth_bound(tree.max_depth, self.ratio) * tree.set_weight(core)
            got = tree.set_weight(nodes)
            if got > cap * (1 + 1e-9):
                raise InvariantViolation(
                    f"core+extras weight {got} exceeds bound {cap} at t={t}"
                )
        return nodes, {
            "kind": "ripeness-trigger",
            "anchor": anchor,
            "core": frozenset({ROOT} | core),
            "extras": frozenset(extras),
        }
