"""Online algorithm for hard-deadline instances.

It serves exactly when the earliest pending deadline expires. The service
starts at the root plus the root child under which that deadline lives,
then grows level by level: every included node v adopts the most urgent
not-yet-included children at the current level (urgency = earliest
pending deadline in the candidate's subtree) until their combined weight
reaches v's own weight. On a ratio-decreasing tree this caps each
service's weight at growth_bound(depth, ratio) times the root child's
weight.
"""

from __future__ import annotations

import logging
import math

from .config import assertions_enabled
from .engine import OnlineAlgorithm, urgent_select
from .errors import InvariantViolation, UnsupportedCostKind
from .model import ROOT, DeadlineCost

log = logging.getLogger(__name__)


def growth_bound(depth: int, ratio: float) -> float:
    """Per-service weight cap factor (2 + 1/ratio)^(depth-1)."""
    if depth <= 1:
        return 1.0
    return (2.0 + 1.0 / ratio) ** (depth - 1)


def is_ratio_decreasing(tree, ratio: float) -> bool:
    """True when every node below depth 1 weighs <= parent weight / ratio."""
    return all(
        tree.weight[tree.parent[v]] >= ratio * tree.weight[v] - 1e-12
        for v in range(1, tree.n)
        if tree.parent[v] != ROOT
    )


def subtree_min_deadlines(tree, pending):
    """Earliest pending deadline in each node's subtree (inf when none)."""
    dmin = [math.inf] * tree.n
    for req in pending:
        d = req.cost.d
        for u in tree.root_path(req.node):
            if d < dmin[u]:
                dmin[u] = d
    return dmin


class DeadlineAlgorithm(OnlineAlgorithm):
    name = "deadline"

    def __init__(self, ratio: float | None = None):
        # ratio is only consulted for self-checks of the guaranteed bound
        self.ratio = ratio

    def start(self, instance):
        super().start(instance)
        if not instance.all_deadline():
            raise UnsupportedCostKind("deadline algorithm needs deadline costs only")
        self._checked = self.ratio is not None and is_ratio_decreasing(
            instance.tree, self.ratio
        )
        if self.ratio is not None and not self._checked:
            log.warning(
                "tree is not %.3g-decreasing; service weight guarantee void", self.ratio
            )

    def next_trigger(self, t, pending):
        if not pending:
            return None
        return min(r.cost.d for r in pending)

    def build_service(self, t, pending):
        tree = self.instance.tree
        dmin = subtree_min_deadlines(tree, pending)
        trigger = min(pending, key=lambda r: (r.cost.d, r.rid))
        if trigger.node == ROOT:
            return frozenset({ROOT}), {"kind": "deadline-trigger", "trigger_rid": trigger.rid}
        anchor = tree.root_child_of(trigger.node)
        nodes = {ROOT, anchor}
        for level in range(2, tree.max_depth + 1):
            frontier = [
                w
                for w in range(tree.n)
                if tree.depth[w] == level and tree.parent[w] in nodes and w not in nodes
            ]
            if not frontier:
                continue
            for v in sorted(nodes, key=lambda u: (tree.depth[u], u)):
                if tree.depth[v] >= level:
                    continue
                mine = [w for w in frontier if _is_under(tree, v, w)]
                picked = urgent_select(
                    mine, tree.weight[v], lambda w: dmin[w], lambda w: tree.weight[w]
                )
                nodes.update(picked)
        nodes = frozenset(nodes)
        if self._checked and assertions_enabled():
            cap = growth_bound(tree.max_depth, self.ratio) * tree.weight[anchor]
            got = tree.set_weight(nodes)
            if got > cap * (1 + 1e-9):
                raise InvariantViolation(
                    f"service weight {got} exceeds bound {cap} at t={t}"
                )
        return nodes, {
            "kind": "deadline-trigger",
            "trigger_rid": trigger.rid,
            "anchor": anchor,
        }


def _is_under(tree, v, w) -> bool:
    """True when w lies in the subtree rooted at v."""
    dv = tree.depth[v]
    while tree.depth[w] > dv:
        w = tree.parent[w]
    return w == v
