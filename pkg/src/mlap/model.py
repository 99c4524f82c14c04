"""Core data model: weighted rooted trees, timed requests with
nondecreasing waiting costs, services, schedules, and cost accounting.

Conventions used everywhere downstream:
  * node ids are dense ints 0..n-1, the root is id 0 and has weight 0;
  * a service is a set of nodes that contains the root and is closed
    under parent (hence a connected subtree);
  * a request is served by the earliest service at time >= its arrival
    whose node set contains the request's node;
  * schedules are normalized so no two services share a time.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace

from .config import EPS_TIME
from .errors import (
    BadParams,
    CycleDetected,
    InfeasibleSchedule,
    InvalidService,
    MultipleRootChildren,
    NonPositiveWeight,
    UnknownNode,
    UnsupportedCostKind,
)
from .pwl import MonotonePwl

ROOT = 0


class WeightedTree:
    """Rooted tree over dense node ids with positive weights off the root."""

    __slots__ = ("parent", "weight", "children", "depth", "n")

    def __init__(self, parent, weight):
        parent = [(-1 if p is None else int(p)) for p in parent]
        weight = [float(w) for w in weight]
        n = len(parent)
        if n == 0 or len(weight) != n:
            raise BadParams("parent/weight arrays empty or mismatched")
        if parent[ROOT] != -1:
            raise BadParams("root (id 0) must have parent -1 or null")
        if weight[ROOT] != 0.0:
            raise NonPositiveWeight("root weight must be 0")
        for v in range(1, n):
            if not 0 <= parent[v] < n:
                raise UnknownNode(f"node {v} has parent {parent[v]} outside 0..{n - 1}")
            if parent[v] == v:
                raise CycleDetected(f"node {v} is its own parent")
            if weight[v] <= 0.0:
                raise NonPositiveWeight(f"node {v} has weight {weight[v]}")
        children = [[] for _ in range(n)]
        for v in range(1, n):
            children[parent[v]].append(v)
        depth = [-1] * n
        depth[ROOT] = 0
        order = deque([ROOT])
        seen = 1
        while order:
            u = order.popleft()
            for c in children[u]:
                depth[c] = depth[u] + 1
                order.append(c)
                seen += 1
        if seen != n:
            raise CycleDetected("parent links contain a cycle detached from the root")
        self.parent = tuple(parent)
        self.weight = tuple(weight)
        self.children = tuple(tuple(c) for c in children)
        self.depth = tuple(depth)
        self.n = n

    @property
    def max_depth(self) -> int:
        return max(self.depth)

    def assert_quasi_root(self):
        if len(self.children[ROOT]) != 1:
            raise MultipleRootChildren(
                f"root has {len(self.children[ROOT])} children, expected exactly 1"
            )

    def root_path(self, v: int):
        """Nodes from v up to and including the root."""
        path = []
        while v != -1:
            path.append(v)
            v = self.parent[v]
        return path

    def path_weight(self, v: int) -> float:
        """Total weight on the path from v to the root."""
        return sum(self.weight[u] for u in self.root_path(v))

    def subtree_nodes(self, v: int):
        out = [v]
        i = 0
        while i < len(out):
            out.extend(self.children[out[i]])
            i += 1
        return out

    def set_weight(self, total) -> float:
        return sum(self.weight[v] for v in total)

    def is_service_set(self, nodes) -> bool:
        if ROOT not in nodes:
            return False
        return all(v == ROOT or self.parent[v] in nodes for v in nodes)

    def spanning_service(self, nodes) -> frozenset:
        """Minimal service set containing all of `nodes`: union of root paths."""
        out = {ROOT}
        for v in nodes:
            while v not in out:
                out.add(v)
                v = self.parent[v]
        return frozenset(out)

    def root_child_of(self, v: int) -> int:
        """The depth-1 ancestor of v (v itself if depth 1)."""
        if v == ROOT:
            raise BadParams("root has no root-child ancestor")
        while self.parent[v] != ROOT:
            v = self.parent[v]
        return v


# --- request costs ----------------------------------------------------------


@dataclass(frozen=True)
class LinearCost:
    """Waiting grows at unit rate from the arrival onwards."""

    kind = "linear"


@dataclass(frozen=True)
class DeadlineCost:
    """Free through time d; a fixed penalty applies strictly after d.

    Offline/online components treat d as a hard deadline (the penalty is
    never paid by a feasible schedule); the penalty only becomes a real
    cost after the step is smoothed into a continuous ramp.
    """

    d: float
    penalty: float | None = None
    kind = "deadline"


@dataclass(frozen=True)
class PwlCost:
    """Piecewise-linear waiting given by absolute-time knots.

    Zero before the first knot, linear between knots, constant after the
    last knot. First knot value must be 0 and values must not decrease.
    """

    points: tuple
    kind = "pwl"

    def __post_init__(self):
        pts = tuple((float(t), float(v)) for t, v in self.points)
        if not pts:
            raise BadParams("pwl cost needs at least one point")
        for (t0, v0), (t1, v1) in zip(pts, pts[1:]):
            if not t1 > t0:
                raise BadParams("pwl cost times must strictly increase")
            if v1 < v0:
                raise BadParams("pwl cost values must not decrease")
        if pts[0][1] != 0.0:
            raise BadParams("pwl cost must start at value 0")
        object.__setattr__(self, "points", pts)


@dataclass(frozen=True)
class Request:
    rid: int
    node: int
    arrival: float
    cost: object  # LinearCost | DeadlineCost | PwlCost

    def wait_at(self, t: float) -> float:
        """Waiting cost if this request is served at time t."""
        c = self.cost
        if isinstance(c, LinearCost):
            return max(0.0, t - self.arrival)
        if isinstance(c, DeadlineCost):
            if t <= c.d + EPS_TIME:
                return 0.0
            if c.penalty is None:
                raise BadParams(f"request {self.rid}: deadline penalty unresolved")
            return c.penalty
        if isinstance(c, PwlCost):
            return _eval_pwl_points(c.points, t)
        raise UnsupportedCostKind(f"request {self.rid}: {type(c).__name__}")

    @property
    def deadline(self):
        return self.cost.d if isinstance(self.cost, DeadlineCost) else None

    def waiting_fn(self, weight: float = 1.0) -> MonotonePwl:
        """The waiting cost as a MonotonePwl (continuous kinds only)."""
        c = self.cost
        if isinstance(c, LinearCost):
            return MonotonePwl((self.arrival,), (0.0,), 1.0).scale(weight)
        if isinstance(c, PwlCost):
            xs = tuple(t for t, _ in c.points)
            ys = tuple(v for _, v in c.points)
            return MonotonePwl(xs, ys, 0.0).scale(weight)
        raise UnsupportedCostKind(
            f"request {self.rid}: no continuous curve for {type(c).__name__}"
        )


def _eval_pwl_points(points, t):
    if t <= points[0][0]:
        return 0.0
    for (t0, v0), (t1, v1) in zip(points, points[1:]):
        if t <= t1:
            return v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    return points[-1][1]


# --- instances ---------------------------------------------------------------


@dataclass(frozen=True)
class Instance:
    tree: WeightedTree
    requests: tuple
    horizon: float

    def __post_init__(self):
        tree, horizon = self.tree, self.horizon
        seen = set()
        resolved = []
        for req in self.requests:
            if req.rid in seen:
                raise BadParams(f"duplicate request id {req.rid}")
            seen.add(req.rid)
            if not 0 <= req.node < tree.n:
                raise UnknownNode(f"request {req.rid} at unknown node {req.node}")
            if req.arrival < 0:
                raise BadParams(f"request {req.rid} arrives before time 0")
            if req.arrival > horizon + EPS_TIME:
                raise BadParams(f"request {req.rid} arrives after the horizon")
            c = req.cost
            if isinstance(c, DeadlineCost):
                if c.d < req.arrival:
                    raise BadParams(f"request {req.rid}: deadline before arrival")
                if c.d > horizon + EPS_TIME:
                    raise BadParams(f"request {req.rid}: deadline after the horizon")
                if c.penalty is None:
                    # default penalty: total weight on the request node's root path
                    c = DeadlineCost(c.d, tree.path_weight(req.node))
                    req = replace(req, cost=c)
            elif isinstance(c, PwlCost):
                if c.points[0][0] < req.arrival - EPS_TIME:
                    raise BadParams(f"request {req.rid}: cost grows before arrival")
            elif not isinstance(c, LinearCost):
                raise UnsupportedCostKind(
                    f"request {req.rid}: {type(c).__name__} not allowed in an instance"
                )
            resolved.append(req)
        object.__setattr__(self, "requests", tuple(resolved))

    @staticmethod
    def make(tree, requests, horizon=None) -> "Instance":
        """Build an instance, defaulting the horizon to the last event."""
        if horizon is None:
            horizon = 0.0
            for r in requests:
                horizon = max(horizon, r.arrival)
                if isinstance(r.cost, DeadlineCost):
                    horizon = max(horizon, r.cost.d)
                elif isinstance(r.cost, PwlCost):
                    horizon = max(horizon, r.cost.points[-1][0])
        return Instance(tree, tuple(requests), float(horizon))

    def all_deadline(self) -> bool:
        return all(isinstance(r.cost, DeadlineCost) for r in self.requests)

    def all_continuous(self) -> bool:
        return all(not isinstance(r.cost, DeadlineCost) for r in self.requests)

    def requests_by_node(self):
        by = [[] for _ in range(self.tree.n)]
        for r in self.requests:
            by[r.node].append(r)
        return by


# --- services and schedules ---------------------------------------------------


@dataclass(frozen=True)
class Service:
    time: float
    nodes: frozenset


def validate_service(tree: WeightedTree, service: Service):
    for v in service.nodes:
        if not 0 <= v < tree.n:
            raise UnknownNode(f"service names unknown node {v}")
    if not tree.is_service_set(service.nodes):
        raise InvalidService(
            f"service at t={service.time} is not a root-containing, parent-closed set"
        )


def normalize_schedule(services) -> tuple:
    """Sort by time, merge equal-time services by union, drop empties."""
    merged = {}
    for s in services:
        if not s.nodes:
            continue
        key = s.time
        merged[key] = merged.get(key, frozenset()) | s.nodes
    return tuple(Service(t, merged[t]) for t in sorted(merged))


@dataclass(frozen=True)
class CostReport:
    scost: float
    wcost: float
    total: float
    serve_time: dict  # rid -> serve time (only for served requests)
    unserved: tuple  # rids left unserved


def cost_of_schedule(instance: Instance, services, require_feasible: bool = True) -> CostReport:
    """Exact cost of a schedule under the earliest-covering-service rule."""
    tree = instance.tree
    schedule = normalize_schedule(services)
    for s in schedule:
        validate_service(tree, s)
    scost = sum(tree.set_weight(s.nodes) for s in schedule)
    wcost = 0.0
    serve_time = {}
    unserved = []
    for req in instance.requests:
        t = next(
            (s.time for s in schedule if s.time >= req.arrival - EPS_TIME and req.node in s.nodes),
            None,
        )
        if t is None:
            unserved.append(req.rid)
            continue
        if isinstance(req.cost, DeadlineCost) and t > req.cost.d + EPS_TIME:
            raise InfeasibleSchedule(
                f"request {req.rid} served at {t}, after its deadline {req.cost.d}"
            )
        serve_time[req.rid] = t
        wcost += req.wait_at(t)
    if unserved and require_feasible:
        raise InfeasibleSchedule(f"requests never served: {sorted(unserved)}")
    return CostReport(scost, wcost, scost + wcost, serve_time, tuple(sorted(unserved)))
