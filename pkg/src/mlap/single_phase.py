"""Single-phase instances: every request arrives at time 0 and the game
ends at an expiration time theta that the algorithm never learns.

The offline optimum serves once, at the end, and its cost as a function
of the stop time is an exact piecewise-linear curve

    opt(t) = total_waiting(t) - root_surplus(t)

which lets the doubling strategy place its services at the exact moments
the optimum crosses successive powers of two.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import BadParams, UnsupportedCostKind
from .maturity import surplus_envelopes
from .model import ROOT, Instance, LinearCost, PwlCost, Request, Service, WeightedTree
from .pwl import MonotonePwl


@dataclass(frozen=True)
class SinglePhaseInstance:
    tree: WeightedTree
    requests: tuple[Request, ...]

    def __post_init__(self):
        for r in self.requests:
            if r.arrival != 0.0:
                raise BadParams(f"request {r.rid} arrives at {r.arrival}, not 0")
            if r.cost.kind == "deadline":
                raise UnsupportedCostKind("single-phase costs must be continuous")

    @staticmethod
    def from_instance(instance: Instance) -> "SinglePhaseInstance":
        return SinglePhaseInstance(instance.tree, instance.requests)

    def to_instance(self, horizon: float) -> Instance:
        return Instance.make(self.tree, list(self.requests), horizon=horizon)

    def waiting_at(self, nodes, t: float) -> float:
        return sum(r.wait_at(t) for r in self.requests if r.node in nodes)

    def total_waiting_fn(self) -> MonotonePwl:
        return MonotonePwl.sum_of([r.waiting_fn() for r in self.requests])


def max_covered(sp: SinglePhaseInstance, t: float) -> frozenset[int]:
    """Largest root subtree whose every hanging part pays for itself at t.

    A child subtree joins exactly when its surplus covers the child's
    weight (ties join, keeping the set maximal).
    """
    tree = sp.tree
    own = [0.0] * tree.n
    for r in sp.requests:
        own[r.node] += r.wait_at(t)

    def climb(v: int) -> tuple[float, set[int]]:
        surplus, taken = own[v], {v}
        for u in tree.children[v]:
            s_u, t_u = climb(u)
            if s_u >= tree.weight[u]:
                surplus += s_u - tree.weight[u]
                taken |= t_u
        return surplus, taken

    _, covered = climb(ROOT)
    return frozenset(covered)


def opt_single_phase(sp: SinglePhaseInstance, t: float) -> tuple[float, frozenset[int]]:
    """Exact optimum cost at stop time t, with the served set."""
    covered = max_covered(sp, t)
    outside = [r for r in sp.requests if r.node not in covered]
    return sp.tree.set_weight(covered) + sum(r.wait_at(t) for r in outside), covered


def opt_curve(sp: SinglePhaseInstance) -> MonotonePwl:
    """The optimum cost as an exact piecewise-linear function of stop time."""
    total = sp.total_waiting_fn()
    root_surplus = surplus_envelopes(sp.tree, sp.requests)[ROOT]
    return total.minus_clamped(root_surplus)


def check_optimality(sp: SinglePhaseInstance, nodes, t: float, tol: float = 1e-9) -> bool:
    """Verify the two exchange conditions that certify a served set:

    every hanging part of the set pays for itself, and no excluded child
    subtree could pay its own way in.
    """
    tree = sp.tree
    nodes = frozenset(nodes)
    for v in nodes - {ROOT}:
        part = frozenset(u for u in nodes if _in_subtree(tree, v, u))
        if sp.waiting_at(part, t) < tree.set_weight(part) - tol:
            return False
    env = surplus_envelopes(tree, sp.requests)
    for v in nodes:
        for u in tree.children[v]:
            if u not in nodes and env[u].value(t) > tree.weight[u] + tol:
                return False
    return True


def _in_subtree(tree, v, u) -> bool:
    while tree.depth[u] > tree.depth[v]:
        u = tree.parent[u]
    return u == v


@dataclass(frozen=True)
class DoublingOutcome:
    theta: float
    alg_cost: float
    opt_cost: float
    ratio: float


@dataclass(frozen=True)
class DoublingRun:
    """The doubling strategy's full (expiration-independent) plan."""

    sp: SinglePhaseInstance
    services: tuple[Service, ...]
    curve: MonotonePwl

    def outcome(self, theta: float) -> DoublingOutcome:
        served_at: dict[int, float] = {}
        scost = 0.0
        for svc in self.services:
            if svc.time > theta:
                break
            scost += self.sp.tree.set_weight(svc.nodes)
            for v in svc.nodes:
                served_at.setdefault(v, svc.time)
        wcost = sum(
            r.wait_at(served_at[r.node]) if r.node in served_at else r.wait_at(theta)
            for r in self.sp.requests
        )
        alg = scost + wcost
        opt = self.curve.value(theta)
        if opt <= 0.0:
            ratio = 1.0 if alg <= 0.0 else math.inf
        else:
            ratio = alg / opt
        return DoublingOutcome(theta, alg, opt, ratio)


def doubling_plan(sp: SinglePhaseInstance) -> DoublingRun:
    """Precompute the doubling services: after rescaling so the lightest
    node weighs 2, the i-th service fires when the optimum curve first
    reaches 2**i and serves everything the optimum would serve at the
    next threshold (or ever, when there is no next crossing)."""
    weights = [sp.tree.weight[v] for v in range(1, sp.tree.n)]
    if not weights:
        return DoublingRun(sp, (), opt_curve(sp))
    scale = 2.0 / min(weights)  # thresholds below are 2**i / scale
    curve = opt_curve(sp)
    t_limit = _all_ripe_time(sp)
    services: list[Service] = []
    i = 0
    t_i = curve.first_reach(2.0**i / scale)
    while t_i is not None:
        t_next = curve.first_reach(2.0 ** (i + 1) / scale)
        horizon = t_next if t_next is not None else t_limit
        services.append(Service(t_i, max_covered(sp, horizon)))
        t_i = t_next
        i += 1
    return DoublingRun(sp, tuple(services), curve)


def _all_ripe_time(sp: SinglePhaseInstance) -> float:
    """A time by which every subtree that will ever pay for itself does."""
    tree = sp.tree
    env = surplus_envelopes(tree, sp.requests)
    latest = 0.0
    for v in range(1, tree.n):
        t = env[v].first_reach(tree.weight[v])
        if t is not None:
            latest = max(latest, t)
    return latest + 1.0


def doubling_sweep(sp: SinglePhaseInstance, thetas) -> list[DoublingOutcome]:
    plan = doubling_plan(sp)
    return [plan.outcome(theta) for theta in thetas]


def nested_phase_embed(
    base: SinglePhaseInstance, phases: int, growth: float, theta: float
) -> Instance:
    """Embed `phases` copies of a linear single-phase instance into one
    multi-phase instance on the same tree: phase j arrives at
    (1 - growth**-j) * theta and its waiting cost climbs `growth**j`
    times faster, so every phase reaches the same cost exactly at theta.
    """
    if phases < 1 or growth <= 1.0 or theta <= 0.0:
        raise BadParams("need phases >= 1, growth > 1 and theta > 0")
    for r in base.requests:
        if not isinstance(r.cost, LinearCost):
            raise UnsupportedCostKind("phase embedding takes linear costs only")
    reqs = []
    for j in range(1, phases + 1):
        a_j = (1.0 - growth**-j) * theta
        for r in base.requests:
            reqs.append(
                Request(
                    rid=len(reqs),
                    node=r.node,
                    arrival=a_j,
                    cost=PwlCost(((a_j, 0.0), (theta, theta))),
                )
            )
    return Instance.make(base.tree, reqs, horizon=theta)
