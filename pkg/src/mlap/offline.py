"""Offline ground truth and approximation.

brute_force_opt computes the exact offline optimum over a finite time
grid. For hard-deadline instances the grid of all deadlines is lossless
(any service can be delayed to the next deadline among those it serves);
for continuous monotone costs the grid of all arrivals and cost
breakpoints is lossless (any service can be moved earlier to the latest
arrival among the requests it serves). Candidate services are likewise
reduced: for any set of requests to serve, the cheapest service is the
union of their nodes' root paths, so only one canonical service per
distinct served-request mask survives.

The inner DP runs over (grid index, served-request bitmask) in a
compiled kernel when available (mlap._dpcore), else the pure-Python
fallback; see active_kernel().

lbl_schedule is the level-by-level deadline approximation: the root's
time set is all deadlines, and each node keeps a minimum hitting set of
its subtree's request windows, chosen from its parent's times.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

import numpy as np

from . import _dppy
from .config import EPS_TIME, assertions_enabled, pure_python_forced
from .errors import InfeasibleSchedule, InvariantViolation, OracleTooLarge, UnstabbableInterval
from .model import DeadlineCost, Instance, PwlCost, Service, cost_of_schedule, normalize_schedule

try:  # compiled kernel is optional; the fallback is semantically identical
    from . import _dpcore
except ImportError:  # pragma: no cover - depends on build environment
    _dpcore = None

_INF = math.inf


def active_kernel():
    """The DP kernel module selected for this process."""
    if pure_python_forced() or _dpcore is None:
        return _dppy
    return _dpcore


def kernel_by_name(name: str):
    if name in (None, "auto"):
        return active_kernel()
    if name in ("py", "pure", "pure-python"):
        return _dppy
    if name == "cython":
        if _dpcore is None:
            raise OracleTooLarge("compiled kernel not built in this environment")
        return _dpcore
    raise ValueError(f"unknown kernel {name!r}")


@dataclass(frozen=True)
class OracleLimits:
    max_nodes: int = 12
    max_grid: int = 48
    max_requests: int = 16
    max_states: int = 10_000_000


def oracle_grid(instance: Instance) -> tuple:
    """Lossless service-time grid for the instance's cost kinds."""
    times = set()
    for r in instance.requests:
        if isinstance(r.cost, DeadlineCost):
            times.add(r.cost.d)
            if not instance.all_deadline():
                times.add(r.arrival)
        else:
            times.add(r.arrival)
            if isinstance(r.cost, PwlCost):
                times.update(t for t, _ in r.cost.points)
    return tuple(sorted(t for t in times if 0.0 <= t <= instance.horizon + EPS_TIME))


def service_classes(instance: Instance):
    """Canonical candidate services, one per distinct served-request mask.

    Returns (weights, masks, node_sets) with index 0 = the empty service.
    Entry c covers exactly the requests whose bit is set in masks[c], at
    the minimum possible weight for that mask.
    """
    tree = instance.tree
    requests = instance.requests
    req_nodes = sorted({r.node for r in requests})
    k = len(req_nodes)
    path_sets = {v: frozenset(tree.root_path(v)) for v in req_nodes}

    by_mask = {}
    for sub in range(1, 1 << k):
        nodes = frozenset().union(
            *(path_sets[req_nodes[i]] for i in range(k) if sub >> i & 1)
        )
        rmask = 0
        for j, r in enumerate(requests):
            if r.node in nodes:
                rmask |= 1 << j
        weight = tree.set_weight(nodes)
        cur = by_mask.get(rmask)
        if cur is None or (weight, len(nodes)) < (cur[0], len(cur[1])):
            by_mask[rmask] = (weight, nodes)

    weights = [0.0]
    masks = [0]
    node_sets = [frozenset()]
    for rmask in sorted(by_mask):
        w, nodes = by_mask[rmask]
        weights.append(w)
        masks.append(rmask)
        node_sets.append(nodes)
    return weights, masks, node_sets


def brute_force_opt(instance: Instance, grid=None, limits: OracleLimits | None = None,
                    kernel: str | None = None):
    """Exact offline optimum: returns (schedule, cost).

    The search is exhaustive over the grid (default: oracle_grid), so it
    is the ground truth the online algorithms are measured against.
    Raises OracleTooLarge when the configured limits are exceeded.
    """
    limits = limits or OracleLimits()
    tree = instance.tree
    if tree.n > limits.max_nodes:
        raise OracleTooLarge(f"{tree.n} nodes > limit {limits.max_nodes}")
    requests = instance.requests
    n_req = len(requests)
    if n_req == 0:
        return (), 0.0
    if n_req > limits.max_requests:
        raise OracleTooLarge(f"{n_req} requests > limit {limits.max_requests}")
    grid = tuple(grid) if grid is not None else oracle_grid(instance)
    if len(grid) > limits.max_grid:
        raise OracleTooLarge(f"{len(grid)} grid points > limit {limits.max_grid}")
    distinct_nodes = len({r.node for r in requests})
    states = (len(grid) + 1) * (1 << n_req) * ((1 << distinct_nodes) + 1)
    if states > limits.max_states:
        raise OracleTooLarge(f"{states} DP states > limit {limits.max_states}")

    weights, masks, node_sets = service_classes(instance)
    arrived = [0] * len(grid)
    wait = np.empty((len(grid), n_req), dtype=np.float64)
    for g, t in enumerate(grid):
        for j, r in enumerate(requests):
            if r.arrival <= t + EPS_TIME:
                arrived[g] |= 1 << j
            if isinstance(r.cost, DeadlineCost):
                wait[g, j] = 0.0 if t <= r.cost.d + EPS_TIME else _INF
            else:
                wait[g, j] = r.wait_at(t)

    mod = kernel_by_name(kernel)
    cost, choices = mod.solve_dp(
        len(grid),
        n_req,
        np.asarray(weights, dtype=np.float64),
        np.asarray(masks, dtype=np.int64),
        np.asarray(arrived, dtype=np.int64),
        wait,
    )
    if choices is None:
        raise InfeasibleSchedule("no grid assignment serves every request")

    schedule = normalize_schedule(
        Service(grid[g], node_sets[c]) for g, c in enumerate(choices) if c != 0
    )
    if assertions_enabled():
        check = cost_of_schedule(instance, schedule).total
        if not math.isclose(check, cost, rel_tol=1e-9, abs_tol=1e-9):
            raise InvariantViolation(
                f"oracle reconstruction cost {check} != DP cost {cost}"
            )
    return schedule, cost


# --- hitting sets and the level-by-level deadline approximation ---------------


def hitting_set_min(intervals, candidates) -> tuple:
    """Minimum subset of candidate points stabbing every [a, d] interval.

    Earliest-deadline greedy: process intervals by increasing deadline;
    when one is unhit, take the largest candidate <= d that is >= a (ties
    toward the larger point keep later windows coverable). Exact minimum
    for interval stabbing. Raises UnstabbableInterval if some window
    contains no candidate.
    """
    cand = sorted(set(candidates))
    chosen = []
    for a, d in sorted(intervals, key=lambda iv: (iv[1], iv[0])):
        if any(a - EPS_TIME <= p <= d + EPS_TIME for p in chosen):
            continue
        i = bisect.bisect_right(cand, d + EPS_TIME)
        if i == 0 or cand[i - 1] < a - EPS_TIME:
            raise UnstabbableInterval(f"no candidate point inside [{a}, {d}]")
        chosen.append(cand[i - 1])
    return tuple(sorted(chosen))


@dataclass(frozen=True)
class LblResult:
    schedule: tuple
    scost: float
    times_by_node: tuple  # node id -> tuple of service times


def lbl_schedule(instance: Instance) -> LblResult:
    """Level-by-level deadline schedule (2-approximation of the optimum).

    The root's time set is every deadline; walking down the tree, each
    node keeps a minimum hitting set of its subtree's request windows
    drawn from its parent's set, so node sets are nested and every
    emitted service is automatically parent-closed.
    """
    if not instance.all_deadline():
        raise InfeasibleSchedule("level-by-level runs on deadline instances only")
    tree = instance.tree
    windows = [[] for _ in range(tree.n)]
    for r in instance.requests:
        for v in tree.root_path(r.node):
            windows[v].append((r.arrival, r.cost.d))

    times = [()] * tree.n
    times[0] = tuple(sorted({r.cost.d for r in instance.requests}))
    for v in sorted(range(1, tree.n), key=lambda u: tree.depth[u]):
        if windows[v]:
            times[v] = hitting_set_min(windows[v], times[tree.parent[v]])

    services = {}
    for v in range(1, tree.n):
        for t in times[v]:
            services.setdefault(t, {0}).add(v)
    # requests at the root itself only need some service inside the window
    for r in instance.requests:
        if r.node == 0:
            services.setdefault(r.cost.d, {0})
    schedule = normalize_schedule(Service(t, frozenset(vs)) for t, vs in services.items())
    scost = sum(tree.weight[v] * len(times[v]) for v in range(1, tree.n))
    return LblResult(schedule, scost, tuple(times))
