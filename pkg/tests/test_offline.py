"""The exact offline optimum and the level-by-level approximation.

The reference implementation here (`assignment_opt`) is deliberately
different from the production DP: it enumerates every assignment of
requests to grid times directly and prices the implied services, with no
bitmask recurrences and no canonical-service precomputation. Agreement
between the two on many small instances is the core exactness evidence.
"""

from __future__ import annotations

import itertools
import math
import random

import pytest

from mlap.errors import OracleTooLarge, UnstabbableInterval
from mlap.model import (
    DeadlineCost,
    Instance,
    LinearCost,
    PwlCost,
    Request,
    Service,
    WeightedTree,
    cost_of_schedule,
)
from mlap.offline import (
    OracleLimits,
    brute_force_opt,
    hitting_set_min,
    lbl_schedule,
    oracle_grid,
    service_classes,
)


def assignment_opt(instance: Instance, grid) -> float:
    """Slow reference optimum: try every request -> service-time map."""
    tree, requests = instance.tree, instance.requests
    best = math.inf
    for combo in itertools.product(grid, repeat=len(requests)):
        cost = 0.0
        ok = True
        by_time: dict[float, set[int]] = {}
        for r, t in zip(requests, combo):
            if t < r.arrival - 1e-12:
                ok = False
                break
            w = r.wait_at(t)
            if math.isinf(w) or (r.deadline is not None and t > r.deadline + 1e-12):
                ok = False
                break
            cost += w
            by_time.setdefault(t, set()).add(r.node)
        if not ok:
            continue
        for t, nodes in by_time.items():
            cost += tree.set_weight(tree.spanning_service(nodes))
        best = min(best, cost)
    return best


def random_small_instance(rng: random.Random, kinds) -> Instance:
    n = rng.randint(2, 5)
    parent = [-1] + [rng.randrange(0, v) for v in range(1, n)]
    weight = [0.0] + [round(rng.uniform(0.5, 4.0), 2) for _ in range(n - 1)]
    tree = WeightedTree(parent, weight)
    reqs = []
    for rid in range(rng.randint(1, 4)):
        node = rng.randrange(1, n)
        arrival = round(rng.uniform(0.0, 3.0), 2)
        kind = rng.choice(kinds)
        if kind == "deadline":
            cost = DeadlineCost(round(arrival + rng.uniform(0.1, 3.0), 2))
        elif kind == "linear":
            cost = LinearCost()
        else:
            pts = [(arrival, 0.0)]
            t, v = arrival, 0.0
            for _ in range(rng.randint(1, 2)):
                t += round(rng.uniform(0.3, 2.0), 2)
                v += round(rng.uniform(0.0, 3.0), 2)
                pts.append((t, v))
            cost = PwlCost(tuple(pts))
        reqs.append(Request(rid, node, arrival, cost))
    horizon = max(
        [6.0]
        + [r.arrival for r in reqs]
        + [r.deadline for r in reqs if r.deadline is not None]
    )
    return Instance.make(tree, reqs, horizon=horizon)


class TestOracleGrid:
    def test_deadline_instances_use_deadlines_only(self):
        tree = WeightedTree([-1, 0], [0.0, 1.0])
        inst = Instance.make(
            tree,
            [Request(0, 1, 0.0, DeadlineCost(2.0)), Request(1, 1, 1.0, DeadlineCost(4.0))],
        )
        assert oracle_grid(inst) == (2.0, 4.0)

    def test_continuous_instances_use_arrivals_and_knots(self):
        tree = WeightedTree([-1, 0], [0.0, 1.0])
        inst = Instance.make(
            tree,
            [Request(0, 1, 1.0, PwlCost(((1.0, 0.0), (3.0, 2.0))))],
            horizon=5.0,
        )
        assert oracle_grid(inst) == (1.0, 3.0)


class TestServiceClasses:
    def test_classes_cover_masks_minimally(self):
        # root - a(5) - b(1); cheap to reach b only through a
        tree = WeightedTree([-1, 0, 1], [0.0, 5.0, 1.0])
        inst = Instance.make(
            tree,
            [Request(0, 1, 0.0, DeadlineCost(1.0)), Request(1, 2, 0.0, DeadlineCost(2.0))],
        )
        weights, masks, node_sets = service_classes(inst)
        assert weights[0] == 0.0 and masks[0] == 0
        by_mask = dict(zip(masks, zip(weights, node_sets)))
        assert by_mask[0b01] == (5.0, frozenset({0, 1}))
        # serving request 1 forces the path through a, which also covers request 0
        assert by_mask[0b11] == (6.0, frozenset({0, 1, 2}))
        assert 0b10 not in by_mask


class TestBruteForceOpt:
    @pytest.mark.parametrize("kinds", [("deadline",), ("linear", "pwl"), ("deadline", "linear")])
    def test_matches_assignment_reference(self, kinds):
        rng = random.Random(f"oracle-ref-{kinds}")
        for trial in range(40):
            inst = random_small_instance(rng, kinds)
            grid = oracle_grid(inst)
            if len(grid) ** len(inst.requests) > 5000:
                continue
            schedule, cost = brute_force_opt(inst)
            ref = assignment_opt(inst, grid)
            assert cost == pytest.approx(ref, rel=1e-9, abs=1e-9), f"trial {trial}"
            rep = cost_of_schedule(inst, schedule)
            assert rep.total == pytest.approx(cost, rel=1e-9, abs=1e-9)

    def test_never_beats_an_explicit_schedule(self):
        rng = random.Random("oracle-dominance")
        for _ in range(30):
            inst = random_small_instance(rng, ("linear", "pwl"))
            _, cost = brute_force_opt(inst)
            # price a haphazard but feasible schedule: serve everything at
            # each request's arrival
            services = [
                Service(r.arrival, inst.tree.spanning_service([r.node for r in inst.requests]))
                for r in inst.requests
            ]
            rep = cost_of_schedule(inst, services, require_feasible=False)
            assert cost <= rep.total + 1e-9

    def test_empty_instance_costs_nothing(self):
        tree = WeightedTree([-1, 0], [0.0, 1.0])
        inst = Instance.make(tree, [], horizon=1.0)
        schedule, cost = brute_force_opt(inst)
        assert schedule == () and cost == 0.0

    def test_limits_are_enforced(self):
        tree = WeightedTree([-1, 0], [0.0, 1.0])
        inst = Instance.make(tree, [Request(0, 1, 0.0, DeadlineCost(1.0))])
        with pytest.raises(OracleTooLarge):
            brute_force_opt(inst, limits=OracleLimits(max_requests=0))
        with pytest.raises(OracleTooLarge):
            brute_force_opt(inst, limits=OracleLimits(max_grid=0))

    def test_deadline_feasibility_respected(self):
        # two far-apart deadlines force two services
        tree = WeightedTree([-1, 0], [0.0, 3.0])
        inst = Instance.make(
            tree,
            [Request(0, 1, 0.0, DeadlineCost(1.0)), Request(1, 1, 2.0, DeadlineCost(5.0))],
        )
        schedule, cost = brute_force_opt(inst)
        assert len(schedule) == 2
        assert cost == pytest.approx(6.0)


class TestHittingSet:
    def brute_minimum(self, intervals, candidates):
        cand = sorted(set(candidates))
        for size in range(len(cand) + 1):
            for pick in itertools.combinations(cand, size):
                if all(any(a <= p <= d for p in pick) for a, d in intervals):
                    return size
        return None

    def test_matches_brute_force_size(self):
        rng = random.Random("stab")
        for _ in range(120):
            candidates = sorted(
                {round(rng.uniform(0, 10), 1) for _ in range(rng.randint(1, 6))}
            )
            intervals = []
            for _ in range(rng.randint(1, 5)):
                a = round(rng.uniform(0, 9), 1)
                d = round(a + rng.uniform(0.2, 4.0), 1)
                if any(a <= p <= d for p in candidates):
                    intervals.append((a, d))
            if not intervals:
                continue
            got = hitting_set_min(intervals, candidates)
            assert all(any(a - 1e-9 <= p <= d + 1e-9 for p in got) for a, d in intervals)
            assert len(got) == self.brute_minimum(intervals, candidates)

    def test_unstabbable_window_raises(self):
        with pytest.raises(UnstabbableInterval):
            hitting_set_min([(1.0, 2.0)], [0.5, 3.0])


class TestLbl:
    def test_two_approximation_on_random_deadline_instances(self):
        rng = random.Random("lbl-vs-opt")
        checked = 0
        for _ in range(60):
            inst = random_small_instance(rng, ("deadline",))
            res = lbl_schedule(inst)
            rep = cost_of_schedule(inst, res.schedule)  # raises if infeasible
            _, opt = brute_force_opt(inst)
            assert res.scost <= 2.0 * opt + 1e-9
            assert rep.total == pytest.approx(res.scost, rel=1e-12)  # wcost is zero
            checked += 1
        assert checked == 60

    def test_time_sets_are_nested(self):
        rng = random.Random("lbl-nested")
        for _ in range(40):
            inst = random_small_instance(rng, ("deadline",))
            res = lbl_schedule(inst)
            tree = inst.tree
            for v in range(1, tree.n):
                assert set(res.times_by_node[v]) <= set(res.times_by_node[tree.parent[v]])
