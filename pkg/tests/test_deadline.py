"""The deadline-triggered online algorithm."""

from __future__ import annotations

import pytest

from mlap.deadline import DeadlineAlgorithm, growth_bound, is_ratio_decreasing, subtree_min_deadlines
from mlap.engine import run_online
from mlap.errors import UnsupportedCostKind
from mlap.harness import gen_instance
from mlap.model import DeadlineCost, Instance, LinearCost, Request, WeightedTree
from mlap.offline import brute_force_opt


@pytest.fixture
def decaying_tree():
    # root - a(8) - {b(4), c(4)}; b - d(2)
    return WeightedTree([-1, 0, 1, 1, 2], [0.0, 8.0, 4.0, 4.0, 2.0])


class TestHelpers:
    def test_growth_bound_values(self):
        assert growth_bound(1, 2.0) == 1.0
        assert growth_bound(3, 2.0) == pytest.approx(6.25)
        assert growth_bound(4, 5.0) == pytest.approx(2.2**3)

    def test_ratio_decreasing_detection(self, decaying_tree):
        assert is_ratio_decreasing(decaying_tree, 2.0)
        assert not is_ratio_decreasing(decaying_tree, 2.1)

    def test_subtree_min_deadlines(self, decaying_tree):
        reqs = [
            Request(0, 4, 0.0, DeadlineCost(3.0)),
            Request(1, 3, 0.0, DeadlineCost(1.0)),
        ]
        dmin = subtree_min_deadlines(decaying_tree, reqs)
        assert dmin[4] == 3.0
        assert dmin[2] == 3.0   # through d
        assert dmin[3] == 1.0
        assert dmin[1] == 1.0 and dmin[0] == 1.0


class TestDeadlineAlgorithm:
    def test_rejects_continuous_costs(self, decaying_tree):
        inst = Instance.make(decaying_tree, [Request(0, 1, 0.0, LinearCost())], horizon=2.0)
        with pytest.raises(UnsupportedCostKind):
            run_online(inst, DeadlineAlgorithm())

    def test_serves_exactly_at_first_deadline(self, decaying_tree):
        inst = Instance.make(
            decaying_tree,
            [Request(0, 4, 0.0, DeadlineCost(2.0)), Request(1, 3, 0.0, DeadlineCost(7.0))],
        )
        trace = run_online(inst, DeadlineAlgorithm(2.0))
        assert trace.records[0].time == 2.0
        assert trace.report.wcost == 0.0

    def test_service_always_contains_trigger_path(self, decaying_tree):
        inst = Instance.make(
            decaying_tree,
            [Request(0, 4, 0.0, DeadlineCost(1.0)), Request(1, 3, 0.0, DeadlineCost(1.5))],
        )
        trace = run_online(inst, DeadlineAlgorithm(2.0))
        first = trace.records[0]
        assert {0, 1, 2, 4} <= set(first.nodes)  # root path of the trigger

    def test_growth_fills_weight_budget_by_urgency(self, decaying_tree):
        # trigger under b: level 2 gets both children of a (urgent first),
        # because each level matches the parent's weight
        inst = Instance.make(
            decaying_tree,
            [
                Request(0, 4, 0.0, DeadlineCost(2.0)),
                Request(1, 3, 0.0, DeadlineCost(9.0)),
            ],
        )
        trace = run_online(inst, DeadlineAlgorithm(2.0))
        first = trace.records[0]
        # budget at a (8) admits both b and c (4+4); d under b by its budget
        assert set(first.nodes) == {0, 1, 2, 3, 4}

    def test_request_at_root_served_alone(self, decaying_tree):
        inst = Instance.make(decaying_tree, [Request(0, 0, 0.0, DeadlineCost(1.0))])
        trace = run_online(inst, DeadlineAlgorithm(2.0))
        assert trace.schedule[0].nodes == frozenset({0})
        assert trace.report.total == 0.0

    def test_multiple_root_children_trigger_independently(self):
        tree = WeightedTree([-1, 0, 0], [0.0, 3.0, 5.0])
        inst = Instance.make(
            tree,
            [Request(0, 1, 0.0, DeadlineCost(1.0)), Request(1, 2, 0.0, DeadlineCost(1.0))],
        )
        trace = run_online(inst, DeadlineAlgorithm())
        # both expire at t=1; the engine merges the two same-time services
        assert trace.schedule == (trace.schedule[0],)
        assert trace.schedule[0].nodes == frozenset({0, 1, 2})
        assert trace.report.wcost == 0.0


class TestSeededSweep:
    def test_feasible_and_weight_bounded_on_decaying_instances(self):
        for seed in range(25):
            inst = gen_instance("ldec-random", seed, n_requests=5, max_nodes=8)
            ratio = 2.0
            assert is_ratio_decreasing(inst.tree, ratio)
            trace = run_online(inst, DeadlineAlgorithm(ratio))
            assert trace.report.wcost == 0.0  # deadlines all met
            cap = growth_bound(inst.tree.max_depth, ratio)
            for rec in trace.records:
                anchor = rec.meta.get("anchor")
                if anchor is None:
                    continue
                assert inst.tree.set_weight(rec.nodes) <= cap * inst.tree.weight[anchor] + 1e-9

    def test_competitive_against_oracle(self):
        worst = 0.0
        for seed in range(25):
            inst = gen_instance("ldec-random", seed + 100, n_requests=5, max_nodes=8)
            trace = run_online(inst, DeadlineAlgorithm(2.0))
            _, opt = brute_force_opt(inst)
            if opt > 0:
                worst = max(worst, trace.report.total / opt)
            assert trace.report.total <= growth_bound(inst.tree.max_depth, 2.0) * opt + 1e-6
        assert worst >= 1.0  # sanity: the sweep actually measured something
