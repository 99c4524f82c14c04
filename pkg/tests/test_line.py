"""Half-line delivery: the doubled-reach online rule, exact small-case
optima, the adaptive stopping adversary, lower-bound generators, and the
exact bidding-ratio solver."""

from __future__ import annotations

import math
from fractions import Fraction

import pytest

from mlap.errors import BadParams, OverflowGuard
from mlap.line import (
    AdversaryReport,
    Delivery,
    LineInstance,
    LineRequest,
    LineTrace,
    adaptive_adversary,
    bidding_optimal_ratio,
    brute_force_line_opt,
    dline_run,
    gen_lb_mlapd,
    gen_lb_mlapl,
    line_from_dict,
    line_opt_expiring,
    line_to_dict,
)


def deadline_instance(pairs):
    return LineInstance(
        tuple(LineRequest(i, x, 0.0, deadline=d) for i, (x, d) in enumerate(pairs))
    )


class TestModel:
    def test_request_validation(self):
        with pytest.raises(BadParams):
            LineRequest(0, 0.0, 0.0, deadline=1.0)
        with pytest.raises(BadParams):
            LineRequest(0, 1.0, 2.0, deadline=1.0)  # expires before arriving
        with pytest.raises(BadParams):
            LineRequest(0, 1.0, 0.0, weight=0.0)
        # no deadline means a linear waiting cost with the default weight
        assert LineRequest(0, 1.0, 0.0).weight == 1.0

    def test_instance_rejects_duplicate_ids(self):
        reqs = (
            LineRequest(0, 1.0, 0.0, deadline=1.0),
            LineRequest(0, 2.0, 0.0, deadline=2.0),
        )
        with pytest.raises(BadParams):
            LineInstance(reqs)

    def test_dict_round_trip(self):
        inst = LineInstance(
            (
                LineRequest(0, 1.0, 0.0, deadline=1.0),
                LineRequest(1, 1.5, 1.5, weight=4.0),
            )
        )
        assert line_from_dict(line_to_dict(inst)) == inst


class TestDlineRun:
    def test_doubling_chain(self):
        inst = deadline_instance([(1.0, 1.0), (3.0, 3.0), (7.0, 7.0), (15.0, 15.0)])
        trace = dline_run(inst)
        assert [(d.time, d.reach) for d in trace.deliveries] == [
            (1.0, 2.0),
            (3.0, 6.0),
            (7.0, 14.0),
            (15.0, 30.0),
        ]
        assert trace.cost == 52.0

    def test_two_request_gap(self):
        inst = deadline_instance([(1.0, 1.0), (3.0, 2.0)])
        trace = dline_run(inst)
        assert [(d.time, d.reach) for d in trace.deliveries] == [(1.0, 2.0), (2.0, 6.0)]
        assert trace.cost == 8.0
        assert brute_force_line_opt(inst) == pytest.approx(3.0)

    def test_one_delivery_covers_nearby_pending(self):
        inst = deadline_instance([(1.0, 1.0), (1.8, 5.0)])
        trace = dline_run(inst)
        # the first delivery reaches 2.0 and clears both
        assert len(trace.deliveries) == 1
        assert trace.served_at == {0: 1.0, 1: 1.0}

    def test_unarrived_requests_wait(self):
        inst = LineInstance(
            (
                LineRequest(0, 1.0, 0.0, deadline=1.0),
                LineRequest(1, 1.5, 1.5, deadline=2.0),
            )
        )
        trace = dline_run(inst)
        assert [(d.time, d.reach) for d in trace.deliveries] == [(1.0, 2.0), (2.0, 3.0)]
        assert trace.served_at == {0: 1.0, 1: 2.0}
        assert brute_force_line_opt(inst) == pytest.approx(2.5)

    def test_rejects_weight_requests(self):
        inst = LineInstance((LineRequest(0, 1.0, 0.0, weight=2.0),))
        with pytest.raises(BadParams):
            dline_run(inst)


class TestExpiringOpt:
    def test_counts_only_expired_obligations(self):
        inst = deadline_instance([(1.0, 1.0), (3.0, 2.0)])
        assert line_opt_expiring(inst, 0.5) == 0.0
        assert line_opt_expiring(inst, 1.5) == 1.0
        assert line_opt_expiring(inst, 2.5) == 3.0

    def test_agrees_with_brute_force_when_everything_expires(self):
        for pairs in (
            [(1.0, 1.0)],
            [(2.0, 1.0), (1.0, 2.0)],
            [(1.0, 1.0), (3.0, 2.0), (2.0, 4.0)],
        ):
            inst = deadline_instance(pairs)
            theta = max(d for _, d in pairs) + 1.0
            assert line_opt_expiring(inst, theta) == pytest.approx(
                brute_force_line_opt(inst, theta)
            )


class TestAdversary:
    def test_two_request_worst_stop(self):
        rep = adaptive_adversary(deadline_instance([(1.0, 1.0), (3.0, 2.0)]))
        assert not rep.unbounded
        assert rep.worst.ratio == pytest.approx(8.0 / 3.0)
        assert rep.worst.theta == pytest.approx(2.0, abs=1e-3)

    def test_flags_speculative_deliveries(self):
        # a strategy that pays before anything is owed can be stopped at
        # ratio infinity
        def eager(instance):
            return LineTrace(
                (Delivery(0.5, 2.0), Delivery(5.0, 2.0)),
                4.0,
                {r.rid: 5.0 for r in instance.requests},
            )

        rep = adaptive_adversary(deadline_instance([(2.0, 5.0)]), run=eager)
        assert rep.unbounded
        assert any(math.isinf(r.ratio) for r in rep.rows)

    def test_generated_deadline_family_pushes_toward_four(self):
        rep = adaptive_adversary(gen_lb_mlapd(100))
        assert rep.worst.ratio >= 3.8


class TestGenerators:
    def test_deadline_family_shape(self):
        inst = gen_lb_mlapd(4)
        assert [(r.x, r.deadline) for r in inst.requests] == [
            (1.0, 1.0),
            (2.0, 2.0),
            (3.0, 3.0),
            (4.0, 4.0),
        ]
        assert inst.all_deadline() and inst.single_phase()

    def test_linear_family_weights_decay_geometrically(self):
        inst = gen_lb_mlapl(3)
        assert [(r.x, r.weight) for r in inst.requests] == [
            (1.0, 36.0),
            (2.0, 6.0),
            (3.0, 1.0),
        ]

    def test_linear_family_overflow_guard(self):
        with pytest.raises(OverflowGuard):
            gen_lb_mlapl(31)


def witness_worst_ratio(seq):
    worst = Fraction(0)
    total = 0
    prev = 0
    for b in seq:
        total += b
        worst = max(worst, Fraction(total, prev + 1))
        prev = b
    return worst


class TestBidding:
    @pytest.mark.parametrize(
        "target,ratio", [(1, Fraction(1)), (2, Fraction(3, 2)), (4, Fraction(2))]
    )
    def test_small_targets(self, target, ratio):
        res = bidding_optimal_ratio(target)
        assert res.ratio == ratio

    def test_known_witnesses(self):
        assert bidding_optimal_ratio(4).witness == (2, 4)
        res = bidding_optimal_ratio(16)
        assert res.ratio == Fraction(20, 7)
        assert res.witness == (2, 6, 12, 16)

    def test_witness_is_tight_and_reaches_target(self):
        for target in (1, 2, 3, 4, 8, 16, 32, 64):
            res = bidding_optimal_ratio(target)
            seq = res.witness
            assert seq[-1] >= target
            assert all(a < b for a, b in zip(seq, seq[1:]))
            assert witness_worst_ratio(seq) == res.ratio

    def test_monotone_in_target(self):
        prev = Fraction(0)
        for k in range(0, 8):
            cur = bidding_optimal_ratio(2**k).ratio
            assert cur >= prev
            prev = cur
        assert prev < 4

    def test_target_guards(self):
        with pytest.raises(BadParams):
            bidding_optimal_ratio(0)
        with pytest.raises(BadParams):
            bidding_optimal_ratio(4097)
