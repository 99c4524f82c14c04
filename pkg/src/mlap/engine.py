"""Event-driven simulation of online algorithms on one instance.

The engine owns the clock and the pending set; algorithms are queried
for their next trigger time and asked to build a service when it fires.
Event order at equal times is: arrivals, then triggers, then the final
horizon sweep. The engine re-queries the trigger after every event, so
algorithms may trigger repeatedly at one instant (the services merge
during schedule normalization).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .config import EPS_TIME, assertions_enabled
from .errors import AlgorithmStall, InvariantViolation
from .model import Instance, Service, cost_of_schedule, normalize_schedule, validate_service


def urgent_select(candidates, budget, urgency, weight_of) -> tuple:
    """Smallest most-urgent prefix whose total weight reaches `budget`.

    Candidates are ranked by (urgency value, node id) ascending — +inf
    urgency is allowed and ranks after every finite value. The prefix
    stops as soon as its weight reaches the budget; if the whole
    candidate set stays below the budget it is returned entirely.
    A budget <= 0 selects nothing.
    """
    if budget <= 0:
        return ()
    ranked = sorted(candidates, key=lambda v: (urgency(v), v))
    out = []
    total = 0.0
    for v in ranked:
        out.append(v)
        total += weight_of(v)
        if total >= budget:
            break
    return tuple(out)


class OnlineAlgorithm:
    """Interface the engine drives; subclasses implement the triggers.

    `pending` arguments are tuples of Requests sorted by rid. Algorithms
    may keep internal state (see transforms.ReducedAlgorithm, which
    simulates an inner algorithm on a reduced tree) — the engine's
    pending set is authoritative only for serving and cost accounting.
    """

    name = "base"

    def start(self, instance: Instance):
        self.instance = instance

    def on_arrival(self, t, request):
        pass

    def next_trigger(self, t, pending):
        """Earliest time >= t at which the algorithm wants to serve."""
        raise NotImplementedError

    def build_service(self, t, pending):
        """Return (node set, meta dict) for the service fired at t."""
        raise NotImplementedError

    def on_horizon(self, t, pending):
        """Forced final service; default spans every pending node."""
        if not pending:
            return None
        return self.instance.tree.spanning_service({r.node for r in pending})


@dataclass
class ServiceRecord:
    time: float
    nodes: frozenset
    meta: dict = field(default_factory=dict)


@dataclass
class EngineTrace:
    instance: Instance
    algorithm: str
    records: list
    schedule: tuple
    report: object  # CostReport

    @property
    def total_cost(self) -> float:
        return self.report.total


def run_online(instance: Instance, alg: OnlineAlgorithm) -> EngineTrace:
    """Simulate `alg` on `instance` and return the full trace."""
    arrivals = sorted(instance.requests, key=lambda r: (r.arrival, r.rid))
    horizon = instance.horizon
    alg.start(instance)

    pending = {}
    records = []
    idx = 0
    now = 0.0
    # generous cap: every trigger must serve at least one pending request
    max_services = 2 * len(instance.requests) + 4

    while True:
        snapshot = tuple(sorted(pending.values(), key=lambda r: r.rid))
        next_arrival = arrivals[idx].arrival if idx < len(arrivals) else None
        trigger = alg.next_trigger(now, snapshot)
        if trigger is not None:
            if trigger < now - EPS_TIME and assertions_enabled():
                raise InvariantViolation(
                    f"{alg.name}: trigger {trigger} is in the past (now={now})"
                )
            trigger = max(trigger, now)

        if next_arrival is not None and (trigger is None or next_arrival <= trigger) and (
            next_arrival <= horizon + EPS_TIME
        ):
            now = next_arrival
            while idx < len(arrivals) and arrivals[idx].arrival == next_arrival:
                req = arrivals[idx]
                pending[req.rid] = req
                alg.on_arrival(now, req)
                idx += 1
            continue

        if trigger is not None and trigger <= horizon + EPS_TIME:
            now = trigger
            nodes, meta = alg.build_service(now, snapshot)
            nodes = frozenset(nodes)
            service = Service(now, nodes)
            validate_service(instance.tree, service)
            served = tuple(r.rid for r in snapshot if r.node in nodes)
            meta = dict(meta)
            meta.update(pending_before=tuple(r.rid for r in snapshot), served=served)
            records.append(ServiceRecord(now, nodes, meta))
            for rid in served:
                pending.pop(rid, None)
            if len(records) > max_services:
                raise AlgorithmStall(
                    f"{alg.name}: {len(records)} services without draining the pending set"
                )
            continue

        # horizon sweep
        now = horizon
        snapshot = tuple(sorted(pending.values(), key=lambda r: r.rid))
        nodes = alg.on_horizon(now, snapshot)
        if nodes:
            service = Service(now, frozenset(nodes))
            validate_service(instance.tree, service)
            served = tuple(r.rid for r in snapshot if r.node in service.nodes)
            records.append(
                ServiceRecord(
                    now,
                    service.nodes,
                    {"kind": "horizon", "pending_before": tuple(r.rid for r in snapshot),
                     "served": served},
                )
            )
            for rid in served:
                pending.pop(rid, None)
        if pending:
            raise AlgorithmStall(
                f"{alg.name}: requests {sorted(pending)} still pending at the horizon"
            )
        break

    schedule = normalize_schedule(Service(rec.time, rec.nodes) for rec in records)
    report = cost_of_schedule(instance, schedule)
    return EngineTrace(instance, alg.name, records, schedule, report)
