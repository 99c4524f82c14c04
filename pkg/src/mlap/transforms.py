"""Instance and tree transforms.

* `to_ratio_decreasing` reparents every node to its nearest ancestor that
  outweighs it by the chosen factor, giving the weight-decay property the
  online algorithms' guarantees rely on; `lift_service` maps services on
  the reduced tree back to the original by re-inserting the skipped path
  nodes, and `ReducedAlgorithm` packages the round trip as an online
  algorithm on the original tree.
* `embed_discrete` turns integer-sampled waiting costs into exact
  piecewise-linear ones.
* `stretch` opens a flat gap in the timeline at chosen instants; hard
  deadlines become steep ramps across their gap, which makes a deadline
  instance digestible by the continuous-cost algorithm.
* `encode_deadlines` pins each deadline's miss penalty to the weight of
  the node's root path (the price of serving that node alone).
"""

from __future__ import annotations

from dataclasses import dataclass

from .config import EPS_TIME
from .engine import OnlineAlgorithm
from .errors import BadParams, MissingGap, NonMonotoneSamples
from .io import instance_from_dict
from .model import (
    ROOT,
    DeadlineCost,
    Instance,
    LinearCost,
    PwlCost,
    Request,
    WeightedTree,
)


def lift_bound(depth: int, ratio: float) -> float:
    """Weight inflation cap of a lifted service: (depth-1)*ratio + 1."""
    return max(1.0, (depth - 1) * ratio + 1.0)


@dataclass(frozen=True)
class ReducedTree:
    original: WeightedTree
    tree: WeightedTree
    #: for each node, the original-tree nodes strictly between it and its
    #: new parent (these get re-inserted when a service is lifted back)
    skipped: tuple[tuple[int, ...], ...]


def to_ratio_decreasing(tree: WeightedTree, ratio: float) -> ReducedTree:
    """Reparent each node to its lowest ancestor at least `ratio` times
    heavier (ties qualify), or to the root when no ancestor is."""
    if ratio < 1.0:
        raise BadParams("reduction ratio must be at least 1")
    parent = [-1] * tree.n
    skipped: list[tuple[int, ...]] = [()] * tree.n
    for v in range(1, tree.n):
        inner: list[int] = []
        w = tree.parent[v]
        while w != ROOT and tree.weight[w] < ratio * tree.weight[v]:
            inner.append(w)
            w = tree.parent[w]
        parent[v] = w
        skipped[v] = tuple(inner)
    reduced = WeightedTree(parent, list(tree.weight))
    return ReducedTree(tree, reduced, tuple(skipped))


def lift_service(reduced: ReducedTree, nodes) -> frozenset[int]:
    """Map a reduced-tree service back to the original tree."""
    out = {ROOT}
    for v in nodes:
        out.add(v)
        if v != ROOT:
            out.update(reduced.skipped[v])
    return frozenset(out)


class ReducedAlgorithm(OnlineAlgorithm):
    """Run an online algorithm on the reduced tree, lift its services.

    The inner algorithm plays the reduced instance verbatim: it keeps its
    own pending set and only retires a request when one of its *own*
    services covers it, even though the lifted service may incidentally
    cover more.
    """

    def __init__(self, inner_factory, ratio: float):
        self.inner_factory = inner_factory
        self.ratio = ratio

    @property
    def name(self):
        inner = getattr(self, "inner", None)
        return f"{inner.name}-reduced" if inner is not None else "reduced"

    def start(self, instance):
        super().start(instance)
        self.reduced = to_ratio_decreasing(instance.tree, self.ratio)
        self.inner = self.inner_factory()
        self.inner.start(
            Instance(self.reduced.tree, instance.requests, instance.horizon)
        )
        self._inner_pending: dict[int, Request] = {}

    def _snapshot(self):
        return tuple(sorted(self._inner_pending.values(), key=lambda r: r.rid))

    def on_arrival(self, t, request):
        self._inner_pending[request.rid] = request
        self.inner.on_arrival(t, request)

    def next_trigger(self, t, pending):
        return self.inner.next_trigger(t, self._snapshot())

    def build_service(self, t, pending):
        inner_nodes, inner_meta = self.inner.build_service(t, self._snapshot())
        for rid in [
            r.rid for r in self._inner_pending.values() if r.node in inner_nodes
        ]:
            del self._inner_pending[rid]
        return lift_service(self.reduced, inner_nodes), {
            "kind": "lifted",
            "inner_nodes": frozenset(inner_nodes),
            "inner_meta": inner_meta,
        }

    def on_horizon(self, t, pending):
        inner_nodes = self.inner.on_horizon(t, self._snapshot())
        self._inner_pending.clear()
        if inner_nodes is None:
            return None
        return lift_service(self.reduced, inner_nodes)


def embed_discrete(raw: dict) -> Instance:
    """Parse an instance whose costs may be integer samples
    (``{"kind": "samples", "points": [[t, value], ...]}``) and replace
    each sample list with its exact piecewise-linear interpolation."""
    data = dict(raw)
    requests = []
    for req in raw.get("requests", []):
        req = dict(req)
        cost = req.get("cost", {})
        if isinstance(cost, dict) and cost.get("kind") == "samples":
            req["cost"] = {"kind": "pwl", "points": _samples_to_pwl(cost, req)}
        requests.append(req)
    data["requests"] = requests
    return instance_from_dict(data)


def _samples_to_pwl(cost: dict, req: dict) -> list[list[float]]:
    points = cost.get("points", [])
    if not points:
        raise BadParams("samples cost needs at least one point")
    arrival = req.get("arrival", 0)
    if float(arrival) != int(arrival):
        raise BadParams("sampled instances use integer arrivals")
    prev_t, prev_v = None, None
    for t, v in points:
        if float(t) != int(t):
            raise BadParams(f"sample time {t} is not an integer")
        if prev_t is not None and t <= prev_t:
            raise BadParams("sample times must be strictly increasing")
        if prev_v is not None and v < prev_v:
            raise NonMonotoneSamples(f"sample value drops at t={t}")
        prev_t, prev_v = t, v
    if points[0][1] != 0:
        raise BadParams("first sample value must be 0")
    if points[0][0] < int(arrival):
        raise BadParams("samples start before the arrival")
    return [[float(t), float(v)] for t, v in points]


def default_gaps(instance: Instance, rel: float = 1e-3) -> tuple[tuple[float, float], ...]:
    """One gap per distinct deadline, sized `rel` times the distance to
    the next event (arrival, deadline, or horizon)."""
    deadlines = sorted({r.deadline for r in instance.requests if r.deadline is not None})
    events = sorted(
        {r.arrival for r in instance.requests}
        | set(deadlines)
        | {instance.horizon}
    )
    gaps = []
    for d in deadlines:
        later = [e for e in events if e > d + EPS_TIME]
        eps = rel * (later[0] - d) if later else rel
        gaps.append((d, eps))
    return tuple(gaps)


def stretch(
    instance: Instance, gaps: tuple[tuple[float, float], ...] | None = None
) -> Instance:
    """Open flat gaps in the timeline and smooth each hard deadline into a
    ramp that climbs to its miss penalty across the gap at that deadline.

    Waiting costs pause during every gap, so any schedule on the original
    timeline maps to one here with identical cost; the result is fully
    continuous and a valid input for the general online algorithm.
    """
    if gaps is None:
        gaps = default_gaps(instance)
    gaps = tuple(sorted(gaps))
    seen = set()
    for h, eps in gaps:
        if eps <= 0.0:
            raise BadParams(f"gap at {h} has non-positive length {eps}")
        if h < 0.0 or h > instance.horizon + EPS_TIME:
            raise BadParams(f"gap at {h} lies outside the time range")
        if h in seen:
            raise BadParams(f"duplicate gap at {h}")
        seen.add(h)

    def shift(t: float) -> float:
        return t + sum(e for h, e in gaps if h < t)

    horizon = instance.horizon + sum(e for h, e in gaps if h <= instance.horizon)
    requests = []
    for r in instance.requests:
        requests.append(
            Request(r.rid, r.node, shift(r.arrival), _stretched_cost(r, gaps, shift, instance.horizon))
        )
    return Instance(instance.tree, tuple(requests), horizon)


def _stretched_cost(r: Request, gaps, shift, horizon: float):
    if isinstance(r.cost, DeadlineCost):
        d = r.cost.d
        hit = [(h, e) for h, e in gaps if abs(h - d) <= EPS_TIME]
        if not hit:
            raise MissingGap(f"deadline {d} of request {r.rid} has no gap to ramp over")
        h, eps = hit[0]
        return PwlCost(((shift(d), 0.0), (shift(d) + eps, r.cost.penalty)))
    if isinstance(r.cost, LinearCost):
        knots = [(r.arrival, 0.0)]
        val, t_prev = 0.0, r.arrival
        for h, eps in gaps:
            if h <= r.arrival or h > horizon:
                continue
            val += h - t_prev
            knots.append((shift(h), val))
            knots.append((shift(h) + eps, val))
            t_prev = h
        knots.append((shift(horizon), val + horizon - t_prev))
        return PwlCost(tuple(_dedupe(knots)))
    # piecewise linear: pin original knots, freeze values across gaps
    pts = list(r.cost.points)
    times = sorted({p[0] for p in pts} | {h for h, _ in gaps if pts[0][0] < h <= pts[-1][0]})
    knots = []
    for t in times:
        v = r.wait_at(t)
        knots.append((shift(t), v))
        if any(abs(h - t) <= EPS_TIME for h, _ in gaps):
            eps = next(e for h, e in gaps if abs(h - t) <= EPS_TIME)
            knots.append((shift(t) + eps, v))
    return PwlCost(tuple(_dedupe(knots)))


def _dedupe(knots):
    out = []
    for t, v in knots:
        if out and abs(t - out[-1][0]) <= 1e-15 and abs(v - out[-1][1]) <= 1e-15:
            continue
        out.append((t, v))
    return out


def encode_deadlines(instance: Instance) -> Instance:
    """Pin every deadline's miss penalty to the request's root-path weight."""
    requests = []
    for r in instance.requests:
        if isinstance(r.cost, DeadlineCost) and r.cost.penalty is None:
            penalty = instance.tree.path_weight(r.node)
            requests.append(Request(r.rid, r.node, r.arrival, DeadlineCost(r.cost.d, penalty)))
        else:
            requests.append(r)
    return Instance(instance.tree, tuple(requests), instance.horizon)
