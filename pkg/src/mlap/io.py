"""JSON serialization for instances and schedules.

Instance file layout (root node 0 is implicit and never listed):

    {
      "tree": {"nodes": [{"id": 1, "parent": 0, "weight": 4.0}, ...]},
      "requests": [
        {"node": 1, "arrival": 0.0, "cost": {"kind": "linear"}},
        {"node": 2, "arrival": 0.0, "cost": {"kind": "deadline", "d": 3.0}},
        {"node": 2, "arrival": 0.0,
         "cost": {"kind": "pwl", "points": [[0.0, 0.0], [2.0, 5.0]]}}
      ],
      "horizon": 10.0
    }

Deadline costs may carry an explicit "penalty"; when omitted it defaults
to the total weight on the request node's root path. The extra cost kind
"samples" ({"kind": "samples", "points": [[int_time, value], ...]}) is
accepted only as input to the embed-discrete transform, never inside a
validated instance.
"""

from __future__ import annotations

import json

from .errors import BadParams, UnsupportedCostKind
from .model import (
    DeadlineCost,
    Instance,
    LinearCost,
    PwlCost,
    Request,
    Service,
    WeightedTree,
)


def tree_to_dict(tree: WeightedTree) -> dict:
    return {
        "nodes": [
            {"id": v, "parent": tree.parent[v], "weight": tree.weight[v]}
            for v in range(1, tree.n)
        ]
    }


def tree_from_dict(d: dict) -> WeightedTree:
    nodes = d.get("nodes", [])
    n = len(nodes) + 1
    parent = [-1] * n
    weight = [0.0] * n
    seen = set()
    for row in nodes:
        v = int(row["id"])
        if not 1 <= v < n:
            raise BadParams(f"node ids must be dense 1..{n - 1}, got {v}")
        if v in seen:
            raise BadParams(f"duplicate node id {v}")
        seen.add(v)
        parent[v] = int(row["parent"])
        weight[v] = float(row["weight"])
    return WeightedTree(parent, weight)


def cost_to_dict(cost) -> dict:
    if isinstance(cost, LinearCost):
        return {"kind": "linear"}
    if isinstance(cost, DeadlineCost):
        out = {"kind": "deadline", "d": cost.d}
        if cost.penalty is not None:
            out["penalty"] = cost.penalty
        return out
    if isinstance(cost, PwlCost):
        return {"kind": "pwl", "points": [[t, v] for t, v in cost.points]}
    raise UnsupportedCostKind(type(cost).__name__)


def cost_from_dict(d: dict):
    kind = d.get("kind")
    if kind == "linear":
        return LinearCost()
    if kind == "deadline":
        penalty = d.get("penalty")
        return DeadlineCost(float(d["d"]), None if penalty is None else float(penalty))
    if kind == "pwl":
        return PwlCost(tuple((float(t), float(v)) for t, v in d["points"]))
    if kind == "samples":
        raise UnsupportedCostKind(
            "cost kind 'samples' is transform input only; run embed-discrete first"
        )
    raise UnsupportedCostKind(f"unknown cost kind {kind!r}")


def instance_to_dict(instance: Instance) -> dict:
    return {
        "tree": tree_to_dict(instance.tree),
        "requests": [
            {"node": r.node, "arrival": r.arrival, "cost": cost_to_dict(r.cost)}
            for r in instance.requests
        ],
        "horizon": instance.horizon,
    }


def instance_from_dict(d: dict) -> Instance:
    tree = tree_from_dict(d["tree"])
    requests = tuple(
        Request(i, int(row["node"]), float(row.get("arrival", 0.0)), cost_from_dict(row["cost"]))
        for i, row in enumerate(d.get("requests", []))
    )
    horizon = d.get("horizon")
    return Instance.make(tree, requests, None if horizon is None else float(horizon))


def load_instance(path) -> Instance:
    with open(path) as fh:
        return instance_from_dict(json.load(fh))


def save_instance(instance: Instance, path):
    with open(path, "w") as fh:
        json.dump(instance_to_dict(instance), fh, indent=2)
        fh.write("\n")


def schedule_to_dict(services) -> list:
    return [{"t": s.time, "nodes": sorted(s.nodes)} for s in services]


def schedule_from_dict(rows) -> tuple:
    return tuple(Service(float(row["t"]), frozenset(int(v) for v in row["nodes"])) for row in rows)


def load_schedule(path) -> tuple:
    with open(path) as fh:
        return schedule_from_dict(json.load(fh))


def save_schedule(services, path):
    with open(path, "w") as fh:
        json.dump(schedule_to_dict(services), fh, indent=2)
        fh.write("\n")
