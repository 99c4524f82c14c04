"""Instance generators and the experiment runner.

Everything is seeded: the same family, seed, and parameters always
produce the same instance, so experiment CSVs are reproducible
byte-for-byte apart from the timing column (which `compare_reports`
ignores).
"""

from __future__ import annotations

import csv
import math
import random
import time
from dataclasses import dataclass

from .deadline import DeadlineAlgorithm
from .engine import run_online
from .errors import BadParams
from .maturity import MaturityAlgorithm
from .model import DeadlineCost, Instance, LinearCost, PwlCost, Request, WeightedTree
from .offline import OracleLimits, brute_force_opt
from .transforms import ReducedAlgorithm

REPORT_COLUMNS = ("instance", "alg", "alg_cost", "oracle_cost", "ratio", "services", "ms")


def gen_tree(
    rng: random.Random,
    depth: int = 3,
    max_children: int = 3,
    max_nodes: int = 10,
    ratio: float | None = 2.0,
    root_children: int = 1,
) -> WeightedTree:
    """Random tree; when `ratio` is set, every child weighs at most its
    parent's weight divided by the ratio (the weight-decay property)."""
    parent, weight = [-1], [0.0]
    frontier: list[int] = []
    for _ in range(root_children):
        if len(parent) >= max_nodes:
            break
        parent.append(0)
        weight.append(rng.uniform(2.0, 8.0))
        frontier.append(len(parent) - 1)
    for _ in range(2, depth + 1):
        nxt = []
        for v in frontier:
            for _ in range(rng.randint(1, max_children)):
                if len(parent) >= max_nodes:
                    break
                parent.append(v)
                if ratio is None:
                    weight.append(rng.uniform(0.5, 8.0))
                else:
                    weight.append(weight[v] / ratio * rng.uniform(0.3, 1.0))
                nxt.append(len(parent) - 1)
        frontier = nxt
    return WeightedTree(parent, weight)


def _pwl_cost(rng: random.Random, arrival: float, span: float) -> PwlCost:
    t, v = arrival, 0.0
    pts = [(t, v)]
    for _ in range(rng.randint(1, 3)):
        t += rng.uniform(0.2, span / 2)
        v += rng.uniform(0.0, 4.0)
        pts.append((t, v))
    return PwlCost(tuple(pts))


def gen_instance(
    family: str,
    seed: int,
    depth: int = 3,
    max_children: int = 3,
    max_nodes: int = 10,
    n_requests: int = 6,
    ratio: float = 2.0,
    span: float = 10.0,
    kinds: tuple[str, ...] = ("deadline",),
    single_phase: bool = False,
) -> Instance:
    """Seeded instance families.

    * ``ldec-random``: weight-decaying tree, requests of the given kinds.
    * ``random-tree``: arbitrary weights (no decay guarantee).
    * ``path``: a single path with weights 2**(depth-1) ... 1 and one
      deadline request per node (deterministic apart from deadlines).
    """
    rng = random.Random(f"{family}:{seed}:{depth}:{max_nodes}:{n_requests}")
    if family == "path":
        parent = [-1] + list(range(depth))
        weight = [0.0] + [float(2 ** (depth - 1 - i)) for i in range(depth)]
        tree = WeightedTree(parent, weight)
    elif family == "ldec-random":
        tree = gen_tree(rng, depth, max_children, max_nodes, ratio)
    elif family == "random-tree":
        tree = gen_tree(rng, depth, max_children, max_nodes, None, rng.randint(1, 2))
    else:
        raise BadParams(f"unknown instance family {family!r}")
    nodes = list(range(1, tree.n))
    reqs = []
    for rid in range(n_requests):
        node = rng.choice(nodes)
        arrival = 0.0 if single_phase else round(rng.uniform(0.0, span / 2), 3)
        kind = rng.choice(kinds)
        if kind == "deadline":
            cost = DeadlineCost(round(arrival + rng.uniform(0.1, span / 2), 3))
        elif kind == "linear":
            cost = LinearCost()
        elif kind == "pwl":
            cost = _pwl_cost(rng, arrival, span)
        else:
            raise BadParams(f"unknown cost kind {kind!r}")
        reqs.append(Request(rid, node, arrival, cost))
    horizon = max(
        [span]
        + [r.arrival for r in reqs]
        + [r.deadline for r in reqs if r.deadline is not None]
    )
    return Instance.make(tree, reqs, horizon=horizon)


def make_algorithm(name: str, ratio: float | None = None):
    """Factory for the named online algorithm."""
    if name == "deadline":
        return DeadlineAlgorithm(ratio)
    if name == "general":
        return MaturityAlgorithm(ratio)
    if name == "deadline-reduced":
        r = 2.0 if ratio is None else ratio
        return ReducedAlgorithm(lambda: DeadlineAlgorithm(r), r)
    if name == "general-reduced":
        r = 2.0 if ratio is None else ratio
        return ReducedAlgorithm(lambda: MaturityAlgorithm(r), r)
    raise BadParams(f"unknown algorithm {name!r}")


@dataclass(frozen=True)
class ReportRow:
    instance: str
    alg: str
    alg_cost: float
    oracle_cost: float | None
    ratio: float | None
    services: int
    ms: float

    def as_list(self) -> list:
        return [
            self.instance,
            self.alg,
            f"{self.alg_cost:.9g}",
            "" if self.oracle_cost is None else f"{self.oracle_cost:.9g}",
            "" if self.ratio is None else f"{self.ratio:.9g}",
            str(self.services),
            f"{self.ms:.3f}",
        ]


def run_experiment(
    instances,
    alg_names,
    ratio: float | None = None,
    oracle: bool = True,
    limits: OracleLimits | None = None,
) -> list[ReportRow]:
    """Run each named algorithm on each (name, instance) pair, optionally
    scoring against the exact offline optimum."""
    rows = []
    for inst_name, inst in instances:
        opt = brute_force_opt(inst, limits=limits)[1] if oracle else None
        for alg_name in alg_names:
            t0 = time.perf_counter()
            trace = run_online(inst, make_algorithm(alg_name, ratio))
            ms = (time.perf_counter() - t0) * 1e3
            cost = trace.report.total
            if opt is None:
                r = None
            elif opt <= 0.0:
                r = 1.0 if cost <= 0.0 else math.inf
            else:
                r = cost / opt
            rows.append(
                ReportRow(inst_name, alg_name, cost, opt, r, len(trace.schedule), ms)
            )
    return rows


def write_report(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(REPORT_COLUMNS)
        for row in rows:
            writer.writerow(row.as_list())


def read_report(path) -> list[list[str]]:
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def compare_reports(path_a, path_b, ignore: tuple[str, ...] = ("ms",)) -> list[str]:
    """Differences between two report CSVs, ignoring the named columns.
    An empty result means the reports agree."""
    a, b = read_report(path_a), read_report(path_b)
    if not a or not b or a[0] != list(REPORT_COLUMNS) or b[0] != list(REPORT_COLUMNS):
        return ["header mismatch"]
    keep = [i for i, c in enumerate(REPORT_COLUMNS) if c not in ignore]
    diffs = []
    if len(a) != len(b):
        diffs.append(f"row count {len(a) - 1} vs {len(b) - 1}")
    for i, (ra, rb) in enumerate(zip(a[1:], b[1:]), start=1):
        va, vb = [ra[j] for j in keep], [rb[j] for j in keep]
        if va != vb:
            diffs.append(f"row {i}: {va} != {vb}")
    return diffs


def emit_plot_data(report_path, x: str, y: str, out_path) -> int:
    """Project a report CSV onto two columns (plain `x,y` CSV for plotting)."""
    rows = read_report(report_path)
    if not rows or rows[0] != list(REPORT_COLUMNS):
        raise BadParams("not a report csv")
    xi, yi = REPORT_COLUMNS.index(x), REPORT_COLUMNS.index(y)
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([x, y])
        for row in rows[1:]:
            writer.writerow([row[xi], row[yi]])
    return len(rows) - 1
