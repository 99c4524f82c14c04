"""Time the exact-optimum dynamic program: compiled kernel vs pure Python.

Run from the repository root:

    python3 benchmarks/bench_oracle.py
    python3 benchmarks/bench_oracle.py --repeats 5 --requests 6 8 10

Both kernels walk the identical iteration order, so the costs they
return must match bit for bit; the script asserts that while timing.
"""

from __future__ import annotations

import argparse
import statistics
import time

from mlap import harness
from mlap.offline import OracleLimits, brute_force_opt


def bench_one(instance, kernel: str, repeats: int, limits: OracleLimits) -> tuple[float, float]:
    times = []
    cost = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        _, cost = brute_force_opt(instance, limits=limits, kernel=kernel)
        times.append(time.perf_counter() - t0)
    return statistics.median(times), cost


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--requests", type=int, nargs="+", default=[4, 6, 8, 10, 12])
    ap.add_argument("--nodes", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    limits = OracleLimits(max_requests=16, max_states=200_000_000)
    print(f"{'requests':>8} {'grid':>5} {'pure (ms)':>10} {'cython (ms)':>12} {'speedup':>8}")
    for n_req in args.requests:
        inst = harness.gen_instance(
            "ldec-random",
            seed=args.seed,
            depth=3,
            max_nodes=args.nodes,
            n_requests=n_req,
            kinds=("deadline", "linear"),
        )
        grid = len({r.arrival for r in inst.requests} | {inst.horizon})
        pure_ms, pure_cost = bench_one(inst, "pure", args.repeats, limits)
        cy_ms, cy_cost = bench_one(inst, "cython", args.repeats, limits)
        assert pure_cost == cy_cost, (pure_cost, cy_cost)
        print(
            f"{n_req:>8} {grid:>5} {pure_ms * 1e3:>10.2f} {cy_ms * 1e3:>12.2f} "
            f"{pure_ms / cy_ms:>7.1f}x"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
