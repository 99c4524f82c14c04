"""Pure-Python oracle DP kernel (fallback for mlap._dpcore).

Both kernels implement the identical forward DP over (grid index,
served-request bitmask) with identical iteration order and tie-breaking,
so their results match float-for-float. Keep any semantic change in sync
with _dpcore.pyx.
"""

import math

KERNEL_NAME = "pure-python"

_INF = math.inf


def solve_dp(n_grid, n_req, class_weight, class_mask, arrived, wait):
    """Minimize total cost over per-grid-time service choices.

    class_weight[c], class_mask[c]: weight and served-request bitmask of
    candidate service c (class 0 is "no service": weight 0, mask 0);
    arrived[g]: bitmask of requests arrived by grid time g; wait[g][r]:
    waiting cost of serving request r at grid time g (inf = forbidden).
    Returns (cost, choices) where choices[g] is the class picked at g on
    one optimal path, or (inf, None) when no assignment serves everyone.
    """
    # normalize possibly-numpy inputs to plain Python scalars: the bit
    # tricks below need arbitrary-precision ints
    class_weight = [float(w) for w in class_weight]
    class_mask = [int(m) for m in class_mask]
    arrived = [int(a) for a in arrived]
    wait = [[float(w) for w in row] for row in wait]

    n_states = 1 << n_req
    n_classes = len(class_weight)
    best = [[_INF] * n_states for _ in range(n_grid + 1)]
    prev = [[0] * n_states for _ in range(n_grid + 1)]
    choice = [[0] * n_states for _ in range(n_grid + 1)]
    best[0][0] = 0.0

    for g in range(n_grid):
        row = best[g]
        nxt = best[g + 1]
        arr = arrived[g]
        wrow = wait[g]
        for m in range(n_states):
            base = row[m]
            if base == _INF:
                continue
            for c in range(n_classes):
                nm = m | (class_mask[c] & arr)
                if c != 0 and nm == m:
                    continue  # paid service that serves nothing new
                add = class_weight[c]
                bits = nm & ~m
                feasible = True
                while bits:
                    r = (bits & -bits).bit_length() - 1
                    w = wrow[r]
                    if w == _INF:
                        feasible = False
                        break
                    add += w
                    bits &= bits - 1
                if not feasible:
                    continue
                cost = base + add
                if cost < nxt[nm]:
                    nxt[nm] = cost
                    prev[g + 1][nm] = m
                    choice[g + 1][nm] = c

    full = n_states - 1
    cost = best[n_grid][full]
    if cost == _INF:
        return _INF, None
    choices = [0] * n_grid
    m = full
    for g in range(n_grid, 0, -1):
        choices[g - 1] = choice[g][m]
        m = prev[g][m]
    return cost, choices
