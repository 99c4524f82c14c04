"""Numeric tolerances and runtime toggles.

EPS_TIME is the absolute slack used when comparing event times; it is a
module-level constant rather than a per-call argument so every component
agrees on what "the same instant" means.
"""

import os

# Absolute tolerance for time comparisons (event ordering, trigger clamping).
EPS_TIME = 1e-9

# Relative factor applied to the smallest positive gap between candidate
# stopping times when an adversary stops "right after" an event.
EPS_STOP_FACTOR = 1e-6


def assertions_enabled() -> bool:
    """Inline invariant checks are on unless MLAP_ASSERT=0."""
    return os.environ.get("MLAP_ASSERT", "1") != "0"


def pure_python_forced() -> bool:
    """MLAP_PURE=1 forces the pure-Python oracle kernel."""
    return os.environ.get("MLAP_PURE", "0") == "1"
