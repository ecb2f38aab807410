"""Runtime switches read from the environment.

``SUMSET_ORDERS_NO_JIT=1`` selects the pure-numpy kernels even when numba
is importable.  ``SUMSET_ORDERS_BUDGET_BITS`` overrides the default cap on
dense bit-vector size (and is the default enumeration budget for the
mod-p index space).
"""

import os

DEFAULT_BUDGET_BITS = 1 << 30
DEFAULT_ELEMENT_CUTOFF = 10**6


def _flag(name):
    return os.environ.get(name, "").strip().lower() in {"1", "true", "yes", "on"}


DISABLE_JIT = _flag("SUMSET_ORDERS_NO_JIT")


def budget_bits():
    raw = os.environ.get("SUMSET_ORDERS_BUDGET_BITS")
    if raw is None or not raw.strip():
        return DEFAULT_BUDGET_BITS
    return int(raw)
