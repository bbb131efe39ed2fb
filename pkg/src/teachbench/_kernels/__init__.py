"""Numeric kernel dispatch.

Two interchangeable backends implement the hot inner loops (logistic
regression descent, margin-feasibility LP): a numba-jitted one (default)
and a pure-numpy fallback. Set ``TEACHBENCH_KERNELS=numpy`` to force the
fallback; if numba is not importable the fallback is used automatically.
``benchmarks/bench_kernels.py`` compares the two.
"""

from __future__ import annotations

import os

_requested = os.environ.get("TEACHBENCH_KERNELS", "numba").lower()
if _requested not in ("numba", "numpy"):
    raise ValueError(
        f"TEACHBENCH_KERNELS must be 'numba' or 'numpy', got {_requested!r}"
    )

if _requested == "numba":
    try:
        from . import numba_impl as _impl

        BACKEND = "numba"
    except ImportError:
        from . import numpy_impl as _impl

        BACKEND = "numpy"
else:
    from . import numpy_impl as _impl

    BACKEND = "numpy"

logreg_gd = _impl.logreg_gd
margin_lp = _impl.margin_lp

CONVERGED = _impl.CONVERGED
BUDGET_EXHAUSTED = _impl.BUDGET_EXHAUSTED
DIVERGED = _impl.DIVERGED
LP_OK = _impl.LP_OK
LP_PIVOT_LIMIT = _impl.LP_PIVOT_LIMIT
