"""Scan-kernel backend selection.

The compiled Cython kernel is preferred when the extension built; otherwise
the numpy implementation is used. ``SUPERRES_BACKEND=python`` forces the
fallback (``=compiled`` demands the extension and fails loudly without it).
Both backends implement the identical contract, so results do not depend on
the selection.
"""
from __future__ import annotations

import os

from . import pyscan

try:
    from . import cyscan
except ImportError:  # extension not built
    cyscan = None

_forced = os.environ.get("SUPERRES_BACKEND", "").strip().lower()
if _forced == "python":
    active = pyscan
elif _forced == "compiled":
    if cyscan is None:
        raise RuntimeError(
            "SUPERRES_BACKEND=compiled but the cyscan extension is not built"
        )
    active = cyscan
else:
    active = cyscan if cyscan is not None else pyscan


def backend_name() -> str:
    return "compiled" if active is cyscan and cyscan is not None else "python"


def available_backends() -> dict:
    """Name -> module for every importable backend (used by the benchmark)."""
    out = {"python": pyscan}
    if cyscan is not None:
        out["compiled"] = cyscan
    return out


def _c1(arr, dtype=float):
    import numpy as np

    return np.ascontiguousarray(arr, dtype=dtype)


def sup_fourier_diff(amps, nodes, ref, s_grid) -> float:
    return active.sup_fourier_diff(
        _c1(amps), _c1(nodes), _c1(ref, complex), _c1(s_grid)
    )


def feasible_scan(amp_combos, node_combos, ref, s_grid, eps_tol,
                  amp_min, amp_max, node_min, node_max) -> int:
    return active.feasible_scan(
        _c1(amp_combos), _c1(node_combos), _c1(ref, complex), _c1(s_grid),
        float(eps_tol), amp_min, amp_max, node_min, node_max,
    )
