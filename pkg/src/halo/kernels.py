"""Hot loops: the compiled extension when it was built, else pure Python."""

from __future__ import annotations

import os

import numpy as np

try:
    if os.environ.get("HALO_PURE_PYTHON"):
        raise ImportError("pure Python requested")
    from . import _kernels as _impl

    COMPILED = True
except ImportError:
    from . import _kernels_py as _impl

    COMPILED = False


def crossing_rates(phis, theta: float, kappa: float, t: float) -> np.ndarray:
    return _impl.crossing_rates(np.ascontiguousarray(phis, dtype=np.float64), float(theta), float(kappa), float(t))


def rational_blocks(p: int, q: int, l1: int, count: int) -> np.ndarray:
    if max(p, q) >= 2**62 or count >= 2**62:
        from . import _kernels_py

        return _kernels_py.rational_blocks(p, q, l1, count)
    return _impl.rational_blocks(p, q, l1, count)


def roof_chain(r1: float, ds, eps, betas):
    f = lambda a: np.ascontiguousarray(a, dtype=np.float64)
    return _impl.roof_chain(float(r1), f(ds), f(eps), f(betas))
