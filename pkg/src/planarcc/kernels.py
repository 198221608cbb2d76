"""Backend selection for the hot kernels.

The compiled ``_ckernels`` module is used when it imports; otherwise, or when
``PLANARCC_PURE_PYTHON=1`` is set, the numpy implementation is used.
"""

import os

from . import _kernels_py

_FUNCTIONS = (
    "normalize",
    "min_distance",
    "center_of_mass",
    "potential_inertia",
    "residual",
    "residual_jacobian",
    "lagrangian_hessian",
    "gauge_directions",
    "newton_step",
    "polish",
)

CONVERGED = _kernels_py.CONVERGED
MAX_ITER = _kernels_py.MAX_ITER
COLLISION = _kernels_py.COLLISION
STALLED = _kernels_py.STALLED
SINGULAR = _kernels_py.SINGULAR

STATUS_NAMES = {
    CONVERGED: "converged",
    MAX_ITER: "max_iter",
    COLLISION: "collision",
    STALLED: "stalled",
    SINGULAR: "singular",
}


def _load():
    if os.environ.get("PLANARCC_PURE_PYTHON", "") not in ("", "0"):
        return _kernels_py
    try:
        from . import _ckernels
    except ImportError:
        return _kernels_py
    return _ckernels


def available_backends():
    """Map of backend name to module, for tests and benchmarks."""
    out = {"python": _kernels_py}
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        out["cython"] = _ckernels
    return out


_backend = _load()
BACKEND = _backend.BACKEND

normalize = _backend.normalize
min_distance = _backend.min_distance
center_of_mass = _backend.center_of_mass
potential_inertia = _backend.potential_inertia
residual = _backend.residual
residual_jacobian = _backend.residual_jacobian
lagrangian_hessian = _backend.lagrangian_hessian
gauge_directions = _backend.gauge_directions
newton_step = _backend.newton_step
polish = _backend.polish
