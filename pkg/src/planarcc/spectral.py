"""Morse index of a central configuration on the shape space.

The Hessian of U - lambda (I - 1), lambda = -U/(2I), is restricted to the
directions that are orthogonal, in the mass inner product, to the two
translations, the rotation generator and the dilation. That leaves 2n - 4
eigenvalues; a local minimum of U on the shape space has index 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import null_space

from . import kernels
from .config import Configuration, normalize

TOL_EIG = 1e-10
TOL_DEGENERATE = 1e-8
CRITICAL_TOL = 1e-10


class NotCriticalError(ValueError):
    """The configuration is not (numerically) central."""


@dataclass(frozen=True)
class IndexReport:
    index: int
    eigenvalues: tuple[float, ...]
    degenerate: bool
    gap: float

    def to_dict(self) -> dict:
        return {"index": self.index, "eigenvalues": list(self.eigenvalues),
                "degenerate": self.degenerate, "gap": self.gap}


def reduced_basis(c: Configuration, rng: np.random.Generator | None = None) -> np.ndarray:
    """Columns span the gauge-orthogonal tangent space, orthonormal in the mass metric.

    With ``rng`` the orthonormal basis is drawn at random; the spectrum of the
    reduced Hessian does not depend on that choice.
    """
    n = c.n
    w = np.sqrt(np.repeat(c.masses.array, 2))
    x = c.positions - kernels.center_of_mass(c.positions, c.masses.array)
    g = w[:, None] * kernels.gauge_directions(x)
    if rng is None:
        basis = null_space(g.T)
    else:
        q, _ = np.linalg.qr(np.hstack([g, rng.standard_normal((2 * n, 2 * n - 4))]))
        basis = q[:, 4:]
    return basis / w[:, None]


def reduced_hessian(c: Configuration, rng: np.random.Generator | None = None,
                    critical_tol: float = CRITICAL_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Projected (2n-4) x (2n-4) Hessian and the basis it is expressed in."""
    c = normalize(c)
    f, _ = kernels.residual(c.positions, c.masses.array)
    norm = float(np.abs(f).max())
    limit = critical_tol * c.masses.residual_scale
    if norm > limit:
        raise NotCriticalError(f"residual {norm:.3g} exceeds {limit:g}")
    basis = reduced_basis(c, rng)
    hess = kernels.lagrangian_hessian(c.positions, c.masses.array)
    red = basis.T @ hess @ basis
    return 0.5 * (red + red.T), basis


def index_from_spectrum(eig, tol_eig: float = TOL_EIG,
                        tol_degenerate: float = TOL_DEGENERATE) -> IndexReport:
    eig = np.sort(np.asarray(eig, dtype=float))
    scale = float(np.abs(eig).max()) if eig.size else 0.0
    if scale == 0.0:
        return IndexReport(0, tuple(float(e) for e in eig), True, 0.0)
    gap = float(np.abs(eig).min()) / scale
    index = int(np.sum(eig < -tol_eig * scale))
    return IndexReport(index, tuple(float(e) for e in eig), gap < tol_degenerate, gap)


def morse_index(c: Configuration, tol_eig: float = TOL_EIG,
                tol_degenerate: float = TOL_DEGENERATE,
                critical_tol: float = CRITICAL_TOL) -> IndexReport:
    red, _ = reduced_hessian(c, critical_tol=critical_tol)
    return index_from_spectrum(np.linalg.eigvalsh(red), tol_eig, tol_degenerate)


def fd_validate(c: Configuration, directions: int = 20, step: float = 1e-4,
                seed: int = 0, hessian: np.ndarray | None = None) -> float:
    """Largest deviation between the analytic reduced Hessian and finite differences of U.

    Each direction v is mass-unit and gauge-orthogonal, so the great circle
    cos(s) x + sin(s) v stays on I = 1 with the center of mass fixed; the
    second derivative of U along it at s = 0 must equal v^T H v. Deviations
    are relative to the largest absolute eigenvalue. ``hessian`` overrides
    the analytic reduced matrix (used to check that corruption is detected).
    """
    c = normalize(c)
    red, basis = reduced_hessian(c)
    scale = float(np.abs(np.linalg.eigvalsh(red)).max())
    if hessian is not None:
        red = np.asarray(hessian, dtype=float)
    m = c.masses.array
    x = c.positions
    u0, _ = kernels.potential_inertia(x, m)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(directions):
        a = rng.standard_normal(red.shape[0])
        a /= np.linalg.norm(a)
        v = (basis @ a).reshape(-1, 2)
        up, _ = kernels.potential_inertia(np.cos(step) * x + np.sin(step) * v, m)
        um, _ = kernels.potential_inertia(np.cos(step) * x - np.sin(step) * v, m)
        fd = (up - 2.0 * u0 + um) / step ** 2
        worst = max(worst, abs(fd - float(a @ red @ a)) / scale)
    return worst
