"""Central configuration equations and their Newton solvers.

A normalized configuration is central iff

    F_i = sum_{j != i} m_j (x_j - x_i) / r_ij^3 + (U/I) (x_i - c) = 0   for all i,

which is grad U = lambda grad I divided by m_i, with the multiplier fixed to
lambda = -U/(2I) by the homogeneity of U (degree -1) and I (degree 2).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import Sequence

import numpy as np

from . import kernels
from .config import Configuration, MassVector, normalize


class MoultonError(RuntimeError):
    """The collinear solver failed; for positive masses this is a bug."""


@dataclass(frozen=True)
class SolveOptions:
    tol_residual: float = 1e-12
    max_iter: int = 80
    max_halvings: int = 20
    min_sep: float = 0.05
    collapse_tol: float = 1e-6


@dataclass(frozen=True, eq=False)
class Residual:
    F: np.ndarray
    lam: float  # U/I, the coefficient of (x_i - c) in F; positive
    norm: float


@dataclass(frozen=True, eq=False)
class SolveReport:
    converged: bool
    iterations: int
    final_norm: float
    configuration: Configuration | None
    reason: str


def cc_residual(c: Configuration) -> Residual:
    """Residual of the central configuration equations (max-norm over 2n components)."""
    c = normalize(c)
    f, lam = kernels.residual(c.positions, c.masses.array)
    return Residual(f, float(lam), float(np.abs(f).max()))


def newton_polish(c0: Configuration, opts: SolveOptions = SolveOptions()) -> SolveReport:
    """Damped Newton with the gauge (translation, rotation, dilation) bordered out."""
    tol = opts.tol_residual * c0.masses.residual_scale
    x, status, iters, norm = kernels.polish(
        c0.positions, c0.masses.array, tol, opts.max_iter, opts.max_halvings, opts.collapse_tol)
    converged = status == kernels.CONVERGED
    return SolveReport(
        converged=converged,
        iterations=int(iters),
        final_norm=float(norm),
        configuration=Configuration(x, c0.masses) if converged else None,
        reason=kernels.STATUS_NAMES[status],
    )


def moulton_orderings(n: int) -> list[tuple[int, ...]]:
    """One representative per line ordering up to reversal: n!/2 of them for n >= 2."""
    return [p for p in permutations(range(n)) if p[0] < p[-1]]


def _embed(order, q):
    x = np.zeros((len(order), 2))
    x[list(order), 0] = q
    return x


def moulton_solve(masses: MassVector, ordering: Sequence[int],
                  max_iter: int = 200) -> Configuration:
    """The collinear central configuration with the bodies in ``ordering`` along +x.

    The end bodies are pinned at 0 and 1 and the interior positions solve the
    x-components of the residual; homogeneity makes the end equations redundant.
    """
    order = tuple(int(i) for i in ordering)
    n = masses.n
    if sorted(order) != list(range(n)):
        raise ValueError(f"{order} is not an ordering of 0..{n - 1}")
    m = masses.array
    q = np.linspace(0.0, 1.0, n)
    if n > 2:
        inner = list(order[1:-1])
        rows = [2 * i for i in inner]

        def interior_residual(qq):
            f, _ = kernels.residual(_embed(order, qq), m)
            return f[inner, 0]

        f = interior_residual(q)
        for _ in range(max_iter):
            norm2 = float(f @ f)
            if norm2 == 0.0:
                break
            jac = kernels.residual_jacobian(_embed(order, q), m)[np.ix_(rows, rows)]
            try:
                dq = np.linalg.solve(jac, -f)
            except np.linalg.LinAlgError as exc:
                raise MoultonError(f"singular Jacobian for ordering {order}") from exc
            alpha = 1.0
            for _ in range(60):
                trial = q.copy()
                trial[1:-1] += alpha * dq
                if np.all(np.diff(trial) > 0):
                    ft = interior_residual(trial)
                    if float(ft @ ft) < norm2:
                        break
                alpha *= 0.5
            else:
                break  # no further decrease: rounding floor reached
            q, f = trial, ft
    c = normalize(Configuration(_embed(order, q), masses))
    report = newton_polish(c)
    if not report.converged:
        raise MoultonError(f"collinear solve failed for ordering {order}: "
                           f"{report.reason}, residual {report.final_norm:.3g}")
    return report.configuration


def random_start(masses: MassVector, rng_seed, min_sep: float = 0.05,
                 max_attempts: int = 10_000) -> Configuration:
    """Points uniform in the unit disk, redrawn until separated by ``min_sep`` at I = 1."""
    rng = np.random.default_rng(rng_seed)
    n = masses.n
    m = masses.array
    for _ in range(max_attempts):
        r = np.sqrt(rng.random(n))
        theta = 2.0 * np.pi * rng.random(n)
        pts = np.column_stack([r * np.cos(theta), r * np.sin(theta)])
        if kernels.min_distance(pts) == 0.0:
            continue
        x = kernels.normalize(pts, m)
        if kernels.min_distance(x) >= min_sep:
            return Configuration(x, masses)
    raise RuntimeError(f"no separated start after {max_attempts} attempts")


def _polygon(k: int, phase: float = 0.0) -> np.ndarray:
    t = phase + 2.0 * np.pi * np.arange(k) / k
    return np.column_stack([np.cos(t), np.sin(t)])


def structured_starts(masses: MassVector, seed: int = 0, transverse: float = 1e-2,
                      lines: Sequence[Configuration] | None = None) -> list[Configuration]:
    """Regular n-gons, (n-1)-gons with a central body, and perturbed Moulton lines.

    Polygons are emitted for every assignment of labels to vertices. ``lines``
    may pass in already solved Moulton configurations.
    """
    n = masses.n
    out: list[Configuration] = []
    ngon = _polygon(n)
    center_gon = np.vstack([_polygon(n - 1), [[0.0, 0.0]]]) if n >= 4 else None
    for perm in permutations(range(n)):
        idx = list(perm)
        out.append(normalize(Configuration(ngon[idx], masses)))
        if center_gon is not None:
            out.append(normalize(Configuration(center_gon[idx], masses)))
    rng = np.random.default_rng([seed, 0x4D4F])
    if lines is None:
        lines = [moulton_solve(masses, order) for order in moulton_orderings(n)]
    for c in lines:
        line = c.positions.copy()
        line[:, 1] += transverse * rng.standard_normal(n)
        out.append(normalize(Configuration(line, masses)))
    return out
