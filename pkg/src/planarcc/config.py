"""Configurations, gauge normalization, identity keys and geometric classification.

Counting conventions: configurations related by a rotation, translation or
homothety are the same; a mirror image of a non-collinear configuration is a
different one, and relabeling the bodies gives a different one too.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, permutations
from typing import Sequence

import numpy as np

from . import kernels

COLLINEAR_TOL = 1e-9
KEY_TOL = 1e-8


class DegenerateConfigurationError(ValueError):
    """Two bodies coincide."""


class MassMismatchError(ValueError):
    """A relabeling would change which mass sits at which label."""


@dataclass(frozen=True)
class MassVector:
    values: tuple[float, ...]

    def __init__(self, values: Sequence[float]):
        vals = tuple(float(v) for v in values)
        if not vals:
            raise ValueError("at least one mass is required")
        if not all(np.isfinite(v) and v > 0 for v in vals):
            raise ValueError(f"masses must be finite and strictly positive, got {list(vals)}")
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def total(self) -> float:
        return float(sum(self.values))

    @property
    def array(self) -> np.ndarray:
        return np.array(self.values, dtype=float)

    @property
    def residual_scale(self) -> float:
        """Factor applied to absolute residual tolerances.

        Scaling every mass by c leaves the shapes unchanged but multiplies the
        residual at I = 1 by c^2; tolerances are stated for mean mass 1.
        """
        return (self.total / self.n) ** 2

    def preserving_permutations(self) -> list[tuple[int, ...]]:
        """All relabelings that leave the mass assigned to every label unchanged."""
        m = self.values
        return [p for p in permutations(range(self.n))
                if all(m[p[i]] == m[i] for i in range(self.n))]

    def __len__(self) -> int:
        return self.n


@dataclass(frozen=True, eq=False)
class Configuration:
    positions: np.ndarray
    masses: MassVector

    def __post_init__(self):
        pos = np.array(self.positions, dtype=float)
        if pos.ndim != 2 or pos.shape[1] != 2:
            raise ValueError(f"positions must have shape (n, 2), got {pos.shape}")
        if pos.shape[0] != self.masses.n:
            raise ValueError(f"{pos.shape[0]} positions for {self.masses.n} masses")
        if not np.all(np.isfinite(pos)):
            raise ValueError("positions must be finite")
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)

    @property
    def n(self) -> int:
        return self.masses.n

    @classmethod
    def from_points(cls, points, masses) -> Configuration:
        if not isinstance(masses, MassVector):
            masses = MassVector(masses)
        return cls(np.asarray(points, dtype=float), masses)

    def to_dict(self) -> dict:
        return {"masses": list(self.masses.values),
                "positions": [[float(a), float(b)] for a, b in self.positions]}

    @classmethod
    def from_dict(cls, data: dict) -> Configuration:
        return cls.from_points(data["positions"], data["masses"])


def _check_separated(c: Configuration) -> None:
    if c.n < 2:
        return
    scale = max(1.0, float(np.abs(c.positions).max()))
    if kernels.min_distance(c.positions) <= 1e-15 * scale:
        raise DegenerateConfigurationError("two bodies occupy the same position")


def normalize(c: Configuration) -> Configuration:
    """Move the center of mass to the origin and rescale so that I = 1."""
    _check_separated(c)
    return Configuration(kernels.normalize(c.positions, c.masses.array), c.masses)


def compute_U_I(c: Configuration) -> tuple[float, float]:
    """Potential U = sum m_i m_j / r_ij and inertia I = sum m_i m_j r_ij^2 / M."""
    _check_separated(c)
    return kernels.potential_inertia(c.positions, c.masses.array)


def signed_areas(x: np.ndarray) -> np.ndarray:
    """Signed areas of all label-ordered triples (i < j < k), lexicographic order."""
    n = x.shape[0]
    tri = np.array(list(combinations(range(n), 3)), dtype=int).reshape(-1, 3)
    if not len(tri):
        return np.zeros(0)
    a = x[tri[:, 1]] - x[tri[:, 0]]
    b = x[tri[:, 2]] - x[tri[:, 0]]
    return 0.5 * (a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0])


def pair_distances(x: np.ndarray) -> np.ndarray:
    """Mutual distances r_ij for i < j in lexicographic label order."""
    i, j = np.triu_indices(x.shape[0], 1)
    return np.hypot(x[j, 0] - x[i, 0], x[j, 1] - x[i, 1])


@dataclass(frozen=True, eq=False)
class ConfigKey:
    distances: np.ndarray
    orientation: int

    def matches(self, other: ConfigKey, tol: float = KEY_TOL) -> bool:
        return (self.orientation == other.orientation
                and self.distances.shape == other.distances.shape
                and float(np.max(np.abs(self.distances - other.distances), initial=0.0)) < tol)

    def mirrored(self) -> ConfigKey:
        return ConfigKey(self.distances, -self.orientation)

    def to_dict(self) -> dict:
        return {"distances": [float(d) for d in self.distances], "orientation": self.orientation}


def _orientation(areas: np.ndarray, tol: float) -> int:
    for a in areas:
        if abs(a) >= tol:
            return 1 if a > 0 else -1
    return 0


def config_key(c: Configuration, tol: float = COLLINEAR_TOL) -> ConfigKey:
    """Rotation-invariant identity of a normalized configuration.

    ``tol`` is the signed-area threshold below which a triple counts as
    degenerate when choosing the orientation sign.
    """
    x = c.positions
    d = pair_distances(x)
    d.setflags(write=False)
    return ConfigKey(d, _orientation(signed_areas(x), tol))


@dataclass(frozen=True)
class Classification:
    collinear: bool
    convex: bool | None
    cyclic_order: tuple[int, ...] | None = field(default=None)

    def to_dict(self) -> dict:
        return {"collinear": self.collinear, "convex": self.convex,
                "cyclic_order": list(self.cyclic_order) if self.cyclic_order else None}


def _hull(x: np.ndarray, tol: float) -> list[int]:
    # monotone chain, counter-clockwise, points on edges dropped
    order = sorted(range(len(x)), key=lambda i: (x[i, 0], x[i, 1]))

    def cross(o, a, b):
        return ((x[a, 0] - x[o, 0]) * (x[b, 1] - x[o, 1])
                - (x[a, 1] - x[o, 1]) * (x[b, 0] - x[o, 0]))

    lower: list[int] = []
    for i in order:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], i) <= 2 * tol:
            lower.pop()
        lower.append(i)
    upper: list[int] = []
    for i in reversed(order):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], i) <= 2 * tol:
            upper.pop()
        upper.append(i)
    return lower[:-1] + upper[:-1]


def classify(c: Configuration, tol: float = COLLINEAR_TOL) -> Classification:
    """Collinear / convex flags and, for convex configurations, the boundary order.

    The cyclic order lists 1-based labels counter-clockwise, starting at body 1.
    """
    x = c.positions
    if np.all(np.abs(signed_areas(x)) < tol):
        return Classification(collinear=True, convex=None)
    hull = _hull(x, tol)
    if len(hull) != c.n:
        return Classification(collinear=False, convex=False)
    start = hull.index(0)
    ordered = hull[start:] + hull[:start]
    return Classification(collinear=False, convex=True,
                          cyclic_order=tuple(i + 1 for i in ordered))


def rotate(c: Configuration, angle: float) -> Configuration:
    s, co = np.sin(angle), np.cos(angle)
    rot = np.array([[co, -s], [s, co]])
    return Configuration(c.positions @ rot.T, c.masses)


def reflect(c: Configuration) -> Configuration:
    """Mirror image across the horizontal axis."""
    return Configuration(c.positions * np.array([1.0, -1.0]), c.masses)


def relabel(c: Configuration, perm: Sequence[int]) -> Configuration:
    """Body ``i`` of the result is body ``perm[i]`` of ``c``; masses must agree."""
    perm = tuple(int(p) for p in perm)
    if sorted(perm) != list(range(c.n)):
        raise ValueError(f"{perm} is not a permutation of 0..{c.n - 1}")
    m = c.masses.values
    if any(m[perm[i]] != m[i] for i in range(c.n)):
        raise MassMismatchError(f"relabeling {perm} changes the mass vector {list(m)}")
    return Configuration(c.positions[list(perm)], c.masses)
