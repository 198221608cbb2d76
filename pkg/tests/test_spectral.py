import numpy as np
import pytest

from planarcc.config import Configuration, MassVector, normalize, relabel, rotate
from planarcc.solver import moulton_solve
from planarcc.spectral import (NotCriticalError, fd_validate, index_from_spectrum, morse_index,
                               reduced_basis, reduced_hessian)


def triangle(masses=(1, 1, 1)):
    return normalize(Configuration.from_points(
        [[0.0, 0.0], [1.0, 0.0], [0.5, np.sqrt(3) / 2]], masses))


def square():
    return normalize(Configuration.from_points([[1, 0], [0, 1], [-1, 0], [0, -1]], [1] * 4))


def centered_triangle():
    t = 2 * np.pi * np.arange(3) / 3
    pts = np.vstack([np.column_stack([np.cos(t), np.sin(t)]), [[0, 0]]])
    return normalize(Configuration.from_points(pts, [1] * 4))


def test_known_indices():
    assert morse_index(triangle([2, 5, 1])).index == 0
    assert morse_index(moulton_solve(MassVector([2, 5, 1]), (0, 1, 2))).index == 1
    assert morse_index(square()).index == 0
    assert morse_index(moulton_solve(MassVector([1] * 4), (0, 1, 2, 3))).index == 2
    # the 8 triangle-with-center records and the 12 lines make up index 2 for equal masses
    assert morse_index(centered_triangle()).index == 2


@pytest.mark.parametrize("n", [3, 4, 5])
def test_spectrum_size_and_nondegenerate(n):
    c = moulton_solve(MassVector(list(range(1, n + 1))), tuple(range(n)))
    rep = morse_index(c)
    assert len(rep.eigenvalues) == 2 * n - 4
    assert not rep.degenerate
    assert rep.index == n - 2


def test_basis_is_mass_orthonormal_and_gauge_free():
    c = moulton_solve(MassVector([1, 2, 3, 4]), (1, 0, 3, 2))
    b = reduced_basis(c)
    mm = np.repeat(c.masses.array, 2)
    assert np.allclose(b.T @ (mm[:, None] * b), np.eye(4), atol=1e-12)
    x = c.positions.ravel()
    rot = np.column_stack([-c.positions[:, 1], c.positions[:, 0]]).ravel()
    for g in (np.tile([1.0, 0.0], 4), np.tile([0.0, 1.0], 4), rot, x):
        assert np.abs(b.T @ (mm * g)).max() < 1e-12


def test_spectrum_independent_of_basis():
    c = square()
    ref = np.linalg.eigvalsh(reduced_hessian(c)[0])
    for seed in range(5):
        red, _ = reduced_hessian(c, rng=np.random.default_rng(seed))
        assert np.allclose(np.linalg.eigvalsh(red), ref, atol=1e-10 * np.abs(ref).max())


def test_invariant_under_rotation_and_relabel():
    c = moulton_solve(MassVector([1, 1, 2, 2]), (0, 2, 1, 3))
    ref = np.array(morse_index(c).eigenvalues)
    for other in (rotate(c, 1.1), relabel(c, [1, 0, 3, 2])):
        eig = np.array(morse_index(other).eigenvalues)
        assert np.allclose(eig, ref, atol=1e-10 * np.abs(ref).max())


def test_not_critical_rejected():
    rng = np.random.default_rng(0)
    c = normalize(Configuration.from_points(rng.standard_normal((4, 2)), [1] * 4))
    with pytest.raises(NotCriticalError):
        morse_index(c)


def test_index_from_spectrum_thresholds():
    rep = index_from_spectrum([-2.0, -1e-12, 1.0, 3.0])
    assert rep.index == 1  # -1e-12 is below the relative sign cut
    assert rep.degenerate
    rep = index_from_spectrum([-2.0, -1.0, 1.0, 3.0])
    assert rep.index == 2 and not rep.degenerate and rep.gap == pytest.approx(1 / 3)


def test_fd_validate_accepts_analytic_hessian():
    for c in (triangle([1, 2, 3]), moulton_solve(MassVector([1, 2, 3, 4]), (0, 1, 2, 3)),
              square(), centered_triangle()):
        assert fd_validate(c) < 1e-5


def test_fd_validate_catches_corruption():
    c = square()
    red, _ = reduced_hessian(c)
    bad = red.copy()
    bad[0, 0] += 0.1 * np.abs(red).max()
    assert fd_validate(c, hessian=bad) > 1e-2
