"""Pure numpy implementations of the hot kernels.

Mirrors ``_ckernels.pyx`` function by function. Positions are ``(n, 2)``
float arrays, masses ``(n,)``; flattened vectors interleave ``x0, y0, x1, ...``.
"""

import numpy as np

CONVERGED, MAX_ITER, COLLISION, STALLED, SINGULAR = range(5)

BACKEND = "python"


def center_of_mass(x, m):
    return m @ x / m.sum()


def normalize(x, m):
    """Translate the center of mass to the origin and scale to I = 1."""
    x = x - center_of_mass(x, m)
    inertia = float(np.sum(m * np.einsum("ij,ij->i", x, x)))
    return x / np.sqrt(inertia)


def min_distance(x):
    n = x.shape[0]
    d = x[:, None, :] - x[None, :, :]
    r2 = np.einsum("ijk,ijk->ij", d, d)
    r2[np.diag_indices(n)] = np.inf
    return float(np.sqrt(r2.min()))


def _pairs(x):
    # d[i, j] = x_j - x_i
    d = x[None, :, :] - x[:, None, :]
    r2 = np.einsum("ijk,ijk->ij", d, d)
    np.fill_diagonal(r2, 1.0)
    inv_r = 1.0 / np.sqrt(r2)
    np.fill_diagonal(inv_r, 0.0)
    return d, inv_r


def potential_inertia(x, m):
    """Newtonian potential U and moment of inertia I (about the center of mass)."""
    x = np.asarray(x, dtype=float)
    m = np.asarray(m, dtype=float)
    _, inv_r = _pairs(x)
    u = 0.5 * float(m @ inv_r @ m)
    xc = x - center_of_mass(x, m)
    inertia = float(np.sum(m * np.einsum("ij,ij->i", xc, xc)))
    return u, inertia


def _accelerations(m, d, inv_r):
    return np.einsum("j,ijk,ij->ik", m, d, inv_r ** 3)


def residual(x, m):
    """F_i = sum_j m_j (x_j - x_i)/r_ij^3 + (U/I)(x_i - c); returns (F, U/I)."""
    x = np.asarray(x, dtype=float)
    m = np.asarray(m, dtype=float)
    d, inv_r = _pairs(x)
    u = 0.5 * float(m @ inv_r @ m)
    xc = x - center_of_mass(x, m)
    inertia = float(np.sum(m * np.einsum("ij,ij->i", xc, xc)))
    lam = u / inertia
    return _accelerations(m, d, inv_r) + lam * xc, lam


def _pair_blocks(d, inv_r):
    # K_ij = I/r^3 - 3 d d^T / r^5, the Jacobian of d/|d|^3 with respect to d
    eye = np.eye(2)
    return (inv_r[..., None, None] ** 3 * eye
            - 3.0 * inv_r[..., None, None] ** 5 * d[..., :, None] * d[..., None, :])


def residual_jacobian(x, m):
    """Analytic Jacobian dF/dx, shape (2n, 2n)."""
    x = np.asarray(x, dtype=float)
    m = np.asarray(m, dtype=float)
    n = x.shape[0]
    total = m.sum()
    d, inv_r = _pairs(x)
    k = _pair_blocks(d, inv_r)
    blocks = m[None, :, None, None] * k
    diag = -blocks.sum(axis=1)
    blocks[np.arange(n), np.arange(n)] = diag

    acc = _accelerations(m, d, inv_r)
    u = 0.5 * float(m @ inv_r @ m)
    xc = x - center_of_mass(x, m)
    inertia = float(np.sum(m * np.einsum("ij,ij->i", xc, xc)))
    lam = u / inertia
    # grad_j (U/I) = m_j acc_j / I - 2 U m_j (x_j - c) / I^2
    grad_lam = (m[:, None] * acc) / inertia - 2.0 * u * (m[:, None] * xc) / inertia ** 2

    jac = blocks.transpose(0, 2, 1, 3).reshape(2 * n, 2 * n)
    shift = (np.eye(n) - m[None, :] / total)
    jac += lam * np.kron(shift, np.eye(2))
    jac += np.outer(xc.ravel(), grad_lam.ravel())
    return jac


def lagrangian_hessian(x, m):
    """Hessian of U - lambda (I - 1) with lambda = -U/(2I), shape (2n, 2n)."""
    x = np.asarray(x, dtype=float)
    m = np.asarray(m, dtype=float)
    n = x.shape[0]
    total = m.sum()
    d, inv_r = _pairs(x)
    k = _pair_blocks(d, inv_r)
    blocks = (m[:, None] * m[None, :])[..., None, None] * k
    blocks[np.arange(n), np.arange(n)] = -blocks.sum(axis=1)
    hess = blocks.transpose(0, 2, 1, 3).reshape(2 * n, 2 * n)

    u, inertia = potential_inertia(x, m)
    hess_i = 2.0 * (np.diag(m) - np.outer(m, m) / total)
    hess += (u / (2.0 * inertia)) * np.kron(hess_i, np.eye(2))
    return hess


def gauge_directions(x):
    """Columns: x-translation, y-translation, rotation generator, dilation."""
    n = x.shape[0]
    g = np.zeros((2 * n, 4))
    g[0::2, 0] = 1.0
    g[1::2, 1] = 1.0
    g[0::2, 2] = -x[:, 1]
    g[1::2, 2] = x[:, 0]
    g[:, 3] = x.ravel()
    return g


def newton_step(x, m, f):
    """Solve the bordered system [[J, MG], [G^T M, 0]] [dx; mu] = [-F; 0]."""
    n = x.shape[0]
    jac = residual_jacobian(x, m)
    mg = np.repeat(m, 2)[:, None] * gauge_directions(x)
    a = np.zeros((2 * n + 4, 2 * n + 4))
    a[:2 * n, :2 * n] = jac
    a[:2 * n, 2 * n:] = mg
    a[2 * n:, :2 * n] = mg.T
    rhs = np.zeros(2 * n + 4)
    rhs[:2 * n] = -f.ravel()
    sol = np.linalg.solve(a, rhs)
    return sol[:2 * n].reshape(n, 2)


def polish(x0, m, tol=1e-12, max_iter=80, max_halvings=20, collapse_tol=1e-6, refine=2):
    """Damped Newton on the residual; returns (x, status, iterations, final_norm).

    Once the residual is below ``tol`` up to ``refine`` further steps are
    taken while they still reduce it, pushing the iterate to the rounding
    floor; ``iterations`` counts the steps taken before ``tol`` was reached.
    """
    m = np.ascontiguousarray(m, dtype=float)
    x = normalize(np.asarray(x0, dtype=float), m)
    if min_distance(x) < collapse_tol:
        return x, COLLISION, 0, np.inf
    f, _ = residual(x, m)
    norm = float(np.abs(f).max())
    it = 0
    while True:
        if norm < tol:
            break
        if it == max_iter:
            return x, MAX_ITER, max_iter, norm
        try:
            dx = newton_step(x, m, f)
        except np.linalg.LinAlgError:
            return x, SINGULAR, it, norm
        if not np.all(np.isfinite(dx)):
            return x, SINGULAR, it, norm
        norm2 = float(np.sum(f * f))
        alpha = 1.0
        accepted = False
        collided = False
        for _ in range(max_halvings + 1):
            trial = normalize(x + alpha * dx, m)
            if min_distance(trial) < collapse_tol:
                collided = True
            else:
                ft, _ = residual(trial, m)
                if np.all(np.isfinite(ft)) and float(np.sum(ft * ft)) < norm2:
                    accepted = True
                    break
            alpha *= 0.5
        if not accepted:
            return x, (COLLISION if collided else STALLED), it, norm
        x, f = trial, ft
        norm = float(np.abs(f).max())
        it += 1
    for _ in range(refine):
        try:
            dx = newton_step(x, m, f)
        except np.linalg.LinAlgError:
            break
        trial = normalize(x + dx, m)
        ft, _ = residual(trial, m)
        if not (np.all(np.isfinite(ft)) and float(np.sum(ft * ft)) < float(np.sum(f * f))):
            break
        x, f = trial, ft
    return x, CONVERGED, it, float(np.abs(f).max())
