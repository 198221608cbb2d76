# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels; same API and conventions as ``_kernels_py``."""

import numpy as np
from libc.math cimport sqrt, fabs, isfinite, INFINITY

cdef enum:
    CONVERGED = 0
    MAX_ITER = 1
    COLLISION = 2
    STALLED = 3
    SINGULAR = 4

BACKEND = "cython"


cdef void _normalize(double *x, const double *m, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i
    cdef double total = 0.0, cx = 0.0, cy = 0.0, inertia = 0.0, s
    for i in range(n):
        total += m[i]
        cx += m[i] * x[2 * i]
        cy += m[i] * x[2 * i + 1]
    cx /= total
    cy /= total
    for i in range(n):
        x[2 * i] -= cx
        x[2 * i + 1] -= cy
        inertia += m[i] * (x[2 * i] * x[2 * i] + x[2 * i + 1] * x[2 * i + 1])
    s = 1.0 / sqrt(inertia)
    for i in range(2 * n):
        x[i] *= s


cdef double _min_distance(const double *x, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double dx, dy, r2, best = INFINITY
    for i in range(n):
        for j in range(i + 1, n):
            dx = x[2 * j] - x[2 * i]
            dy = x[2 * j + 1] - x[2 * i + 1]
            r2 = dx * dx + dy * dy
            if r2 < best:
                best = r2
    return sqrt(best)


cdef void _potential_inertia(const double *x, const double *m, Py_ssize_t n,
                             double *u, double *inertia, double *cx, double *cy) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double total = 0.0, dx, dy, acc_u = 0.0, acc_i = 0.0
    cx[0] = 0.0
    cy[0] = 0.0
    for i in range(n):
        total += m[i]
        cx[0] += m[i] * x[2 * i]
        cy[0] += m[i] * x[2 * i + 1]
    cx[0] /= total
    cy[0] /= total
    for i in range(n):
        dx = x[2 * i] - cx[0]
        dy = x[2 * i + 1] - cy[0]
        acc_i += m[i] * (dx * dx + dy * dy)
        for j in range(i + 1, n):
            dx = x[2 * j] - x[2 * i]
            dy = x[2 * j + 1] - x[2 * i + 1]
            acc_u += m[i] * m[j] / sqrt(dx * dx + dy * dy)
    u[0] = acc_u
    inertia[0] = acc_i


cdef double _residual(const double *x, const double *m, Py_ssize_t n,
                      double *f, double *acc) noexcept nogil:
    """Fill f (2n) and acc (2n, pure attraction term); return lambda = U/I."""
    cdef Py_ssize_t i, j
    cdef double u, inertia, cx, cy, dx, dy, r2, ir3, lam
    _potential_inertia(x, m, n, &u, &inertia, &cx, &cy)
    lam = u / inertia
    for i in range(2 * n):
        acc[i] = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            dx = x[2 * j] - x[2 * i]
            dy = x[2 * j + 1] - x[2 * i + 1]
            r2 = dx * dx + dy * dy
            ir3 = 1.0 / (r2 * sqrt(r2))
            acc[2 * i] += m[j] * dx * ir3
            acc[2 * i + 1] += m[j] * dy * ir3
            acc[2 * j] -= m[i] * dx * ir3
            acc[2 * j + 1] -= m[i] * dy * ir3
    for i in range(n):
        f[2 * i] = acc[2 * i] + lam * (x[2 * i] - cx)
        f[2 * i + 1] = acc[2 * i + 1] + lam * (x[2 * i + 1] - cy)
    return lam


cdef void _jacobian(const double *x, const double *m, Py_ssize_t n,
                    double *jac, Py_ssize_t ld, double *acc) noexcept nogil:
    """Write dF/dx into the leading 2n x 2n block of a row-major array with stride ld."""
    cdef Py_ssize_t i, j, a, b, dim = 2 * n
    cdef double u, inertia, cx, cy, total = 0.0, lam
    cdef double dx, dy, r2, ir3, ir5, kxx, kxy, kyy, gx, gy, xi, yi
    _potential_inertia(x, m, n, &u, &inertia, &cx, &cy)
    lam = u / inertia
    for i in range(n):
        total += m[i]
    for i in range(dim):
        for j in range(dim):
            jac[i * ld + j] = 0.0
    for i in range(2 * n):
        acc[i] = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            dx = x[2 * j] - x[2 * i]
            dy = x[2 * j + 1] - x[2 * i + 1]
            r2 = dx * dx + dy * dy
            ir3 = 1.0 / (r2 * sqrt(r2))
            ir5 = ir3 / r2
            acc[2 * i] += m[j] * dx * ir3
            acc[2 * i + 1] += m[j] * dy * ir3
            acc[2 * j] -= m[i] * dx * ir3
            acc[2 * j + 1] -= m[i] * dy * ir3
            kxx = ir3 - 3.0 * dx * dx * ir5
            kxy = -3.0 * dx * dy * ir5
            kyy = ir3 - 3.0 * dy * dy * ir5
            # row i, column j: +m_j K ; row i, column i: -m_j K
            jac[(2 * i) * ld + 2 * j] += m[j] * kxx
            jac[(2 * i) * ld + 2 * j + 1] += m[j] * kxy
            jac[(2 * i + 1) * ld + 2 * j] += m[j] * kxy
            jac[(2 * i + 1) * ld + 2 * j + 1] += m[j] * kyy
            jac[(2 * i) * ld + 2 * i] -= m[j] * kxx
            jac[(2 * i) * ld + 2 * i + 1] -= m[j] * kxy
            jac[(2 * i + 1) * ld + 2 * i] -= m[j] * kxy
            jac[(2 * i + 1) * ld + 2 * i + 1] -= m[j] * kyy
            # K is even in d, so the (j, i) blocks use the same K
            jac[(2 * j) * ld + 2 * i] += m[i] * kxx
            jac[(2 * j) * ld + 2 * i + 1] += m[i] * kxy
            jac[(2 * j + 1) * ld + 2 * i] += m[i] * kxy
            jac[(2 * j + 1) * ld + 2 * i + 1] += m[i] * kyy
            jac[(2 * j) * ld + 2 * j] -= m[i] * kxx
            jac[(2 * j) * ld + 2 * j + 1] -= m[i] * kxy
            jac[(2 * j + 1) * ld + 2 * j] -= m[i] * kxy
            jac[(2 * j + 1) * ld + 2 * j + 1] -= m[i] * kyy
    for j in range(n):
        # gradient of U/I with respect to x_j
        gx = m[j] * acc[2 * j] / inertia - 2.0 * u * m[j] * (x[2 * j] - cx) / (inertia * inertia)
        gy = m[j] * acc[2 * j + 1] / inertia - 2.0 * u * m[j] * (x[2 * j + 1] - cy) / (inertia * inertia)
        for i in range(n):
            xi = x[2 * i] - cx
            yi = x[2 * i + 1] - cy
            jac[(2 * i) * ld + 2 * j] += xi * gx - lam * m[j] / total
            jac[(2 * i) * ld + 2 * j + 1] += xi * gy
            jac[(2 * i + 1) * ld + 2 * j] += yi * gx
            jac[(2 * i + 1) * ld + 2 * j + 1] += yi * gy - lam * m[j] / total
        jac[(2 * j) * ld + 2 * j] += lam
        jac[(2 * j + 1) * ld + 2 * j + 1] += lam


cdef int _lu_solve(double *a, double *b, Py_ssize_t k) noexcept nogil:
    """Gaussian elimination with partial pivoting, in place; b receives the solution."""
    cdef Py_ssize_t i, j, col, piv
    cdef double best, v, factor, scale = 0.0
    for i in range(k * k):
        if fabs(a[i]) > scale:
            scale = fabs(a[i])
    if scale == 0.0:
        return 1
    for col in range(k):
        piv = col
        best = fabs(a[col * k + col])
        for i in range(col + 1, k):
            v = fabs(a[i * k + col])
            if v > best:
                best = v
                piv = i
        if best <= 1e-300 or best < scale * 1e-15:
            return 1
        if piv != col:
            for j in range(k):
                v = a[col * k + j]
                a[col * k + j] = a[piv * k + j]
                a[piv * k + j] = v
            v = b[col]
            b[col] = b[piv]
            b[piv] = v
        for i in range(col + 1, k):
            factor = a[i * k + col] / a[col * k + col]
            if factor != 0.0:
                for j in range(col, k):
                    a[i * k + j] -= factor * a[col * k + j]
                b[i] -= factor * b[col]
    for i in range(k - 1, -1, -1):
        v = b[i]
        for j in range(i + 1, k):
            v -= a[i * k + j] * b[j]
        b[i] = v / a[i * k + i]
    return 0


cdef int _newton_step(const double *x, const double *m, Py_ssize_t n, const double *f,
                      double *a, double *rhs, double *acc) noexcept nogil:
    cdef Py_ssize_t i, j, dim = 2 * n, k = 2 * n + 4
    _jacobian(x, m, n, a, k, acc)
    for i in range(dim, k):
        for j in range(k):
            a[i * k + j] = 0.0
    for i in range(n):
        # mass-weighted gauge columns, and their transposes as rows
        for j in range(4):
            a[(2 * i) * k + dim + j] = 0.0
            a[(2 * i + 1) * k + dim + j] = 0.0
        a[(2 * i) * k + dim] = m[i]
        a[(2 * i + 1) * k + dim + 1] = m[i]
        a[(2 * i) * k + dim + 2] = -m[i] * x[2 * i + 1]
        a[(2 * i + 1) * k + dim + 2] = m[i] * x[2 * i]
        a[(2 * i) * k + dim + 3] = m[i] * x[2 * i]
        a[(2 * i + 1) * k + dim + 3] = m[i] * x[2 * i + 1]
        for j in range(4):
            a[(dim + j) * k + 2 * i] = a[(2 * i) * k + dim + j]
            a[(dim + j) * k + 2 * i + 1] = a[(2 * i + 1) * k + dim + j]
    for i in range(dim):
        rhs[i] = -f[i]
    for i in range(dim, k):
        rhs[i] = 0.0
    return _lu_solve(a, rhs, k)


cdef double _sumsq(const double *v, Py_ssize_t k) noexcept nogil:
    cdef Py_ssize_t i
    cdef double s = 0.0
    for i in range(k):
        s += v[i] * v[i]
    return s


cdef double _maxabs(const double *v, Py_ssize_t k) noexcept nogil:
    cdef Py_ssize_t i
    cdef double s = 0.0
    for i in range(k):
        if not isfinite(v[i]):
            return INFINITY
        if fabs(v[i]) > s:
            s = fabs(v[i])
    return s


cdef int _polish(double *x, const double *m, Py_ssize_t n, double tol, int max_iter,
                 int max_halvings, double collapse_tol, int refine, double *work,
                 int *iters, double *final_norm) noexcept nogil:
    cdef Py_ssize_t dim = 2 * n, k = 2 * n + 4, i
    cdef double *f = work
    cdef double *acc = f + dim
    cdef double *trial = acc + dim
    cdef double *ft = trial + dim
    cdef double *rhs = ft + dim
    cdef double *a = rhs + k
    cdef double norm, norm2, alpha, trial2
    cdef int it = 0, h, r, accepted, collided

    _normalize(x, m, n)
    iters[0] = 0
    if _min_distance(x, n) < collapse_tol:
        final_norm[0] = INFINITY
        return COLLISION
    _residual(x, m, n, f, acc)
    norm = _maxabs(f, dim)
    while norm >= tol:
        iters[0] = it
        final_norm[0] = norm
        if it == max_iter:
            return MAX_ITER
        if _newton_step(x, m, n, f, a, rhs, acc) != 0:
            return SINGULAR
        if _maxabs(rhs, dim) == INFINITY:
            return SINGULAR
        norm2 = _sumsq(f, dim)
        alpha = 1.0
        accepted = 0
        collided = 0
        for h in range(max_halvings + 1):
            for i in range(dim):
                trial[i] = x[i] + alpha * rhs[i]
            _normalize(trial, m, n)
            if _min_distance(trial, n) < collapse_tol:
                collided = 1
            else:
                _residual(trial, m, n, ft, acc)
                trial2 = _sumsq(ft, dim)
                if isfinite(trial2) and trial2 < norm2:
                    accepted = 1
                    break
            alpha *= 0.5
        if not accepted:
            return COLLISION if collided else STALLED
        for i in range(dim):
            x[i] = trial[i]
            f[i] = ft[i]
        norm = _maxabs(f, dim)
        it += 1
    iters[0] = it
    # extra full steps while they still reduce the residual
    for r in range(refine):
        if _newton_step(x, m, n, f, a, rhs, acc) != 0:
            break
        for i in range(dim):
            trial[i] = x[i] + rhs[i]
        _normalize(trial, m, n)
        _residual(trial, m, n, ft, acc)
        trial2 = _sumsq(ft, dim)
        if not (isfinite(trial2) and trial2 < _sumsq(f, dim)):
            break
        for i in range(dim):
            x[i] = trial[i]
            f[i] = ft[i]
    final_norm[0] = _maxabs(f, dim)
    return CONVERGED


def _as_arrays(x, m):
    xa = np.array(x, dtype=np.float64, order="C", copy=True)
    ma = np.ascontiguousarray(m, dtype=np.float64)
    if xa.ndim != 2 or xa.shape[1] != 2 or xa.shape[0] != ma.shape[0]:
        raise ValueError("positions must have shape (n, 2) matching the masses")
    return xa, ma


def normalize(x, m):
    cdef double[:, ::1] xv
    cdef const double[::1] mv
    xa, ma = _as_arrays(x, m)
    xv = xa
    mv = ma
    _normalize(&xv[0, 0], &mv[0], xa.shape[0])
    return xa


def min_distance(x):
    cdef const double[:, ::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    return _min_distance(&xv[0, 0], xv.shape[0])


def center_of_mass(x, m):
    x = np.asarray(x, dtype=np.float64)
    m = np.asarray(m, dtype=np.float64)
    return m @ x / m.sum()


def potential_inertia(x, m):
    cdef double[:, ::1] xv
    cdef const double[::1] mv
    cdef double u, inertia, cx, cy
    xa, ma = _as_arrays(x, m)
    xv = xa
    mv = ma
    _potential_inertia(&xv[0, 0], &mv[0], xa.shape[0], &u, &inertia, &cx, &cy)
    return u, inertia


def residual(x, m):
    cdef double[:, ::1] xv
    cdef const double[::1] mv
    cdef double[:, ::1] fv
    cdef double[::1] accv
    xa, ma = _as_arrays(x, m)
    n = xa.shape[0]
    out = np.empty((n, 2))
    acc = np.empty(2 * n)
    xv = xa
    mv = ma
    fv = out
    accv = acc
    lam = _residual(&xv[0, 0], &mv[0], n, &fv[0, 0], &accv[0])
    return out, lam


def residual_jacobian(x, m):
    cdef double[:, ::1] xv
    cdef const double[::1] mv
    cdef double[:, ::1] jv
    cdef double[::1] accv
    xa, ma = _as_arrays(x, m)
    n = xa.shape[0]
    jac = np.empty((2 * n, 2 * n))
    acc = np.empty(2 * n)
    xv = xa
    mv = ma
    jv = jac
    accv = acc
    _jacobian(&xv[0, 0], &mv[0], n, &jv[0, 0], 2 * n, &accv[0])
    return jac


def lagrangian_hessian(x, m):
    cdef double[:, ::1] xv
    cdef const double[::1] mv
    cdef double[:, ::1] hv
    cdef Py_ssize_t i, j, n
    cdef double u, inertia, cx, cy, total = 0.0, dx, dy, r2, ir3, ir5, w, half_lam
    cdef double kxx, kxy, kyy
    xa, ma = _as_arrays(x, m)
    n = xa.shape[0]
    hess = np.zeros((2 * n, 2 * n))
    xv = xa
    mv = ma
    hv = hess
    _potential_inertia(&xv[0, 0], &mv[0], n, &u, &inertia, &cx, &cy)
    for i in range(n):
        total += mv[i]
    for i in range(n):
        for j in range(i + 1, n):
            dx = xv[j, 0] - xv[i, 0]
            dy = xv[j, 1] - xv[i, 1]
            r2 = dx * dx + dy * dy
            ir3 = 1.0 / (r2 * sqrt(r2))
            ir5 = ir3 / r2
            w = mv[i] * mv[j]
            kxx = w * (ir3 - 3.0 * dx * dx * ir5)
            kxy = w * (-3.0 * dx * dy * ir5)
            kyy = w * (ir3 - 3.0 * dy * dy * ir5)
            hv[2 * i, 2 * j] += kxx
            hv[2 * i, 2 * j + 1] += kxy
            hv[2 * i + 1, 2 * j] += kxy
            hv[2 * i + 1, 2 * j + 1] += kyy
            hv[2 * j, 2 * i] += kxx
            hv[2 * j, 2 * i + 1] += kxy
            hv[2 * j + 1, 2 * i] += kxy
            hv[2 * j + 1, 2 * i + 1] += kyy
            hv[2 * i, 2 * i] -= kxx
            hv[2 * i, 2 * i + 1] -= kxy
            hv[2 * i + 1, 2 * i] -= kxy
            hv[2 * i + 1, 2 * i + 1] -= kyy
            hv[2 * j, 2 * j] -= kxx
            hv[2 * j, 2 * j + 1] -= kxy
            hv[2 * j + 1, 2 * j] -= kxy
            hv[2 * j + 1, 2 * j + 1] -= kyy
    half_lam = u / (2.0 * inertia)
    for i in range(n):
        for j in range(n):
            w = -2.0 * mv[i] * mv[j] / total
            if i == j:
                w += 2.0 * mv[i]
            hv[2 * i, 2 * j] += half_lam * w
            hv[2 * i + 1, 2 * j + 1] += half_lam * w
    return hess


def gauge_directions(x):
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[0]
    g = np.zeros((2 * n, 4))
    g[0::2, 0] = 1.0
    g[1::2, 1] = 1.0
    g[0::2, 2] = -x[:, 1]
    g[1::2, 2] = x[:, 0]
    g[:, 3] = x.ravel()
    return g


def newton_step(x, m, f):
    cdef double[:, ::1] xv
    cdef const double[::1] mv
    cdef const double[::1] fv
    cdef double[::1] av
    cdef double[::1] rv
    cdef double[::1] accv
    xa, ma = _as_arrays(x, m)
    n = xa.shape[0]
    k = 2 * n + 4
    fa = np.ascontiguousarray(f, dtype=np.float64).ravel()
    a = np.empty(k * k)
    rhs = np.empty(k)
    acc = np.empty(2 * n)
    xv = xa
    mv = ma
    fv = fa
    av = a
    rv = rhs
    accv = acc
    if _newton_step(&xv[0, 0], &mv[0], n, &fv[0], &av[0], &rv[0], &accv[0]) != 0:
        raise np.linalg.LinAlgError("singular bordered Newton system")
    return rhs[:2 * n].reshape(n, 2).copy()


def polish(x0, m, double tol=1e-12, int max_iter=80, int max_halvings=20,
           double collapse_tol=1e-6, int refine=2):
    """Damped Newton on the residual; returns (x, status, iterations, final_norm)."""
    cdef double[:, ::1] xv
    cdef const double[::1] mv
    cdef double[::1] wv
    cdef int iters = 0, status
    cdef double final_norm = 0.0
    cdef Py_ssize_t n
    xa, ma = _as_arrays(x0, m)
    n = xa.shape[0]
    k = 2 * n + 4
    work = np.empty(4 * 2 * n + k + k * k)
    xv = xa
    mv = ma
    wv = work
    with nogil:
        status = _polish(&xv[0, 0], &mv[0], n, tol, max_iter, max_halvings,
                         collapse_tol, refine, &wv[0], &iters, &final_norm)
    return xa, status, iters, final_norm
