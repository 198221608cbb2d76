import numpy as np
import pytest
import sympy as sp

from planarcc import _kernels_py as pyk
from planarcc import kernels

backends = kernels.available_backends()
needs_cython = pytest.mark.skipif("cython" not in backends, reason="extension not built")


def random_config(n, seed):
    rng = np.random.default_rng(seed)
    m = rng.uniform(0.5, 2.0, n)
    return pyk.normalize(rng.standard_normal((n, 2)), m), m


def test_backend_selection():
    assert kernels.BACKEND in backends
    assert "python" in backends


@needs_cython
@pytest.mark.parametrize("n", [3, 4, 6])
def test_backends_agree(n):
    ck = backends["cython"]
    x, m = random_config(n, n)
    assert np.allclose(ck.normalize(x * 3 + 1, m), pyk.normalize(x * 3 + 1, m), atol=1e-14)
    assert ck.min_distance(x) == pytest.approx(pyk.min_distance(x), rel=1e-14)
    assert np.allclose(ck.potential_inertia(x, m), pyk.potential_inertia(x, m), rtol=1e-14)
    fc, lc = ck.residual(x, m)
    fp, lp = pyk.residual(x, m)
    assert np.allclose(fc, fp, atol=1e-13) and lc == pytest.approx(lp, rel=1e-14)
    assert np.allclose(ck.residual_jacobian(x, m), pyk.residual_jacobian(x, m), atol=1e-12)
    assert np.allclose(ck.lagrangian_hessian(x, m), pyk.lagrangian_hessian(x, m), atol=1e-12)


@needs_cython
def test_backends_polish_agree():
    ck = backends["cython"]
    x, m = random_config(4, 11)
    xc, sc, _, nc = ck.polish(x, m)
    xp, sp_, _, np_ = pyk.polish(x, m)
    assert sc == sp_
    if sc == pyk.CONVERGED:
        assert np.allclose(xc, xp, atol=1e-10)


def test_residual_matches_symbolic_gradient():
    # F_i = (grad U - lambda grad I)_i / m_i with lambda = -U/(2I), from sympy
    n = 3
    xs = sp.symbols(f"x0:{n}")
    ys = sp.symbols(f"y0:{n}")
    ms = [sp.Rational(3, 2), sp.Rational(1), sp.Rational(5, 2)]
    M = sum(ms)
    U = sum(ms[i] * ms[j] / sp.sqrt((xs[i] - xs[j]) ** 2 + (ys[i] - ys[j]) ** 2)
            for i in range(n) for j in range(i + 1, n))
    I = sum(ms[i] * ms[j] * ((xs[i] - xs[j]) ** 2 + (ys[i] - ys[j]) ** 2)
            for i in range(n) for j in range(i + 1, n)) / M
    lam = -U / (2 * I)
    point = {xs[0]: 0.3, ys[0]: -0.2, xs[1]: -0.6, ys[1]: 0.5, xs[2]: 0.1, ys[2]: 0.9}
    expected = np.array([[float(((sp.diff(U, v) - lam * sp.diff(I, v)) / ms[i]).subs(point))
                          for v in (xs[i], ys[i])] for i in range(n)])
    x = np.array([[point[xs[i]], point[ys[i]]] for i in range(n)])
    f, lam_num = kernels.residual(x, np.array([float(v) for v in ms]))
    assert np.allclose(f, expected, atol=1e-12)
    # the kernel reports the eliminated coefficient U/I = -2 lambda
    assert lam_num == pytest.approx(float((-2 * lam).subs(point)), rel=1e-12)


@pytest.mark.parametrize("n", [3, 5])
def test_jacobian_matches_finite_differences(n):
    x, m = random_config(n, 20 + n)
    jac = kernels.residual_jacobian(x, m)
    h = 1e-6
    fd = np.empty_like(jac)
    for k in range(2 * n):
        e = np.zeros(2 * n)
        e[k] = h
        fp, _ = kernels.residual(x + e.reshape(n, 2), m)
        fm, _ = kernels.residual(x - e.reshape(n, 2), m)
        fd[:, k] = (fp - fm).ravel() / (2 * h)
    assert np.allclose(jac, fd, atol=1e-6 * np.abs(jac).max())


def test_hessian_matches_finite_differences():
    n = 4
    x, m = random_config(n, 5)
    hess = kernels.lagrangian_hessian(x, m)
    u0, i0 = kernels.potential_inertia(x, m)
    lam = -u0 / (2 * i0)

    def lagrangian(y):
        u, i = kernels.potential_inertia(y.reshape(n, 2), m)
        return u - lam * i

    h = 1e-4
    fd = np.empty((2 * n, 2 * n))
    flat = x.ravel()
    for a in range(2 * n):
        for b in range(2 * n):
            ea = np.zeros(2 * n); ea[a] = h
            eb = np.zeros(2 * n); eb[b] = h
            fd[a, b] = (lagrangian(flat + ea + eb) - lagrangian(flat + ea - eb)
                        - lagrangian(flat - ea + eb) + lagrangian(flat - ea - eb)) / (4 * h * h)
    assert np.allclose(hess, fd, atol=1e-5 * np.abs(hess).max())


def test_gauge_directions_annihilate_residual_jacobian():
    # translations, rotation and dilation of a central configuration stay central
    x = pyk.normalize(np.array([[1.0, 0.0], [-0.5, np.sqrt(3) / 2], [-0.5, -np.sqrt(3) / 2]]),
                      np.ones(3))
    jac = kernels.residual_jacobian(x, np.ones(3))
    g = kernels.gauge_directions(x)
    assert np.abs(jac @ g[:, :3]).max() < 1e-12


def test_pure_python_env_override(monkeypatch):
    import importlib
    monkeypatch.setenv("PLANARCC_PURE_PYTHON", "1")
    mod = importlib.reload(kernels)
    try:
        assert mod.BACKEND == "python"
    finally:
        monkeypatch.delenv("PLANARCC_PURE_PYTHON")
        importlib.reload(kernels)


def test_benchmark_script_runs(monkeypatch, capsys):
    import runpy
    from pathlib import Path
    script = Path(__file__).parents[1] / "benchmarks" / "bench_kernels.py"
    monkeypatch.setattr("sys.argv", [str(script), "--n", "3", "--starts", "5", "--repeat", "1"])
    runpy.run_path(str(script), run_name="__main__")
    out = capsys.readouterr().out
    assert "polish ms" in out
    if "cython" in backends:
        assert "outcomes agree on 5/5" in out
