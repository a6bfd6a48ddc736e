"""Compiled extension vs pure-Python fallback: same statuses, same numbers."""

import numpy as np
import pytest

from swiptlqg import _kernels_py
from swiptlqg._backend import (
    STATUS_CONVERGED,
    STATUS_DIVERGED,
    STATUS_MAXITER,
)

_kernels = pytest.importorskip("swiptlqg._kernels")

TOL = 1e-10
MAXIT = 100_000
DIV = 1e12


def _both_mare(F, G, W, U, prob, S0):
    c = _kernels.mare_fixed_point(F, G, W, U, prob, S0, TOL, MAXIT, DIV)
    p = _kernels_py.mare_fixed_point(F, G, W, U, prob, S0, TOL, MAXIT, DIV)
    return c, p


def test_mare_parity_random(rng):
    for n in (1, 2, 4):
        A = rng.standard_normal((n, n))
        A *= 1.1 / max(abs(np.linalg.eigvals(A)))
        B = rng.standard_normal((n, n))
        M = rng.standard_normal((n, n))
        W = np.ascontiguousarray(M @ M.T + np.eye(n))
        U = np.eye(n)
        c, p = _both_mare(np.ascontiguousarray(A), np.ascontiguousarray(B),
                          W, U, 0.9, W)
        assert c[2] == p[2] == STATUS_CONVERGED
        assert c[1] == p[1]                       # identical iteration count
        assert np.allclose(c[0], p[0], rtol=1e-9, atol=1e-12)


def test_mare_parity_divergent(scalar_plant):
    A = np.ascontiguousarray(scalar_plant.A)
    one = np.ones((1, 1))
    c, p = _both_mare(A, one, one, one, 0.2, one)
    assert c[2] == p[2] == STATUS_DIVERGED
    assert c[1] == p[1]


def test_mare_parity_maxiter(scalar_plant):
    A = np.ascontiguousarray(scalar_plant.A)
    one = np.ones((1, 1))
    eta_c = 1.0 - 1.0 / 1.44
    c = _kernels.mare_fixed_point(A, one, one, one, eta_c, one, TOL, 500, DIV)
    p = _kernels_py.mare_fixed_point(A, one, one, one, eta_c, one, TOL, 500, DIV)
    assert c[2] == p[2] == STATUS_MAXITER
    assert np.allclose(c[0], p[0], rtol=1e-9)
    assert c[3] == pytest.approx(p[3], rel=1e-6)


def test_lyapunov_parity(rng):
    A = rng.standard_normal((3, 3))
    A = np.ascontiguousarray(A * 1.2 / max(abs(np.linalg.eigvals(A))))
    Q = np.eye(3)
    for coeff, want in ((0.5, STATUS_CONVERGED), (0.8, STATUS_DIVERGED)):
        c = _kernels.scaled_lyapunov_fixed_point(A, Q, coeff, Q, TOL, MAXIT, DIV)
        p = _kernels_py.scaled_lyapunov_fixed_point(A, Q, coeff, Q, TOL, MAXIT, DIV)
        assert c[2] == p[2] == want
        assert c[1] == p[1]
        if want == STATUS_CONVERGED:
            assert np.allclose(c[0], p[0], rtol=1e-9)


def test_simulate_path_parity(rng):
    n = 3
    A = rng.standard_normal((n, n))
    A = np.ascontiguousarray(A * 1.05 / max(abs(np.linalg.eigvals(A))))
    B = np.ascontiguousarray(rng.standard_normal((n, n)))
    C = np.eye(n)
    Q = R = W = U = np.eye(n)
    S, _, _, _ = _kernels_py.mare_fixed_point(A, B, W, U, 0.9, W, TOL, MAXIT, DIV)
    L = np.ascontiguousarray(-np.linalg.solve(B.T @ S @ B + U, B.T @ S @ A))
    T = 300
    x0 = rng.standard_normal(n)
    w = rng.standard_normal((T, n))
    v = rng.standard_normal((T, n))
    eb = (rng.random(T) < 0.9).astype(np.int8)
    gb = (rng.random(T) < 0.7).astype(np.int8)
    args = (A, B, C, Q, R, W, U, L, x0, np.zeros(n), np.eye(n), w, v, eb, gb, 1e150)
    cost_c, div_c, err_c, trp_c, k_c = _kernels.simulate_path(*args)
    cost_p, div_p, err_p, trp_p, k_p = _kernels_py.simulate_path(*args)
    assert div_c == div_p == 0
    assert k_c == k_p == T
    assert cost_c == pytest.approx(cost_p, rel=1e-10)
    assert err_c == pytest.approx(err_p, rel=1e-10)
    assert trp_c == pytest.approx(trp_p, rel=1e-10)


def test_simulate_path_parity_divergent(rng):
    # unstable plant with zero gain must overflow identically
    A = np.ascontiguousarray(np.diag([1.5, 1.2]))
    Z = np.zeros((2, 2))
    I2 = np.eye(2)
    T = 600
    w = rng.standard_normal((T, 2))
    v = rng.standard_normal((T, 2))
    eb = np.ones(T, dtype=np.int8)
    gb = np.ones(T, dtype=np.int8)
    args = (A, I2, I2, I2, I2, I2, I2, Z, np.ones(2), np.zeros(2), I2,
            w, v, eb, gb, 1e12)
    cost_c, div_c, _, _, k_c = _kernels.simulate_path(*args)
    cost_p, div_p, _, _, k_p = _kernels_py.simulate_path(*args)
    assert div_c == div_p == 1
    assert k_c == k_p


def test_backend_env_override():
    import importlib
    import os
    import subprocess
    import sys
    code = (
        "import swiptlqg._backend as b; print(b.HAVE_COMPILED)"
    )
    env = dict(os.environ, SWIPTLQG_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True
    )
    assert out.stdout.strip() == "False"
