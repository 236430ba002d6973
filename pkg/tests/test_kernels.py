from __future__ import annotations

import importlib.util
import json
import os
import subprocess
import sys

import numpy as np
import pytest
from scipy.linalg import expm

from apathkit import kernels


def _affine_case(rows=5, n_t=40, n=3, seed=0):
    rng = np.random.default_rng(seed)
    f = tuple(rng.normal(size=(rows, n_t, n)) for _ in range(3))
    k = tuple(0.3 * rng.normal(size=(rows, n_t, n, n)) for _ in range(3))
    return f, k, rng.normal(size=(rows, n)), 1.0 / n_t


def test_rk4_affine_backends_agree():
    f, k, b0, h = _affine_case()
    a = kernels.rk4_affine(f, k, b0, h, use_numba=False)
    b = kernels.rk4_affine(f, k, b0, h, use_numba=True)
    assert a.shape == (5, 41, 3)
    assert np.allclose(a, b, rtol=0, atol=1e-12)


def test_rk4_matrix_backends_agree():
    rng = np.random.default_rng(1)
    a = tuple(rng.normal(size=(30, 2, 2)) + 1j * rng.normal(size=(30, 2, 2)) for _ in range(3))
    for right in (True, False):
        x = kernels.rk4_matrix(a, 1 / 30, right, use_numba=False)
        y = kernels.rk4_matrix(a, 1 / 30, right, use_numba=True)
        assert np.allclose(x, y, rtol=0, atol=1e-12)


def test_rk4_affine_constant_coefficients_match_exponential():
    n_t, n = 64, 2
    K = np.array([[0.0, 1.0], [-1.0, 0.0]])
    F = np.array([0.5, -0.2])
    f = tuple(np.broadcast_to(F, (1, n_t, n)) for _ in range(3))
    k = tuple(np.broadcast_to(K, (1, n_t, n, n)) for _ in range(3))
    b0 = np.array([[1.0, 0.0]])
    out = kernels.rk4_affine(f, k, b0, 1 / n_t)
    # b(1) = e^K b0 + K^{-1}(e^K - I) F
    E = expm(K)
    exact = E @ b0[0] + np.linalg.solve(K, (E - np.eye(2)) @ F)
    assert np.allclose(out[0, -1], exact, atol=1e-8)


def test_rk4_matrix_is_fourth_order():
    X = np.array([[0.0, 1.0], [-2.0, 0.3]], dtype=complex)
    errs = []
    for n in (10, 20):
        t = np.linspace(0, 1, n + 1)
        A = t[:, None, None] * X
        s, m, e = kernels.interval_samples(A)
        traj = kernels.rk4_matrix((s, m, e), 1 / n)
        # commuting family: g(1) = exp(X / 2)
        errs.append(np.max(np.abs(traj[-1] - expm(X / 2))))
    assert np.log2(errs[0] / errs[1]) == pytest.approx(4, abs=0.3)


def test_midpoints_are_fourth_order_and_respect_breaks():
    errs = []
    for n in (40, 80):
        x = np.linspace(0, 1, n + 1)
        errs.append(np.max(np.abs(kernels.midpoints(np.sin(x)) - np.sin(0.5 * (x[1:] + x[:-1])))))
    assert np.log2(errs[0] / errs[1]) == pytest.approx(4, abs=0.2)
    x = np.linspace(0, 1, 41)
    # a kink is reproduced exactly when the stencils stay on one side
    mid = 0.5 * (x[1:] + x[:-1])
    assert np.allclose(kernels.midpoints(np.abs(x - 0.5), breaks=(20,)), np.abs(mid - 0.5), atol=1e-15)
    assert not np.allclose(kernels.midpoints(np.abs(x - 0.5)), np.abs(mid - 0.5), atol=1e-6)


def test_interval_samples_use_right_limits():
    v = np.arange(5.0)
    r = v.copy()
    r[2] = 100.0
    s, m, e = kernels.interval_samples(v, r, breaks=(2,))
    assert s.tolist() == [0, 1, 100, 3] and e.tolist() == [1, 2, 3, 4]


def test_piecewise_central_diff():
    x = np.linspace(0, 1, 9)
    v = np.abs(x - 0.5)
    left, right = kernels.piecewise_central_diff(v, 1 / 8, breaks=(4,))
    assert left[4] == pytest.approx(-1) and right[4] == pytest.approx(1)


def test_simpson():
    w = kernels.simpson_weights(8, 1 / 8)
    x = np.linspace(0, 1, 9)
    assert w @ x**3 == pytest.approx(0.25, abs=1e-15)
    assert kernels.simpson2d(np.outer(x**2, x), 1 / 8, 1 / 8) == pytest.approx(1 / 6)
    with pytest.raises(ValueError):
        kernels.simpson_weights(7, 1.0)


def test_segment_bounds():
    assert kernels.segment_bounds(8, (4, 0, 8, 2)) == [(0, 2), (2, 4), (4, 8)]


def test_central_diff4_needs_five_nodes():
    with pytest.raises(ValueError):
        kernels.central_diff4(np.zeros(4), 0.1)


_SNIPPET = """
import json, numpy as np
from apathkit import backend, suite, homotopy as H
sheet = suite.associator_su2(1, 40, 20)
sol = H.solve_b(sheet.spec, None, sheet)
print(json.dumps({"backend": backend(), "terminal": sol.max_terminal, "b": float(np.abs(sol.b).sum())}))
"""


def _run(env_flag):
    env = dict(os.environ)
    env.pop("APATHKIT_NO_NUMBA", None)
    if env_flag:
        env["APATHKIT_NO_NUMBA"] = env_flag
    out = subprocess.run([sys.executable, "-c", _SNIPPET], env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout.strip().splitlines()[-1])


def test_env_flag_selects_numpy_backend():
    fallback = _run("1")
    assert fallback["backend"] == "numpy"
    default = _run(None)
    # the child runs with the flag cleared, so numba is used whenever it imports
    assert default["backend"] == ("numba" if importlib.util.find_spec("numba") else "numpy")
    assert fallback["terminal"] == pytest.approx(default["terminal"], rel=1e-10)
    assert fallback["b"] == pytest.approx(default["b"], rel=1e-10)
