from __future__ import annotations

import numpy as np
import pytest

from apathkit.algebroid import (
    STRUCTURE_PRESETS,
    bracket_frame,
    custom,
    lie_algebra,
    random_connection,
    sphere_embed,
    tangent,
    torsion_reduced,
    twisted_surface,
    validate,
    zero_connection,
)


@pytest.mark.parametrize("name", STRUCTURE_PRESETS)
def test_lie_algebra_presets_validate(name):
    spec = lie_algebra(name)
    assert spec.m == 0
    assert validate(spec, zero_connection(spec), []).passed


def test_so3_brackets(so3):
    assert bracket_frame(so3, 0, 1, np.zeros(0)).tolist() == [0, 0, 1]
    assert bracket_frame(so3, 2, 1, np.zeros(0)).tolist() == [-1, 0, 0]
    with pytest.raises(IndexError):
        bracket_frame(so3, 0, 3, np.zeros(0))


def test_non_jacobi_bracket_fails():
    c = np.zeros((3, 3, 3))
    # [e0, e1] = e0 and [e1, e2] = e1 and [e0, e2] = e2 violates Jacobi
    for k, i, j in ((0, 0, 1), (1, 1, 2), (2, 0, 2)):
        c[k, i, j], c[k, j, i] = 1.0, -1.0
    rep = validate(lie_algebra(c), None, [])
    assert not rep.passed and rep.metrics["jacobi"] > 0.5


def test_non_antisymmetric_bracket_fails():
    c = np.zeros((2, 2, 2))
    c[0, 0, 0] = 1.0
    rep = validate(lie_algebra(c), None, [])
    assert not rep.passed and rep.metrics["antisymmetry"] == 2.0  # c + c^T on the diagonal


def test_anchor_must_be_a_morphism():
    c = lie_algebra("aff1").params["structure"]
    assert validate(custom([[1.0, 0.0]], c), None, [[0.2]]).passed
    rep = validate(custom([[0.0, 1.0]], c), None, [[0.2]])
    assert not rep.passed and rep.metrics["anchor_morphism"] == pytest.approx(1.0)


def test_twisted_surface_validates(rng):
    spec = twisted_surface([1.0, np.sqrt(2.0)])
    assert (spec.m, spec.n) == (4, 5)
    pts = rng.uniform(0.3, 2.8, size=(6, 4))
    rep = validate(spec, random_connection(spec, 3), pts)
    assert rep.passed, rep.metrics


def test_twisted_bracket_is_the_area_form():
    lam = np.sqrt(2.0)
    spec = twisted_surface([1.0, lam])
    x = np.array([0.7, 0.1, 1.2, -0.4])
    assert bracket_frame(spec, 2, 3, x)[-1] == pytest.approx(lam * np.sin(1.2))
    assert bracket_frame(spec, 0, 1, x)[-1] == pytest.approx(np.sin(0.7))
    assert bracket_frame(spec, 0, 2, x).tolist() == [0.0] * 5


def test_sphere_embed_collapses_poles():
    e = sphere_embed(np.array([[0.0, 0.3], [0.0, 2.0], [np.pi, 1.0]]))
    assert np.allclose(e[0], e[1]) and np.allclose(e[0], [0, 0, 1])
    assert np.allclose(e[2], [0, 0, -1])


def test_points_shape_checked(r2):
    with pytest.raises(ValueError):
        r2.rho(np.zeros(3))


def test_custom_rejects_mismatched_anchor():
    with pytest.raises(ValueError):
        custom(np.eye(2), np.zeros((3, 3, 3)))


def test_torsion_connection_terms_cancel_on_sheets(rng):
    spec = twisted_surface([1.3])
    conn = random_connection(spec, 7, 1.0)
    x = rng.uniform(0.3, 2.8, size=(5, 2))
    a, b = rng.normal(size=(5, 3)), rng.normal(size=(5, 3))
    r = spec.rho(x)
    va, vb = np.einsum("...rj,...j->...r", r, a), np.einsum("...rj,...j->...r", r, b)
    with_conn = torsion_reduced(spec, conn, x, va, vb, a, b)
    without = torsion_reduced(spec, zero_connection(spec), x, va, vb, a, b)
    assert np.allclose(with_conn, without, atol=1e-14)
    # off-sheet velocities pick up the connection
    assert not np.allclose(torsion_reduced(spec, conn, x, va + 1, vb, a, b), without)


def test_random_connection_is_seeded():
    spec = tangent(2)
    g1 = random_connection(spec, 4, 0.5).G(np.zeros(2))
    assert np.array_equal(g1, random_connection(spec, 4, 0.5).G(np.zeros(2)))
    assert np.max(np.abs(g1)) <= 0.5
