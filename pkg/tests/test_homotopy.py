from __future__ import annotations

import numpy as np
import pytest

from apathkit import homotopy as H
from apathkit import kernels, oracle, suite
from apathkit import paths as P
from apathkit.algebroid import random_connection, twisted_surface, zero_connection


def test_constant_sheet_gives_zero_b(r2):
    p = P.constant_path(r2, [0.3, -0.2], 40)
    sol = H.solve_b(r2, random_connection(r2, 1), H.constant_sheet(p, 8))
    assert np.all(sol.b == 0.0) and sol.max_terminal == 0.0


def test_constant_sheet_of_moving_path(so3):
    # b = 0 solves the ODE when the sheet does not depend on eps
    p = P.random_path(so3, 1, 100)
    sol = H.solve_b(so3, None, H.constant_sheet(p, 8))
    assert np.max(np.abs(sol.b)) < 1e-14


def test_tangent_interpolation_is_a_homotopy():
    sheet = suite.tangent_sheet(100)
    ok, rep = H.is_homotopy(sheet.spec, None, sheet)
    assert ok and rep.metrics["max_terminal"] < 1e-12


def test_meridian_sweep():
    spec, good = suite.twisted_sheet(100, homotopic=True)
    assert H.is_homotopy(spec, None, good)[0]
    _, bad = suite.twisted_sheet(100, homotopic=False)
    ok, rep = H.is_homotopy(spec, None, bad)
    # the missing period 4 pi lambda shows up in the terminal value
    assert not ok and rep.metrics["max_terminal"] == pytest.approx(4 * np.pi, rel=1e-6)


def test_meridian_terminal_is_second_order():
    spec = suite.sqrt2_twisted()
    t = [H.solve_b(spec, None, H.meridian_sheet(spec, n)).max_terminal for n in (50, 100)]
    # at least second order; the pole terminal converges faster in practice
    assert t[0] / t[1] >= 3.5 and t[1] < 1e-5


def test_meridian_rejects_other_families(r2):
    with pytest.raises(ValueError):
        H.meridian_sheet(r2, 20)
    with pytest.raises(IndexError):
        H.meridian_sheet(twisted_surface([1.0]), 20, factor=1)


def test_flip_preserves_homotopy():
    sheet = suite.associator_su2(1, 200, 50)
    t = H.solve_b(sheet.spec, None, sheet).max_terminal
    assert H.solve_b(sheet.spec, None, sheet.flip()).max_terminal == pytest.approx(t, rel=1e-6)


def test_connection_independence():
    spec, sheet = suite.twisted_sheet(100)
    rep = H.check_connection_independence(spec, sheet, zero_connection(spec), random_connection(spec, 1))
    assert rep.passed
    assert rep.metrics["ratio"] == pytest.approx(4, rel=0.25)


def test_dual_apath_residual():
    spec, sheet = suite.twisted_sheet(100)
    sol = H.solve_b(spec, random_connection(spec, 1), sheet)
    assert H.check_dual_apath(spec, sheet, sol).passed


def test_fourth_order_eps_differences_beat_second_order(su2):
    mdl, p, sheet = oracle.random_su2_family(3, 200, True)
    t2 = H.solve_b(mdl.spec(), None, sheet, eps_order=2).max_terminal
    t4 = H.solve_b(mdl.spec(), None, sheet, eps_order=4).max_terminal
    assert t4 < t2 / 10


def test_solve_b_argument_checks(r2):
    sheet = H.constant_sheet(P.constant_path(r2, [0, 0], 10), 8)
    with pytest.raises(ValueError):
        H.solve_b(r2, None, sheet, eps_order=3)
    with pytest.raises(ValueError):
        H.solve_b(r2, None, H.constant_sheet(P.constant_path(r2, [0, 0], 10), 2))
    with pytest.raises(ValueError):
        H.solve_b(r2, random_connection(twisted_surface([1.0]), 1), sheet)


def test_sheet_validation(r2):
    with pytest.raises(ValueError):
        H.HomotopySheet(r2, np.zeros((3, 4)), np.zeros((3, 4, 2)))
    sheet = H.constant_sheet(P.constant_path(r2, [0, 0], 10), 8)
    with pytest.raises(ValueError):
        H.HomotopySheet(r2, sheet.a, sheet.gamma, a_right=np.zeros((2, 2, 2)))


def test_coarsen():
    sheet = suite.associator_su2(1, 40, 20)
    c = sheet.coarsen()
    assert (c.N_eps, c.N_t) == (10, 20) and c.breaks == (5, 10)
    with pytest.raises(ValueError):
        suite.associator_su2(1, 20, 10).coarsen().coarsen()  # breaks at t-index 5


def test_sheet_invariants():
    spec, sheet = suite.twisted_sheet(200)
    rep = H.sheet_invariants(sheet, path_tol=1e-3)
    assert rep.passed, rep.metrics


def test_associator_sheet_rows():
    a1, a2, a3 = suite.su2_triple(2, 200)
    sheet = H.associator_sheet(a1, a2, a3, N_eps=20)
    first = P.concat(a3, P.concat(a2, a1))
    last = P.concat(P.concat(a3, a2), a1)
    assert np.array_equal(sheet.a[0], first.a)
    # the last row is resampled from row 0, which holds a1 on every fourth node
    assert np.max(np.abs(sheet.a[-1] - last.a)) < 1e-4
    assert np.max(np.abs(sheet.right_values()[-1] - last.right_values())) < 1e-4
    assert np.allclose(sheet.a[-1, :51], last.a[:51], rtol=0, atol=1e-14)
    assert sheet.breaks == (50, 100)


def test_associator_needs_multiple_of_four():
    a = suite.su2_triple(1, 10)
    with pytest.raises(ValueError):
        H.associator_sheet(*a)
    with pytest.raises(ValueError):
        H.associator_sheet(*suite.su2_triple(1, 8), sigma="cubic")


def test_zero_triple_associator_is_exact():
    sheet = H.associator_sheet(*suite.zero_triple(40), N_eps=8)
    assert H.solve_b(sheet.spec, None, sheet).max_terminal == 0.0


def test_quintic_sigma():
    t = np.linspace(0, 1, 4001)
    s, ds = H.quintic_sigma(t)
    assert np.allclose(H.quintic_sigma(np.array([0, 0.25, 0.5, 1.0]))[0], [0, 0.5, 0.75, 1])
    assert np.all(ds > 0)
    assert np.allclose(np.gradient(s, t, edge_order=2), ds, atol=1e-5)


def test_quintic_associator_is_a_homotopy():
    sheet = suite.associator_su2(1, 400, 100, sigma="quintic")
    assert H.solve_b(sheet.spec, None, sheet).max_terminal < 1e-4


@pytest.mark.parametrize("diff,order", [(kernels.central_diff, 2), (kernels.central_diff4, 4)])
def test_difference_stencil_orders(diff, order):
    errs = []
    for n in (20, 40):
        x = np.linspace(0, 1, n + 1)
        errs.append(np.max(np.abs(diff(np.sin(3 * x), 1 / n) - 3 * np.cos(3 * x))))
    assert np.log2(errs[0] / errs[1]) == pytest.approx(order, abs=0.3)


@pytest.mark.parametrize("diff", [kernels.central_diff, kernels.central_diff4])
def test_difference_stencils_kill_constants_and_respect_axis(diff):
    v = np.full((9, 3), 0.1)
    assert np.all(diff(v, 0.125) == 0.0)
    x = np.linspace(0, 1, 9)
    v = np.stack([x, 2 * x], axis=1)
    assert np.allclose(diff(v.T, 0.125, axis=1), [[1] * 9, [2] * 9])
