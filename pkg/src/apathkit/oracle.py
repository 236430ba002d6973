"""Independent oracles: matrix development for Lie algebras and the convex-chart tangent oracle.

Development convention (right): ``dg/dt = g M(a(t))`` with ``M(a) = -sum_k a^k X_k``,
``g(0) = I``.  The sign makes the Maurer-Cartan equation of a two-parameter
family match the homotopy ODE, and with it ``dev(concat(p0, p1)) = dev(p0) dev(p1)``.
``right=False`` switches to ``dg/dt = M(a) g``, for which the product order reverses.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from . import kernels
from .algebroid import AlgebroidSpec, lie_algebra
from .homotopy import HomotopySheet
from .paths import APath, dtau
from .report import Report

SIMPLY_CONNECTED_TAGS = ("su2", "heisenberg", "upper_triangular")


@dataclass(frozen=True, eq=False)
class MatrixModel:
    name: str
    basis: np.ndarray  # (n, d, d) complex
    structure: str
    simply_connected_tag: str | None = None

    @property
    def n(self) -> int:
        return self.basis.shape[0]

    @property
    def d(self) -> int:
        return self.basis.shape[1]

    @property
    def group_simply_connected(self) -> bool:
        return self.simply_connected_tag in SIMPLY_CONNECTED_TAGS

    def spec(self) -> AlgebroidSpec:
        return lie_algebra(self.structure)

    def matrix(self, a) -> np.ndarray:
        """``M(a) = -sum_k a^k X_k`` for ``a`` of shape ``(..., n)``."""
        return -np.einsum("...k,kij->...ij", np.asarray(a, dtype=float), self.basis)

    def coords(self, mat) -> np.ndarray:
        """Inverse of :meth:`matrix` by real least squares on the flattened basis."""
        mat = np.asarray(mat, dtype=complex)
        B = -self.basis.reshape(self.n, -1).T
        A = np.vstack([B.real, B.imag])
        flat = mat.reshape(mat.shape[:-2] + (-1,))
        rhs = np.concatenate([flat.real, flat.imag], axis=-1)
        sol, *_ = np.linalg.lstsq(A, rhs.reshape(-1, A.shape[0]).T, rcond=None)
        return sol.T.reshape(mat.shape[:-2] + (self.n,))

    def structure_roundtrip(self) -> float:
        """Max deviation between ``[X_i, X_j]`` and ``sum_k c^k_ij X_k``."""
        c = self.spec().params["structure"]
        X = self.basis
        comm = np.einsum("iab,jbc->ijac", X, X) - np.einsum("jab,ibc->ijac", X, X)
        expect = np.einsum("kij,kac->ijac", c, X)
        return float(np.max(np.abs(comm - expect)))


def _pauli() -> np.ndarray:
    return np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex)


def su2_model() -> MatrixModel:
    """``X_k = -(i/2) sigma_k`` so that ``[X_1, X_2] = X_3`` (the so3 constants)."""
    return MatrixModel("su2", -0.5j * _pauli(), "so3", "su2")


def heisenberg_model() -> MatrixModel:
    X = np.zeros((3, 3, 3), dtype=complex)
    X[0, 0, 1] = X[1, 1, 2] = X[2, 0, 2] = 1.0
    return MatrixModel("heisenberg", X, "heisenberg", "heisenberg")


def upper_triangular_model() -> MatrixModel:
    """Affine group of the line, identity component: ``X_1 = E_11``, ``X_2 = E_12``."""
    X = np.zeros((2, 2, 2), dtype=complex)
    X[0, 0, 0] = 1.0
    X[1, 0, 1] = 1.0
    return MatrixModel("upper_triangular", X, "aff1", "upper_triangular")


def so3_model() -> MatrixModel:
    """Rotation generators; the group is not simply connected, so no oracle tag."""
    X = np.zeros((3, 3, 3), dtype=complex)
    for k, (i, j) in enumerate(((1, 2), (2, 0), (0, 1))):
        X[k, j, i] = 1.0
        X[k, i, j] = -1.0
    return MatrixModel("so3", X, "so3", None)


MODELS = {"su2": su2_model, "heisenberg": heisenberg_model,
          "upper_triangular": upper_triangular_model, "so3": so3_model}


def model(name: str) -> MatrixModel:
    try:
        return MODELS[name]()
    except KeyError:
        raise ValueError(f"unknown matrix model {name!r}") from None


def _check_path(mdl: MatrixModel, p: APath) -> None:
    if p.spec.m != 0 or p.spec.n != mdl.n:
        raise ValueError(f"model {mdl.name} needs a rank-{mdl.n} Lie algebra path")


def develop_trajectory(mdl: MatrixModel, p: APath, right: bool = True) -> np.ndarray:
    _check_path(mdl, p)
    M = mdl.matrix(p.a)
    Mr = mdl.matrix(p.right_values())
    return kernels.rk4_matrix(kernels.interval_samples(M, Mr, p.breaks), p.h, right)


def develop(mdl: MatrixModel, p: APath, right: bool = True) -> np.ndarray:
    return develop_trajectory(mdl, p, right)[-1]


def drift(mdl: MatrixModel, traj: np.ndarray) -> float:
    """Departure from the group: unitarity for su2, strict pattern for the nilpotent model."""
    if mdl.name == "su2":
        eye = np.eye(mdl.d)
        return float(np.max(np.abs(np.einsum("tji,tjk->tik", traj.conj(), traj) - eye)))
    if mdl.name == "heisenberg":
        lower = np.tril(np.ones((mdl.d, mdl.d)), -1).astype(bool)
        diag = np.abs(np.diagonal(traj, axis1=1, axis2=2) - 1.0)
        return float(max(np.max(np.abs(traj[:, lower])), np.max(diag)))
    if mdl.name == "upper_triangular":
        return float(max(np.max(np.abs(traj[:, 1, 0])), np.max(np.abs(traj[:, 1, 1] - 1.0))))
    return float("nan")


def develop_report(mdl: MatrixModel, p: APath, right: bool = True) -> Report:
    traj = develop_trajectory(mdl, p, right)
    g = traj[-1]
    return Report(
        passed=True,
        metrics={"norm_drift": drift(mdl, traj), "N": p.N},
        certificates={"matrix_real": g.real, "matrix_imag": g.imag},
        provenance={"op": "oracle_dev.develop", "model": mdl.name, "convention": "right" if right else "left"},
    )


def equivalent_oracle(mdl: MatrixModel, p0: APath, p1: APath, tol: float = 1e-6) -> bool:
    if not mdl.group_simply_connected:
        raise ValueError(f"model {mdl.name!r} has no simply-connected tag; developments cannot decide equivalence")
    return bool(np.linalg.norm(develop(mdl, p0) - develop(mdl, p1)) <= tol)


def tangent_oracle(spec: AlgebroidSpec, p0: APath, p1: APath, tol: float = 1e-9) -> bool:
    """On a convex chart, tangent-family paths are equivalent iff they share endpoints."""
    if spec.family != "tangent":
        raise ValueError("tangent_oracle needs the tangent family")
    return bool(np.max(np.abs(p0.gamma[0] - p1.gamma[0])) <= tol
                and np.max(np.abs(p0.gamma[-1] - p1.gamma[-1])) <= tol)


# ---------------------------------------------------------------------------
# sheets with known development behaviour

def bump(t, kappa: float = 1.0):
    """``64 kappa (t(1-t))^3`` and its derivative; peak value kappa at t = 1/2."""
    t = np.asarray(t, dtype=float)
    w = t * (1.0 - t)
    return 64.0 * kappa * w**3, 192.0 * kappa * w**2 * (1.0 - 2.0 * t)


def gauge_sheet(mdl: MatrixModel, p: APath, direction, kappa: float = 1.0, N_eps: int | None = None) -> HomotopySheet:
    """Rows with ``g_eps(t) = g(t) h_eps(t)``, ``h_eps = exp(eps phi(t) M(Y))``, ``phi(0) = phi(1) = 0``.

    Every row develops to the same endpoint, so the end rows are equivalent.
    """
    _check_path(mdl, p)
    if p.breaks:
        raise ValueError("gauge sheets need a smooth base path")
    N_eps = p.N if N_eps is None else N_eps
    Y = np.asarray(direction, dtype=float).reshape(mdl.n)
    MY = mdl.matrix(Y)
    phi, dphi = bump(p.t, kappa)
    A = mdl.matrix(p.a)
    eps = np.linspace(0.0, 1.0, N_eps + 1)
    rows = np.empty((N_eps + 1, p.N + 1, mdl.n))
    for j, e in enumerate(eps):
        h = expm(e * phi[:, None, None] * MY[None])
        hinv = expm(-e * phi[:, None, None] * MY[None])
        Ae = hinv @ A @ h + e * dphi[:, None, None] * MY[None]
        rows[j] = mdl.coords(Ae)
    rows[:, 0] = rows[:, -1] = 0.0
    rows[0] = p.a
    g = np.zeros((N_eps + 1, p.N + 1, 0))
    return HomotopySheet(p.spec, rows, g, name=f"gauge({mdl.name})")


def shear_sheet(p: APath, direction, kappa: float = 1.0, N_eps: int | None = None) -> HomotopySheet:
    """Rows ``a + eps kappa tau'(t) Y``; generically changes the development endpoint."""
    N_eps = p.N if N_eps is None else N_eps
    Y = np.asarray(direction, dtype=float).reshape(p.spec.n)
    eps = np.linspace(0.0, 1.0, N_eps + 1)[:, None, None]
    rows = p.a[None] + eps * kappa * dtau(p.t)[None, :, None] * Y[None, None, :]
    g = np.zeros((N_eps + 1, p.N + 1, 0))
    return HomotopySheet(p.spec, rows, g, name="shear")


def random_su2_family(seed: int, N: int, preserving: bool, amplitude: float = 1.0, kappa: float = 1.0):
    """Seeded base path plus a gauge (equivalent) or shear (inequivalent) sheet."""
    from .paths import random_path

    mdl = su2_model()
    spec = mdl.spec()
    p = random_path(spec, seed, N, amplitude=amplitude)
    rng = np.random.default_rng(seed + 10_000)
    Y = rng.normal(size=3)
    Y /= np.linalg.norm(Y)
    sheet = gauge_sheet(mdl, p, Y, kappa) if preserving else shear_sheet(p, Y, kappa)
    return mdl, p, sheet
