"""Lie algebroids in a single chart: anchor, frame brackets, connections, torsion.

Indexing conventions (0-based throughout):

* ``anchor(x)[..., r, j]`` is the component ``r`` of the anchor of frame section ``j``.
* ``structure(x)[..., k, i, j]`` is the coefficient of ``e_k`` in ``[e_i, e_j]``.
* ``gamma(x)[..., i, k, a]`` is the Christoffel symbol of base direction ``i``,
  so ``(nabla_v s)^k = v^i (d_i s^k + gamma[i, k, a] s^a)``.

All callables take points of shape ``(..., m)`` and broadcast over the leading axes.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .report import Report

ArrayFn = Callable[[np.ndarray], np.ndarray]

FAMILIES = ("lie_algebra", "tangent", "twisted_surface", "custom")


@dataclass(frozen=True)
class AlgebroidSpec:
    m: int
    n: int
    anchor: ArrayFn
    structure: ArrayFn
    family: str = "custom"
    name: str = ""
    # chart -> comparison coordinates; differs from the identity only where the
    # chart degenerates (sphere poles), so endpoint checks happen on the manifold
    embed: ArrayFn | None = field(default=None, compare=False)
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown algebroid family {self.family!r}")
        if self.m < 0 or self.n < 1:
            raise ValueError("need m >= 0 and n >= 1")

    def points(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1:] != (self.m,):
            raise ValueError(f"chart points must have trailing length {self.m}, got shape {x.shape}")
        return x

    def rho(self, x) -> np.ndarray:
        x = self.points(x)
        return np.broadcast_to(self.anchor(x), x.shape[:-1] + (self.m, self.n))

    def c(self, x) -> np.ndarray:
        x = self.points(x)
        return np.broadcast_to(self.structure(x), x.shape[:-1] + (self.n, self.n, self.n))

    def embedded(self, x) -> np.ndarray:
        x = self.points(x)
        return x if self.embed is None else self.embed(x)

    def anchor_pinv(self, x) -> np.ndarray:
        """Minimal-norm lift of base vectors into the fibre, shape ``(..., n, m)``."""
        r = self.rho(x)
        if self.m == 0:
            return np.zeros(r.shape[:-2] + (self.n, 0))
        return np.linalg.pinv(r)


@dataclass(frozen=True)
class ConnectionSpec:
    m: int
    n: int
    gamma: ArrayFn
    name: str = "zero"

    def G(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(self.gamma(x), x.shape[:-1] + (self.m, self.n, self.n))


def _const(value: np.ndarray, m: int) -> ArrayFn:
    value = np.array(value, dtype=float)
    value.setflags(write=False)

    def fn(x):
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(value, x.shape[:-1] + value.shape)

    return fn


# ---------------------------------------------------------------------------
# families

def _structure_preset(name: str) -> np.ndarray:
    if name == "so3":
        c = np.zeros((3, 3, 3))
        for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
            c[k, i, j] = 1.0
            c[k, j, i] = -1.0
        return c
    if name == "heisenberg":
        c = np.zeros((3, 3, 3))
        c[2, 0, 1], c[2, 1, 0] = 1.0, -1.0
        return c
    if name == "sl2":
        # basis (h, e, f): [h,e] = 2e, [h,f] = -2f, [e,f] = h
        c = np.zeros((3, 3, 3))
        c[1, 0, 1], c[1, 1, 0] = 2.0, -2.0
        c[2, 0, 2], c[2, 2, 0] = -2.0, 2.0
        c[0, 1, 2], c[0, 2, 1] = 1.0, -1.0
        return c
    if name == "aff1":
        # [e1, e2] = e2, the Lie algebra of the affine group of the line
        c = np.zeros((2, 2, 2))
        c[1, 0, 1], c[1, 1, 0] = 1.0, -1.0
        return c
    if name == "abelian1":
        return np.zeros((1, 1, 1))
    raise ValueError(f"unknown structure preset {name!r}")


STRUCTURE_PRESETS = ("so3", "heisenberg", "sl2", "aff1", "abelian1")


def lie_algebra(structure: str | np.ndarray = "so3") -> AlgebroidSpec:
    """A Lie algebra viewed as an algebroid over a point (m = 0)."""
    name = structure if isinstance(structure, str) else "custom"
    c = _structure_preset(structure) if isinstance(structure, str) else np.array(structure, dtype=float)
    n = c.shape[0]
    if c.shape != (n, n, n):
        raise ValueError("structure constants must have shape (n, n, n)")
    return AlgebroidSpec(
        m=0, n=n, anchor=_const(np.zeros((0, n)), 0), structure=_const(c, 0),
        family="lie_algebra", name=name, params={"structure": c},
    )


def tangent(m: int) -> AlgebroidSpec:
    """The tangent bundle of R^m with the coordinate frame."""
    return AlgebroidSpec(
        m=m, n=m, anchor=_const(np.eye(m), m), structure=_const(np.zeros((m, m, m)), m),
        family="tangent", name=f"T R^{m}",
    )


def sphere_embed(x: np.ndarray) -> np.ndarray:
    """(theta, phi) per factor -> unit vectors in R^3; the poles collapse to points."""
    x = np.asarray(x, dtype=float)
    th, ph = x[..., 0::2], x[..., 1::2]
    s = np.sin(th)
    s = np.where(np.abs(s) < 1e-13, 0.0, s)
    out = np.stack([s * np.cos(ph), s * np.sin(ph), np.cos(th)], axis=-1)
    return out.reshape(x.shape[:-1] + (3 * th.shape[-1],))


def twisted_surface(lambdas) -> AlgebroidSpec:
    """``T M x R`` over a product of unit spheres, twisted by ``sum lambda_f omega_f``.

    Chart: ``(theta_1, phi_1, theta_2, phi_2, ...)`` with ``omega = sin(theta) dtheta ^ dphi``.
    Frame: coordinate fields followed by the generator of the trivial line bundle.
    Bracket ``[(V,f),(W,g)] = ([V,W], V(g) - W(f) + Omega(V, W))``, anchor the projection.
    """
    lam = np.array([float(v) for v in lambdas], dtype=float)
    k = lam.size
    if k == 0:
        raise ValueError("need at least one sphere factor")
    m, n = 2 * k, 2 * k + 1
    anchor = np.hstack([np.eye(m), np.zeros((m, 1))])

    def structure(x):
        x = np.asarray(x, dtype=float)
        c = np.zeros(x.shape[:-1] + (n, n, n))
        for f in range(k):
            w = lam[f] * np.sin(x[..., 2 * f])
            c[..., n - 1, 2 * f, 2 * f + 1] = w
            c[..., n - 1, 2 * f + 1, 2 * f] = -w
        return c

    return AlgebroidSpec(
        m=m, n=n, anchor=_const(anchor, m), structure=structure,
        family="twisted_surface", name=f"twisted S2^{k}", embed=sphere_embed,
        params={"lambdas": lam},
    )


def custom(anchor, structure) -> AlgebroidSpec:
    """Constant anchor and structure constants in a chart frame."""
    a = np.array(anchor, dtype=float)
    c = np.array(structure, dtype=float)
    n = c.shape[0]
    if a.ndim != 2 or a.shape[1] != n:
        raise ValueError("anchor must be an m x n matrix")
    return AlgebroidSpec(m=a.shape[0], n=n, anchor=_const(a, a.shape[0]), structure=_const(c, a.shape[0]), family="custom")


def zero_connection(spec: AlgebroidSpec) -> ConnectionSpec:
    return ConnectionSpec(spec.m, spec.n, _const(np.zeros((spec.m, spec.n, spec.n)), spec.m), "zero")


def random_connection(spec: AlgebroidSpec, seed: int, scale: float = 0.1) -> ConnectionSpec:
    """A constant (in the chart frame) connection with uniform entries in [-scale, scale]."""
    rng = np.random.default_rng(seed)
    g = rng.uniform(-scale, scale, size=(spec.m, spec.n, spec.n))
    return ConnectionSpec(spec.m, spec.n, _const(g, spec.m), f"random({seed})")


def constant_connection(spec: AlgebroidSpec, gamma) -> ConnectionSpec:
    g = np.array(gamma, dtype=float)
    if g.shape != (spec.m, spec.n, spec.n):
        raise ValueError(f"connection array must have shape {(spec.m, spec.n, spec.n)}")
    return ConnectionSpec(spec.m, spec.n, _const(g, spec.m), "array")


# ---------------------------------------------------------------------------
# operations

def bracket_frame(spec: AlgebroidSpec, i: int, j: int, x) -> np.ndarray:
    """Coefficients of ``[e_i, e_j]`` at ``x``."""
    if not (0 <= i < spec.n and 0 <= j < spec.n):
        raise IndexError(f"frame indices must lie in [0, {spec.n})")
    return np.array(spec.c(x)[..., :, i, j])


def torsion_reduced(spec: AlgebroidSpec, conn: ConnectionSpec, x, v_t, v_eps, a, b) -> np.ndarray:
    """Right-hand side of ``d_t b - d_eps a`` in chart coordinates.

    Combines the torsion ``T(a, b) = nabla_{rho a} b - nabla_{rho b} a + [a, b]`` with the
    connection terms of the covariant derivatives along the sheet, whose base
    velocities are ``v_t`` and ``v_eps``.  On a genuine sheet (``rho a = v_t``,
    ``rho b = v_eps``) every connection term cancels.
    """
    x = spec.points(x)
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    v_t, v_eps = np.asarray(v_t, dtype=float), np.asarray(v_eps, dtype=float)
    if a.shape[-1] != spec.n or b.shape[-1] != spec.n:
        raise ValueError("fibre vectors must have length n")
    if v_t.shape[-1] != spec.m or v_eps.shape[-1] != spec.m:
        raise ValueError("base vectors must have length m")
    G = conn.G(x)
    r = spec.rho(x)
    ra = np.einsum("...rj,...j->...r", r, a)
    rb = np.einsum("...rj,...j->...r", r, b)
    out = np.einsum("...kij,...i,...j->...k", spec.c(x), a, b)
    out = out + np.einsum("...ika,...i,...a->...k", G, v_eps - rb, a)
    out = out - np.einsum("...ika,...i,...a->...k", G, v_t - ra, b)
    return out


def _fd(fn: ArrayFn, x: np.ndarray, h: float) -> np.ndarray:
    """Central differences; result has the derivative index appended last."""
    m = x.shape[-1]
    cols = []
    for r in range(m):
        e = np.zeros(m)
        e[r] = h
        cols.append((np.asarray(fn(x + e)) - np.asarray(fn(x - e))) / (2.0 * h))
    return np.stack(cols, axis=-1)


def validate(spec: AlgebroidSpec, conn: ConnectionSpec | None, sample_points, fd_step: float = 1e-3,
             tol: float | None = None) -> Report:
    """Check antisymmetry, Jacobi and anchor-morphism identities at sample points."""
    if fd_step <= 0:
        raise ValueError("fd_step must be positive")
    tol = 10.0 * fd_step**2 if tol is None else tol
    xs = np.asarray(sample_points, dtype=float)
    xs = xs.reshape(-1, spec.m) if spec.m else np.zeros((0, 0))
    if xs.shape[0] == 0:
        xs = np.zeros((1, spec.m))
    c = spec.c(xs)
    r = spec.rho(xs)
    antisym = float(np.max(np.abs(c + np.swapaxes(c, -1, -2)))) if c.size else 0.0

    if spec.m:
        dc = _fd(spec.c, xs, fd_step)  # (..., k, i, j, s)
        dr = _fd(spec.rho, xs, fd_step)  # (..., r, j, s)
    else:
        dc = np.zeros(c.shape + (0,))
        dr = np.zeros(r.shape + (0,))

    # [[e_i,e_j],e_k]^p = c^l_ij c^p_lk - rho(e_k)(c^p_ij)
    term = np.einsum("...lij,...plk->...pijk", c, c) - np.einsum("...sk,...pijs->...pijk", r, dc)
    jac = term + np.einsum("...pijk->...pjki", term) + np.einsum("...pijk->...pkij", term)
    jacobi = float(np.max(np.abs(jac))) if jac.size else 0.0

    lhs = np.einsum("...rl,...lij->...rij", r, c)
    vf = np.einsum("...si,...rjs->...rij", r, dr)
    anchor_res = lhs - (vf - np.swapaxes(vf, -1, -2))
    anchor_err = float(np.max(np.abs(anchor_res))) if anchor_res.size else 0.0

    conn_ok = True
    if conn is not None:
        conn_ok = conn.G(xs).shape[-3:] == (spec.m, spec.n, spec.n)

    metrics = {"antisymmetry": antisym, "jacobi": jacobi, "anchor_morphism": anchor_err}
    return Report(
        passed=bool(antisym == 0.0 and jacobi <= tol and anchor_err <= tol and conn_ok),
        metrics={**metrics, "tol": tol, "fd_step": fd_step, "samples": int(xs.shape[0])},
        provenance={"op": "algebroid_core.validate", "family": spec.family, "name": spec.name,
                    "connection": None if conn is None else conn.name},
    )
