"""Discretized A-paths on uniform grids and the path-space operators."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from .algebroid import AlgebroidSpec
from .kernels import segment_bounds


class ChartExitError(RuntimeError):
    def __init__(self, index: int, point):
        super().__init__(f"base trajectory left the chart at grid index {index}: {point}")
        self.index = index
        self.point = point


class EndpointMismatchError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class APath:
    """Fibre values ``a`` (N+1, n) and base points ``gamma`` (N+1, m) on ``t_i = i/N``.

    ``breaks`` lists interior node indices where the path is only piecewise
    smooth (concatenation joints).  ``a_right`` optionally stores right-hand
    limits of ``a`` at those nodes when the fibre values jump.
    """

    spec: AlgebroidSpec
    a: np.ndarray
    gamma: np.ndarray
    a0: bool = False
    breaks: tuple[int, ...] = ()
    a_right: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        a = np.array(self.a, dtype=float)
        g = np.array(self.gamma, dtype=float).reshape(a.shape[0], self.spec.m)
        if a.ndim != 2 or a.shape[1] != self.spec.n:
            raise ValueError(f"fibre array must have shape (N+1, {self.spec.n})")
        a.setflags(write=False)
        g.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "gamma", g)
        object.__setattr__(self, "breaks", tuple(sorted({int(b) for b in self.breaks if 0 < b < a.shape[0] - 1})))
        if self.a_right is not None:
            r = np.array(self.a_right, dtype=float)
            r.setflags(write=False)
            object.__setattr__(self, "a_right", r)

    @property
    def N(self) -> int:
        return self.a.shape[0] - 1

    @property
    def h(self) -> float:
        return 1.0 / self.N

    @property
    def t(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.N + 1)

    def right_values(self) -> np.ndarray:
        return self.a if self.a_right is None else self.a_right

    def to_dict(self) -> dict:
        out = {"N": self.N, "a": self.a.tolist(), "gamma": self.gamma.tolist(), "a0": bool(self.a0)}
        if self.breaks:
            out["breaks"] = list(self.breaks)
        return out


# ---------------------------------------------------------------------------
# checks

def residual(p: APath) -> float:
    """Midpoint-rule A-path defect ``max_i |dgamma/h - rho(mid gamma) mid a|``."""
    if p.spec.m == 0:
        return 0.0
    g = p.gamma
    mid_g = 0.5 * (g[1:] + g[:-1])
    mid_a = 0.5 * (p.right_values()[:-1] + p.a[1:])
    rho = p.spec.rho(mid_g)
    d = (g[1:] - g[:-1]) / p.h - np.einsum("irj,ij->ir", rho, mid_a)
    return float(np.max(np.linalg.norm(d, axis=-1)))


def boundary_defect(p: APath) -> dict[str, float]:
    a = p.a
    return {
        "a_start": float(np.linalg.norm(a[0])),
        "a_end": float(np.linalg.norm(a[-1])),
        "da_start": float(np.linalg.norm(a[1]) / p.h),
        "da_end": float(np.linalg.norm(a[-2]) / p.h),
    }


def check(p: APath, path_tol: float, deriv_tol: float = np.inf) -> bool:
    if residual(p) > path_tol:
        return False
    if p.a0:
        bd = boundary_defect(p)
        return bd["a_start"] == 0.0 and bd["a_end"] == 0.0 and bd["da_start"] <= deriv_tol and bd["da_end"] <= deriv_tol
    return True


# ---------------------------------------------------------------------------
# interpolation

def _segment_splines(p: APath):
    out = []
    t = p.t
    right = p.right_values()
    for s, e in segment_bounds(p.N, p.breaks):
        a_seg = p.a[s : e + 1].copy()
        a_seg[0] = right[s]
        tt = t[s : e + 1]
        kind = "not-a-knot" if e - s >= 3 else "natural"
        sa = CubicSpline(tt, a_seg, axis=0, bc_type=kind)
        sg = CubicSpline(tt, p.gamma[s : e + 1], axis=0, bc_type=kind) if p.spec.m else None
        out.append((t[s], t[e], sa, sg))
    return out


def sample(p: APath, s) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate ``a`` and ``gamma`` at arbitrary parameters ``s`` in [0, 1].

    Cubic splines are fitted on each smooth piece separately; a parameter that
    sits exactly on a joint takes the value of the piece to its left.
    """
    s = np.clip(np.asarray(s, dtype=float), 0.0, 1.0)
    flat = s.reshape(-1)
    a_out = np.zeros((flat.size, p.spec.n))
    g_out = np.zeros((flat.size, p.spec.m))
    pieces = _segment_splines(p)
    assigned = np.zeros(flat.size, dtype=bool)
    for lo, hi, sa, sg in pieces:
        mask = (~assigned) & (flat <= hi + 1e-15)
        if mask.any():
            a_out[mask] = sa(flat[mask])
            if sg is not None:
                g_out[mask] = sg(flat[mask])
            assigned |= mask
    return a_out.reshape(s.shape + (p.spec.n,)), g_out.reshape(s.shape + (p.spec.m,))


def resample(p: APath, N: int) -> APath:
    if N == p.N:
        return p
    t = np.linspace(0.0, 1.0, N + 1)
    a, g = sample(p, t)
    breaks = tuple(int(round(b * N / p.N)) for b in p.breaks if (b * N) % p.N == 0)
    return APath(p.spec, a, g, p.a0, breaks)


# ---------------------------------------------------------------------------
# constructors

def integrate_base(spec: AlgebroidSpec, fiber_samples: Callable, gamma0, N: int,
                   in_chart: Callable | None = None) -> APath:
    """Build an A-path from fibre values by integrating ``dgamma/dt = rho(gamma) a(t)``.

    Classic RK4 on the grid; ``fiber_samples`` is called with scalar ``t``.
    """
    if N < 8:
        raise ValueError("integrate_base needs N >= 8")
    h = 1.0 / N
    t = np.linspace(0.0, 1.0, N + 1)
    a = np.array([np.asarray(fiber_samples(ti), dtype=float).reshape(spec.n) for ti in t])
    a_mid = np.array([np.asarray(fiber_samples(ti + 0.5 * h), dtype=float).reshape(spec.n) for ti in t[:-1]])
    g = np.zeros((N + 1, spec.m))
    g[0] = np.asarray(gamma0, dtype=float).reshape(spec.m)
    if spec.m:
        def f(x, av):
            return spec.rho(x) @ av

        for i in range(N):
            x = g[i]
            k1 = f(x, a[i])
            k2 = f(x + 0.5 * h * k1, a_mid[i])
            k3 = f(x + 0.5 * h * k2, a_mid[i])
            k4 = f(x + h * k3, a[i + 1])
            g[i + 1] = x + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
            if not np.all(np.isfinite(g[i + 1])) or (in_chart is not None and not in_chart(g[i + 1])):
                raise ChartExitError(i + 1, g[i + 1].tolist())
    else:
        g[:] = g[0]
    is_a0 = bool(not a[0].any() and not a[-1].any())
    return APath(spec, a, g, is_a0)


def constant_path(spec: AlgebroidSpec, x, N: int) -> APath:
    x = np.asarray(x, dtype=float).reshape(spec.m)
    return APath(spec, np.zeros((N + 1, spec.n)), np.tile(x, (N + 1, 1)), True)


def tangent_lift(spec: AlgebroidSpec, gamma_fn: Callable, dgamma_fn: Callable, N: int,
                 u_fn: Callable | None = None) -> APath:
    """A-path of a family whose anchor is ``[I | 0]``: ``a = (dgamma/dt, u)``.

    ``gamma_fn`` and ``dgamma_fn`` take an array of times and return ``(len, m)`` arrays.
    """
    t = np.linspace(0.0, 1.0, N + 1)
    g = np.asarray(gamma_fn(t), dtype=float).reshape(N + 1, spec.m)
    dg = np.asarray(dgamma_fn(t), dtype=float).reshape(N + 1, spec.m)
    extra = spec.n - spec.m
    if extra:
        u = np.zeros((N + 1, extra)) if u_fn is None else np.asarray(u_fn(t), dtype=float).reshape(N + 1, extra)
        a = np.hstack([dg, u])
    else:
        a = dg
    return APath(spec, a, g, bool(not a[0].any() and not a[-1].any()))


# ---------------------------------------------------------------------------
# reparameterization

def tau(t):
    """Quintic smoothstep: tau(0)=0, tau(1)=1, tau' = tau'' = 0 at both ends."""
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    return t**3 * (10.0 - 15.0 * t + 6.0 * t**2)


def dtau(t):
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    return 30.0 * t**2 * (1.0 - t) ** 2


def reparam_tau(p: APath) -> APath:
    """``a^tau(t) = tau'(t) a(tau(t))`` with base ``gamma(tau(t))``, on the same grid."""
    t = p.t
    a, g = sample(p, tau(t))
    a = dtau(t)[:, None] * a
    a[0] = 0.0
    a[-1] = 0.0
    g[0], g[-1] = p.gamma[0], p.gamma[-1]
    return APath(p.spec, a, g, True)


# ---------------------------------------------------------------------------
# groupoid-like operations

def endpoints(p: APath) -> tuple[np.ndarray, np.ndarray]:
    return p.gamma[0].copy(), p.gamma[-1].copy()


def _same_point(spec: AlgebroidSpec, x, y, tol: float) -> bool:
    return bool(np.max(np.abs(spec.embedded(x) - spec.embedded(y)), initial=0.0) <= tol)


def concat(a0: APath, a1: APath, endpoint_tol: float = 1e-9) -> APath:
    """Traverse ``a0`` then ``a1``: ``2 a0(2t)`` on [0, 1/2], ``2 a1(2t - 1)`` after.

    In product notation this is ``a1 . a0``.
    """
    if a0.spec is not a1.spec and a0.spec != a1.spec:
        raise ValueError("paths over different algebroids")
    if not _same_point(a0.spec, a0.gamma[-1], a1.gamma[0], endpoint_tol):
        raise EndpointMismatchError(f"target {a0.gamma[-1].tolist()} != source {a1.gamma[0].tolist()}")
    if a1.N != a0.N:
        a1 = resample(a1, a0.N)
    N = a0.N
    if N % 2:
        raise ValueError("concatenation needs an even grid size")
    half = N // 2
    a = np.zeros((N + 1, a0.spec.n))
    g = np.zeros((N + 1, a0.spec.m))
    a[: half + 1] = 2.0 * a0.a[::2]
    g[: half + 1] = a0.gamma[::2]
    a[half:] = 2.0 * a1.a[::2]
    g[half + 1 :] = a1.gamma[2::2]
    g[half] = a0.gamma[-1]
    right = None
    a[half] = 2.0 * a0.a[-1]
    joint_right = 2.0 * a1.right_values()[0]
    if not np.array_equal(a[half], joint_right):
        right = a.copy()
        right[half] = joint_right
    if a0.a_right is not None or a1.a_right is not None:
        right = a.copy() if right is None else right
        if a0.a_right is not None:
            for b in a0.breaks:
                if b % 2 == 0:
                    right[b // 2] = 2.0 * a0.a_right[b]
        if a1.a_right is not None:
            for b in a1.breaks:
                if b % 2 == 0:
                    right[half + b // 2] = 2.0 * a1.a_right[b]
    breaks = [b // 2 for b in a0.breaks if b % 2 == 0] + [half] + [half + b // 2 for b in a1.breaks if b % 2 == 0]
    return APath(a0.spec, a, g, a0.a0 and a1.a0, tuple(breaks), right)


def invert(p: APath) -> APath:
    """Reverse the path: ``-a(1 - t)`` over ``gamma(1 - t)``."""
    a = -p.a[::-1]
    right = None
    if p.a_right is not None:
        right = -p.a[::-1]
        a = -p.a_right[::-1]
    breaks = tuple(p.N - b for b in p.breaks)
    return APath(p.spec, a + 0.0, p.gamma[::-1].copy(), p.a0, breaks, right)


# ---------------------------------------------------------------------------
# generator presets

def circle_path(N: int = 2000) -> APath:
    """Tangent lift of the unit circle in R^2 starting at (0, -1)."""
    from .algebroid import tangent

    spec = tangent(2)
    w = 2.0 * np.pi
    return integrate_base(spec, lambda t: w * np.array([np.cos(w * t), np.sin(w * t)]), [0.0, -1.0], N)


def random_fiber_function(n: int, seed: int, smoothness: int = 3, amplitude: float = 1.0,
                          a0: bool = True) -> Callable:
    """Smooth random fibre curve; multiplied by ``tau'`` so the A0 conditions hold."""
    rng = np.random.default_rng(seed)
    coeffs = rng.normal(size=(smoothness + 1, n)) * amplitude / np.arange(1, smoothness + 2)[:, None]
    ks = np.arange(smoothness + 1)

    def fn(t):
        t = np.asarray(t, dtype=float)
        basis = np.cos(np.pi * np.multiply.outer(t, ks))
        val = basis @ coeffs
        return val * dtau(t)[..., None] if a0 else val

    return fn


def random_path(spec: AlgebroidSpec, seed: int, N: int, smoothness: int = 3, amplitude: float = 1.0,
                gamma0=None, a0: bool = True) -> APath:
    fn = random_fiber_function(spec.n, seed, smoothness, amplitude, a0)
    x0 = np.zeros(spec.m) if gamma0 is None else gamma0
    if spec.m == 0:
        t = np.linspace(0.0, 1.0, N + 1)
        a = fn(t)
        if a0:
            a[0] = a[-1] = 0.0
        return APath(spec, a, np.zeros((N + 1, 0)), a0)
    p = integrate_base(spec, fn, x0, N)
    return replace(p, a0=a0) if a0 else p
