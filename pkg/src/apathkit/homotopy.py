"""Two-parameter families of A-paths and the linear ODE that decides their equivalence.

For a sheet ``a(eps, t)`` over ``gamma(eps, t)`` the companion ``b`` solves, row by row,

    d_t b = d_eps a + c(a, b) + G(d_eps gamma - rho b) a - G(d_t gamma - rho a) b,   b(eps, 0) = lift(d_eps gamma)

which is :func:`apathkit.algebroid.torsion_reduced` moved to the right-hand side.
The end rows are equivalent when ``b(eps, 1)`` vanishes for every ``eps``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .algebroid import AlgebroidSpec, ConnectionSpec, zero_connection
from .paths import APath, EndpointMismatchError, _same_point, concat, dtau, residual, sample, tau
from .report import Report


@dataclass(frozen=True, eq=False)
class HomotopySheet:
    """Samples ``a[j, i] = a(eps_j, t_i)`` and ``gamma[j, i]`` on a uniform product grid.

    ``breaks`` are t-node indices shared by all rows where rows are only
    piecewise smooth; ``a_right`` holds right-hand limits there when ``a`` jumps.
    """

    spec: AlgebroidSpec
    a: np.ndarray
    gamma: np.ndarray
    breaks: tuple[int, ...] = ()
    a_right: np.ndarray | None = field(default=None, repr=False)
    name: str = ""

    def __post_init__(self):
        a = np.array(self.a, dtype=float)
        if a.ndim != 3 or a.shape[2] != self.spec.n:
            raise ValueError(f"sheet fibre array must have shape (N_eps+1, N_t+1, {self.spec.n})")
        g = np.array(self.gamma, dtype=float).reshape(a.shape[:2] + (self.spec.m,))
        for arr in (a, g):
            arr.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "gamma", g)
        nt = a.shape[1] - 1
        object.__setattr__(self, "breaks", tuple(sorted({int(b) for b in self.breaks if 0 < b < nt})))
        if self.a_right is not None:
            r = np.array(self.a_right, dtype=float)
            if r.shape != a.shape:
                raise ValueError("a_right must match the shape of a")
            r.setflags(write=False)
            object.__setattr__(self, "a_right", r)

    @property
    def N_eps(self) -> int:
        return self.a.shape[0] - 1

    @property
    def N_t(self) -> int:
        return self.a.shape[1] - 1

    def right_values(self) -> np.ndarray:
        return self.a if self.a_right is None else self.a_right

    def row(self, j: int) -> APath:
        right = None if self.a_right is None else self.a_right[j]
        return APath(self.spec, self.a[j], self.gamma[j], False, self.breaks, right)

    def flip(self) -> "HomotopySheet":
        right = None if self.a_right is None else self.a_right[::-1]
        return HomotopySheet(self.spec, self.a[::-1], self.gamma[::-1], self.breaks, right, self.name)

    def coarsen(self) -> "HomotopySheet":
        """Every other node in both directions; needs even grids and even breaks."""
        if self.N_eps % 2 or self.N_t % 2 or any(b % 2 for b in self.breaks):
            raise ValueError("coarsening needs even grid sizes and breakpoints")
        right = None if self.a_right is None else self.a_right[::2, ::2]
        return HomotopySheet(self.spec, self.a[::2, ::2], self.gamma[::2, ::2],
                             tuple(b // 2 for b in self.breaks), right, self.name)

    def to_dict(self) -> dict:
        out = {"N_eps": self.N_eps, "N_t": self.N_t, "a": self.a.tolist(), "gamma": self.gamma.tolist()}
        if self.breaks:
            out["breaks"] = list(self.breaks)
        return out


def sheet_invariants(sheet: HomotopySheet, path_tol: float = 1e-6, endpoint_tol: float = 1e-12) -> Report:
    spec = sheet.spec
    res = max(residual(sheet.row(j)) for j in range(sheet.N_eps + 1))
    e0 = spec.embedded(sheet.gamma[:, 0])
    e1 = spec.embedded(sheet.gamma[:, -1])
    drift = float(max(np.max(np.abs(e0 - e0[0]), initial=0.0), np.max(np.abs(e1 - e1[0]), initial=0.0)))
    return Report(
        passed=bool(res <= path_tol and drift <= endpoint_tol),
        metrics={"row_residual": res, "endpoint_drift": drift, "path_tol": path_tol},
        provenance={"op": "homotopy_engine.sheet_invariants", "sheet": sheet.name},
    )


@dataclass(frozen=True, eq=False)
class BSolution:
    b: np.ndarray
    terminal: np.ndarray
    terminal_defect: np.ndarray
    d_eps_gamma: np.ndarray

    @property
    def max_terminal(self) -> float:
        return float(np.max(self.terminal))


def _coefficients(spec: AlgebroidSpec, conn: ConnectionSpec, x, a, da, dg, dt):
    r = spec.rho(x)
    c = spec.c(x)
    G = conn.G(x)
    ra = np.einsum("...ij,...j->...i", r, a)
    f = da + np.einsum("...ikp,...i,...p->...k", G, dg, a)
    k = np.einsum("...kpq,...p->...kq", c, a)
    k -= np.einsum("...ikp,...iq,...p->...kq", G, r, a)
    k -= np.einsum("...ikq,...i->...kq", G, dt - ra)
    return f, k


def solve_b(spec: AlgebroidSpec, conn: ConnectionSpec | None, sheet: HomotopySheet,
            *, eps_order: int = 2, use_numba: bool | None = None) -> BSolution:
    """Integrate the homotopy ODE along t for every eps-row (RK4, piecewise across breaks).

    ``terminal`` measures ``b(eps, 1)`` against the lift of ``d_eps gamma(eps, 1)``;
    the lift is zero whenever the chart endpoint is fixed, and it absorbs the
    spurious chart velocity of a sweep whose endpoint sits on a coordinate pole.
    ``eps_order`` selects second- or fourth-order differences in eps.
    """
    if eps_order not in (2, 4):
        raise ValueError("eps_order must be 2 or 4")
    if sheet.N_eps < 4:
        raise ValueError("solve_b needs N_eps >= 4")
    if sheet.N_t < 3:
        raise ValueError("solve_b needs N_t >= 3")
    conn = zero_connection(spec) if conn is None else conn
    if (conn.m, conn.n) != (spec.m, spec.n):
        raise ValueError("connection dimensions do not match the algebroid")
    he, ht = 1.0 / sheet.N_eps, 1.0 / sheet.N_t
    br = sheet.breaks
    a, ar, g = sheet.a, sheet.right_values(), sheet.gamma

    diff = kernels.central_diff if eps_order == 2 else kernels.central_diff4
    da = diff(a, he, axis=0)
    dar = da if sheet.a_right is None else diff(ar, he, axis=0)
    dg = diff(g, he, axis=0) if spec.m else np.zeros_like(g)
    if spec.m:
        dt_l, dt_r = kernels.piecewise_central_diff(g, ht, br, axis=1)
    else:
        dt_l = dt_r = np.zeros_like(g)

    xs = kernels.interval_samples(g, None, br, axis=1)
    as_ = kernels.interval_samples(a, ar, br, axis=1)
    das = kernels.interval_samples(da, dar, br, axis=1)
    dgs = kernels.interval_samples(dg, None, br, axis=1)
    dts = kernels.interval_samples(dt_l, dt_r, br, axis=1)
    fk = [_coefficients(spec, conn, *args) for args in zip(xs, as_, das, dgs, dts)]
    f = tuple(v[0] for v in fk)
    k = tuple(v[1] for v in fk)

    lift0 = np.einsum("...ij,...j->...i", spec.anchor_pinv(g[:, 0]), dg[:, 0])
    b = kernels.rk4_affine(f, k, lift0, ht, use_numba=use_numba)
    lift1 = np.einsum("...ij,...j->...i", spec.anchor_pinv(g[:, -1]), dg[:, -1])
    defect = b[:, -1] - lift1
    b.setflags(write=False)
    return BSolution(b=b, terminal=np.linalg.norm(defect, axis=-1), terminal_defect=defect, d_eps_gamma=dg)


def is_homotopy(spec: AlgebroidSpec, conn: ConnectionSpec | None, sheet: HomotopySheet,
                tol: float = 1e-5, eps_order: int = 2) -> tuple[bool, Report]:
    sol = solve_b(spec, conn, sheet, eps_order=eps_order)
    mt = sol.max_terminal
    ok = bool(mt <= tol)
    rep = Report(
        passed=ok,
        metrics={"max_terminal": mt, "tol": tol, "N_eps": sheet.N_eps, "N_t": sheet.N_t, "eps_order": eps_order,
                 "terminal_profile": sol.terminal},
        provenance={"op": "homotopy_engine.is_homotopy", "sheet": sheet.name,
                    "connection": "zero" if conn is None else conn.name},
    )
    return ok, rep


def _order(coarse: float, fine: float):
    if fine == 0.0 and coarse == 0.0:
        return "exact"
    if fine == 0.0 or coarse == 0.0:
        return None
    return math.log2(coarse / fine)


def check_connection_independence(spec: AlgebroidSpec, sheet: HomotopySheet, conn1: ConnectionSpec,
                                  conn2: ConnectionSpec, tol: float = 1e-3) -> Report:
    """Compare ``b`` for two connections; the coarse (every other node) grid gives the order."""
    diff = float(np.max(np.abs(solve_b(spec, conn1, sheet).b - solve_b(spec, conn2, sheet).b)))
    metrics = {"max_diff": diff, "tol": tol, "N": sheet.N_t}
    try:
        coarse = sheet.coarsen()
        if coarse.N_eps >= 4 and coarse.N_t >= 4:
            dc = float(np.max(np.abs(solve_b(spec, conn1, coarse).b - solve_b(spec, conn2, coarse).b)))
            metrics["coarse_diff"] = dc
            metrics["ratio"] = dc / diff if diff else ("exact" if dc == 0.0 else "inf")
            metrics["convergence_order"] = _order(dc, diff)
    except ValueError:
        pass
    return Report(
        passed=bool(diff <= tol), metrics=metrics,
        provenance={"op": "homotopy_engine.check_connection_independence", "sheet": sheet.name,
                    "connections": [conn1.name, conn2.name]},
    )


def dual_residual(spec: AlgebroidSpec, sheet: HomotopySheet, bsol: BSolution) -> float:
    if spec.m == 0:
        return 0.0
    rb = np.einsum("...ij,...j->...i", spec.rho(sheet.gamma), bsol.b)
    return float(np.max(np.linalg.norm(rb - bsol.d_eps_gamma, axis=-1)))


def check_dual_apath(spec: AlgebroidSpec, sheet: HomotopySheet, bsol: BSolution, tol: float = 1e-3) -> Report:
    """``rho(gamma) b = d_eps gamma`` on the whole grid (eps-derivative by central differences)."""
    res = dual_residual(spec, sheet, bsol)
    return Report(
        passed=bool(res <= tol), metrics={"max_residual": res, "tol": tol},
        provenance={"op": "homotopy_engine.check_dual_apath", "sheet": sheet.name},
    )


# ---------------------------------------------------------------------------
# sheet constructors

def constant_sheet(p: APath, N_eps: int = 8) -> HomotopySheet:
    reps = N_eps + 1
    right = None if p.a_right is None else np.repeat(p.a_right[None], reps, axis=0)
    return HomotopySheet(p.spec, np.repeat(p.a[None], reps, axis=0), np.repeat(p.gamma[None], reps, axis=0),
                         p.breaks, right, "constant")


def interpolation_sheet(p0: APath, p1: APath, N_eps: int | None = None,
                        endpoint_tol: float = 1e-12) -> HomotopySheet:
    """Straight-line interpolation of two tangent-family paths with shared endpoints.

    With ``rho`` constant every row is again an A-path.
    """
    spec = p0.spec
    if spec.family != "tangent":
        raise ValueError("linear interpolation sheets need the tangent family")
    if p1.N != p0.N:
        raise ValueError("paths must share the grid")
    for x, y in ((p0.gamma[0], p1.gamma[0]), (p0.gamma[-1], p1.gamma[-1])):
        if not _same_point(spec, x, y, endpoint_tol):
            raise EndpointMismatchError("interpolation needs shared endpoints")
    N_eps = p0.N if N_eps is None else N_eps
    e = np.linspace(0.0, 1.0, N_eps + 1)[:, None, None]
    a = (1.0 - e) * p0.a[None] + e * p1.a[None]
    g = (1.0 - e) * p0.gamma[None] + e * p1.gamma[None]
    g[:, 0], g[:, -1] = p0.gamma[0], p0.gamma[-1]
    return HomotopySheet(spec, a, g, name="interpolation")


def meridian_sheet(spec: AlgebroidSpec, N: int, factor: int = 0, wraps: int = 1, u0: float = 1.0,
                   homotopic: bool = True, N_eps: int | None = None) -> HomotopySheet:
    """Sweep of one sphere factor by meridians ``theta = pi tau(t)``, ``phi = 2 pi k eps``.

    Other factors sit still at the equator.  The ``R`` component is
    ``u(eps, t) = (u0 - eps * 4 pi lambda k) tau'(t)`` when ``homotopic`` so that
    the end rows differ exactly by the swept period; otherwise ``u`` is constant in eps.
    """
    if spec.family != "twisted_surface":
        raise ValueError("meridian sweeps need the twisted_surface family")
    lam = spec.params["lambdas"]
    k = lam.size
    if not 0 <= factor < k:
        raise IndexError(f"factor must lie in [0, {k})")
    N_eps = N if N_eps is None else N_eps
    t = np.linspace(0.0, 1.0, N + 1)
    e = np.linspace(0.0, 1.0, N_eps + 1)
    g = np.zeros((N_eps + 1, N + 1, spec.m))
    g[..., 0::2] = 0.5 * np.pi
    g[..., 2 * factor] = np.pi * tau(t)[None, :]
    g[..., 2 * factor + 1] = 2.0 * np.pi * wraps * e[:, None]
    a = np.zeros((N_eps + 1, N + 1, spec.n))
    a[..., 2 * factor] = np.pi * dtau(t)[None, :]
    shift = 4.0 * np.pi * lam[factor] * wraps if homotopic else 0.0
    a[..., -1] = (u0 - shift * e[:, None]) * dtau(t)[None, :]
    return HomotopySheet(spec, a, g, name=f"meridian(factor={factor}, wraps={wraps})")


def _linear_sigma(t):
    """Piecewise-linear reparameterization through (0,0), (1/4,1/2), (1/2,3/4), (1,1)."""
    t = np.asarray(t, dtype=float)
    s = np.interp(t, [0.0, 0.25, 0.5, 1.0], [0.0, 0.5, 0.75, 1.0])
    left = np.select([t <= 0.25, t <= 0.5], [2.0, 1.0], 0.5)
    right = np.select([t < 0.25, t < 0.5], [2.0, 1.0], 0.5)
    return s, left, right


_Q_KNOTS = np.array([0.0, 0.25, 0.5, 1.0])
_Q_VALUES = np.array([0.0, 0.5, 0.75, 1.0])
_Q_SLOPES = np.array([1.0, 4.0 / 3.0, 2.0 / 3.0, 1.0])


def quintic_sigma(t):
    """C^2 monotone piecewise quintic through the same knots, zero curvature at knots."""
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    j = np.clip(np.searchsorted(_Q_KNOTS, t, side="right") - 1, 0, 2)
    h = _Q_KNOTS[j + 1] - _Q_KNOTS[j]
    u = (t - _Q_KNOTS[j]) / h
    y0, y1 = _Q_VALUES[j], _Q_VALUES[j + 1]
    m0, m1 = _Q_SLOPES[j], _Q_SLOPES[j + 1]
    h0 = 1 - 10 * u**3 + 15 * u**4 - 6 * u**5
    h1 = u - 6 * u**3 + 8 * u**4 - 3 * u**5
    g0 = 10 * u**3 - 15 * u**4 + 6 * u**5
    g1 = -4 * u**3 + 7 * u**4 - 3 * u**5
    dh0 = -30 * u**2 + 60 * u**3 - 30 * u**4
    dh1 = 1 - 18 * u**2 + 32 * u**3 - 15 * u**4
    dg1 = -12 * u**2 + 28 * u**3 - 15 * u**4
    s = y0 * h0 + h * m0 * h1 + y1 * g0 + h * m1 * g1
    ds = (y0 * dh0 - y1 * dh0) / h + m0 * dh1 + m1 * dg1
    return s, ds


def associator_sheet(a1: APath, a2: APath, a3: APath, N_eps: int | None = None,
                     sigma: str = "linear") -> HomotopySheet:
    """Rescaling homotopy between the two bracketings of three composable paths.

    Products follow ``x . y = concat(y, x)`` (``y`` traversed first).  Row 0 is
    ``(a1 . a2) . a3`` and the last row ``a1 . (a2 . a3)``.  With
    ``sigma="linear"`` the rows carry breakpoints at t = 1/4, 1/2 and the last
    row is the other bracketing resampled from row 0 (half of its nodes fall
    between grid points, so it matches a direct concatenation only up to spline
    error); ``sigma="quintic"`` gives C^2 rows whose last row is a
    reparameterization of it.
    """
    base = concat(a3, concat(a2, a1))
    N = base.N
    if sigma == "linear" and N % 4:
        raise ValueError("the linear rescaling needs N divisible by 4")
    N_eps = N if N_eps is None else N_eps
    t = np.linspace(0.0, 1.0, N + 1)
    e = np.linspace(0.0, 1.0, N_eps + 1)[:, None]
    if sigma == "linear":
        s, dl, dr = _linear_sigma(t)
        breaks = (N // 4, N // 2)
    elif sigma == "quintic":
        s, dl = quintic_sigma(t)
        dr = dl
        breaks = ()
    else:
        raise ValueError("sigma must be 'linear' or 'quintic'")
    arg = (1.0 - e) * t[None, :] + e * s[None, :]
    a_vals, g = sample(base, arg)
    a = ((1.0 - e) + e * dl[None, :])[..., None] * a_vals
    right = None
    if sigma == "linear":
        right = ((1.0 - e) + e * dr[None, :])[..., None] * a_vals
    a[:, 0] = a[:, -1] = 0.0
    g[:, 0], g[:, -1] = base.gamma[0], base.gamma[-1]
    # exact rows at both ends where the grid allows it
    a[0] = base.a
    g[0] = base.gamma
    if right is not None:
        right[0] = base.right_values()
        right[:, 0] = right[:, -1] = 0.0
    return HomotopySheet(base.spec, a, g, breaks, right, f"associator({sigma})")
