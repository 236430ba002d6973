"""Hot numeric loops: fixed-step RK4 for the linear ODEs driven by sampled data.

Every kernel has a numba implementation and a numpy implementation with the
same signature.  The public names dispatch on :data:`apathkit._accel.USE_NUMBA`.
Coefficients are supplied per interval (start, midpoint, end), so the
integrators never call back into Python.
"""
from __future__ import annotations

import numpy as np

from ._accel import USE_NUMBA, njit, prange

# Lagrange weights of the 4-point stencil evaluated at local positions 0.5, 1.5, 2.5.
_HALF_WEIGHTS = np.array(
    [
        [5.0, 15.0, -5.0, 1.0],
        [-1.0, 9.0, 9.0, -1.0],
        [1.0, -5.0, 15.0, 5.0],
    ]
) / 16.0


def segment_bounds(n_intervals: int, breaks=()) -> list[tuple[int, int]]:
    """Node-index ranges ``(start, end)`` of the smooth pieces of a grid."""
    cuts = sorted({int(b) for b in breaks if 0 < int(b) < n_intervals})
    edges = [0, *cuts, n_intervals]
    return list(zip(edges[:-1], edges[1:]))


def midpoints(values: np.ndarray, breaks=(), axis: int = 0) -> np.ndarray:
    """Fourth-order interpolation of nodal samples to the interval midpoints.

    Stencils never straddle a breakpoint, so piecewise-smooth data (for
    instance a concatenated path) keeps its accuracy on each piece.
    """
    v = np.moveaxis(np.asarray(values), axis, 0)
    n = v.shape[0] - 1
    out = np.empty((n,) + v.shape[1:], dtype=np.result_type(v.dtype, np.float64))
    for s, e in segment_bounds(n, breaks):
        length = e - s
        if length >= 3:
            idx = np.arange(s, e)
            start = np.clip(idx - 1, s, e - 3)
            w = _HALF_WEIGHTS[idx - start]
            acc = np.zeros((length,) + v.shape[1:], dtype=out.dtype)
            for k in range(4):
                shape = (length,) + (1,) * (v.ndim - 1)
                acc += w[:, k].reshape(shape) * v[start + k]
            out[s:e] = acc
        else:
            out[s:e] = 0.5 * (v[s:e] + v[s + 1 : e + 1])
    return np.moveaxis(out, 0, axis)


def central_diff(values: np.ndarray, h: float, axis: int = 0) -> np.ndarray:
    """Second-order central differences, one-sided second-order at the ends."""
    v = np.moveaxis(np.asarray(values, dtype=float), axis, 0)
    d = np.empty_like(v)
    d[1:-1] = (v[2:] - v[:-2]) / (2.0 * h)
    # written in differences so constant data gives exact zeros
    d[0] = (4.0 * (v[1] - v[0]) - (v[2] - v[0])) / (2.0 * h)
    d[-1] = (4.0 * (v[-1] - v[-2]) - (v[-1] - v[-3])) / (2.0 * h)
    return np.moveaxis(d, 0, axis)


# one-sided fourth-order first-derivative stencils for the first two nodes
_D4_EDGE = np.array([[-25.0, 48.0, -36.0, 16.0, -3.0], [-3.0, -10.0, 18.0, -6.0, 1.0]]) / 12.0


def central_diff4(values: np.ndarray, h: float, axis: int = 0) -> np.ndarray:
    """Fourth-order first differences: five-point central stencil, one-sided at the ends."""
    v = np.moveaxis(np.asarray(values, dtype=float), axis, 0)
    if v.shape[0] < 5:
        raise ValueError("fourth-order differences need at least 5 nodes")
    d = np.empty_like(v)
    d[2:-2] = (8.0 * (v[3:-1] - v[1:-3]) - (v[4:] - v[:-4])) / (12.0 * h)
    for i in range(2):
        d[i] = np.tensordot(_D4_EDGE[i], v[:5] - v[i], axes=(0, 0)) / h
        d[-1 - i] = -np.tensordot(_D4_EDGE[i], v[::-1][:5] - v[-1 - i], axes=(0, 0)) / h
    return np.moveaxis(d, 0, axis)


def simpson_weights(n: int, h: float) -> np.ndarray:
    if n < 2 or n % 2:
        raise ValueError("composite Simpson needs an even number of intervals")
    w = np.ones(n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * h / 3.0


def simpson2d(values: np.ndarray, h0: float, h1: float) -> float:
    w0 = simpson_weights(values.shape[0] - 1, h0)
    w1 = simpson_weights(values.shape[1] - 1, h1)
    return float(w0 @ values @ w1)


# ---------------------------------------------------------------------------
# b' = F(t) + K(t) b, batched over independent rows


@njit(cache=True, parallel=True)
def _rk4_affine_numba(f_s, f_m, f_e, k_s, k_m, k_e, b0, h):
    rows, nt, n = f_s.shape
    nt1 = nt + 1
    out = np.zeros((rows, nt1, n))
    for r in prange(rows):
        b = b0[r].copy()
        out[r, 0] = b
        k1 = np.empty(n)
        k2 = np.empty(n)
        k3 = np.empty(n)
        k4 = np.empty(n)
        tmp = np.empty(n)
        for i in range(nt1 - 1):
            for p in range(n):
                acc = f_s[r, i, p]
                for q in range(n):
                    acc += k_s[r, i, p, q] * b[q]
                k1[p] = acc
            for q in range(n):
                tmp[q] = b[q] + 0.5 * h * k1[q]
            for p in range(n):
                acc = f_m[r, i, p]
                for q in range(n):
                    acc += k_m[r, i, p, q] * tmp[q]
                k2[p] = acc
            for q in range(n):
                tmp[q] = b[q] + 0.5 * h * k2[q]
            for p in range(n):
                acc = f_m[r, i, p]
                for q in range(n):
                    acc += k_m[r, i, p, q] * tmp[q]
                k3[p] = acc
            for q in range(n):
                tmp[q] = b[q] + h * k3[q]
            for p in range(n):
                acc = f_e[r, i, p]
                for q in range(n):
                    acc += k_e[r, i, p, q] * tmp[q]
                k4[p] = acc
            for p in range(n):
                b[p] += h / 6.0 * (k1[p] + 2.0 * k2[p] + 2.0 * k3[p] + k4[p])
            out[r, i + 1] = b
    return out


def _rk4_affine_numpy(f_s, f_m, f_e, k_s, k_m, k_e, b0, h):
    rows, nt, n = f_s.shape
    out = np.zeros((rows, nt + 1, n))
    b = np.array(b0, dtype=float)
    out[:, 0] = b
    for i in range(nt):
        k1 = f_s[:, i] + np.einsum("rpq,rq->rp", k_s[:, i], b)
        k2 = f_m[:, i] + np.einsum("rpq,rq->rp", k_m[:, i], b + 0.5 * h * k1)
        k3 = f_m[:, i] + np.einsum("rpq,rq->rp", k_m[:, i], b + 0.5 * h * k2)
        k4 = f_e[:, i] + np.einsum("rpq,rq->rp", k_e[:, i], b + h * k3)
        b = b + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[:, i + 1] = b
    return out


# ---------------------------------------------------------------------------
# matrix development g' = g A(t) (right) or g' = A(t) g (left)


@njit(cache=True)
def _matmul(x, y):
    d = x.shape[0]
    z = np.zeros((d, d), dtype=np.complex128)
    for i in range(d):
        for k in range(d):
            xik = x[i, k]
            if xik != 0:
                for j in range(d):
                    z[i, j] += xik * y[k, j]
    return z


@njit(cache=True)
def _rhs(g, a, right):
    if right:
        return _matmul(g, a)
    return _matmul(a, g)


@njit(cache=True)
def _rk4_matrix_numba(a_s, a_m, a_e, h, right):
    nt, d, _ = a_s.shape
    out = np.zeros((nt + 1, d, d), dtype=np.complex128)
    g = np.eye(d, dtype=np.complex128)
    out[0] = g
    for i in range(nt):
        k1 = _rhs(g, a_s[i], right)
        k2 = _rhs(g + 0.5 * h * k1, a_m[i], right)
        k3 = _rhs(g + 0.5 * h * k2, a_m[i], right)
        k4 = _rhs(g + h * k3, a_e[i], right)
        g = g + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[i + 1] = g
    return out


def _rk4_matrix_numpy(a_s, a_m, a_e, h, right):
    nt, d, _ = a_s.shape
    out = np.zeros((nt + 1, d, d), dtype=np.complex128)
    g = np.eye(d, dtype=np.complex128)
    out[0] = g
    rhs = (lambda x, a: x @ a) if right else (lambda x, a: a @ x)
    for i in range(nt):
        k1 = rhs(g, a_s[i])
        k2 = rhs(g + 0.5 * h * k1, a_m[i])
        k3 = rhs(g + 0.5 * h * k2, a_m[i])
        k4 = rhs(g + h * k3, a_e[i])
        g = g + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[i + 1] = g
    return out


def rk4_affine(f, k, b0, h, *, use_numba: bool | None = None):
    """Integrate ``b' = F + K b`` along axis 1 of every row; returns all nodes.

    ``f`` and ``k`` are ``(start, mid, end)`` triples as built by
    :func:`interval_samples`, with shapes ``(rows, N, n)`` and ``(rows, N, n, n)``.
    """
    args = tuple(np.ascontiguousarray(v, dtype=float) for v in (*f, *k, b0)) + (float(h),)
    if USE_NUMBA if use_numba is None else use_numba:
        return _rk4_affine_numba(*args)
    return _rk4_affine_numpy(*args)


def rk4_matrix(a, h, right: bool = True, *, use_numba: bool | None = None):
    """Integrate the matrix ODE from the identity; returns the trajectory."""
    args = tuple(np.ascontiguousarray(v, dtype=np.complex128) for v in a) + (float(h), bool(right))
    if USE_NUMBA if use_numba is None else use_numba:
        return _rk4_matrix_numba(*args)
    return _rk4_matrix_numpy(*args)


def interval_samples(values, right=None, breaks=(), axis: int = 0):
    """Per-interval ``(start, mid, end)`` samples of nodal data along ``axis``.

    ``right`` optionally holds right-hand limits at the nodes (only rows at
    breakpoints are read), for data that jumps across a breakpoint.
    """
    v = np.moveaxis(np.asarray(values), axis, 0)
    r = None if right is None else np.moveaxis(np.asarray(right), axis, 0)
    n = v.shape[0] - 1
    start = v[:-1].copy()
    end = v[1:].copy()
    mid = np.empty_like(start, dtype=np.result_type(v.dtype, np.float64))
    for s, e in segment_bounds(n, breaks):
        seg = v[s : e + 1].copy()
        if r is not None and s > 0:
            seg[0] = r[s]
            start[s] = r[s]
        mid[s:e] = midpoints(seg)
    return tuple(np.moveaxis(x, 0, axis) for x in (start, mid, end))


def piecewise_central_diff(values, h: float, breaks=(), axis: int = 0):
    """Central differences computed separately on each smooth piece.

    Returns ``(left, right)`` nodal derivatives; they differ only at breakpoints,
    where ``left`` comes from the piece ending there and ``right`` from the
    piece starting there.
    """
    v = np.moveaxis(np.asarray(values, dtype=float), axis, 0)
    n = v.shape[0] - 1
    left = np.empty_like(v)
    right = np.empty_like(v)
    for s, e in segment_bounds(n, breaks):
        seg = v[s : e + 1]
        if e - s >= 2:
            d = central_diff(seg, h)
        else:
            d = np.repeat(((seg[1:] - seg[:-1]) / h)[:1], e - s + 1, axis=0)
        left[s + 1 : e + 1] = d[1:]
        right[s:e] = d[:-1]
        if s == 0:
            left[0] = d[0]
        if e == n:
            right[n] = d[-1]
    return np.moveaxis(left, 0, axis), np.moveaxis(right, 0, axis)
