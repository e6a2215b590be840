"""Blahut-Arimoto style alternating minimization for single-constraint rate problems.

Minimizing phi(V, W) + s d(V, W) over V alternates between the posterior
Q(u|y) and the closed-form update V(u|x) ~ exp(sum_y W(y|x) log Q(u|y) - s dbar(x, u)).
With a single output symbol this is the classic Blahut-Arimoto recursion for R(D).
"""
from __future__ import annotations

import math

import numpy as np

from .. import _kernels
from ..errors import InfeasibleError
from .functional import phi

DEFAULT_MAX_SWEEPS = 50_000
SWEEP_TOL = 1e-12


def lagrangian_solve(px, w, dbar, s: float, allowed=None, max_sweeps: int = DEFAULT_MAX_SWEEPS, tol: float = SWEEP_TOL):
    """Minimizer of phi(V, W) + s d(V, W) from a uniform start, restricted to ``allowed`` entries."""
    # fresh writable copies: the compiled kernel takes non-const buffers
    px = np.array(px, dtype=float, order="C")
    w = np.array(w, dtype=float, order="C")
    dbar = np.array(dbar, dtype=float, order="C")
    nx, nu = dbar.shape
    if allowed is None:
        allowed = np.ones((nx, nu), dtype=np.uint8)
    allowed = np.ascontiguousarray(allowed, dtype=np.uint8)
    v = allowed / allowed.sum(axis=1, keepdims=True)
    v = np.ascontiguousarray(v, dtype=float)
    _kernels.ba_wz_iterate(px, w, dbar, allowed, float(s), v, int(max_sweeps), float(tol))
    return v


def expected_distortion(px, dbar, v) -> float:
    return float(np.sum(np.asarray(px)[:, None] * dbar * v))


def constrained_solve(px, w, dbar, D: float, tol: float = 1e-9, max_bisections: int = 80):
    """min phi(V, W) subject to d(V, W) <= D by bisection on the multiplier s.

    Returns ``(rate, V, s)``. The final V mixes the two bracketing Lagrangian
    solutions so that the constraint holds with equality.
    """
    px = np.asarray(px, dtype=float)
    dbar = np.asarray(dbar, dtype=float)
    best = dbar.min(axis=1, keepdims=True)
    dmin = float(px @ best[:, 0])
    if D < dmin - 1e-12:
        raise InfeasibleError(f"distortion {D} is below the achievable floor {dmin}")
    col = px @ dbar
    u0 = int(np.argmin(col))
    if D >= col[u0] - 1e-15:
        v = np.zeros_like(dbar)
        v[:, u0] = 1.0
        return 0.0, v, 0.0
    floor_mask = (dbar <= best + 1e-12).astype(np.uint8)
    if D <= dmin + 1e-12:
        v_floor = lagrangian_solve(px, w, dbar, 0.0, allowed=floor_mask)
        return phi(v_floor, w, px), v_floor, math.inf

    def at(s):
        v = lagrangian_solve(px, w, dbar, s)
        return v, expected_distortion(px, dbar, v)

    lo_s, (v_lo, d_lo) = 0.0, at(0.0)
    hi_s = 1.0
    v_hi, d_hi = at(hi_s)
    while d_hi > D and hi_s < 1e6:
        lo_s, v_lo, d_lo = hi_s, v_hi, d_hi
        hi_s *= 4.0
        v_hi, d_hi = at(hi_s)
    if d_hi > D:
        # the multiplier runs off; fall back to the distortion floor as the upper end
        hi_s, v_hi, d_hi = math.inf, lagrangian_solve(px, w, dbar, 0.0, allowed=floor_mask), dmin
    else:
        for _ in range(max_bisections):
            if d_lo - d_hi <= tol:
                break
            mid = 0.5 * (lo_s + hi_s) if lo_s == 0.0 else math.sqrt(lo_s * hi_s)
            v_mid, d_mid = at(mid)
            if d_mid > D:
                lo_s, v_lo, d_lo = mid, v_mid, d_mid
            else:
                hi_s, v_hi, d_hi = mid, v_mid, d_mid
    theta = 1.0 if d_lo == d_hi else (d_lo - D) / (d_lo - d_hi)
    theta = min(max(theta, 0.0), 1.0)
    v = theta * v_hi + (1.0 - theta) * v_lo
    return phi(v, w, px), v, hi_s


def lagrange_sweep(px, w, dbar, slopes):
    """Points (D_s, R_s, s) traced by the Lagrangian minimizers over a slope grid."""
    pts = []
    for s in slopes:
        v = lagrangian_solve(px, w, dbar, float(s))
        pts.append((expected_distortion(px, dbar, v), phi(v, w, px), float(s)))
    return pts


def lower_convex_envelope(points):
    """Vertices of the lower convex envelope of (D, R) points, sorted by D (monotone chain)."""
    pts = sorted({(float(d), float(r)) for d, r in points})
    hull: list = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (p[1] - y1) - (y2 - y1) * (p[0] - x1) <= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    return hull


def envelope_value(hull, D: float) -> float:
    xs = np.array([p[0] for p in hull])
    ys = np.array([p[1] for p in hull])
    if D <= xs[0]:
        return float(ys[0])
    return float(np.interp(D, xs, ys))
