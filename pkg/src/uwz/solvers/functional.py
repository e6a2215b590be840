"""The rate functional phi(V, W) = I(U;X|Y) and small numeric helpers around it."""
from __future__ import annotations

import numpy as np

from ..errors import AlphabetMismatchError
from ..probability import conditional_mutual_information, mutual_information


def _as_stochastic(a, name: str) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise AlphabetMismatchError(f"{name} must be a matrix")
    if np.any(a < -1e-12) or np.any(np.abs(a.sum(axis=1) - 1.0) > 1e-8):
        raise ValueError(f"{name} must be row-stochastic")
    return a


def joint_uxy(v, w, px) -> np.ndarray:
    """P(u, x, y) = P(x) V(u|x) W(y|x), axes ordered (U, X, Y)."""
    v = _as_stochastic(v, "test channel")
    w = _as_stochastic(w, "channel")
    px = np.asarray(px, dtype=float).ravel()
    if v.shape[0] != px.size or w.shape[0] != px.size:
        raise AlphabetMismatchError(f"px has {px.size} symbols, V has {v.shape[0]} rows, W has {w.shape[0]} rows")
    return v.T[:, :, None] * px[None, :, None] * w[None, :, :]


def phi(v, w, px) -> float:
    """I(U;X|Y) for the joint P_X V W."""
    return conditional_mutual_information(joint_uxy(v, w, px))


def phi_difference(v, w, px) -> float:
    """The same quantity as I(U;X) - I(U;Y); useful as a cross-check."""
    t = joint_uxy(v, w, px)
    pxu = t.sum(axis=2).T  # [x, u]
    puy = t.sum(axis=1)  # [u, y]
    pu = puy.sum(axis=1)
    iux = mutual_information(pxu.sum(axis=1), np.divide(pxu, pxu.sum(axis=1, keepdims=True), out=np.zeros_like(pxu), where=pxu.sum(axis=1, keepdims=True) > 0))
    iuy = mutual_information(pu, np.divide(puy, pu[:, None], out=np.zeros_like(puy), where=pu[:, None] > 0))
    return iux - iuy


def phi_gradient_w(v, w, px) -> np.ndarray:
    """d phi / d W(y|x) = -P(x) sum_u V(u|x) log2 Q(u|y), Q the posterior of U given Y.

    For an unused output y the limit Q(.|y) = V(.|x) is used.
    """
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    px = np.asarray(px, dtype=float)
    pxy = px[:, None] * w
    py = pxy.sum(axis=0)
    puy = v.T @ pxy  # [u, y]
    g = np.zeros_like(w)
    floor = 1e-300
    for y in range(w.shape[1]):
        if py[y] > 0:
            lq = np.log2(np.maximum(puy[:, y] / py[y], floor))
            g[:, y] = -px * (v @ lq)
        else:
            g[:, y] = -px * np.sum(v * np.log2(np.maximum(v, floor)), axis=1)
    return g
