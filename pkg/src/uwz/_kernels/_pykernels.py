"""numpy implementations of the compiled kernels (same signatures, same results)."""
import math

import numpy as np

_MASK32 = np.uint64(32)


def hash_bins(codes, a, b, m):
    codes = np.asarray(codes, dtype=np.uint64)
    with np.errstate(over="ignore"):
        h = (np.uint64(a) * codes + np.uint64(b)) >> _MASK32
        return ((h * np.uint64(m)) >> _MASK32).astype(np.int64)


def ba_wz_iterate(px, w, dbar, allowed, s, v, max_iter, tol):
    px = np.asarray(px, dtype=float)
    w = np.asarray(w, dtype=float)
    pxy = px[:, None] * w
    py = pxy.sum(axis=0)
    post = np.zeros_like(pxy)
    np.divide(pxy, py[None, :], out=post, where=py[None, :] > 0)
    allowed = np.asarray(allowed, dtype=bool)
    wpos = w > 0
    it = 0
    while it < max_iter:
        it += 1
        q = post.T @ v  # [y, u]
        with np.errstate(divide="ignore"):
            lq = np.log(q)
        lq[py <= 0, :] = 0.0
        # sum_y W(y|x) log Q(u|y), with -inf whenever a reachable y has Q(u|y) = 0
        dead = (wpos[:, :, None] & np.isneginf(lq)[None, :, :]).any(axis=1)
        finite_lq = np.where(np.isneginf(lq), 0.0, lq)
        logits = w @ finite_lq - s * dbar
        logits[dead | ~allowed] = -np.inf
        mx = logits.max(axis=1, keepdims=True)
        live = np.isfinite(mx[:, 0])
        e = np.zeros_like(logits)
        e[live] = np.exp(logits[live] - mx[live])
        e[~np.isfinite(logits)] = 0.0
        new = v.copy()
        new[live] = e[live] / e[live].sum(axis=1, keepdims=True)
        diff = np.abs(new - v).max()
        v[...] = new
        if diff < tol:
            break
    return it


def enumerate_support(x, v, nu):
    x = np.asarray(x, dtype=np.int64)
    v = np.asarray(v, dtype=float)
    codes = np.zeros(1, dtype=np.uint64)
    probs = np.ones(1)
    for xt in x:
        supp = np.flatnonzero(v[xt] > 0)
        codes = (codes[:, None] * np.uint64(nu) + supp.astype(np.uint64)[None, :]).ravel()
        probs = (probs[:, None] * v[xt, supp][None, :]).ravel()
    return codes, probs


def decode_scan(y, nu, ny, fa, fb, fm, s, ga, gb, gm, ell):
    y = np.asarray(y, dtype=np.int64)
    n = y.size
    codes = np.arange(nu**n, dtype=np.uint64)
    cand = codes[hash_bins(codes, fa, fb, fm) == s]
    cand = cand[hash_bins(cand, ga, gb, gm) == ell]
    if cand.size == 0:
        return -1, math.inf, 0
    klogk = [0.0, 0.0] + [t * math.log(t) for t in range(2, n + 1)]
    ycount = np.bincount(y, minlength=ny)
    digits = (cand[:, None] // (np.uint64(nu) ** np.arange(n - 1, -1, -1, dtype=np.uint64))) % np.uint64(nu)
    digits = digits.astype(np.int64)
    best, best_h = -1, math.inf
    for code, row in zip(cand.tolist(), digits):
        cu = np.zeros((nu, ny), dtype=np.int64)
        np.add.at(cu, (row, y), 1)
        hval = 0.0
        for yy in range(ny):
            hval = hval + klogk[ycount[yy]]
            for u in range(nu):
                hval = hval - klogk[cu[u, yy]]
        hval = hval / (n * math.log(2.0))
        if hval < best_h - 1e-9:
            best_h, best = hval, code
    return best, best_h, int(cand.size)
