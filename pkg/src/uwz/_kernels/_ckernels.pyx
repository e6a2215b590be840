# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops. Semantics must match ``_pykernels`` exactly."""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log, INFINITY
from libc.stdint cimport uint64_t, int64_t

cnp.import_array()


cdef inline uint64_t _bin(uint64_t code, uint64_t a, uint64_t b, uint64_t m) nogil:
    # multiply-add-shift: top 32 bits of a*code+b (mod 2^64), scaled onto m bins
    cdef uint64_t h = (a * code + b) >> 32
    return (h * m) >> 32


def hash_bins(cnp.uint64_t[::1] codes, uint64_t a, uint64_t b, uint64_t m):
    cdef Py_ssize_t i, N = codes.shape[0]
    out = np.empty(N, dtype=np.int64)
    cdef cnp.int64_t[::1] o = out
    with nogil:
        for i in range(N):
            o[i] = <int64_t>_bin(codes[i], a, b, m)
    return out


def ba_wz_iterate(double[::1] px, double[:, ::1] w, double[:, ::1] dbar,
                  cnp.uint8_t[:, ::1] allowed, double s, double[:, ::1] v,
                  int max_iter, double tol):
    """Alternating minimization for min_V I(U;X|Y) + s * d(V, W), updating ``v`` in place.

    Returns the number of sweeps performed. Stops when the largest change of any
    ``v`` entry falls below ``tol``.
    """
    cdef Py_ssize_t nx = v.shape[0], nu = v.shape[1], ny = w.shape[1]
    cdef Py_ssize_t x, u, y, it
    cdef double acc, mx, tot, diff, val
    logq = np.empty((ny, nu))
    pxy = np.empty((nx, ny))
    py = np.zeros(ny)
    newrow = np.empty(nu)
    cdef double[:, ::1] lq = logq
    cdef double[:, ::1] pj = pxy
    cdef double[::1] pyv = py
    cdef double[::1] row = newrow
    for x in range(nx):
        for y in range(ny):
            pj[x, y] = px[x] * w[x, y]
            pyv[y] += pj[x, y]
    it = 0
    with nogil:
        while it < max_iter:
            it += 1
            for y in range(ny):
                for u in range(nu):
                    if pyv[y] <= 0:
                        lq[y, u] = 0.0
                        continue
                    acc = 0.0
                    for x in range(nx):
                        acc = acc + pj[x, y] * v[x, u]
                    acc = acc / pyv[y]
                    lq[y, u] = log(acc) if acc > 0 else -INFINITY
            diff = 0.0
            for x in range(nx):
                mx = -INFINITY
                for u in range(nu):
                    if not allowed[x, u]:
                        row[u] = -INFINITY
                        continue
                    acc = -s * dbar[x, u]
                    for y in range(ny):
                        if w[x, y] > 0:
                            if lq[y, u] == -INFINITY:
                                acc = -INFINITY
                                break
                            acc = acc + w[x, y] * lq[y, u]
                    row[u] = acc
                    if acc > mx:
                        mx = acc
                if mx == -INFINITY:
                    continue
                tot = 0.0
                for u in range(nu):
                    if row[u] == -INFINITY:
                        row[u] = 0.0
                    else:
                        row[u] = exp(row[u] - mx)
                    tot = tot + row[u]
                for u in range(nu):
                    val = row[u] / tot
                    if val - v[x, u] > diff:
                        diff = val - v[x, u]
                    elif v[x, u] - val > diff:
                        diff = v[x, u] - val
                    v[x, u] = val
            if diff < tol:
                break
    return it


def enumerate_support(cnp.int64_t[::1] x, double[:, ::1] v, int nu):
    """All ``u^n`` with positive V^n(u^n|x^n): (codes, probabilities), codes in increasing order."""
    cdef Py_ssize_t n = x.shape[0], t, k, total = 1, i, j
    cdef int u
    cdef int[:] cnt = np.zeros(n, dtype=np.intc)
    supp = np.zeros((n, nu), dtype=np.intc)
    cdef int[:, :] sp = supp
    for t in range(n):
        k = 0
        for u in range(nu):
            if v[x[t], u] > 0:
                sp[t, k] = u
                k += 1
        cnt[t] = k
        total *= k
    codes = np.empty(total, dtype=np.uint64)
    probs = np.empty(total, dtype=np.float64)
    if total == 0:
        return codes, probs
    cdef cnp.uint64_t[::1] c = codes
    cdef double[::1] p = probs
    cdef int[:] idx = np.zeros(n, dtype=np.intc)
    cdef uint64_t code
    cdef double pr
    with nogil:
        for i in range(total):
            code = 0
            pr = 1.0
            for t in range(n):
                u = sp[t, idx[t]]
                code = code * nu + u
                pr = pr * v[x[t], u]
            c[i] = code
            p[i] = pr
            # odometer increment, last coordinate fastest
            j = n - 1
            while j >= 0:
                idx[j] += 1
                if idx[j] < cnt[j]:
                    break
                idx[j] = 0
                j -= 1
    return codes, probs


def decode_scan(cnp.int64_t[::1] y, int nu, int ny,
                uint64_t fa, uint64_t fb, uint64_t fm, int64_t s,
                uint64_t ga, uint64_t gb, uint64_t gm, int64_t ell):
    """Minimum empirical H(u^n|y^n) over the bin {f(u)=s, g(u)=ell}.

    Returns (best_code, best_entropy_bits, candidates); best_code is -1 for an empty bin.
    Entropies within 1e-9 of each other tie; ties resolve to the smallest code,
    i.e. lexicographic order.
    """
    cdef Py_ssize_t n = y.shape[0], t
    cdef uint64_t N = 1, code, rem
    cdef int64_t best = -1, ncand = 0
    cdef double best_h = INFINITY, hval
    cdef int u, yy
    for t in range(n):
        N *= nu
    counts = np.zeros((nu, ny), dtype=np.intc)
    ycount = np.zeros(ny, dtype=np.intc)
    cdef int[:, :] cu = counts
    cdef int[:] cy = ycount
    for t in range(n):
        cy[y[t]] += 1
    klogk_arr = np.zeros(n + 1)
    cdef double[::1] klogk = klogk_arr
    for t in range(2, n + 1):
        klogk[t] = t * log(<double>t)
    with nogil:
        for code in range(N):
            if <int64_t>_bin(code, fa, fb, fm) != s:
                continue
            if <int64_t>_bin(code, ga, gb, gm) != ell:
                continue
            ncand += 1
            for u in range(nu):
                for yy in range(ny):
                    cu[u, yy] = 0
            rem = code
            t = n - 1
            while t >= 0:
                u = <int>(rem % nu)
                rem = rem // nu
                cu[u, y[t]] += 1
                t -= 1
            # n * ln2 * H = sum_y k_y ln k_y - sum_{u,y} k_uy ln k_uy
            hval = 0.0
            for yy in range(ny):
                hval = hval + klogk[cy[yy]]
                for u in range(nu):
                    hval = hval - klogk[cu[u, yy]]
            hval = hval / (n * log(2.0))
            if hval < best_h - 1e-9:
                best_h = hval
                best = <int64_t>code
    return best, best_h, ncand
