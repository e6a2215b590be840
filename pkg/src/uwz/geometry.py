"""Function alphabet, distortion functionals and the channel polytope W_1(E).

The test channel V is a row-stochastic ``|X| x |U|`` array over the function
alphabet U = {u : Y -> Xhat}. Distortion of a (V, W) pair is

    d(V, W) = sum_{x,u,y} P(x) V(u|x) W(y|x) d(x, u(y)).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import AlphabetMismatchError, UnsupportedSizeError

MAX_FUNCTIONS = 4096
MEMBERSHIP_TOL = 1e-9


@dataclass(frozen=True)
class DistortionMeasure:
    """Bounded nonnegative matrix with a zero in every row."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2:
            raise ValueError("distortion measure must be a matrix")
        if not np.all(np.isfinite(m)) or np.any(m < 0):
            raise ValueError("distortion entries must be finite and nonnegative")
        if not np.all((m == 0).any(axis=1)):
            raise ValueError("every row of a distortion measure needs a zero entry")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)

    @property
    def shape(self):
        return self.matrix.shape

    @property
    def max_value(self) -> float:
        return float(self.matrix.max())

    @property
    def is_hamming_like(self) -> bool:
        """Square with zero exactly on the diagonal."""
        m = self.matrix
        return m.shape[0] == m.shape[1] and np.array_equal(m == 0, np.eye(m.shape[0], dtype=bool))

    @classmethod
    def hamming(cls, size: int) -> "DistortionMeasure":
        return cls(1.0 - np.eye(size))


class FunctionAlphabet:
    """All maps ``Y -> Xhat``; function ``k`` sends ``y`` to ``table[k, y]``.

    Functions are ordered lexicographically in ``(u(0), u(1), ...)``.
    """

    def __init__(self, ny: int, nxhat: int):
        if ny < 1 or nxhat < 1:
            raise ValueError("alphabet sizes must be positive")
        if nxhat**ny > MAX_FUNCTIONS:
            raise UnsupportedSizeError(f"|Xhat|^|Y| = {nxhat**ny} exceeds {MAX_FUNCTIONS}")
        self.ny = ny
        self.nxhat = nxhat
        self.table = np.array(list(itertools.product(range(nxhat), repeat=ny)), dtype=np.int64)
        self.table.setflags(write=False)
        self.constant_subset = tuple(
            k for k in range(len(self.table)) if np.all(self.table[k] == self.table[k, 0])
        )

    def __len__(self):
        return len(self.table)

    def __repr__(self):
        return f"FunctionAlphabet(ny={self.ny}, nxhat={self.nxhat})"

    def index(self, mapping) -> int:
        """Index of the function with ``u(y) = mapping[y]``."""
        k = 0
        for v in mapping:
            k = k * self.nxhat + int(v)
        return k

    def constant(self, xhat: int) -> int:
        return self.index([xhat] * self.ny)

    def identity(self) -> int:
        if self.ny != self.nxhat:
            raise AlphabetMismatchError("identity needs |Y| == |Xhat|")
        return self.index(range(self.ny))

    def is_constant(self, k: int) -> bool:
        return k in self.constant_subset

    def distortion_tensor(self, d) -> np.ndarray:
        """``T[x, u, y] = d(x, u(y))``."""
        d = np.asarray(d, dtype=float)
        if d.shape[1] != self.nxhat:
            raise AlphabetMismatchError(f"d has {d.shape[1]} reproduction symbols, functions map to {self.nxhat}")
        return d[:, self.table]

    def apply(self, u_seq, y_seq) -> np.ndarray:
        """Reproduction ``xhat_t = u_t(y_t)``."""
        return self.table[np.asarray(u_seq), np.asarray(y_seq)]


@dataclass(frozen=True)
class ChannelClassW1:
    """Single-letter channels with expected side distortion e(P_X, W) <= E."""

    px: np.ndarray
    e: DistortionMeasure
    E: float

    def __post_init__(self):
        px = np.array(self.px, dtype=float)
        if not isinstance(self.e, DistortionMeasure):
            object.__setattr__(self, "e", DistortionMeasure(self.e))
        if px.size != self.e.shape[0]:
            raise AlphabetMismatchError("source and side-distortion alphabets differ")
        if self.E < 0:
            raise ValueError("E must be nonnegative")
        px.setflags(write=False)
        object.__setattr__(self, "px", px)
        object.__setattr__(self, "E", float(self.E))

    @property
    def nx(self) -> int:
        return self.e.shape[0]

    @property
    def ny(self) -> int:
        return self.e.shape[1]

    def zero_channel(self) -> np.ndarray:
        """Member channel mapping each x to its first zero-distortion output."""
        w = np.zeros(self.e.shape)
        w[np.arange(self.nx), np.argmax(self.e.matrix == 0, axis=1)] = 1.0
        return w

    def contains(self, w, tol: float = MEMBERSHIP_TOL) -> bool:
        w = np.asarray(w, dtype=float)
        if w.shape != self.e.shape or np.any(w < -tol) or np.any(np.abs(w.sum(axis=1) - 1) > tol):
            return False
        return side_distortion(self.px, w, self.e) <= self.E + tol


def side_distortion(px, w, e) -> float:
    """e(P_X, W) = sum_{x,y} P(x) W(y|x) e(x, y)."""
    px = np.asarray(px, dtype=float)
    w = np.asarray(w, dtype=float)
    e = np.asarray(e, dtype=float)
    if w.shape != e.shape or px.size != w.shape[0]:
        raise AlphabetMismatchError(f"shapes px {px.shape}, W {w.shape}, e {e.shape} disagree")
    return float(np.sum(px[:, None] * w * e))


def cost_matrix(v, d, fa: FunctionAlphabet) -> np.ndarray:
    """``c[x, y] = sum_u V(u|x) d(x, u(y))``, the per-letter distortion seen under output ``y``."""
    v = np.asarray(v, dtype=float)
    if v.shape[1] != len(fa):
        raise AlphabetMismatchError(f"test channel has {v.shape[1]} columns, alphabet has {len(fa)} functions")
    return np.einsum("xu,xuy->xy", v, fa.distortion_tensor(d))


def reproduction_distortion(v, w, px, d, fa: FunctionAlphabet) -> float:
    """d(V, W); bilinear in (V, W)."""
    c = cost_matrix(v, d, fa)
    w = np.asarray(w, dtype=float)
    px = np.asarray(px, dtype=float)
    if w.shape != c.shape or px.size != c.shape[0]:
        raise AlphabetMismatchError(f"channel shape {w.shape} vs expected {c.shape}")
    return float(np.sum(px[:, None] * w * c))


def expected_cost_per_function(w, d, fa: FunctionAlphabet) -> np.ndarray:
    """``dbar[x, u] = sum_y W(y|x) d(x, u(y))`` so that d(V, W) = sum_x P(x) <V(.|x), dbar[x]>."""
    return np.einsum("xy,xuy->xu", np.asarray(w, dtype=float), fa.distortion_tensor(d))


def _upper_hull_path(costs: np.ndarray, gains: np.ndarray):
    """Indices along the nondecreasing upper concave hull starting from the best zero-cost point."""
    zero = np.flatnonzero(costs == 0)
    start = zero[np.argmax(gains[zero])]
    path = [int(start)]
    while True:
        cur = path[-1]
        cand = np.flatnonzero((costs > costs[cur]) & (gains > gains[cur]))
        if cand.size == 0:
            return path
        slopes = (gains[cand] - gains[cur]) / (costs[cand] - costs[cur])
        best = slopes.max()
        # among equal-slope points jump to the farthest; the intermediate ones are not vertices
        ties = cand[np.abs(slopes - best) <= 1e-15 * max(1.0, abs(best))]
        path.append(int(ties[np.argmax(costs[ties])]))


def maximize_over_class(gain, cls: ChannelClassW1):
    """Exact LP: max_W sum_x P(x) sum_y W(y|x) gain[x, y] over W in W_1(E).

    Per-row upper concave hulls plus a greedy fill by slope (LP relaxation of a
    multiple-choice knapsack). The optimizer has at most one fractional row.
    """
    gain = np.asarray(gain, dtype=float)
    e = cls.e.matrix
    px = cls.px
    w = np.zeros_like(gain)
    segments = []
    value = 0.0
    state = {}
    for x in range(cls.nx):
        if px[x] <= 0:
            w[x, int(np.argmax(gain[x]))] = 1.0
            continue
        path = _upper_hull_path(e[x], gain[x])
        state[x] = path[0]
        value += px[x] * gain[x, path[0]]
        for a, b in zip(path[:-1], path[1:]):
            dc = e[x, b] - e[x, a]
            dg = gain[x, b] - gain[x, a]
            segments.append((-dg / dc, x, a, b, dc, dg))
    segments.sort(key=lambda s: (s[0], s[1], s[4]))
    budget = cls.E
    frac = None
    for _, x, a, b, dc, dg in segments:
        if budget <= 0:
            break
        if state[x] != a:  # an earlier segment of this row was only partially taken
            continue
        need = px[x] * dc
        if need <= budget:
            budget -= need
            value += px[x] * dg
            state[x] = b
        else:
            theta = budget / need
            value += theta * px[x] * dg
            frac = (x, a, b, theta)
            budget = 0.0
    for x, y in state.items():
        w[x, y] = 1.0
    if frac is not None:
        x, a, b, theta = frac
        w[x] = 0.0
        w[x, a] = 1.0 - theta
        w[x, b] = theta
    return float(value), w


def worst_case_distortion(v, cls: ChannelClassW1, d, fa: FunctionAlphabet):
    """max_{W in W_1(E)} d(V, W) and a maximizing channel."""
    return maximize_over_class(cost_matrix(v, d, fa), cls)


def is_member_VED(v, cls: ChannelClassW1, d, fa: FunctionAlphabet, D: float, tol: float = MEMBERSHIP_TOL) -> bool:
    """Whether V meets distortion ``D`` for every channel in the class."""
    if D < 0:
        raise ValueError("D must be nonnegative")
    value, _ = worst_case_distortion(v, cls, d, fa)
    return value <= D + tol


MAX_VERTEX_DIM = 20
MAX_DETERMINISTIC = 200_000


def extreme_points_W1(cls: ChannelClassW1) -> list[np.ndarray]:
    """Every vertex of {row-stochastic W : e(P_X, W) <= E}.

    Vertices are the feasible deterministic channels plus channels where the
    distortion constraint is tight and exactly one row mixes two outputs of
    different side distortion.
    """
    nx, ny = cls.nx, cls.ny
    if nx * ny > MAX_VERTEX_DIM or ny**nx > MAX_DETERMINISTIC:
        raise UnsupportedSizeError(f"|X||Y| = {nx * ny} too large for vertex enumeration")
    e = cls.e.matrix
    px = cls.px
    tol = 1e-12
    out = []
    seen = set()

    def add(w):
        key = tuple(np.round(w, 12).ravel())
        if key not in seen:
            seen.add(key)
            out.append(w)

    for assign in itertools.product(range(ny), repeat=nx):
        cost = sum(px[x] * e[x, assign[x]] for x in range(nx))
        if cost <= cls.E + tol:
            w = np.zeros((nx, ny))
            w[np.arange(nx), assign] = 1.0
            add(w)
    for x in range(nx):
        if px[x] <= 0:
            continue
        others = [r for r in range(nx) if r != x]
        for rest in itertools.product(range(ny), repeat=nx - 1):
            base = sum(px[r] * e[r, y] for r, y in zip(others, rest))
            for y1, y2 in itertools.combinations(range(ny), 2):
                c1, c2 = e[x, y1], e[x, y2]
                if c1 == c2:
                    continue
                # theta on y2: base + P(x)((1-theta) c1 + theta c2) = E
                theta = ((cls.E - base) / px[x] - c1) / (c2 - c1)
                if tol < theta < 1 - tol:
                    w = np.zeros((nx, ny))
                    for r, y in zip(others, rest):
                        w[r, y] = 1.0
                    w[x, y1] = 1.0 - theta
                    w[x, y2] = theta
                    add(w)
    return out
