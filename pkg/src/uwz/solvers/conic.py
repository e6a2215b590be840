"""Exponential-cone formulations of the rate functionals, solved with Clarabel.

phi(V, W) = I(U;X|Y) is written as

    sum_{x,y} P(x) W(y|x) KL( V(.|x) || Q(.|y) ),   Q(u|y) = sum_x P(x|y) V(u|x),

i.e. a sum of ``rel_entr(a_xy V[x, :], b_xy @ V)`` terms with both arguments
linear in V, which is DCP (and DPP when the weights are parameters).
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import cvxpy as cp
import numpy as np

from ..errors import InfeasibleError, SolverError
from ..geometry import ChannelClassW1, FunctionAlphabet, expected_cost_per_function

LN2 = float(np.log(2.0))

_TIGHT = dict(tol_gap_abs=1e-10, tol_gap_rel=1e-10, tol_feas=1e-10, max_iter=400)


def _solve(problem: cp.Problem):
    attempts = [dict(solver=cp.CLARABEL, **_TIGHT), dict(solver=cp.CLARABEL), dict(solver=cp.SCS, eps=1e-9, max_iters=200_000)]
    last = None
    for kw in attempts:
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                problem.solve(**kw)
        except cp.error.SolverError as exc:
            last = exc
            continue
        if problem.status in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE):
            return problem.status
        if problem.status in (cp.INFEASIBLE, cp.INFEASIBLE_INACCURATE):
            raise InfeasibleError("constraint set is empty")
        last = problem.status
    raise SolverError(f"conic solve failed: {last}")


def _kl_weights(px, w):
    """Selector/mixing matrices so that phi = sum rel_entr(S @ V, B @ V) / ln 2."""
    px = np.asarray(px, dtype=float)
    w = np.asarray(w, dtype=float)
    nx, ny = w.shape
    pxy = px[:, None] * w
    py = pxy.sum(axis=0)
    S = np.zeros((nx * ny, nx))
    B = np.zeros((nx * ny, nx))
    for x in range(nx):
        for y in range(ny):
            if pxy[x, y] > 0:
                S[x * ny + y, x] = pxy[x, y]
                B[x * ny + y, :] = pxy[x, y] * pxy[:, y] / py[y]
    return S, B


def phi_expr(V: cp.Expression, px, w) -> cp.Expression:
    S, B = _kl_weights(px, w)
    keep = S.sum(axis=1) > 0
    S, B = S[keep], B[keep]
    return cp.sum(cp.rel_entr(S @ V, B @ V)) / LN2


def mutual_information_expr(V: cp.Expression, px) -> cp.Expression:
    """I(P_X, V) = phi(V, W) for any channel W whose output ignores the input."""
    px = np.asarray(px, dtype=float)
    return phi_expr(V, px, np.ones((px.size, 1)))


def distortion_expr(V: cp.Expression, px, w, d, fa: FunctionAlphabet) -> cp.Expression:
    px = np.asarray(px, dtype=float)
    dbar = expected_cost_per_function(w, d, fa)
    return cp.sum(cp.multiply(px[:, None] * dbar, V))


def robust_constraints(V: cp.Expression, cls: ChannelClassW1, d, fa: FunctionAlphabet, D) -> list:
    """Exact linear description of V(E, D) via LP duality of the worst-case channel problem.

    max_W d(V, W) = min_{t >= 0} t E + sum_x P(x) max_y (c_V(x, y) - t e(x, y)).
    """
    T = fa.distortion_tensor(d)  # [x, u, y]
    t = cp.Variable(nonneg=True)
    z = cp.Variable(cls.nx)
    cons = []
    for x in range(cls.nx):
        if cls.px[x] <= 0:
            continue
        cost_xy = V[x, :] @ T[x]  # length |Y|
        cons.append(z[x] >= cost_xy - t * cls.e.matrix[x])
    active = cls.px > 0
    cons.append(t * cls.E + cls.px[active] @ z[np.flatnonzero(active)] <= D)
    return cons


def _clean(v: np.ndarray) -> np.ndarray:
    v = np.clip(np.asarray(v, dtype=float), 0.0, None)
    return v / v.sum(axis=1, keepdims=True)


@dataclass
class ProgramResult:
    v: np.ndarray
    objective: float
    epigraph_duals: np.ndarray = field(default_factory=lambda: np.zeros(0))
    distortion_duals: np.ndarray = field(default_factory=lambda: np.zeros(0))


def minimize_rate(
    px,
    fa: FunctionAlphabet,
    d,
    D: float,
    objective_channels=(),
    distortion_channels=(),
    robust: ChannelClassW1 | None = None,
    mutual_information: bool = False,
    symmetric_rows: list | None = None,
) -> ProgramResult:
    """min over V of max_j phi(V, W_j) (or I(P_X, V)) subject to d(V, Wbar_k) <= D and optionally V in V(E, D).

    ``symmetric_rows`` is an optional list of ``(x1, u1, x2, u2)`` equalities V(u1|x1) = V(u2|x2).
    """
    px = np.asarray(px, dtype=float)
    nx = px.size
    V = cp.Variable((nx, len(fa)), nonneg=True)
    cons = [cp.sum(V, axis=1) == 1]
    epi = []
    if mutual_information:
        obj = mutual_information_expr(V, px)
    else:
        objective_channels = list(objective_channels)
        if len(objective_channels) == 1:
            obj = phi_expr(V, px, objective_channels[0])
        else:
            tvar = cp.Variable()
            epi = [phi_expr(V, px, w) <= tvar for w in objective_channels]
            cons += epi
            obj = tvar
    dist = [distortion_expr(V, px, w, d, fa) <= D for w in distortion_channels]
    cons += dist
    if robust is not None:
        cons += robust_constraints(V, robust, d, fa, D)
    if symmetric_rows:
        cons += [V[x1, u1] == V[x2, u2] for x1, u1, x2, u2 in symmetric_rows]
    prob = cp.Problem(cp.Minimize(obj), cons)
    _solve(prob)
    return ProgramResult(
        v=_clean(V.value),
        objective=float(prob.value),
        epigraph_duals=np.array([float(np.ravel(c.dual_value)[0]) for c in epi]) if epi else np.zeros(0),
        distortion_duals=np.array([float(np.ravel(c.dual_value)[0]) for c in dist]) if dist else np.zeros(0),
    )


class WZProgram:
    """Parametrized min_V phi(V, W) s.t. d(V, W) <= D, compiled once per alphabet shape."""

    def __init__(self, nx: int, ny: int, fa: FunctionAlphabet, d):
        self.nx, self.ny, self.fa = nx, ny, fa
        self.d = np.asarray(d, dtype=float)
        self.V = cp.Variable((nx, len(fa)), nonneg=True)
        self.S = cp.Parameter((nx * ny, nx), nonneg=True)
        self.B = cp.Parameter((nx * ny, nx), nonneg=True)
        self.C = cp.Parameter((nx, len(fa)))
        self.D = cp.Parameter()
        self.dist = cp.sum(cp.multiply(self.C, self.V)) <= self.D
        obj = cp.sum(cp.rel_entr(self.S @ self.V, self.B @ self.V)) / LN2
        self.problem = cp.Problem(cp.Minimize(obj), [cp.sum(self.V, axis=1) == 1, self.dist])

    def solve(self, px, w, D: float):
        """Returns (rate, V, multiplier) where the multiplier is the slope -dR/dD."""
        px = np.asarray(px, dtype=float)
        S, B = _kl_weights(px, w)
        self.S.value, self.B.value = S, B
        self.C.value = px[:, None] * expected_cost_per_function(w, self.d, self.fa)
        self.D.value = float(D)
        _solve(self.problem)
        mult = float(np.ravel(self.dist.dual_value)[0]) if self.dist.dual_value is not None else 0.0
        return float(self.problem.value), _clean(self.V.value), mult


def max_phi_over_class(v, px, cls: ChannelClassW1, fa: FunctionAlphabet):
    """max_{W in W_1(E)} phi(V, W) = I(U;X) - min_W I(U;Y); concave in W, solved exactly."""
    from ..probability import mutual_information

    v = np.asarray(v, dtype=float)
    px = np.asarray(px, dtype=float)
    W = cp.Variable((cls.nx, cls.ny), nonneg=True)
    pu = px @ v
    A = v.T * px[None, :]  # [u, x]
    keep = pu > 0
    puy = A[keep] @ W  # [u, y]
    py = px @ W
    iuy = cp.sum(cp.rel_entr(puy, cp.reshape(pu[keep], (int(keep.sum()), 1), order="C") @ cp.reshape(py, (1, cls.ny), order="C"))) / LN2
    cons = [cp.sum(W, axis=1) == 1, cp.sum(cp.multiply(px[:, None] * cls.e.matrix, W)) <= cls.E]
    prob = cp.Problem(cp.Minimize(iuy), cons)
    _solve(prob)
    w = np.clip(W.value, 0.0, None)
    w /= w.sum(axis=1, keepdims=True)
    return mutual_information(px, v) - float(prob.value), w


def robust_distortion_floor(cls: ChannelClassW1, d, fa: FunctionAlphabet) -> float:
    """min_V max_{W in W_1(E)} d(V, W): the smallest D for which V(E, D) is nonempty."""
    V = cp.Variable((cls.nx, len(fa)), nonneg=True)
    Dv = cp.Variable()
    cons = [cp.sum(V, axis=1) == 1] + robust_constraints(V, cls, d, fa, Dv)
    prob = cp.Problem(cp.Minimize(Dv), cons)
    _solve(prob)
    return max(float(prob.value), 0.0)
