"""Bounds on the rate-distortion function for universal Wyner-Ziv coding.

For a source P_X, side distortion e, reproduction distortion d and level E:

* ``rm_lower``  = max over W in W_1(E) of R_WZ(D|W)           (lower bound, maximum class)
* ``rm_upper``  = min over V in V(E,D) of max over W of phi(V, W)  (upper bound, minimax value)
* ``ra_upper``  = min over V in V(E,D) of I(P_X, V)            (upper bound, average class)
* ``ra_lower``  = ``rm_lower`` plus the two special cases where the answer is exact.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from ..errors import AlphabetMismatchError, UnsupportedSizeError
from ..geometry import (
    ChannelClassW1,
    DistortionMeasure,
    FunctionAlphabet,
    expected_cost_per_function,
    extreme_points_W1,
    side_distortion,
    worst_case_distortion,
)
from ..probability import entropy
from . import blahut, conic
from .functional import phi, phi_gradient_w

log = logging.getLogger(__name__)

CUT_TOL = 1e-9
ZERO_RATE = 1e-9
SUPPORT_TOL = 1e-6
MATCHING_SLACK = 10.0
DEFAULT_GRID = tuple(float(s) for s in np.geomspace(0.01, 1000.0, 61))


@dataclass(frozen=True)
class SolverSettings:
    tolerance: float = 1e-6
    max_iterations: int = 200
    lagrange_grid: tuple = DEFAULT_GRID
    multistart_count: int = 16
    rng_seed: int = 0

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1 or self.multistart_count < 1:
            raise ValueError("iteration and multistart counts must be positive")


class RDProblem:
    """Problem data: source, side distortion e (X x Y), reproduction distortion d (X x Xhat), level E."""

    def __init__(self, px, e, d, E: float, fa: FunctionAlphabet | None = None):
        px = np.array(px, dtype=float).ravel()
        if np.any(px < 0) or abs(px.sum() - 1.0) > 1e-9:
            raise ValueError("px must be a probability vector")
        self.px = px / px.sum()
        self.px.setflags(write=False)
        self.e = e if isinstance(e, DistortionMeasure) else DistortionMeasure(e)
        self.d = d if isinstance(d, DistortionMeasure) else DistortionMeasure(d)
        if self.e.shape[0] != px.size or self.d.shape[0] != px.size:
            raise AlphabetMismatchError("e and d need one row per source symbol")
        self.E = float(E)
        if not 0.0 <= self.E <= self.e.max_value + 1e-12:
            raise ValueError(f"E must lie in [0, {self.e.max_value}]")
        self.fa = fa or FunctionAlphabet(self.e.shape[1], self.d.shape[1])
        if self.fa.ny != self.e.shape[1] or self.fa.nxhat != self.d.shape[1]:
            raise AlphabetMismatchError("function alphabet does not match Y and Xhat")
        self.cls = ChannelClassW1(self.px, self.e, self.E)
        self._wz = None

    @property
    def nx(self):
        return self.px.size

    @property
    def ny(self):
        return self.e.shape[1]

    @property
    def nxhat(self):
        return self.d.shape[1]

    def with_E(self, E: float) -> "RDProblem":
        return RDProblem(self.px, self.e, self.d, E, self.fa)

    def wz_program(self) -> conic.WZProgram:
        if self._wz is None:
            self._wz = conic.WZProgram(self.nx, self.ny, self.fa, self.d)
        return self._wz

    def __repr__(self):
        return f"RDProblem(|X|={self.nx}, |Y|={self.ny}, |Xhat|={self.nxhat}, E={self.E})"


@dataclass
class RDBoundReport:
    D: float
    rm_lower: float
    rm_upper: float
    ra_upper: float
    ra_lower_wz: float
    ra_lower_special: float | None
    matching_c1: bool
    matching_c2: bool
    saddle: tuple
    limiting: bool = False

    @property
    def ra_lower(self) -> float:
        if self.ra_lower_special is None:
            return self.ra_lower_wz
        return max(self.ra_lower_wz, self.ra_lower_special)


def _check_channel(w, problem: RDProblem) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.shape != (problem.nx, problem.ny):
        raise AlphabetMismatchError(f"channel shape {w.shape}, expected {(problem.nx, problem.ny)}")
    if np.any(w < -1e-12) or np.any(np.abs(w.sum(axis=1) - 1) > 1e-8):
        raise ValueError("channel rows must be probability vectors")
    return np.clip(w, 0.0, None)


def _check_D(D: float) -> float:
    D = float(D)
    if not D >= 0 or not math.isfinite(D):
        raise ValueError("D must be a finite nonnegative number")
    return D


def _clamp_rate(r: float, problem: RDProblem) -> float:
    """Clip to [0, log|X|]; rates below ``ZERO_RATE`` are solver residue and read as 0."""
    r = float(min(max(r, 0.0), math.log2(problem.nx)))
    return 0.0 if r < ZERO_RATE else r


def _point_mass(problem: RDProblem, k: int) -> np.ndarray:
    v = np.zeros((problem.nx, len(problem.fa)))
    v[:, k] = 1.0
    return v


# ---------------------------------------------------------------- single channel


def _wz_solve(w, D, problem: RDProblem, method: str = "conic"):
    """(rate, V, multiplier) for R_WZ(D|W)."""
    dbar = expected_cost_per_function(w, problem.d, problem.fa)
    col = problem.px @ dbar
    u0 = int(np.argmin(col))
    if D >= col[u0]:
        return 0.0, _point_mass(problem, u0), 0.0
    if method == "conic":
        return problem.wz_program().solve(problem.px, w, D)
    if method == "ba":
        rate, v, s = blahut.constrained_solve(problem.px, w, dbar, D)
        return rate, v, s / math.log(2.0) if math.isfinite(s) else s
    raise ValueError(f"unknown method {method!r}")


def wz_rate(w, D: float, problem: RDProblem, settings: SolverSettings = SolverSettings(), method: str = "conic"):
    """R_WZ(D|W) = min over V(W, D) of phi(V, W). Returns ``(rate, v_opt)``."""
    w = _check_channel(w, problem)
    D = _check_D(D)
    rate, v, _ = _wz_solve(w, D, problem, method)
    return _clamp_rate(rate, problem), v


def robust_witness(problem: RDProblem) -> np.ndarray:
    """A member of V(E, 0): each x maps to the constant function at a zero-distortion reproduction.

    Since every row of d has a zero, V(E, D) is never empty for D >= 0.
    """
    dm = problem.d.matrix
    v = np.zeros((problem.nx, len(problem.fa)))
    for x in range(problem.nx):
        v[x, problem.fa.constant(int(np.argmin(dm[x])))] = 1.0
    return v


def _cutting_plane(problem: RDProblem, D: float, settings: SolverSettings, w=None):
    """min over V(E, D) of phi(V, w) (or I(P_X, V) when ``w`` is None) by adding violated vertex cuts."""
    cuts = []
    if w is not None and problem.cls.contains(w):
        cuts.append(np.asarray(w, dtype=float))
    res = None
    for _ in range(settings.max_iterations):
        res = conic.minimize_rate(
            problem.px,
            problem.fa,
            problem.d,
            D,
            objective_channels=[] if w is None else [w],
            distortion_channels=cuts,
            mutual_information=w is None,
        )
        worst, w_new = worst_case_distortion(res.v, problem.cls, problem.d, problem.fa)
        if worst <= D + CUT_TOL:
            break
        if any(np.allclose(w_new, c, atol=1e-12) for c in cuts):
            log.debug("cutting plane stalled at violation %.3g", worst - D)
            break
        cuts.append(w_new)
    else:
        log.warning("cutting plane hit max_iterations=%d", settings.max_iterations)
    return res.objective, res.v, len(cuts)


def pseudo_wz_rate(w, D: float, problem: RDProblem, settings: SolverSettings = SolverSettings(), method: str = "cuts"):
    """R~_WZ(D|W, E) = min over the robust set V(E, D) of phi(V, W). Returns ``(rate, v_opt)``.

    ``method="cuts"`` adds worst-case channel constraints one at a time;
    ``method="dual"`` uses the exact linear description of V(E, D).
    """
    w = _check_channel(w, problem)
    D = _check_D(D)
    if D >= problem.d.max_value:
        return 0.0, _point_mass(problem, 0)
    if method == "cuts":
        rate, v, _ = _cutting_plane(problem, D, settings, w)
    elif method == "dual":
        res = conic.minimize_rate(problem.px, problem.fa, problem.d, D, objective_channels=[w], robust=problem.cls)
        rate, v = res.objective, res.v
    else:
        raise ValueError(f"unknown method {method!r}")
    return _clamp_rate(rate, problem), v


def ra_upper(D: float, problem: RDProblem, settings: SolverSettings = SolverSettings()):
    """min over V(E, D) of I(P_X, V). Returns ``(rate, v_opt)``."""
    D = _check_D(D)
    if D >= problem.d.max_value:
        return 0.0, _point_mass(problem, 0)
    rate, v, _ = _cutting_plane(problem, D, settings, None)
    return _clamp_rate(rate, problem), v


# ---------------------------------------------------------------- minimax upper bound


@dataclass
class SaddleResult:
    upper: float
    lower: float
    v: np.ndarray
    w: np.ndarray
    iterations: int
    channels: list = field(default_factory=list)


def rm_upper_search(D: float, problem: RDProblem, settings: SolverSettings = SolverSettings()) -> SaddleResult:
    """Column generation for min over V(E,D) of max over W_1(E) of phi(V, W).

    The restricted master takes the max over a finite channel set; the oracle
    returns the channel maximizing phi(V, .) at the master solution. ``upper``
    is certified by the oracle, ``lower`` is the restricted master value, and
    W* is the dual-weighted mixture of the generated channels.
    """
    D = _check_D(D)
    cls = problem.cls
    channels = [cls.zero_channel()]
    best_upper, best_v, best_response = math.inf, None, None
    lower = 0.0
    weights = np.ones(1)
    # the saddle pair needs a much tighter gap than the value itself
    gap_tol = 1e-3 * settings.tolerance
    it = 0
    for it in range(1, settings.max_iterations + 1):
        res = conic.minimize_rate(problem.px, problem.fa, problem.d, D, objective_channels=channels, robust=cls)
        lower = max(res.objective, 0.0)
        if len(channels) > 1:
            mu = np.clip(res.epigraph_duals, 0.0, None)
            weights = mu / mu.sum() if mu.sum() > 0 else np.full(len(channels), 1.0 / len(channels))
        upper, w_new = conic.max_phi_over_class(res.v, problem.px, cls, problem.fa)
        if upper < best_upper:
            best_upper, best_v, best_response = upper, res.v, w_new
        if best_upper - lower <= gap_tol:
            break
        if any(np.allclose(w_new, c, atol=1e-10) for c in channels):
            log.debug("column generation stalled with gap %.3g", best_upper - lower)
            break
        channels.append(w_new)
    w_mix = np.tensordot(weights, np.array(channels[: len(weights)]), axes=1)
    w_mix = w_mix / w_mix.sum(axis=1, keepdims=True)
    # at a saddle W* is also a best response to V*; keep whichever candidate scores higher
    w_star, best_inner = w_mix, -math.inf
    for cand in (best_response, w_mix):
        inner, _ = pseudo_wz_rate(cand, D, problem, settings, method="dual")
        if inner > best_inner + 1e-12:
            w_star, best_inner = cand, inner
    return SaddleResult(
        upper=_clamp_rate(best_upper, problem),
        lower=_clamp_rate(lower, problem),
        v=best_v,
        w=w_star,
        iterations=it,
        channels=channels,
    )


def rm_upper(D: float, problem: RDProblem, settings: SolverSettings = SolverSettings()):
    """Minimax upper bound. Returns ``(rate, (V*, W*))``."""
    r = rm_upper_search(D, problem, settings)
    return r.upper, (r.v, r.w)


def minimax_gap(D: float, problem: RDProblem, settings: SolverSettings = SolverSettings(), saddle=None):
    """(min-max value, max-min value) at the computed saddle pair.

    min-max is max_W phi(V*, W); max-min is R~_WZ(D|W*, E). Their difference bounds
    how far the pair is from a true saddle point.
    """
    if saddle is None:
        _, saddle = rm_upper(D, problem, settings)
    v_star, w_star = saddle
    upper, _ = conic.max_phi_over_class(v_star, problem.px, problem.cls, problem.fa)
    lower, _ = pseudo_wz_rate(w_star, D, problem, settings)
    return _clamp_rate(upper, problem), lower


def check_matching(saddle, D: float, problem: RDProblem, settings: SolverSettings = SolverSettings()):
    """Matching conditions at a saddle pair. Returns ``(c1, c2, v_hat)``.

    v_hat minimizes phi(., W*) over V(W*, D). c1: v_hat meets D for every channel
    in the class. c2: v_hat puts (almost) no mass outside the constant functions,
    which makes its distortion independent of the channel and so implies c1.
    """
    _, w_star = saddle
    w_star = _check_channel(w_star, problem)
    # the alternating minimization converges to a well-defined point of the optimal set,
    # which keeps the distortion check free of interior-point jitter
    _, v_hat = wz_rate(w_star, D, problem, settings, method="ba")
    worst, _ = worst_case_distortion(v_hat, problem.cls, problem.d, problem.fa)
    # matched instances sit exactly on the boundary of V(E, D); W* is only known to roughly
    # the square root of the solver tolerance, so the membership test gets 10x slack
    c1 = bool(worst <= D + MATCHING_SLACK * settings.tolerance)
    outside = [k for k in range(len(problem.fa)) if not problem.fa.is_constant(k)]
    c2 = bool(v_hat[:, outside].sum(axis=1).max(initial=0.0) <= SUPPORT_TOL)
    return c1 or c2, c2, v_hat


# ---------------------------------------------------------------- max-min lower bound


@dataclass
class LowerSearchResult:
    rate: float
    w: np.ndarray
    limiting: bool
    starts: int
    evaluations: int
    certified_by_upper: bool


def _feasible_random_channel(rng, problem: RDProblem) -> np.ndarray:
    cls = problem.cls
    w = rng.dirichlet(np.ones(problem.ny), size=problem.nx)
    cost = side_distortion(problem.px, w, problem.e)
    if cost > problem.E:
        z = cls.zero_channel()
        t = problem.E / cost if cost > 0 else 0.0
        w = z + t * (w - z)
    return w


def _local_ascent(w0, D, problem: RDProblem, settings: SolverSettings, counter: list):
    nx, ny = problem.nx, problem.ny
    px = problem.px
    cache = {}

    def evaluate(flat):
        key = flat.tobytes()
        if key not in cache:
            w = np.clip(flat.reshape(nx, ny), 0.0, None)
            w = w / w.sum(axis=1, keepdims=True)
            rate, v, s = _wz_solve(w, D, problem)
            counter[0] += 1
            g = phi_gradient_w(v, w, px)
            if math.isfinite(s) and s > 0:
                c = np.einsum("xu,xuy->xy", v, problem.fa.distortion_tensor(problem.d))
                g = g + s * px[:, None] * c
            cache.clear()
            cache[key] = (-rate, -g.ravel())
        return cache[key]

    cons = [
        {"type": "eq", "fun": lambda f: f.reshape(nx, ny).sum(axis=1) - 1.0, "jac": lambda f: np.kron(np.eye(nx), np.ones(ny))},
        {
            "type": "ineq",
            "fun": lambda f: problem.E - float(np.sum(px[:, None] * problem.e.matrix * f.reshape(nx, ny))),
            "jac": lambda f: -(px[:, None] * problem.e.matrix).ravel(),
        },
    ]
    out = minimize(
        lambda f: evaluate(f)[0],
        np.asarray(w0, dtype=float).ravel(),
        jac=lambda f: evaluate(f)[1],
        method="SLSQP",
        bounds=[(0.0, 1.0)] * (nx * ny),
        constraints=cons,
        options={"maxiter": 50, "ftol": 1e-10},
    )
    w = np.clip(out.x.reshape(nx, ny), 0.0, None)
    w = w / w.sum(axis=1, keepdims=True)
    if side_distortion(px, w, problem.e) > problem.E:
        z = problem.cls.zero_channel()
        w = z + (problem.E / side_distortion(px, w, problem.e)) * (w - z)
    rate, _, _ = _wz_solve(w, D, problem)
    counter[0] += 1
    return rate, w


def _search_at(D, problem: RDProblem, settings: SolverSettings, hint=None, ceiling=None):
    rng = np.random.default_rng(settings.rng_seed)
    counter = [0]
    cand = []
    if hint is not None:
        cand.append(np.asarray(hint, dtype=float))
    try:
        cand.extend(extreme_points_W1(problem.cls))
    except UnsupportedSizeError:
        cand.append(problem.cls.zero_channel())
    cand.extend(_feasible_random_channel(rng, problem) for _ in range(settings.multistart_count))
    scored = []
    for w in cand:
        rate, _, _ = _wz_solve(w, D, problem)
        counter[0] += 1
        scored.append((rate, w))
        if ceiling is not None and rate >= ceiling - settings.tolerance:
            return rate, w, counter[0], len(scored), True
    scored.sort(key=lambda t: -t[0])
    best_rate, best_w = scored[0]
    starts = 0
    for _, w0 in scored[: settings.multistart_count]:
        starts += 1
        rate, w = _local_ascent(w0, D, problem, settings, counter)
        if rate > best_rate:
            best_rate, best_w = rate, w
        if ceiling is not None and best_rate >= ceiling - settings.tolerance:
            return best_rate, best_w, counter[0], starts, True
    return best_rate, best_w, counter[0], starts, False


LIMIT_EPS = 1e-5


def rm_lower_search(D: float, problem: RDProblem, settings: SolverSettings = SolverSettings(), hint=None, ceiling=None) -> LowerSearchResult:
    """max over W_1(E) of R_WZ(D|W) by screening vertices and random channels, then SLSQP ascent.

    ``hint`` seeds the search (typically W* from the minimax solve). If ``ceiling``
    (an upper bound such as ``rm_upper``) is reached within tolerance the search
    stops, since no channel can exceed it. At D = 0 only the limit as D -> 0 is a
    valid bound; it is extrapolated linearly from two small D and flagged.
    """
    D = _check_D(D)
    if D > 0:
        rate, w, evals, starts, cert = _search_at(D, problem, settings, hint, ceiling)
        return LowerSearchResult(_clamp_rate(rate, problem), w, False, starts, evals, cert)
    r1, w1, e1, s1, c1 = _search_at(LIMIT_EPS, problem, settings, hint, ceiling)
    r2, _, _, _, _ = _search_at(2 * LIMIT_EPS, problem, settings, w1, None)
    rate = max(2.0 * r1 - r2, r1)
    if ceiling is not None:
        rate = min(rate, ceiling)
    return LowerSearchResult(_clamp_rate(rate, problem), w1, True, s1, e1, c1)


def rm_lower(D: float, problem: RDProblem, settings: SolverSettings = SolverSettings()):
    """Max-min lower bound. Returns ``(rate, w_star)``."""
    r = rm_lower_search(D, problem, settings)
    return r.rate, r.w


# ---------------------------------------------------------------- classic and special cases


def rd_classic(D: float, px, d, settings: SolverSettings = SolverSettings()) -> float:
    """Ordinary R(D) via Blahut-Arimoto: slope sweep, lower convex envelope, then bisection."""
    D = _check_D(D)
    px = np.asarray(px, dtype=float)
    dm = np.asarray(d, dtype=float)
    trivial = np.ones((px.size, 1))
    if D >= float(np.min(px @ dm)):
        return 0.0
    hull = blahut.lower_convex_envelope((p[0], p[1]) for p in blahut.lagrange_sweep(px, trivial, dm, settings.lagrange_grid))
    rate, _, _ = blahut.constrained_solve(px, trivial, dm, D, tol=min(settings.tolerance, 1e-9))
    # the sweep can only improve on the refined point through the envelope
    if hull[0][0] <= D:
        rate = min(rate, blahut.envelope_value(hull, D))
    return float(max(rate, 0.0))


def e_star(px, e):
    """(E_*, y_*): the best constant side-information output; lowest index on ties."""
    px = np.asarray(px, dtype=float)
    em = np.asarray(e, dtype=float)
    col = px @ em
    best = float(col.min())
    y = int(np.flatnonzero(col <= best + 1e-12)[0])
    return float(col[y]), y


def ra_lower(D: float, problem: RDProblem, settings: SolverSettings = SolverSettings(), wz_bound: float | None = None):
    """Returns ``(wz_bound, special)``; the bound itself is the max of the two."""
    D = _check_D(D)
    if wz_bound is None:
        wz_bound, _ = rm_lower(D, problem, settings)
    special = None
    if D == 0 and problem.E > 0 and problem.d.is_hamming_like:
        special = entropy(problem.px)
    Es, _ = e_star(problem.px, problem.e)
    if problem.E >= Es - 1e-12:
        rd = rd_classic(D, problem.px, problem.d, settings)
        special = rd if special is None else max(special, rd)
    return wz_bound, special


def hb_tilde(D: float, w1, w2, problem: RDProblem, settings: SolverSettings = SolverSettings()) -> float:
    """Two-decoder upper bound: min over V(W1, D) and V(W2, D) of max(phi(V, W1), phi(V, W2))."""
    D = _check_D(D)
    w1 = _check_channel(w1, problem)
    w2 = _check_channel(w2, problem)
    if D >= problem.d.max_value:
        return 0.0
    res = conic.minimize_rate(problem.px, problem.fa, problem.d, D, objective_channels=[w1, w2], distortion_channels=[w1, w2])
    return _clamp_rate(max(phi(res.v, w1, problem.px), phi(res.v, w2, problem.px)), problem)


def bound_report(D: float, problem: RDProblem, settings: SolverSettings = SolverSettings()) -> RDBoundReport:
    """Every bound at one distortion level, with the matching checks at the computed saddle."""
    sad = rm_upper_search(D, problem, settings)
    low = rm_lower_search(D, problem, settings, hint=sad.w, ceiling=sad.upper)
    ra_up, _ = ra_upper(D, problem, settings)
    wzb, special = ra_lower(D, problem, settings, wz_bound=low.rate)
    c1, c2, _ = check_matching((sad.v, sad.w), D, problem, settings)
    return RDBoundReport(
        D=float(D),
        rm_lower=low.rate,
        rm_upper=sad.upper,
        ra_upper=ra_up,
        ra_lower_wz=wzb,
        ra_lower_special=special,
        matching_c1=c1,
        matching_c2=c2,
        saddle=(sad.v, sad.w),
        limiting=low.limiting,
    )


__all__ = [
    "RDBoundReport",
    "RDProblem",
    "SaddleResult",
    "SolverSettings",
    "bound_report",
    "check_matching",
    "e_star",
    "hb_tilde",
    "minimax_gap",
    "phi",
    "pseudo_wz_rate",
    "ra_lower",
    "ra_upper",
    "rd_classic",
    "rm_lower",
    "rm_lower_search",
    "rm_upper",
    "rm_upper_search",
    "robust_witness",
    "wz_rate",
]
