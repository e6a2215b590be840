"""Doubly symmetric binary example: uniform source, Hamming distortions, BSC side channels.

Here the maximum-class rate has the parametric form

    min over (lam, q) of lam [h(E * q) - h(q)]   s.t.  lam q + (1 - lam) E <= D,

with E * q = E(1 - q) + q(1 - E), achieved by time sharing between the
identity decoder and a quantizer seen through a BSC(q).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .geometry import DistortionMeasure, FunctionAlphabet
from .probability import binary_entropy
from .solvers.bounds import RDProblem


def _check_unit(p: float, name: str) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {p}")
    return p


def bsc(p: float) -> np.ndarray:
    p = _check_unit(p, "crossover")
    return np.array([[1.0 - p, p], [p, 1.0 - p]])


def star(a: float, b: float) -> float:
    """Binary convolution a(1-b) + b(1-a)."""
    if a == 0.0:
        return b
    if b == 0.0:
        return a
    return a * (1.0 - b) + b * (1.0 - a)


@dataclass(frozen=True)
class BinaryChannelParam:
    """W(1|0) = alpha, W(0|1) = beta."""

    alpha: float
    beta: float

    def __post_init__(self):
        _check_unit(self.alpha, "alpha")
        _check_unit(self.beta, "beta")

    @property
    def channel(self) -> np.ndarray:
        return np.array([[1.0 - self.alpha, self.alpha], [self.beta, 1.0 - self.beta]])

    def in_class(self, E: float) -> bool:
        return (self.alpha + self.beta) / 2.0 <= E + 1e-12


@dataclass(frozen=True)
class WZParametric:
    lam: float
    q: float

    def __post_init__(self):
        _check_unit(self.lam, "lambda")
        if not 0.0 <= self.q <= 0.5:
            raise ValueError("q must lie in [0, 1/2]")

    def rate(self, E: float) -> float:
        return self.lam * (binary_entropy(star(E, self.q)) - binary_entropy(self.q))

    def distortion(self, E: float) -> float:
        return self.lam * self.q + (1.0 - self.lam) * E

    def test_channel(self, fa: FunctionAlphabet | None = None) -> np.ndarray:
        """V over the four maps {0,1} -> {0,1}: identity with prob 1-lam, constant BSC(q)(x) with prob lam."""
        fa = fa or FunctionAlphabet(2, 2)
        v = np.zeros((2, len(fa)))
        for x in range(2):
            v[x, fa.identity()] += 1.0 - self.lam
            v[x, fa.constant(x)] += self.lam * (1.0 - self.q)
            v[x, fa.constant(1 - x)] += self.lam * self.q
        return v


def _check_E(E: float) -> float:
    E = float(E)
    if not 0.0 < E <= 0.5:
        raise ValueError("E must lie in (0, 1/2]")
    return E


def wz_binary_optimizer(E: float, D: float, step: float = 1e-3) -> WZParametric:
    """Optimal (lam, q) for the parametric program; lam is eliminated by making the constraint tight."""
    E = _check_E(E)
    D = _check_unit(D, "D")
    if D >= E:
        return WZParametric(0.0, 0.0)
    if D == 0.0:
        return WZParametric(1.0, 0.0)

    def f(q):
        # lam = (E - D) / (E - q) makes lam q + (1 - lam) E = D
        return (E - D) / (E - q) * (binary_entropy(star(E, q)) - binary_entropy(q))

    qs = np.linspace(0.0, D, max(int(math.ceil(D / step)), 2) + 1)
    vals = np.array([f(q) for q in qs])
    i = int(np.argmin(vals))
    lo, hi = qs[max(i - 1, 0)], qs[min(i + 1, qs.size - 1)]
    q_best, best = float(qs[i]), float(vals[i])
    if hi > lo:
        r = minimize_scalar(f, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
        if r.fun < best:
            q_best = float(r.x)
    return WZParametric((E - D) / (E - q_best), q_best)


def wz_binary_oracle(E: float, D: float, step: float = 1e-3) -> float:
    """min over (lam, q) of lam [h(E * q) - h(q)] subject to lam q + (1 - lam) E <= D."""
    E = _check_E(E)
    D = _check_unit(D, "D")
    if D >= E:
        return 0.0
    if D == 0.0:
        return binary_entropy(E)
    return wz_binary_optimizer(E, D, step).rate(E)


def ra_upper_binary_oracle(E: float, D: float, step: float = 1e-3) -> float:
    """Lower convex envelope of {(D', 1 - h(D'))} and (E, 0), evaluated at D."""
    E = _check_E(E)
    D = float(D)
    if D < 0:
        raise ValueError("D must be nonnegative")
    if D >= E:
        return 0.0
    if D == 0.0:
        return 1.0

    def f(dp):
        # chord from (dp, 1 - h(dp)) to (E, 0), read off at D
        return (E - D) / (E - dp) * (1.0 - binary_entropy(dp))

    grid = np.linspace(0.0, D, max(int(math.ceil(D / step)), 2) + 1)
    vals = np.array([f(x) for x in grid])
    i = int(np.argmin(vals))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    best = float(vals[i])
    if hi > lo:
        r = minimize_scalar(f, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
        best = min(best, float(r.fun))
    return best


def fig4_channels(E: float):
    """The two extreme asymmetric members of the class: (alpha, beta) = (2E, 0) and (0, 2E)."""
    E = float(E)
    if not 0.0 <= E <= 0.5:
        raise ValueError("E must lie in [0, 1/2]")
    return BinaryChannelParam(2 * E, 0.0).channel, BinaryChannelParam(0.0, 2 * E).channel


def binary_problem(E: float) -> RDProblem:
    """Uniform binary source, Hamming e and d, level E."""
    h = DistortionMeasure.hamming(2)
    return RDProblem(np.array([0.5, 0.5]), h, h, E)
