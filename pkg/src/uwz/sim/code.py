"""Two-layer random binning code with a shared-randomness quantizer and a universal decoder.

The encoder draws U^n from V^n(.|x^n) conditioned on the shared bin label
f(U^n) = s, and sends g(U^n). The decoder searches the bin {f = s, g = l} for
the sequence with the smallest empirical conditional entropy given y^n and
outputs xhat_t = u_t(y_t). It never looks at the channel.

Sequences over the active function alphabet are encoded as integers with the
first symbol most significant, so integer order is lexicographic order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .. import _kernels
from ..geometry import FunctionAlphabet
from ..probability import entropy
from ..solvers import conic
from ..solvers.bounds import RDProblem
from ..solvers.functional import joint_uxy, phi
from .hashing import BinCode

MAX_CODES = 4**12
MAX_RESAMPLES = 32
ZERO_MASS = 1e-9


def clean_test_channel(v) -> np.ndarray:
    """Drop entries below ``ZERO_MASS`` (solver residue) and renormalize rows."""
    v = np.array(v, dtype=float)
    v[v < ZERO_MASS] = 0.0
    return v / v.sum(axis=1, keepdims=True)


def conditional_entropy_ux(v, px) -> float:
    """H(U|X) = sum_x P(x) H(V(.|x))."""
    return float(sum(p * entropy(row) for p, row in zip(np.asarray(px), np.asarray(v))))


def derive_rates(v, problem: RDProblem, delta: float):
    """R_f = H(U|X) - delta and R_g = max_W phi(V, W) + 2 delta.

    The sum identity R_f + R_g = max_W H(U|Y) + delta is checked at the maximizing channel.
    When H(U|X) < delta the shared-randomness layer has a single bin and R_f is 0.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    v = np.asarray(v, dtype=float)
    px = problem.px
    h_ux = conditional_entropy_ux(v, px)
    _, w_max = conic.max_phi_over_class(v, px, problem.cls, problem.fa)
    phi_max = phi(v, w_max, px)
    r_f = max(h_ux - delta, 0.0)
    r_g = phi_max + 2 * delta
    if h_ux >= delta:
        t = joint_uxy(v, w_max, px)
        puy = t.sum(axis=1)
        h_uy = entropy(puy) - entropy(puy.sum(axis=0))
        if abs(r_f + r_g - (h_uy + delta)) > 1e-10:
            raise ArithmeticError("rate split does not add up to max H(U|Y) + delta")
    return r_f, r_g


@dataclass(frozen=True)
class CodeConfig:
    """Blocklength, test channel and slack; rates and bin counts are derived."""

    problem: RDProblem
    v: np.ndarray
    n: int
    delta: float
    rate_f: float = field(init=False)
    rate_g: float = field(init=False)
    support: np.ndarray = field(init=False)

    def __post_init__(self):
        v = clean_test_channel(self.v)
        if v.shape != (self.problem.nx, len(self.problem.fa)):
            raise ValueError(f"test channel shape {v.shape} does not match the problem")
        support = np.flatnonzero((self.problem.px @ v) > 0)
        if len(support) ** self.n > MAX_CODES:
            raise ValueError(f"{len(support)}^{self.n} sequences exceed the enumeration cap {MAX_CODES}")
        r_f, r_g = derive_rates(v, self.problem, self.delta)
        v.setflags(write=False)
        support.setflags(write=False)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "rate_f", r_f)
        object.__setattr__(self, "rate_g", r_g)

    @property
    def base(self) -> int:
        """Size of the active function alphabet (functions with positive marginal)."""
        return int(self.support.size)

    @property
    def v_active(self) -> np.ndarray:
        return np.ascontiguousarray(self.v[:, self.support])

    @property
    def num_bins_f(self) -> int:
        return max(1, int(math.floor(2.0 ** (self.n * self.rate_f))))

    @property
    def num_bins_g(self) -> int:
        return max(1, int(math.ceil(2.0 ** (self.n * self.rate_g))))

    @property
    def fa(self) -> FunctionAlphabet:
        return self.problem.fa


@dataclass(frozen=True)
class SharedRandomness:
    """Everything encoder and decoder agree on before a block: hashes, bin labels, permutation, quantizer seed."""

    f: BinCode
    g: BinCode
    labels: tuple
    perm: np.ndarray
    quantizer_seed: int

    @classmethod
    def draw(cls, config: CodeConfig, seed) -> "SharedRandomness":
        ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
        kf, kg, kl, kp, kq = (int(c.generate_state(1)[0]) for c in ss.spawn(5))
        f = BinCode(config.n, config.base, config.num_bins_f, kf)
        g = BinCode(config.n, config.base, config.num_bins_g, kg)
        labels = tuple(int(s) for s in np.random.default_rng(kl).integers(0, f.num_bins, size=MAX_RESAMPLES))
        perm = np.random.default_rng(kp).permutation(config.n)
        perm.setflags(write=False)
        return cls(f, g, labels, perm, kq)


@dataclass(frozen=True)
class Message:
    """Bin index of g plus the attempt number, which selects the shared label s."""

    index: int
    attempt: int


@dataclass
class EncodeResult:
    message: Message | None
    code: int = -1
    resamples: int = 0


def sequence_code(seq, base: int) -> int:
    code = 0
    for s in seq:
        code = code * base + int(s)
    return code


def code_sequence(code: int, n: int, base: int) -> np.ndarray:
    out = np.empty(n, dtype=np.int64)
    for t in range(n - 1, -1, -1):
        code, out[t] = divmod(code, base)
    return out


def encode(x, config: CodeConfig, shared: SharedRandomness) -> EncodeResult:
    """Sample U^n ~ V^n(.|x^n) restricted to f(U^n) = s, trying fresh labels when the slice is empty."""
    x = np.asarray(x, dtype=np.int64)
    if x.size != config.n:
        raise ValueError(f"expected a block of length {config.n}")
    xp = np.ascontiguousarray(x[shared.perm])
    codes, probs = _kernels.enumerate_support(xp, config.v_active, config.base)
    bins = shared.f(codes)
    rng = np.random.default_rng(shared.quantizer_seed)
    for attempt, s in enumerate(shared.labels):
        hit = bins == s
        if not hit.any():
            continue
        p = probs[hit]
        k = int(np.searchsorted(np.cumsum(p), rng.random() * p.sum(), side="right"))
        code = int(codes[hit][min(k, p.size - 1)])
        index = int(shared.g(np.array([code], dtype=np.uint64))[0])
        return EncodeResult(Message(index, attempt), code, attempt)
    return EncodeResult(None, -1, len(shared.labels))


@dataclass
class DecodeResult:
    xhat: np.ndarray | None
    code: int
    candidates: int
    entropy: float


def decode(y, message: Message, config: CodeConfig, shared: SharedRandomness) -> DecodeResult:
    """Minimum empirical H(u^n|y^n) over the bin; ties go to the lexicographically first sequence."""
    y = np.asarray(y, dtype=np.int64)
    yp = np.ascontiguousarray(y[shared.perm])
    fa_, fb_, fm_ = shared.f.params
    ga_, gb_, gm_ = shared.g.params
    s = shared.labels[message.attempt]
    code, h, ncand = _kernels.decode_scan(yp, config.base, config.problem.ny, fa_, fb_, fm_, s, ga_, gb_, gm_, message.index)
    if code < 0:
        return DecodeResult(None, -1, int(ncand), math.inf)
    u = config.support[code_sequence(int(code), config.n, config.base)]
    xhat_p = config.fa.apply(u, yp)
    xhat = np.empty_like(xhat_p)
    xhat[shared.perm] = xhat_p
    return DecodeResult(xhat, int(code), int(ncand), float(h))
