"""Finite-alphabet distributions, channels and information measures.

All logarithms are base 2. Zero-probability terms are dropped by masking,
never by adding a smoothing epsilon, so values at the simplex boundary are exact.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import AlphabetMismatchError

SIMPLEX_TOL = 1e-12
RENORMALIZE_TOL = 1e-9


@dataclass(frozen=True)
class Alphabet:
    size: int
    label: str = ""

    def __post_init__(self):
        if int(self.size) < 1:
            raise ValueError(f"alphabet size must be >= 1, got {self.size}")
        object.__setattr__(self, "size", int(self.size))


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _normalize_simplex(a: np.ndarray, axis: int = -1) -> np.ndarray:
    a = np.array(a, dtype=float)
    if not np.all(np.isfinite(a)):
        raise ValueError("probabilities must be finite")
    if np.any(a < -RENORMALIZE_TOL):
        raise ValueError(f"negative probability {a.min():.3g}")
    a = np.clip(a, 0.0, None)
    s = a.sum(axis=axis, keepdims=True)
    if np.any(np.abs(s - 1.0) > RENORMALIZE_TOL):
        raise ValueError(f"probabilities sum to {np.ravel(s)} (tolerance {RENORMALIZE_TOL})")
    return a / s


@dataclass(frozen=True)
class Distribution:
    """Probability vector over a finite alphabet."""

    probs: np.ndarray
    alphabet: Alphabet = field(default=None)

    def __post_init__(self):
        p = _normalize_simplex(np.ravel(self.probs))
        object.__setattr__(self, "probs", _frozen(p))
        if self.alphabet is None:
            object.__setattr__(self, "alphabet", Alphabet(p.size))
        elif self.alphabet.size != p.size:
            raise AlphabetMismatchError(f"{p.size} probabilities for alphabet of size {self.alphabet.size}")

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.probs, dtype=dtype)

    def __len__(self):
        return self.probs.size

    @classmethod
    def uniform(cls, size: int, label: str = "") -> "Distribution":
        return cls(np.full(size, 1.0 / size), Alphabet(size, label))


@dataclass(frozen=True)
class Channel:
    """Row-stochastic matrix; row ``x`` is the output law given input ``x``."""

    rows: np.ndarray
    input: Alphabet = field(default=None)
    output: Alphabet = field(default=None)

    def __post_init__(self):
        r = np.array(self.rows, dtype=float)
        if r.ndim != 2:
            raise ValueError("channel must be a 2-D array")
        r = _normalize_simplex(r, axis=1)
        object.__setattr__(self, "rows", _frozen(r))
        if self.input is None:
            object.__setattr__(self, "input", Alphabet(r.shape[0]))
        if self.output is None:
            object.__setattr__(self, "output", Alphabet(r.shape[1]))
        if (self.input.size, self.output.size) != r.shape:
            raise AlphabetMismatchError(f"shape {r.shape} does not match alphabets")

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.rows, dtype=dtype)

    @property
    def shape(self):
        return self.rows.shape

    @classmethod
    def identity(cls, size: int) -> "Channel":
        return cls(np.eye(size))

    @classmethod
    def constant(cls, n_in: int, n_out: int, symbol: int) -> "Channel":
        r = np.zeros((n_in, n_out))
        r[:, symbol] = 1.0
        return cls(r)


@dataclass(frozen=True)
class Joint:
    """Joint law over an ordered list of alphabets, stored as a dense tensor."""

    probs: np.ndarray
    alphabets: tuple = None

    def __post_init__(self):
        p = np.array(self.probs, dtype=float)
        flat = _normalize_simplex(p.ravel())
        p = flat.reshape(p.shape)
        object.__setattr__(self, "probs", _frozen(p))
        if self.alphabets is None:
            object.__setattr__(self, "alphabets", tuple(Alphabet(k) for k in p.shape))
        elif tuple(a.size for a in self.alphabets) != p.shape:
            raise AlphabetMismatchError("alphabet sizes do not match the tensor shape")

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.probs, dtype=dtype)

    def marginal(self, axes: Sequence[int]) -> "Joint":
        """Keep ``axes`` (in the given order), summing out the rest."""
        axes = list(axes)
        drop = tuple(i for i in range(self.probs.ndim) if i not in axes)
        m = self.probs.sum(axis=drop)
        kept = sorted(axes)
        m = np.moveaxis(m, [kept.index(a) for a in axes], list(range(len(axes))))
        return Joint(m, tuple(self.alphabets[a] for a in axes))

    @classmethod
    def from_source_channels(cls, px, *channels) -> "Joint":
        """Joint of ``(X, Y1, Y2, ...)`` with each ``Yi`` drawn from ``X`` through ``channels[i]``."""
        p = np.asarray(px, dtype=float)
        t = p
        for w in channels:
            w = np.asarray(w, dtype=float)
            if w.shape[0] != p.size:
                raise AlphabetMismatchError("channel input size differs from source size")
            t = t[..., None] * w.reshape((p.size,) + (1,) * (t.ndim - 1) + (w.shape[1],))
        return cls(t)


def _xlogx_ratio(p: np.ndarray, q: np.ndarray) -> float:
    """Sum of ``p * log2(p / q)`` over entries with ``p > 0``."""
    mask = p > 0
    return float(np.sum(p[mask] * np.log2(p[mask] / q[mask])))


def entropy(p) -> float:
    p = np.asarray(p, dtype=float).ravel()
    nz = p[p > 0]
    return float(max(-np.sum(nz * np.log2(nz)), 0.0))


def mutual_information(p, w) -> float:
    """I(X;Y) for input law ``p`` and channel ``w``."""
    p = np.asarray(p, dtype=float).ravel()
    w = np.asarray(w, dtype=float)
    if w.ndim != 2 or w.shape[0] != p.size:
        raise AlphabetMismatchError(f"input law of size {p.size} vs channel of shape {w.shape}")
    joint = p[:, None] * w
    q = joint.sum(axis=0)
    prod = p[:, None] * q[None, :]
    return max(_xlogx_ratio(joint, prod), 0.0)


def conditional_mutual_information(joint) -> float:
    """I(A;B|C) for a three-axis joint ordered ``(A, B, C)``."""
    t = np.asarray(joint, dtype=float)
    if t.ndim != 3:
        raise AlphabetMismatchError(f"expected a 3-axis joint, got {t.ndim} axes")
    pc = t.sum(axis=(0, 1))
    pac = t.sum(axis=1)
    pbc = t.sum(axis=0)
    a, b, c = np.nonzero(t > 0)
    # log space: products of tiny masses underflow
    val = t[a, b, c] * (np.log2(t[a, b, c]) + np.log2(pc[c]) - np.log2(pac[a, c]) - np.log2(pbc[b, c]))
    return float(max(np.sum(val), 0.0))


def conditional_entropy(joint) -> float:
    """H(A|B) for a two-axis joint ordered ``(A, B)``."""
    t = np.asarray(joint, dtype=float)
    return entropy(t) - entropy(t.sum(axis=0))


def variational_distance(p, q) -> float:
    """Unnormalized L1 distance, in ``[0, 2]`` for two probability laws."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise AlphabetMismatchError(f"shapes {p.shape} and {q.shape} differ")
    return float(np.abs(p - q).sum())


def binary_entropy(p: float) -> float:
    return entropy([p, 1.0 - p])
