"""Types, conditional types, shells and typicality for finite sequences."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import AlphabetMismatchError


@dataclass(frozen=True)
class SequenceType:
    """Composition of a length-``n`` sequence: ``counts[a]`` occurrences of symbol ``a``."""

    counts: tuple

    def __post_init__(self):
        c = tuple(int(k) for k in self.counts)
        if any(k < 0 for k in c):
            raise ValueError("type counts must be nonnegative")
        if sum(c) < 1:
            raise ValueError("a type needs n >= 1")
        object.__setattr__(self, "counts", c)

    @property
    def n(self) -> int:
        return sum(self.counts)

    @property
    def size(self) -> int:
        return len(self.counts)

    @property
    def distribution(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=float) / self.n

    def log2_class_size(self) -> float:
        """log2 |T_P|, the number of sequences of this type."""
        return log2_multinomial(self.counts)


@dataclass(frozen=True)
class ConditionalType:
    """Joint composition: ``counts[x][y]`` positions with ``(x, y)``; rows sum to the input type."""

    input_type: SequenceType
    counts: tuple

    def __post_init__(self):
        c = tuple(tuple(int(k) for k in row) for row in self.counts)
        if len(c) != self.input_type.size:
            raise AlphabetMismatchError("one row per input symbol is required")
        for row, nx in zip(c, self.input_type.counts):
            if any(k < 0 for k in row) or sum(row) != nx:
                raise ValueError(f"row {row} does not sum to input count {nx}")
        object.__setattr__(self, "counts", c)

    @property
    def channel(self) -> np.ndarray:
        """Induced conditional law; rows of unused inputs are left uniform."""
        c = np.asarray(self.counts, dtype=float)
        s = c.sum(axis=1, keepdims=True)
        out = np.full_like(c, 1.0 / c.shape[1])
        np.divide(c, s, out=out, where=s > 0)
        return out


def _check_symbols(x, size: int) -> np.ndarray:
    x = np.asarray(x)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("expected a nonempty 1-D sequence")
    if not np.issubdtype(x.dtype, np.integer):
        if not np.all(np.mod(x, 1) == 0):
            raise ValueError("symbols must be integers")
        x = x.astype(np.int64)
    if x.min() < 0 or x.max() >= size:
        raise AlphabetMismatchError(f"symbol out of alphabet of size {size}")
    return x


def type_of(x, size: int) -> SequenceType:
    x = _check_symbols(x, size)
    return SequenceType(tuple(np.bincount(x, minlength=size)))


def joint_type_of(x, y, size_x: int, size_y: int) -> ConditionalType:
    x = _check_symbols(x, size_x)
    y = _check_symbols(y, size_y)
    if x.size != y.size:
        raise ValueError("sequences differ in length")
    counts = np.zeros((size_x, size_y), dtype=np.int64)
    np.add.at(counts, (x, y), 1)
    return ConditionalType(type_of(x, size_x), tuple(map(tuple, counts)))


def _compositions(n: int, k: int) -> Iterator[tuple]:
    # stars and bars: choose k-1 bar positions among n+k-1 slots
    for bars in itertools.combinations(range(n + k - 1), k - 1):
        prev = -1
        parts = []
        for b in bars:
            parts.append(b - prev - 1)
            prev = b
        parts.append(n + k - 1 - prev - 1)
        yield tuple(parts)


def enumerate_types(size: int, n: int) -> list[SequenceType]:
    if n < 1:
        raise ValueError("n must be >= 1")
    return [SequenceType(c) for c in _compositions(n, size)]


def iter_conditional_types(input_type: SequenceType, size_y: int) -> Iterator[ConditionalType]:
    """Lazily stream every conditional type compatible with ``input_type``."""
    per_row = []
    for nx in input_type.counts:
        per_row.append(list(_compositions(nx, size_y)) if nx > 0 else [(0,) * size_y])
    for rows in itertools.product(*per_row):
        yield ConditionalType(input_type, rows)


def log2_multinomial(counts) -> float:
    n = sum(counts)
    return (math.lgamma(n + 1) - sum(math.lgamma(k + 1) for k in counts)) / math.log(2)


def shell_size(ct: ConditionalType) -> int:
    """|T_W(x^n)|: product over inputs of multinomial(n_x; row counts). Exact integer."""
    total = 1
    for row, nx in zip(ct.counts, ct.input_type.counts):
        m = math.factorial(nx)
        for k in row:
            m //= math.factorial(k)
        total *= m
    return total


def log2_shell_size(ct: ConditionalType) -> float:
    return sum(log2_multinomial(row) for row in ct.counts)


def log2_sequence_prob(ct: ConditionalType, w) -> float:
    """log2 W^n(y^n|x^n) for any ``y^n`` in the shell; ``-inf`` if impossible."""
    w = np.asarray(w, dtype=float)
    total = 0.0
    for x, row in enumerate(ct.counts):
        for y, k in enumerate(row):
            if k == 0:
                continue
            if w[x, y] <= 0:
                return -math.inf
            total += k * math.log2(w[x, y])
    return total


def is_typical(x, p, delta: float) -> bool:
    """Closed-inequality typicality: max deviation <= delta and no zero-probability symbol."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    p = np.asarray(p, dtype=float).ravel()
    t = type_of(x, p.size)
    counts = np.asarray(t.counts)
    if np.any((p == 0) & (counts > 0)):
        return False
    # exact comparison in the rational domain avoids rounding at the boundary
    return bool(np.all(np.abs(counts - t.n * p) <= t.n * delta + 1e-12 * t.n))


def empirical_distortion(x, y, measure) -> float:
    m = np.asarray(measure, dtype=float)
    x = _check_symbols(x, m.shape[0])
    y = _check_symbols(y, m.shape[1])
    if x.size != y.size:
        raise ValueError("sequences differ in length")
    return float(m[x, y].mean())


def type_distortion(px, w, measure) -> float:
    """e(P, W) = sum_x P(x) sum_y W(y|x) e(x, y)."""
    px = np.asarray(px, dtype=float)
    return float(np.sum(px[:, None] * np.asarray(w, dtype=float) * np.asarray(measure, dtype=float)))


def atypical_mass_bound(size: int, n: int, delta: float) -> float:
    """Upper bound 2|X| 2^{-n 2 delta^2 / (5 ln 2)} on the non-typical mass."""
    return 2.0 * size * 2.0 ** (-n * 2.0 * delta**2 / (5.0 * math.log(2.0)))


def nontypical_mass_mc(p, n: int, delta: float, samples: int, rng: np.random.Generator) -> float:
    """Monte Carlo estimate of P^n(not typical), sampling types directly (multinomial counts)."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    p = np.asarray(p, dtype=float).ravel()
    counts = rng.multinomial(n, p, size=samples)
    bad = np.any(np.abs(counts - n * p) > n * delta + 1e-12 * n, axis=1)
    bad |= np.any((p == 0) & (counts > 0), axis=1)
    return float(bad.mean())
