"""Multiply-add-shift hashing of integer-encoded sequences into bins."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import _kernels

MAX_BINS = 2**32


@dataclass(frozen=True)
class BinCode:
    """Hash ``code -> bin`` over the integers ``[0, base**n)``.

    The top 32 bits of ``(a * code + b) mod 2**64`` are scaled onto ``num_bins``.
    ``a`` is odd, ``a`` and ``b`` are drawn from ``seed``.
    """

    n: int
    base: int
    num_bins: int
    seed: int
    a: int = 0
    b: int = 0

    def __post_init__(self):
        if self.n < 1 or self.base < 1:
            raise ValueError("n and base must be positive")
        if not 1 <= self.num_bins <= MAX_BINS:
            raise ValueError(f"num_bins must lie in [1, 2^32], got {self.num_bins}")
        if self.a == 0:
            rng = np.random.default_rng(self.seed)
            a, b = (int(v) for v in rng.integers(0, 2**63, size=2, dtype=np.uint64))
            object.__setattr__(self, "a", (2 * a + 1) % 2**64)
            object.__setattr__(self, "b", (2 * b + int(rng.integers(0, 2))) % 2**64)

    family = "multiply-add-shift"

    @property
    def log2_domain(self) -> float:
        return self.n * math.log2(self.base)

    def __call__(self, codes) -> np.ndarray:
        codes = np.ascontiguousarray(codes, dtype=np.uint64)
        return _kernels.hash_bins(codes, np.uint64(self.a), np.uint64(self.b), np.uint64(self.num_bins))

    @property
    def params(self):
        """(a, b, m) as unsigned 64-bit values for the kernels."""
        return np.uint64(self.a), np.uint64(self.b), np.uint64(self.num_bins)
