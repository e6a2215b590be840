"""Adversarial side-information channels and Monte Carlo evaluation of the binning code."""
from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .. import _kernels
from ..geometry import side_distortion, worst_case_distortion
from .code import CodeConfig, SharedRandomness, decode, encode
from .hashing import BinCode

KINDS = ("iid", "compound", "split")


@dataclass(frozen=True)
class Adversary:
    """Side-information channel acting on a block.

    * ``iid``: W applied letter by letter.
    * ``compound``: with probability ``weight`` the whole block goes through W1, else through W2.
    * ``split``: the first ``round(weight n)`` letters go through W1, the rest through W2.

    ``permute`` wraps the channel in a fresh uniform permutation per block, which
    turns any of them into a permutation-invariant channel.
    """

    name: str
    kind: str
    channels: tuple
    weight: float = 1.0
    permute: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown adversary kind {self.kind!r}")
        chans = tuple(np.array(w, dtype=float) for w in self.channels)
        need = 1 if self.kind == "iid" else 2
        if len(chans) != need:
            raise ValueError(f"{self.kind} adversary needs {need} channel(s)")
        for w in chans:
            if w.ndim != 2 or np.any(w < 0) or np.any(np.abs(w.sum(axis=1) - 1) > 1e-9):
                raise ValueError("adversary channels must be row-stochastic")
            w.setflags(write=False)
        if not 0.0 <= self.weight <= 1.0:
            raise ValueError("weight must lie in [0, 1]")
        object.__setattr__(self, "channels", chans)

    @classmethod
    def iid(cls, w, name="iid"):
        return cls(name, "iid", (w,))

    @classmethod
    def compound(cls, w1, w2, weight=0.5, name="compound"):
        return cls(name, "compound", (w1, w2), weight)

    def mean_side_distortion(self, px, e) -> float:
        costs = [side_distortion(px, w, e) for w in self.channels]
        if self.kind == "iid":
            return costs[0]
        return self.weight * costs[0] + (1.0 - self.weight) * costs[1]

    def validate(self, px, e, E: float, tol: float = 1e-9):
        """Members must respect the side-distortion level: each channel for ``iid``, the mixture otherwise."""
        got = self.mean_side_distortion(px, e)
        if got > E + tol:
            raise ValueError(f"adversary {self.name!r} has side distortion {got:.6g} > E = {E}")

    def transmit(self, x, rng: np.random.Generator) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        n = x.size
        if self.permute:
            # the channel sees a shuffled block; positions are restored afterwards
            p = rng.permutation(n)
            inner = Adversary(self.name, self.kind, self.channels, self.weight, False)
            y = np.empty(n, dtype=np.int64)
            y[p] = inner.transmit(x[p], rng)
            return y
        if self.kind == "iid":
            rows = self.channels[0][x]
        elif self.kind == "compound":
            w = self.channels[0] if rng.random() < self.weight else self.channels[1]
            rows = w[x]
        else:
            cut = int(round(self.weight * n))
            pick = np.arange(n) < cut
            rows = np.where(pick[:, None], self.channels[0][x], self.channels[1][x])
        r = rng.random(n)
        y = (np.cumsum(rows, axis=1) <= r[:, None]).sum(axis=1)
        y = np.minimum(y, rows.shape[1] - 1)
        return y.astype(np.int64)


@dataclass
class ChannelStats:
    name: str
    trials: int
    mean_distortion: float
    exceedance: float
    decode_error_rate: float
    encode_failures: int
    mean_candidates: float


@dataclass
class SimReport:
    n: int
    delta: float
    rate_f: float
    rate_g: float
    num_bins_f: int
    num_bins_g: int
    target: float
    trials: int
    master_seed: int
    backend: str
    channels: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    def stats(self, name: str) -> ChannelStats:
        for c in self.channels:
            if c.name == name:
                return c
        raise KeyError(name)


def design_distortion(config: CodeConfig) -> float:
    """max over W_1(E) of d(V, W): the distortion the code is built to meet."""
    p = config.problem
    value, _ = worst_case_distortion(config.v, p.cls, p.d, p.fa)
    return value


def _trial_seed(master_seed: int, trial: int, stream: int, adversary: int = 0) -> np.random.SeedSequence:
    return np.random.SeedSequence([int(master_seed), int(trial), int(stream), int(adversary)])


def run_experiment(config: CodeConfig, adversaries, trials: int, master_seed: int, target: float | None = None) -> SimReport:
    """Monte Carlo distortion statistics per adversary.

    Source block, shared randomness and quantizer draws depend only on
    ``(master_seed, trial)``, so all adversaries see the same code realizations;
    the channel noise additionally depends on the adversary index.
    Encoding or decoding failures count as maximal distortion.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    p = config.problem
    for adv in adversaries:
        adv.validate(p.px, p.e, p.E)
    if target is None:
        target = design_distortion(config)
    dmat = p.d.matrix
    dmax = float(dmat.max())
    n = config.n
    blocks = []
    for t in range(trials):
        xs = np.random.default_rng(_trial_seed(master_seed, t, 0)).choice(p.nx, size=n, p=p.px)
        shared = SharedRandomness.draw(config, _trial_seed(master_seed, t, 1))
        enc = encode(xs, config, shared)
        blocks.append((xs, shared, enc))
    report = SimReport(
        n=n,
        delta=config.delta,
        rate_f=config.rate_f,
        rate_g=config.rate_g,
        num_bins_f=config.num_bins_f,
        num_bins_g=config.num_bins_g,
        target=float(target),
        trials=trials,
        master_seed=int(master_seed),
        backend=_kernels.BACKEND_NAME,
    )
    for a, adv in enumerate(adversaries):
        total, exceed, errors, fails, cands = 0.0, 0, 0, 0, 0
        for t, (xs, shared, enc) in enumerate(blocks):
            ys = adv.transmit(xs, np.random.default_rng(_trial_seed(master_seed, t, 2, a)))
            if enc.message is None:
                fails += 1
                dist = dmax
                errors += 1
            else:
                dec = decode(ys, enc.message, config, shared)
                cands += dec.candidates
                if dec.xhat is None:
                    dist = dmax
                    errors += 1
                else:
                    dist = float(dmat[xs, dec.xhat].mean())
                    errors += int(dec.code != enc.code)
            total += dist
            exceed += int(dist > target + config.delta + 1e-12)
        report.channels.append(
            ChannelStats(
                name=adv.name,
                trials=trials,
                mean_distortion=total / trials,
                exceedance=exceed / trials,
                decode_error_rate=errors / trials,
                encode_failures=fails,
                mean_candidates=cands / trials,
            )
        )
    return report


MAX_UNIFORMITY_N = 8


def bin_label_distance(config: CodeConfig, f: BinCode) -> float:
    """Exact || P_{S X^n} - Unif(S) x P_X^n ||_1 for S = f(U^n), U^n ~ V^n(.|X^n)."""
    p = config.problem
    m = f.num_bins
    if m == 1:
        return 0.0
    total = 0.0
    v = config.v_active
    for xs in itertools.product(range(p.nx), repeat=config.n):
        px_seq = float(np.prod(p.px[list(xs)]))
        if px_seq == 0.0:
            continue
        codes, probs = _kernels.enumerate_support(np.array(xs, dtype=np.int64), v, config.base)
        ps = np.bincount(f(codes), weights=probs, minlength=m)
        total += px_seq * float(np.abs(ps - 1.0 / m).sum())
    return total


def measure_uniformity(config: CodeConfig, trials: int, seed: int = 0) -> float:
    """Average of the exact label-uniformity distance over ``trials`` hash draws."""
    if config.n > MAX_UNIFORMITY_N:
        raise ValueError(f"exact uniformity needs n <= {MAX_UNIFORMITY_N}")
    if trials < 1:
        raise ValueError("trials must be positive")
    out = 0.0
    for k in range(trials):
        s = int(np.random.SeedSequence([int(seed), k]).generate_state(1)[0])
        out += bin_label_distance(config, BinCode(config.n, config.base, config.num_bins_f, s))
    return out / trials
