import numpy as np
import pytest
from scipy.optimize import linprog

from uwz.binary import WZParametric, fig4_channels
from uwz.errors import AlphabetMismatchError, UnsupportedSizeError
from uwz.geometry import (
    ChannelClassW1,
    DistortionMeasure,
    FunctionAlphabet,
    extreme_points_W1,
    is_member_VED,
    reproduction_distortion,
    side_distortion,
    worst_case_distortion,
)

HAM = DistortionMeasure.hamming(2)


def test_distortion_measure_needs_zero_per_row():
    with pytest.raises(ValueError):
        DistortionMeasure(np.array([[1.0, 1.0], [0.0, 1.0]]))
    with pytest.raises(ValueError):
        DistortionMeasure(np.array([[0.0, -1.0], [0.0, 1.0]]))


def test_function_alphabet_layout():
    fa = FunctionAlphabet(2, 2)
    assert len(fa) == 4
    assert fa.constant_subset == (fa.constant(0), fa.constant(1))
    assert list(fa.table[fa.identity()]) == [0, 1]
    assert np.array_equal(fa.apply([fa.identity(), fa.constant(1)], [0, 0]), [0, 1])


def test_function_alphabet_cap():
    with pytest.raises(UnsupportedSizeError):
        FunctionAlphabet(13, 2)


def test_identity_decoder_distortion_is_crossover():
    fa = FunctionAlphabet(2, 2)
    v = np.zeros((2, 4))
    v[:, fa.identity()] = 1.0
    w = np.array([[0.9, 0.1], [0.1, 0.9]])
    assert reproduction_distortion(v, w, [0.5, 0.5], HAM, fa) == pytest.approx(0.1)


def test_constant_functions_ignore_channel(rng):
    fa = FunctionAlphabet(3, 2)
    v = np.zeros((2, len(fa)))
    v[:, list(fa.constant_subset)] = rng.dirichlet(np.ones(2), size=2)
    d = rng.uniform(size=(2, 2))
    d[:, 0] = 0
    vals = [reproduction_distortion(v, rng.dirichlet(np.ones(3), size=2), [0.3, 0.7], d, fa) for _ in range(5)]
    assert np.ptp(vals) < 1e-12
    cls = ChannelClassW1(np.array([0.3, 0.7]), np.array([[0.0, 1, 1], [1, 0, 1]]), 0.2)
    worst, _ = worst_case_distortion(v, cls, d, fa)
    assert worst == pytest.approx(vals[0], abs=1e-12)


def test_reproduction_distortion_brute_force(rng):
    fa = FunctionAlphabet(3, 2)
    px = rng.dirichlet(np.ones(2))
    v = rng.dirichlet(np.ones(len(fa)), size=2)
    w = rng.dirichlet(np.ones(3), size=2)
    d = rng.uniform(size=(2, 2))
    d[:, 1] = 0
    total = 0.0
    for x in range(2):
        for u in range(len(fa)):
            for y in range(3):
                total += px[x] * v[x, u] * w[x, y] * d[x, fa.table[u, y]]
    assert reproduction_distortion(v, w, px, d, fa) == pytest.approx(total, abs=1e-12)


def test_shape_mismatch_raises():
    fa = FunctionAlphabet(2, 2)
    with pytest.raises(AlphabetMismatchError):
        reproduction_distortion(np.ones((2, 3)) / 3, np.eye(2), [0.5, 0.5], HAM, fa)


@pytest.mark.parametrize("seed", range(4))
def test_worst_case_matches_grid(seed):
    r = np.random.default_rng(seed)
    fa = FunctionAlphabet(2, 2)
    px = r.dirichlet(np.ones(2))
    e = r.uniform(size=(2, 2))
    e[[0, 1], [0, 1]] = 0
    E = r.uniform(0.05, 0.5) * float(e.max())
    cls = ChannelClassW1(px, e, E)
    v = r.dirichlet(np.ones(4), size=2)
    d = 1.0 - np.eye(2)
    value, w = worst_case_distortion(v, cls, d, fa)
    assert cls.contains(w)
    assert reproduction_distortion(v, w, px, d, fa) == pytest.approx(value, abs=1e-12)
    a, b = np.meshgrid(np.linspace(0, 1, 1001), np.linspace(0, 1, 1001), indexing="ij")
    # W = [[1-a, a], [b, 1-b]]
    cost = px[0] * a * e[0, 1] + px[1] * b * e[1, 0]
    from uwz.geometry import cost_matrix

    c = cost_matrix(v, d, fa)
    dist = px[0] * ((1 - a) * c[0, 0] + a * c[0, 1]) + px[1] * (b * c[1, 0] + (1 - b) * c[1, 1])
    grid_best = dist[cost <= E].max()
    assert grid_best <= value + 1e-12
    assert value - grid_best < 5e-3


def test_matching_test_channel_in_VED():
    E, lam, q = 0.25, 0.6, 0.08
    fa = FunctionAlphabet(2, 2)
    par = WZParametric(lam, q)
    cls = ChannelClassW1(np.array([0.5, 0.5]), HAM, E)
    D = par.distortion(E)
    assert is_member_VED(par.test_channel(fa), cls, HAM, fa, D)
    assert not is_member_VED(par.test_channel(fa), cls, HAM, fa, D - 1e-3)


def test_single_constant_fails_below_its_distortion():
    fa = FunctionAlphabet(2, 2)
    v = np.zeros((2, 4))
    v[:, fa.constant(0)] = 1.0
    cls = ChannelClassW1(np.array([0.5, 0.5]), HAM, 0.1)
    assert not is_member_VED(v, cls, HAM, fa, 0.4)
    assert is_member_VED(v, cls, HAM, fa, 0.5)


def test_side_distortion_of_fig4_channels():
    for w in fig4_channels(0.2):
        assert side_distortion([0.5, 0.5], w, HAM) == pytest.approx(0.2)


def test_fig4_channels_are_vertices():
    cls = ChannelClassW1(np.array([0.5, 0.5]), HAM, 0.2)
    verts = extreme_points_W1(cls)
    for w in fig4_channels(0.2):
        assert any(np.allclose(w, u) for u in verts)


@pytest.mark.parametrize("seed", range(3))
def test_vertices_span_class(seed):
    r = np.random.default_rng(seed)
    px = r.dirichlet(np.ones(3))
    e = r.uniform(size=(3, 2))
    e[np.arange(3), r.integers(0, 2, 3)] = 0
    cls = ChannelClassW1(px, e, 0.5 * float((px @ e).min()))
    verts = extreme_points_W1(cls)
    assert all(cls.contains(w) for w in verts)
    A = np.array([w.ravel() for w in verts]).T
    for _ in range(10):
        # random feasible point: shrink a random channel towards the zero channel
        w = r.dirichlet(np.ones(2), size=3)
        z = cls.zero_channel()
        s = side_distortion(px, w, e)
        t = min(1.0, cls.E / s) if s > 0 else 1.0
        w = t * w + (1 - t) * z
        res = linprog(np.zeros(len(verts)), A_eq=np.vstack([A, np.ones(len(verts))]), b_eq=np.append(w.ravel(), 1.0), bounds=(0, None))
        assert res.status == 0
