import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracle_values import CAPACITY_BSC_0_1, ENTROPY_QUARTER
from uwz.errors import AlphabetMismatchError
from uwz.probability import (
    Channel,
    Distribution,
    Joint,
    binary_entropy,
    conditional_entropy,
    conditional_mutual_information,
    entropy,
    mutual_information,
    variational_distance,
)


def test_entropy_frozen():
    assert entropy([0.25, 0.75]) == pytest.approx(ENTROPY_QUARTER, abs=1e-12)


def test_entropy_point_mass_is_zero():
    assert entropy([0.0, 1.0, 0.0]) == 0.0


def test_bsc_mutual_information():
    w = np.array([[0.9, 0.1], [0.1, 0.9]])
    assert mutual_information([0.5, 0.5], w) == pytest.approx(CAPACITY_BSC_0_1, abs=1e-12)
    joint = 0.5 * w
    assert entropy([0.5, 0.5]) - conditional_entropy(joint) == pytest.approx(CAPACITY_BSC_0_1, abs=1e-12)


def test_variational_distance_example():
    assert variational_distance([0.5, 0.5], [0.25, 0.75]) == pytest.approx(0.5)


def test_variational_distance_shape_mismatch():
    with pytest.raises(AlphabetMismatchError):
        variational_distance([0.5, 0.5], [1.0, 0.0, 0.0])


def test_cmi_identity_on_random_joint(rng):
    # I(U;X|Y) = I(U;X) - I(U;Y) under the chain U - X - Y
    px = rng.dirichlet(np.ones(3))
    v = rng.dirichlet(np.ones(4), size=3)
    w = rng.dirichlet(np.ones(2), size=3)
    t = px[:, None, None] * v[:, :, None] * w[:, None, :]  # (X, U, Y)
    uxy = t.transpose(1, 0, 2)
    ixu = mutual_information(px, v)
    puy = t.sum(axis=0)
    iuy = mutual_information(puy.sum(axis=1), puy / puy.sum(axis=1, keepdims=True))
    assert conditional_mutual_information(uxy) == pytest.approx(ixu - iuy, abs=1e-10)


def test_cmi_needs_three_axes():
    with pytest.raises(AlphabetMismatchError):
        conditional_mutual_information(np.ones((2, 2)) / 4)


def test_distribution_validation():
    with pytest.raises(ValueError):
        Distribution(np.array([0.5, 0.6]))
    with pytest.raises(ValueError):
        Distribution(np.array([-0.1, 1.1]))


def test_channel_validation_and_constructors():
    assert np.allclose(np.asarray(Channel.identity(3)), np.eye(3))
    c = np.asarray(Channel.constant(2, 3, 1))
    assert np.allclose(c, [[0, 1, 0], [0, 1, 0]])
    with pytest.raises(ValueError):
        Channel(np.array([[0.5, 0.4], [0.5, 0.5]]))


def test_joint_from_source_channels_marginals(rng):
    px = rng.dirichlet(np.ones(2))
    w = rng.dirichlet(np.ones(3), size=2)
    j = Joint.from_source_channels(px, w)
    arr = np.asarray(j)
    assert arr.shape == (2, 3)
    assert np.allclose(arr.sum(axis=1), px)


def test_binary_entropy_symmetry():
    assert binary_entropy(0.2) == pytest.approx(binary_entropy(0.8))
    assert binary_entropy(0.5) == pytest.approx(1.0)


prob_vectors = arrays(np.float64, st.integers(2, 5), elements=st.floats(0.01, 1.0)).map(lambda a: a / a.sum())


@given(prob_vectors)
def test_entropy_bounds(p):
    h = entropy(p)
    assert -1e-12 <= h <= np.log2(p.size) + 1e-9


@given(prob_vectors, prob_vectors)
def test_variational_distance_metric_bounds(p, q):
    if p.size != q.size:
        return
    d = variational_distance(p, q)
    assert 0.0 <= d <= 2.0 + 1e-12
    assert d == pytest.approx(variational_distance(q, p))


@given(st.integers(0, 2**32 - 1))
def test_mutual_information_bounds(seed):
    r = np.random.default_rng(seed)
    p = r.dirichlet(np.ones(3))
    w = r.dirichlet(np.ones(3), size=3)
    i = mutual_information(p, w)
    assert -1e-12 <= i <= entropy(p) + 1e-9
