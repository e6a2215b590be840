import numpy as np
import pytest

from oracle_values import FIG4_RM_D0_0_25, FIG4_WZ_W1_D0_0_25, RA_0_25_0_1, WZ_GRID
from uwz.binary import (
    BinaryChannelParam,
    WZParametric,
    binary_problem,
    bsc,
    fig4_channels,
    ra_upper_binary_oracle,
    star,
    wz_binary_optimizer,
    wz_binary_oracle,
)
from uwz.geometry import FunctionAlphabet
from uwz.probability import binary_entropy
from uwz.solvers import phi


@pytest.mark.parametrize("key", sorted(WZ_GRID))
def test_wz_oracle_matches_envelope(key):
    E, D = key
    assert wz_binary_oracle(E, D) == pytest.approx(WZ_GRID[key], abs=1e-6)


def test_wz_oracle_endpoints():
    assert wz_binary_oracle(0.25, 0.0) == pytest.approx(binary_entropy(0.25))
    assert wz_binary_oracle(0.25, 0.3) == 0.0


def test_ra_oracle_matches_envelope():
    assert ra_upper_binary_oracle(0.25, 0.1) == pytest.approx(RA_0_25_0_1, abs=1e-7)
    assert ra_upper_binary_oracle(0.25, 0.0) == 1.0


def test_parametric_rate_equals_tensor_phi():
    fa = FunctionAlphabet(2, 2)
    for E, lam, q in [(0.25, 0.7, 0.05), (0.4, 1.0, 0.2), (0.1, 0.3, 0.0)]:
        par = WZParametric(lam, q)
        assert par.rate(E) == pytest.approx(phi(par.test_channel(fa), bsc(E), [0.5, 0.5]), abs=1e-10)


def test_optimizer_meets_distortion():
    par = wz_binary_optimizer(0.25, 0.1)
    assert par.distortion(0.25) == pytest.approx(0.1, abs=1e-12)
    assert 0 <= par.q <= 0.1


def test_star():
    assert star(0.1, 0.2) == pytest.approx(0.1 * 0.8 + 0.2 * 0.9)
    assert star(0.0, 0.3) == 0.3


def test_channel_param_class_membership():
    assert BinaryChannelParam(0.5, 0.0).in_class(0.25)
    assert not BinaryChannelParam(0.5, 0.1).in_class(0.25)
    with pytest.raises(ValueError):
        BinaryChannelParam(1.2, 0.0)


def test_fig4_channels_shapes():
    w1, w2 = fig4_channels(0.25)
    assert np.allclose(w1, [[0.5, 0.5], [0.0, 1.0]])
    assert np.allclose(w2, [[1.0, 0.0], [0.5, 0.5]])
    with pytest.raises(ValueError):
        fig4_channels(0.6)


def test_fig4_zero_distortion_endpoints():
    from uwz.solvers import rm_upper, wz_rate

    p = binary_problem(0.25)
    w1, _ = fig4_channels(0.25)
    assert wz_rate(w1, 0.0, p)[0] == pytest.approx(FIG4_WZ_W1_D0_0_25, abs=1e-6)
    assert rm_upper(0.0, p)[0] == pytest.approx(FIG4_RM_D0_0_25, abs=1e-5)


def test_bad_E():
    with pytest.raises(ValueError):
        wz_binary_oracle(0.0, 0.1)
    with pytest.raises(ValueError):
        wz_binary_oracle(0.7, 0.1)
