import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracle_values import TERNARY_TYPES_N4
from uwz.errors import AlphabetMismatchError
from uwz.typemethod import (
    ConditionalType,
    SequenceType,
    atypical_mass_bound,
    empirical_distortion,
    enumerate_types,
    is_typical,
    iter_conditional_types,
    joint_type_of,
    log2_sequence_prob,
    log2_shell_size,
    nontypical_mass_mc,
    shell_size,
    type_distortion,
    type_of,
)


def test_type_of_matches_tally(rng):
    x = rng.integers(0, 3, size=10)
    t = type_of(x, 3)
    assert t.counts == tuple(sum(1 for s in x if s == a) for a in range(3))
    assert t.n == 10


def test_type_of_rejects_out_of_alphabet():
    with pytest.raises(AlphabetMismatchError):
        type_of([0, 3], 3)


def test_ternary_type_count():
    types = enumerate_types(3, 4)
    assert len(types) == TERNARY_TYPES_N4
    assert len({t.counts for t in types}) == len(types)


@given(st.integers(1, 4), st.integers(1, 7))
def test_type_count_polynomial_bound(k, n):
    assert len(enumerate_types(k, n)) <= (n + 1) ** k


def _shell_by_enumeration(ct: ConditionalType, ny):
    # fix x^n in sorted order; count y^n realizing the joint counts
    x = [a for a, c in enumerate(ct.input_type.counts) for _ in range(c)]
    target = np.asarray(ct.counts)
    hits = 0
    for y in itertools.product(range(ny), repeat=len(x)):
        m = np.zeros_like(target)
        for a, b in zip(x, y):
            m[a, b] += 1
        hits += int(np.array_equal(m, target))
    return hits


def test_shell_size_small_cases():
    ct = ConditionalType(SequenceType((1, 1)), ((1, 0), (0, 1)))
    assert shell_size(ct) == 1 == _shell_by_enumeration(ct, 2)
    ct = ConditionalType(SequenceType((2, 2)), ((1, 1), (1, 1)))
    assert shell_size(ct) == 4 == _shell_by_enumeration(ct, 2)


def test_shell_size_exhaustive_n5():
    tx = SequenceType((3, 2))
    for ct in iter_conditional_types(tx, 3):
        assert shell_size(ct) == _shell_by_enumeration(ct, 3)
        assert log2_shell_size(ct) == pytest.approx(math.log2(shell_size(ct)), abs=1e-9)


def test_partition_property(rng):
    # sum over conditional types of |shell| W^n(shell) = 1
    w = rng.dirichlet(np.ones(3), size=2)
    tx = SequenceType((4, 3))
    total = sum(2.0 ** (log2_shell_size(ct) + log2_sequence_prob(ct, w)) for ct in iter_conditional_types(tx, 3))
    assert total == pytest.approx(1.0, abs=1e-9)


def test_sequence_prob_impossible():
    ct = ConditionalType(SequenceType((1, 1)), ((0, 1), (0, 1)))
    assert log2_sequence_prob(ct, np.eye(2)) == -math.inf


def test_typicality_boundary_closed():
    # |P_x(a) - P(a)| equals delta exactly: still typical
    assert is_typical([0, 0, 0, 1], [0.5, 0.5], 0.25)
    assert not is_typical([0, 0, 0, 0], [0.5, 0.5], 0.25)


def test_typicality_zero_probability_symbol():
    assert not is_typical([0, 2, 0, 0], [0.9, 0.1, 0.0], 0.5)


def test_empirical_vs_type_distortion(rng):
    m = rng.uniform(size=(3, 2))
    x = rng.integers(0, 3, size=40)
    y = rng.integers(0, 2, size=40)
    jt = joint_type_of(x, y, 3, 2)
    px = np.asarray(jt.input_type.distribution)
    assert empirical_distortion(x, y, m) == pytest.approx(type_distortion(px, jt.channel, m), abs=1e-12)


def test_joint_type_length_mismatch():
    with pytest.raises(ValueError):
        joint_type_of([0, 1], [0], 2, 2)


def test_nontypical_mass_mc_matches_exact():
    # binary n=8, p=0.3, delta=0.1: exact mass from the binomial law
    p, n, delta = 0.3, 8, 0.1
    exact = sum(math.comb(n, k) * p**k * (1 - p) ** (n - k) for k in range(n + 1) if abs(k - n * p) > n * delta + 1e-12)
    est = nontypical_mass_mc([1 - p, p], n, delta, 200_000, np.random.default_rng(0))
    assert est == pytest.approx(exact, abs=5e-3)


def test_atypical_bound_monotone():
    assert atypical_mass_bound(2, 20, 0.1) < atypical_mass_bound(2, 10, 0.1)


def test_atypical_bound_holds_where_informative():
    # at n=1000, delta=0.1 the bound is well below 1
    rng = np.random.default_rng(5)
    for _ in range(5):
        p = rng.dirichlet(np.ones(3))
        bound = atypical_mass_bound(3, 1000, 0.1)
        assert bound < 0.2
        assert nontypical_mass_mc(p, 1000, 0.1, 20_000, rng) <= bound
