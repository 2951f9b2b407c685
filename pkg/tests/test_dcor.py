import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dccause.distance import ObservationSet, center_distances, dcor, dcov, dvar
from dccause.errors import ConsistencyError, DataError
from dccause import distance as dcor_module

from oracles import naive_dcor, naive_dcov


def _obs(alpha, beta):
    return ObservationSet(np.asarray(alpha, float), np.asarray(beta, float))


def test_two_point_centered_tables():
    cd = center_distances(_obs([0, 1], [[0], [1]]))
    expected = [[-0.5, 0.5], [0.5, -0.5]]
    np.testing.assert_allclose(cd.A, expected, atol=1e-15)
    np.testing.assert_allclose(cd.B, expected, atol=1e-15)


def test_two_point_dcov_and_dvar():
    obs = _obs([0, 1], [[0], [1]])
    assert dcov(center_distances(obs)) == pytest.approx(0.5, abs=1e-15)
    assert dvar(np.array([0.0, 1.0])) == pytest.approx(0.5, abs=1e-15)


def test_constant_alpha_gives_zero_table():
    cd = center_distances(_obs([0.3, 0.3, 0.3], [[0, 1], [1, 0], [2, 2]]))
    assert not cd.A.any()
    assert dcov(cd) == 0.0
    assert dvar(np.full(4, 0.3)) == 0.0


def test_need_two_observations():
    with pytest.raises(DataError, match="at least two"):
        center_distances(_obs([0.1], [[1.0]]))
    with pytest.raises(DataError):
        dcor(_obs([0.1], [[1.0]]))


def test_dcov_of_side_with_itself_is_dvar():
    rng = np.random.default_rng(1)
    alpha = rng.random(9)
    obs = _obs(alpha, alpha[:, None])
    assert dcov(center_distances(obs)) == pytest.approx(dvar(alpha), rel=1e-14)


def test_dvar_is_one_homogeneous():
    rng = np.random.default_rng(2)
    beta = rng.random((10, 3))
    assert dvar(3.5 * beta) == pytest.approx(3.5 * dvar(beta), rel=1e-13)


@pytest.mark.parametrize("seed", range(5))
def test_two_distinct_observations_give_one(seed):
    rng = np.random.default_rng(seed)
    alpha = rng.random(2)
    beta = rng.random((2, 4))
    assert dcor(_obs(alpha, beta)) == pytest.approx(1.0, abs=1e-12)


def test_constant_beta_gives_exact_zero():
    assert dcor(_obs([0.1, 0.5, 0.4], [[0.2, 0.8]] * 3)) == 0.0


def test_nearly_constant_rows_treated_as_constant():
    # rows that differ only by division round-off, as from an exact product table
    u = np.array([0.1, 0.3, 0.6])
    v = np.array([0.2, 0.7, 0.1])
    p = np.outer(u, v)
    rows = p / p.sum(axis=1, keepdims=True)
    assert dcor(_obs(u, rows)) == 0.0


def test_matches_naive_oracle_fixed_case():
    rng = np.random.default_rng(12)
    alpha = rng.random(12)
    beta = rng.random((12, 4))
    expected = naive_dcor(alpha.tolist(), beta.tolist())
    assert abs(dcor(_obs(alpha, beta)) - expected) <= 1e-12
    assert abs(dcov(center_distances(_obs(alpha, beta))) - naive_dcov(alpha.tolist(), beta.tolist())) <= 1e-12


def test_centered_row_and_column_sums_vanish():
    rng = np.random.default_rng(3)
    cd = center_distances(_obs(rng.random(15), rng.random((15, 5))))
    for T in (cd.A, cd.B):
        np.testing.assert_allclose(T, T.T, atol=0)
        assert np.abs(T.sum(axis=0)).max() <= 1e-9 * 15
        assert np.abs(T.sum(axis=1)).max() <= 1e-9 * 15


def test_large_negative_sum_is_consistency_error(monkeypatch):
    obs = _obs([0.0, 1.0, 3.0], [[0.0], [2.0], [1.0]])
    cd = center_distances(obs)
    bad = type(cd)(cd.A, -cd.A)
    with pytest.raises(ConsistencyError):
        dcov(bad)


def test_statistical_sanity_independent_uniforms():
    below = 0
    for trial in range(100):
        rng = np.random.default_rng([2024, trial])
        below += dcor(_obs(rng.random(200), rng.random(200))) < 0.25
    assert below >= 95


finite = st.floats(-50, 50, allow_nan=False, allow_infinity=False)


@st.composite
def observation_sets(draw, max_n=12, max_d=4):
    n = draw(st.integers(2, max_n))
    d = draw(st.integers(1, max_d))
    alpha = draw(st.lists(finite, min_size=n, max_size=n))
    beta = draw(st.lists(st.lists(finite, min_size=d, max_size=d), min_size=n, max_size=n))
    return np.array(alpha), np.array(beta)


@settings(max_examples=100, deadline=None)
@given(observation_sets())
def test_range(ab):
    r = dcor(_obs(*ab))
    assert 0.0 <= r <= 1.0


@settings(max_examples=100, deadline=None)
@given(observation_sets())
def test_symmetry(ab):
    alpha, beta = ab
    forward = dcor(ObservationSet(alpha, beta))
    backward = dcor(ObservationSet(beta, alpha))
    assert abs(forward - backward) <= 1e-12


@settings(max_examples=100, deadline=None)
@given(observation_sets(), st.randoms(use_true_random=False))
def test_permutation_invariance(ab, rnd):
    alpha, beta = ab
    perm = list(range(len(alpha)))
    rnd.shuffle(perm)
    a = _obs(alpha, beta)
    b = _obs(alpha[perm], beta[perm])
    assert abs(dcor(a) - dcor(b)) <= 1e-12
    assert abs(dcov(center_distances(a)) - dcov(center_distances(b))) <= 1e-12 * max(1.0, dcov(center_distances(a)))
    assert abs(dvar(alpha) - dvar(alpha[perm])) <= 1e-12 * max(1.0, dvar(alpha))


@settings(max_examples=100, deadline=None)
@given(observation_sets(), st.floats(0.01, 100))
def test_scale_invariance(ab, c):
    alpha, beta = ab
    assert abs(dcor(_obs(alpha, beta)) - dcor(_obs(alpha, c * beta))) <= 1e-12


def test_oracle_equivalence_many_seeds():
    rng = np.random.default_rng(99)
    for _ in range(100):
        n = int(rng.integers(2, 26))
        d = int(rng.integers(1, 7))
        alpha = rng.random(n)
        beta = rng.random((n, d))
        assert abs(dcor(_obs(alpha, beta)) - naive_dcor(alpha.tolist(), beta.tolist())) <= 1e-12


def test_constant_threshold_is_relative():
    assert dcor_module.CONSTANT_RTOL <= 1e-12
    tiny = np.array([0.0, 1e-14, 2e-14])
    # the side is tiny but genuinely non-constant relative to its own scale
    assert dvar(tiny) > 0
