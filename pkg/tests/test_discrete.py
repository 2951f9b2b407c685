import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dccause.discrete import JointPMF, PairedSample, estimate_joint, factorize
from dccause.errors import DataError
from dccause.synth import make_rng


def test_estimate_joint_diagonal():
    joint = estimate_joint(PairedSample.from_records([(0, 0), (0, 0), (1, 1), (1, 1)]))
    assert joint.x_support.tolist() == [0, 1]
    assert joint.y_support.tolist() == [0, 1]
    np.testing.assert_array_equal(joint.p, [[0.5, 0.0], [0.0, 0.5]])


def test_estimate_joint_single_point():
    joint = estimate_joint(PairedSample.from_records([(3, 7)]))
    assert joint.shape == (1, 1)
    assert joint.p[0, 0] == 1.0


def test_empty_sample_rejected():
    with pytest.raises(DataError, match="empty sample"):
        estimate_joint(PairedSample.from_records([]))


def test_negative_and_sparse_codes_are_encoded():
    sample = PairedSample([-5, 10**9, -5, 3], [2, 2, -1, 7])
    joint = estimate_joint(sample)
    assert joint.x_support.tolist() == [-5, 3, 10**9]
    assert joint.y_support.tolist() == [-1, 2, 7]
    assert joint.counts.sum() == 4


def test_non_integer_codes_rejected():
    with pytest.raises(DataError):
        PairedSample([0.5, 1.0], [0, 1])


def test_estimate_joint_converges_to_generating_pmf():
    truth = np.array([[0.10, 0.05, 0.02, 0.03],
                      [0.04, 0.16, 0.05, 0.05],
                      [0.01, 0.04, 0.20, 0.05],
                      [0.05, 0.05, 0.05, 0.05]])
    rng = make_rng(11)
    cells = rng.choice(16, size=10_000, p=truth.ravel())
    joint = estimate_joint(PairedSample(cells // 4, cells % 4))
    assert np.abs(joint.p - truth).sum() < 0.05


def test_factorize_uniform():
    joint = JointPMF(np.array([0, 1]), np.array([0, 1]), np.full((2, 2), 0.25))
    view = factorize(joint, "x_to_y")
    np.testing.assert_array_equal(view.marginal, [0.5, 0.5])
    np.testing.assert_array_equal(view.conditional, [[0.5, 0.5], [0.5, 0.5]])


def test_factorize_deterministic_map():
    joint = JointPMF(np.array([0, 1]), np.array([0, 1]), np.array([[0.5, 0.0], [0.0, 0.5]]))
    view = factorize(joint, "x_to_y")
    np.testing.assert_array_equal(view.conditional, [[1.0, 0.0], [0.0, 1.0]])


def test_factorize_symmetric_joint_views_match():
    p = np.array([[0.2, 0.1, 0.05], [0.1, 0.15, 0.05], [0.05, 0.05, 0.25]])
    joint = JointPMF(np.arange(3), np.arange(3), p)
    a = factorize(joint, "x_to_y")
    b = factorize(joint, "y_to_x")
    np.testing.assert_array_equal(a.marginal, b.marginal)
    np.testing.assert_array_equal(a.conditional, b.conditional)


def test_joint_invariants_enforced():
    with pytest.raises(DataError):
        JointPMF(np.arange(2), np.arange(2), np.array([[0.5, 0.0], [0.0, 0.4]]))
    with pytest.raises(DataError):
        JointPMF(np.arange(2), np.arange(2), np.array([[0.5, 0.5], [0.0, 0.0]]))


records = st.lists(st.tuples(st.integers(-20, 20), st.integers(-3, 40)), min_size=1, max_size=60)


@settings(max_examples=100, deadline=None)
@given(records)
def test_round_trip_both_directions(recs):
    joint = estimate_joint(PairedSample.from_records(recs))
    a = factorize(joint, "x_to_y")
    np.testing.assert_allclose(a.marginal[:, None] * a.conditional, joint.p, rtol=0, atol=1e-12)
    b = factorize(joint, "y_to_x")
    np.testing.assert_allclose((b.marginal[:, None] * b.conditional).T, joint.p, rtol=0, atol=1e-12)
    assert abs(a.marginal.sum() - 1) <= 1e-12
    assert np.all(np.abs(a.conditional.sum(axis=1) - 1) <= 1e-12)
    assert np.all(a.marginal > 0)


@settings(max_examples=50, deadline=None)
@given(records, st.randoms(use_true_random=False))
def test_permutation_invariance(recs, rnd):
    shuffled = list(recs)
    rnd.shuffle(shuffled)
    a = estimate_joint(PairedSample.from_records(recs))
    b = estimate_joint(PairedSample.from_records(shuffled))
    np.testing.assert_array_equal(a.p, b.p)
    np.testing.assert_array_equal(a.x_support, b.x_support)


@settings(max_examples=50, deadline=None)
@given(records)
def test_transpose_swaps_directions(recs):
    joint = estimate_joint(PairedSample.from_records(recs))
    a = factorize(joint, "x_to_y")
    b = factorize(joint.transpose(), "y_to_x")
    np.testing.assert_array_equal(a.marginal, b.marginal)
    np.testing.assert_array_equal(a.conditional, b.conditional)
