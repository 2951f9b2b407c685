import numpy as np
import pytest
from scipy import stats

from dccause.discrete import estimate_joint
from dccause.errors import ConfigError
from dccause.synth import (DiscreteModel, gen_anm, gen_random_pmf, gen_reference_set_model,
                           make_rng, parse_noise_domain, sample_model, sample_to_csv)


def test_random_pmf_size_30_weights():
    pmf = gen_random_pmf(30, make_rng(1))
    assert abs(pmf.sum() - 1) <= 1e-12
    # weights are recovered by rescaling; all integers in {1..7}
    weights = pmf * make_rng(1).integers(1, 8, size=30).sum()
    np.testing.assert_allclose(weights, np.rint(weights), atol=1e-9)
    assert set(np.rint(weights).astype(int)) <= set(range(1, 8))


def test_random_pmf_size_4_uniform():
    np.testing.assert_array_equal(gen_random_pmf(4, make_rng(9)), np.full(4, 0.25))


def test_random_pmf_rejects_empty():
    with pytest.raises(ConfigError):
        gen_random_pmf(0, make_rng(0))


def test_random_pmf_deterministic():
    np.testing.assert_array_equal(gen_random_pmf(30, make_rng(3, 4)), gen_random_pmf(30, make_rng(3, 4)))


@pytest.mark.parametrize("domain,size", [((0, 1), 2), ((-1, 0, 1), 3), ("-2..2", 5), ("-3..3", 7)])
def test_anm_domains(domain, size):
    model = gen_anm(make_rng(size), noise_domain=domain)
    assert model.noise_support.shape == (size,)
    assert abs(model.px.sum() - 1) <= 1e-12
    assert abs(model.noise_pmf.sum() - 1) <= 1e-12
    assert model.f.min() >= 1 and model.f.max() <= 30
    lo, hi = model.noise_support[0], model.noise_support[-1]
    assert model.y_support.min() >= 1 + lo and model.y_support.max() <= 30 + hi
    expected = np.unique((model.f[:, None] + model.noise_support[None, :]).ravel())
    np.testing.assert_array_equal(model.y_support, expected)
    np.testing.assert_allclose(model.conditional.sum(axis=1), 1, atol=1e-12)


def test_noise_domain_parsing():
    assert parse_noise_domain("-2..2") == (-2, -1, 0, 1, 2)
    assert parse_noise_domain("0,1") == (0, 1)
    for bad in ("", "0,2", "a..b", []):
        with pytest.raises(ConfigError):
            parse_noise_domain(bad)


@pytest.mark.parametrize("size,pool", [(12, 3), (15, 3), (18, 4), (20, 5)])
def test_reference_set_pool(size, pool):
    model = gen_reference_set_model(make_rng(size), size, size)
    assert model.references.shape == (pool, size)
    for row in model.conditional:
        assert any(np.array_equal(row, ref) for ref in model.references)
    np.testing.assert_allclose(model.conditional.sum(axis=1), 1, atol=1e-12)


def test_reference_set_size_checks():
    with pytest.raises(ConfigError):
        gen_reference_set_model(make_rng(0), 3, 15)
    assert gen_reference_set_model(make_rng(0), 15, 15, n_references=5).references.shape[0] == 5


def test_point_mass_noise_is_deterministic():
    model = gen_anm(make_rng(2), noise_domain=(0,))
    sample = sample_model(model, 2000, make_rng(3))
    f = dict(zip(model.x_support.tolist(), model.f.tolist()))
    assert all(y == f[x] for x, y in sample.records())


def test_same_seed_same_sample():
    model = gen_reference_set_model(make_rng(4))
    a = sample_model(model, 500, make_rng(8))
    b = sample_model(model, 500, make_rng(8))
    np.testing.assert_array_equal(a.x, b.x)
    np.testing.assert_array_equal(a.y, b.y)


def _aligned_empirical(model, sample):
    joint = estimate_joint(sample)
    emp = np.zeros_like(model.joint())
    xi = np.searchsorted(model.x_support, joint.x_support)
    yi = np.searchsorted(model.y_support, joint.y_support)
    emp[np.ix_(xi, yi)] = joint.p
    return emp, joint.counts


def test_empirical_joint_within_l1_small_models():
    close = 0
    for t in range(100):
        model = gen_anm(make_rng(21, t, 0), x_size=4, y0_size=4, noise_domain=(0, 1))
        emp, _ = _aligned_empirical(model, sample_model(model, 4000, make_rng(21, t, 1)))
        close += np.abs(emp - model.joint()).sum() < 0.1
    assert close >= 95


@pytest.mark.parametrize("family", ["anm", "reference_set"])
def test_empirical_joint_matches_multinomial_error(family):
    # benchmark-size models have too many cells for a fixed L1 bound at n=4000,
    # so compare the mean L1 against its multinomial expectation instead
    n = 4000
    observed, expected, pvals = [], [], []
    for t in range(100):
        if family == "anm":
            model = gen_anm(make_rng(22, t, 0), noise_domain=(-3, -2, -1, 0, 1, 2, 3))
        else:
            model = gen_reference_set_model(make_rng(22, t, 0))
        p = model.joint()
        emp, _ = _aligned_empirical(model, sample_model(model, n, make_rng(22, t, 1)))
        observed.append(np.abs(emp - p).sum())
        q = p[p > 0]
        expected.append(np.sum(np.sqrt(2 * q * (1 - q) / (np.pi * n))))
        counts = np.rint(emp * n)[p > 0]
        pvals.append(stats.chisquare(counts, q * n).pvalue)
    assert np.mean(observed) == pytest.approx(np.mean(expected), rel=0.05)
    assert np.mean(np.array(pvals) < 0.05) <= 0.12


def test_model_json_round_trip():
    for model in (gen_anm(make_rng(5), noise_domain="-1..1"), gen_reference_set_model(make_rng(6))):
        back = DiscreteModel.from_json(model.to_json())
        assert back.kind == model.kind
        np.testing.assert_array_equal(back.conditional, model.conditional)
        np.testing.assert_array_equal(back.y_support, model.y_support)
        assert '"truth": "x_causes_y"' in model.to_json()


def test_sample_csv():
    model = gen_anm(make_rng(7), x_size=4, y0_size=4)
    text = sample_to_csv(sample_model(model, 3, make_rng(1)))
    lines = text.splitlines()
    assert lines[0] == "x,y" and len(lines) == 4
    assert not sample_to_csv(sample_model(model, 3, make_rng(1)), header=False).startswith("x")
