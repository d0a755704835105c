import math

import numpy as np
import pytest
from scipy import stats

from hullwalk.montecarlo import stream
from hullwalk.stable import (
    DiscreteSpectral,
    Gaussian,
    RotInv,
    SpecError,
    StableLawSpec,
    expected_norm_X1,
    gaussian_spec,
    normalization,
    positive_stable_laplace,
    sample_scalar_stable,
    sample_step,
    sample_steps,
    second_central_moment,
)

ROT15 = StableLawSpec(2, 1.5, RotInv(1.0))
CROSS = StableLawSpec(2, 1.5, DiscreteSpectral(np.vstack([np.eye(2), -np.eye(2)]), np.ones(4)))


# ---------------------------------------------------------------------------
# scalar sampler


def test_gaussian_case_variance_two():
    x = sample_scalar_stable(2.0, 0.0, stream(1, 0), 10**6)
    assert np.var(x) == pytest.approx(2.0, rel=0.02)


def test_cauchy_median():
    x = sample_scalar_stable(1.0, 0.0, stream(1, 1), 10**6)
    assert abs(np.median(x)) < 0.01


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5, 1.9])
def test_symmetric_characteristic_function(alpha):
    x = sample_scalar_stable(alpha, 0.0, stream(1, 2), 10**6)
    for t in (0.5, 1.0):
        assert np.mean(np.cos(t * x)) == pytest.approx(math.exp(-(t**alpha)), rel=0.005)


@pytest.mark.parametrize("alpha, beta", [(1.5, 1.0), (0.7, -0.5), (1.2, 0.3)])
def test_skewed_characteristic_function(alpha, beta):
    x = sample_scalar_stable(alpha, beta, stream(1, 3), 10**6)
    t = 1.0
    phi = np.mean(np.exp(1j * t * x))
    expected = np.exp(-(t**alpha) * (1 - 1j * beta * math.tan(math.pi * alpha / 2)))
    assert abs(phi - expected) < 5e-3


def test_positive_stable_laplace_transform():
    a = positive_stable_laplace(0.75, stream(1, 4), 10**6)
    assert np.all(a > 0)
    for lam in (0.5, 1.0, 2.0):
        assert np.mean(np.exp(-lam * a)) == pytest.approx(math.exp(-(lam**0.75)), rel=5e-3)


def test_scalar_returns_float_and_validates():
    assert isinstance(sample_scalar_stable(1.5, 0.0, stream(0, 0)), float)
    with pytest.raises(SpecError):
        sample_scalar_stable(2.5, 0.0, stream(0, 0))
    with pytest.raises(SpecError):
        sample_scalar_stable(1.5, 1.5, stream(0, 0))


# ---------------------------------------------------------------------------
# spec validation


def test_spec_validation():
    with pytest.raises(SpecError, match="alpha"):
        StableLawSpec(2, 2.5, RotInv())
    with pytest.raises(SpecError, match="drift not supported for alpha ≤ 1"):
        StableLawSpec(2, 0.9, RotInv(), mu=[1.0, 0.0])
    with pytest.raises(SpecError, match="Gaussian"):
        StableLawSpec(2, 1.5, Gaussian(np.eye(2)))
    with pytest.raises(SpecError):
        StableLawSpec(2, 2.0, RotInv())
    with pytest.raises(SpecError, match="positive semidefinite"):
        gaussian_spec(2, [[1.0, 0.0], [0.0, -1.0]])
    with pytest.raises(SpecError, match="symmetric"):
        gaussian_spec(2, [[1.0, 0.5], [0.0, 1.0]])
    with pytest.raises(SpecError, match="unit"):
        StableLawSpec(2, 1.5, DiscreteSpectral([[1.0, 1.0]], [1.0]))
    with pytest.raises(SpecError):
        StableLawSpec(2, 1.0, DiscreteSpectral([[1.0, 0.0]], [1.0], symmetric=False))
    with pytest.raises(SpecError):
        StableLawSpec(2, 1.5, RotInv(0.0))
    # alpha = 1 is fine when symmetric and drift free
    StableLawSpec(2, 1.0, RotInv())


# ---------------------------------------------------------------------------
# vector steps


def test_gaussian_step_norm():
    y = sample_steps(gaussian_spec(2), 10**6, stream(2, 0))
    assert np.mean(np.linalg.norm(y, axis=1)) == pytest.approx(math.sqrt(math.pi / 2), rel=0.01)


def test_gaussian_step_covariance_and_drift():
    cov = np.array([[2.0, 0.6], [0.6, 1.0]])
    y = sample_steps(gaussian_spec(2, cov, mu=[1.0, -1.0]), 10**6, stream(2, 1))
    np.testing.assert_allclose(y.mean(axis=0), [1.0, -1.0], atol=5e-3)
    np.testing.assert_allclose(np.cov(y.T), cov, atol=0.01)


def test_rotinv_characteristic_function():
    y = sample_steps(ROT15, 10**6, stream(2, 2))
    for theta in (0.0, 1.0, 2.5):
        xi = np.array([math.cos(theta), math.sin(theta)])
        assert np.mean(np.cos(y @ xi)) == pytest.approx(math.exp(-1), rel=0.01)


def test_rotinv_gamma_scaling():
    spec = StableLawSpec(3, 1.2, RotInv(2.0))
    y = sample_steps(spec, 10**6, stream(2, 3))
    xi = np.array([0.0, 0.5, 0.0])
    assert np.mean(np.cos(y @ xi)) == pytest.approx(math.exp(-2.0 * 0.5**1.2), rel=0.01)


def test_discrete_spectral_exchange_symmetry():
    y = sample_steps(CROSS, 10**6, stream(2, 4))
    a, b = np.mean(np.abs(y[:, 0])), np.mean(np.abs(y[:, 1]))
    assert a == pytest.approx(b, rel=0.02)


def test_discrete_spectral_weights():
    spec = StableLawSpec(2, 1.5, DiscreteSpectral([[1.0, 0.0]], [3.0]))
    y = sample_steps(spec, 10**6, stream(2, 5))
    assert np.all(y[:, 1] == 0)
    # characteristic exponent of w^(1/alpha) Z is w |t|^alpha
    assert np.mean(np.cos(y[:, 0])) == pytest.approx(math.exp(-3.0), rel=0.02)


@pytest.mark.parametrize(
    "spec", [gaussian_spec(2), gaussian_spec(3), ROT15, CROSS], ids=["gauss2", "gauss3", "rotinv", "cross"]
)
def test_symmetric_mean_is_small(spec):
    y = sample_steps(spec, 10**6, stream(3, 0))
    assert np.linalg.norm(y.mean(axis=0)) <= 4 * np.std(y[:, 0]) / 10**3


def test_gaussian_sum_covariance():
    cov = np.array([[1.0, 0.3], [0.3, 0.5]])
    rng = stream(3, 2)
    sums = sample_steps(gaussian_spec(2, cov), 100 * 100_000, rng).reshape(100_000, 100, 2).sum(axis=1) / 10
    np.testing.assert_allclose(np.cov(sums.T), cov, rtol=0.03, atol=0.01)


def test_rotinv_projection_distribution_is_direction_free():
    y = sample_steps(ROT15, 10**5, stream(3, 3))
    z = sample_steps(ROT15, 10**5, stream(3, 4))
    base = y[:, 0]
    crit = 1.6276 * math.sqrt(2 / 10**5)
    for k in range(8):
        theta = 2 * math.pi * k / 8 + 0.1
        proj = z @ [math.cos(theta), math.sin(theta)]
        assert stats.ks_2samp(base, proj).statistic < crit


@pytest.mark.parametrize("spec", [ROT15, StableLawSpec(2, 1.2, RotInv()), CROSS], ids=["rot15", "rot12", "cross"])
def test_heavy_tail_exponent(spec):
    y = sample_steps(spec, 10**7, stream(3, 5))
    r = np.linalg.norm(y, axis=1)
    t = np.logspace(1, 3, 12)
    tail = np.array([np.mean(r > s) for s in t])
    slope = np.polyfit(np.log(t), np.log(tail), 1)[0]
    assert abs(slope + spec.alpha) <= 0.15


def test_steps_are_prefix_consistent():
    for spec in (gaussian_spec(3), ROT15, CROSS):
        long = sample_steps(spec, 500, stream(4, 1))
        short = sample_steps(spec, 123, stream(4, 1))
        np.testing.assert_array_equal(long[:123], short)
    assert sample_step(ROT15, stream(4, 2)).shape == (2,)


# ---------------------------------------------------------------------------
# normalisation and moments


def test_normalization_examples():
    b, a = normalization(StableLawSpec(2, 1.5, RotInv()), 8)
    assert b == pytest.approx(4.0)
    np.testing.assert_array_equal(a, [0, 0])
    spec = StableLawSpec(2, 1.8, RotInv(), mu=[1.0, 0.0])
    np.testing.assert_allclose(normalization(spec, 100)[1], [100.0, 0.0])
    b, a = normalization(StableLawSpec(2, 0.7, RotInv()), 10**6)
    np.testing.assert_array_equal(a, [0, 0])
    assert b == pytest.approx(10 ** (6 / 0.7))
    assert normalization(ROT15, 1)[0] == 1.0
    bs = [normalization(ROT15, n)[0] for n in range(1, 50)]
    assert all(x < y for x, y in zip(bs, bs[1:]))
    with pytest.raises(ValueError):
        normalization(ROT15, 0)


def test_expected_norm_gaussian():
    est3 = expected_norm_X1(gaussian_spec(3), 10**6, 1)
    assert est3.mean == pytest.approx(2 * math.sqrt(2 / math.pi), rel=0.01)
    est2 = expected_norm_X1(gaussian_spec(2), 10**6, 1)
    assert est2.mean == pytest.approx(math.sqrt(math.pi / 2), rel=0.01)


def test_expected_norm_rotinv_stable_under_doubling():
    a = expected_norm_X1(ROT15, 500_000, 1)
    b = expected_norm_X1(ROT15, 1_000_000, 2)
    assert a.mean > 0
    assert abs(a.mean - b.mean) <= 2 * math.hypot(a.std_error, b.std_error)


def test_expected_norm_needs_first_moment():
    with pytest.raises(SpecError, match="first moment infinite"):
        expected_norm_X1(StableLawSpec(2, 0.9, RotInv()), 10)


def test_second_central_moment():
    assert second_central_moment(gaussian_spec(2)) == 2.0
    assert second_central_moment(gaussian_spec(2, np.diag([1.0, 3.0]), mu=[5.0, 0.0])) == 4.0
    assert second_central_moment(ROT15) == math.inf


def test_scaled_spec():
    y1 = sample_steps(ROT15, 1000, stream(5, 0))
    y2 = sample_steps(ROT15.scaled(3.0), 1000, stream(5, 0))
    np.testing.assert_allclose(y2, 3.0 * y1, rtol=1e-12)
