import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hullwalk.limits import (
    FormulaId,
    bm_expected_Vm,
    chi_sqrt_moment,
    closed_form_mean_limit,
    convolve_sequences,
    dirichlet_limit,
    drift_limits,
    gamma_ratio_constant,
    limit_table,
    perp_covariance_det,
    rotinv_expected_Vm,
    sequence_convolution_limit,
    timespace_volume_constant,
    v1_stable_limit,
    variance_upper_bound,
)
from hullwalk.stable import DiscreteSpectral, RotInv, StableLawSpec, expected_norm_X1, gaussian_spec


def test_gamma_ratio_examples():
    assert gamma_ratio_constant(2, 1) == pytest.approx(2.0, rel=1e-14)
    assert gamma_ratio_constant(2, 2) == pytest.approx(math.pi, rel=1e-14)
    assert gamma_ratio_constant(1.5, 2) == pytest.approx(1.5 * math.gamma(2 / 3) ** 2 / (2 * math.gamma(4 / 3)), rel=1e-13)
    assert gamma_ratio_constant(1.5, 2) == pytest.approx(1.5400, abs=5e-5)


@settings(max_examples=100)
@given(st.floats(1.0001, 2.0))
def test_gamma_ratio_m1_is_alpha(alpha):
    assert gamma_ratio_constant(alpha, 1) == pytest.approx(alpha, rel=1e-12)


def test_bm_examples():
    assert bm_expected_Vm(2, 1) == pytest.approx(math.sqrt(2 * math.pi), rel=1e-14)
    assert bm_expected_Vm(2, 2) == pytest.approx(math.pi / 2, rel=1e-14)
    assert bm_expected_Vm(3, 1) == pytest.approx(4 * math.sqrt(2) / math.sqrt(math.pi), rel=1e-14)


@pytest.mark.parametrize("d", range(1, 11))
def test_bm_v1_matches_mean_width_expression(d):
    expr = 2 * math.sqrt(2) * math.gamma((d + 1) / 2) / math.gamma(d / 2)
    assert bm_expected_Vm(d, 1) == pytest.approx(expr, rel=1e-12)


def test_rotinv_value_by_direct_evaluation():
    # the m = 1, d = 2 constant reduces to alpha * Gamma(1 - 1/alpha)
    assert rotinv_expected_Vm(1.5, 1.0, 2, 1) == pytest.approx(1.5 * math.gamma(1 / 3), rel=1e-13)
    assert rotinv_expected_Vm(1.5, 1.0, 2, 1) == pytest.approx(4.0184078, rel=1e-7)


@settings(max_examples=60)
@given(
    st.floats(1.05, 1.95),
    st.floats(0.1, 10.0),
    st.floats(0.1, 10.0),
    st.integers(1, 5).flatmap(lambda d: st.tuples(st.just(d), st.integers(1, d))),
)
def test_rotinv_homogeneity(alpha, gamma, c, dm):
    d, m = dm
    a = rotinv_expected_Vm(alpha, c * gamma, d, m)
    b = c ** (m / alpha) * rotinv_expected_Vm(alpha, gamma, d, m)
    assert a == pytest.approx(b, rel=1e-12)


def test_rotinv_alpha_two_defers_to_brownian():
    assert rotinv_expected_Vm(2.0, 0.5, 3, 2) == pytest.approx(bm_expected_Vm(3, 2), rel=1e-14)
    assert rotinv_expected_Vm(2.0, 1.0, 2, 1) == pytest.approx(math.sqrt(2) * bm_expected_Vm(2, 1), rel=1e-14)


def test_rotinv_continuous_towards_alpha_two():
    assert rotinv_expected_Vm(1.9999999, 1.0, 3, 2) == pytest.approx(rotinv_expected_Vm(2.0, 1.0, 3, 2), rel=1e-5)


def test_rotinv_m1_matches_expected_norm():
    spec = StableLawSpec(2, 1.5, RotInv(1.0))
    est = expected_norm_X1(spec, 10**6, 3)
    assert abs(1.5 * est.mean - rotinv_expected_Vm(1.5, 1.0, 2, 1)) <= 3 * 1.5 * est.std_error


def test_v1_stable_limit_gaussian_d2():
    est = v1_stable_limit(gaussian_spec(2), 10**6, 1)
    assert abs(est.mean - math.sqrt(2 * math.pi)) <= 3 * est.std_error


def test_v1_stable_limit_rotinv():
    est = v1_stable_limit(StableLawSpec(2, 1.5, RotInv(1.0)), 10**6, 2)
    assert abs(est.mean - rotinv_expected_Vm(1.5, 1.0, 2, 1)) <= 3 * est.std_error


def test_v1_stable_limit_spectral_self_consistent():
    spec = StableLawSpec(3, 1.7, DiscreteSpectral(np.eye(3), [1.0, 2.0, 0.5]))
    a = v1_stable_limit(spec, 500_000, 1)
    b = v1_stable_limit(spec, 1_000_000, 2)
    assert 0 < a.mean < math.inf
    assert abs(a.mean - b.mean) <= 3 * math.hypot(a.std_error, b.std_error)


def test_timespace_examples():
    assert timespace_volume_constant(2) == pytest.approx(2 * math.sqrt(2) * math.sqrt(math.pi) / 6, rel=1e-14)
    assert timespace_volume_constant(2) == pytest.approx(0.8355, abs=5e-5)
    assert timespace_volume_constant(3) == pytest.approx(math.pi / 6, rel=1e-14)
    assert timespace_volume_constant(4) == pytest.approx(0.2625, abs=5e-5)


def test_chi_and_dirichlet():
    assert chi_sqrt_moment(1) == pytest.approx(math.sqrt(2 / math.pi), rel=1e-14)
    assert chi_sqrt_moment(2) == pytest.approx(math.sqrt(math.pi / 2), rel=1e-14)
    assert chi_sqrt_moment(3) == pytest.approx(2 * math.sqrt(2 / math.pi), rel=1e-14)
    assert dirichlet_limit(1) == pytest.approx(1.0, rel=1e-14)
    assert dirichlet_limit(2) == pytest.approx(math.pi, rel=1e-14)
    assert dirichlet_limit(3) == pytest.approx(2 * math.pi, rel=1e-14)


def test_convolve_all_ones():
    n = 37
    ones = np.ones(n + 1)
    assert convolve_sequences(ones, ones, n)[n] == n + 1
    assert len(convolve_sequences(ones, ones, n)) == n + 1


def test_convolution_limit_brute_force():
    alpha, n = 1.5, 18
    a = [0.0] + [k ** (1 / alpha - 1) for k in range(1, n + 1)]
    for m in (1, 2, 3):
        total = sum(
            math.prod(a[j] for j in js)
            for js in itertools.product(range(1, n + 1), repeat=m)
            if sum(js) <= n
        )
        assert sequence_convolution_limit(alpha, m, n) == pytest.approx(total / n ** (m / alpha), rel=1e-12)


def test_convolution_limit_m1_alpha2_large_n():
    assert sequence_convolution_limit(2.0, 1, 10**6) == pytest.approx(2.0, rel=1e-3)


def test_convolution_limit_example():
    assert sequence_convolution_limit(1.5, 2, 10**5) == pytest.approx(1.5400, rel=0.01)


@pytest.mark.parametrize("alpha, m", list(itertools.product([1.2, 1.5, 1.8, 2.0], [1, 2, 3])))
def test_convolution_limit_gap_shrinks(alpha, m):
    target = gamma_ratio_constant(alpha, m)
    gap_small = abs(sequence_convolution_limit(alpha, m, 10**3) - target)
    gap_large = abs(sequence_convolution_limit(alpha, m, 10**5) - target)
    assert gap_large < gap_small


def test_drift_limits_examples():
    v1, p, vd = drift_limits([3.0, 4.0], None, 2)
    assert v1.value == 5.0
    np.testing.assert_allclose(p.vector, [1.5, 2.0])
    assert vd is None
    _, _, vd = drift_limits([1.0, 0.0], 1.0, 2)
    assert vd.value == pytest.approx(0.8355, abs=5e-5)
    _, _, vd4 = drift_limits([1.0, 0.0], 4.0, 2)
    assert vd4.value == pytest.approx(2 * vd.value, rel=1e-14)
    assert vd4.formula_id == FormulaId.DRIFT_VD


def test_perp_covariance_det():
    assert perp_covariance_det(np.diag([5.0, 2.0, 3.0]), [1.0, 0.0, 0.0]) == pytest.approx(6.0)
    assert perp_covariance_det(np.eye(3), [1.0, 1.0, 1.0]) == pytest.approx(1.0)


def test_variance_bound_examples():
    assert variance_upper_bound(100, 2.0) == 200.0
    assert variance_upper_bound(0, 2.0) == 0.0


def test_closed_form_mean_limit_dispatch():
    assert closed_form_mean_limit(gaussian_spec(2), 1).value == pytest.approx(math.sqrt(2 * math.pi))
    assert closed_form_mean_limit(gaussian_spec(2, 4 * np.eye(2)), 2).value == pytest.approx(4 * math.pi / 2)
    assert closed_form_mean_limit(gaussian_spec(2, np.diag([1.0, 2.0])), 1) is None
    assert closed_form_mean_limit(StableLawSpec(2, 1.5, RotInv()), 1).formula_id == FormulaId.ROTINV_VM
    assert closed_form_mean_limit(gaussian_spec(2, mu=[3.0, 4.0]), 1).value == 5.0
    assert closed_form_mean_limit(gaussian_spec(2, mu=[1.0, 0.0]), 2).value == pytest.approx(timespace_volume_constant(2))
    assert closed_form_mean_limit(gaussian_spec(3, mu=[1.0, 0.0, 0.0]), 2) is None
    spectral = StableLawSpec(2, 1.5, DiscreteSpectral(np.eye(2), [1.0, 1.0]))
    assert closed_form_mean_limit(spectral, 1) is None


def test_limit_table_contains_headline_constants():
    values = [c.value for d in (2, 3, 4) for c in limit_table(d)]
    for target in (math.sqrt(2 * math.pi), math.pi / 2, timespace_volume_constant(2), math.pi / 6):
        assert any(abs(v - target) < 1e-12 for v in values)
