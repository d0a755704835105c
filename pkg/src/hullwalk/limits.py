"""Closed-form limit constants for hulls of random walks and their sub-results."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import kappa
from .montecarlo import McEstimate
from .stable import Gaussian, RotInv, StableLawSpec, expected_norm_X1
from .walk import drift_frame


class FormulaId(str, enum.Enum):
    GAMMA_RATIO = "GammaRatio"
    BM_VM = "BM_Vm"
    ROTINV_VM = "RotInv_Vm"
    V1_STABLE = "V1Stable"
    TIMESPACE_VOL = "TimeSpaceVol"
    DRIFT_V1 = "DriftV1"
    DRIFT_STEINER = "DriftSteinerPoint"
    DRIFT_VD = "DriftVd"


@dataclass(frozen=True)
class LimitConstant:
    value: float
    formula_id: FormulaId
    parameters: dict = field(default_factory=dict)
    vector: np.ndarray | None = None

    @property
    def label(self) -> str:
        args = ";".join(f"{k}={v}" for k, v in self.parameters.items())
        return f"{self.formula_id.value}({args})"


def gamma_ratio_constant(alpha: float, m: int) -> float:
    """``alpha Gamma(1/alpha)^m / (m Gamma(m/alpha))``."""
    if not 1 < alpha <= 2:
        raise ValueError("alpha must lie in (1, 2]")
    if m < 1:
        raise ValueError("m must be >= 1")
    return alpha * math.exp(m * math.lgamma(1 / alpha) - math.lgamma(m / alpha)) / m


def bm_expected_Vm(d: int, m: int) -> float:
    """``E V_m`` of the hull of standard Brownian motion on [0, 1] in R^d."""
    if not 1 <= m <= d:
        raise ValueError("need 1 <= m <= d")
    log = (
        math.log(math.comb(d, m))
        + m / 2 * math.log(math.pi / 2)
        + math.lgamma((d - m) / 2 + 1)
        - math.lgamma(m / 2 + 1)
        - math.lgamma(d / 2 + 1)
    )
    return math.exp(log)


def rotinv_expected_Vm(alpha: float, gamma: float, d: int, m: int) -> float:
    """``E V_m`` of the hull of a rotation-invariant stable process on [0, 1].

    The process has characteristic exponent ``gamma |xi|^alpha``.  At
    alpha = 2 it is Brownian motion with covariance ``2 gamma I``.
    """
    if not 1 < alpha <= 2:
        raise ValueError("alpha must lie in (1, 2]")
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if not 1 <= m <= d:
        raise ValueError("need 1 <= m <= d")
    if alpha == 2:
        return bm_expected_Vm(d, m) * (2 * gamma) ** (m / 2)
    log = (
        math.log(math.comb(d, m) * kappa(d) / kappa(d - m) * alpha / m)
        + m * (math.lgamma(1 / alpha) + math.lgamma(1 - 1 / alpha) - math.log(math.pi))
        - math.lgamma(m / alpha)
        + m / alpha * math.log(gamma)
    )
    return math.exp(log)


def v1_stable_limit(spec: StableLawSpec, mc_samples: int = 1_000_000, rng_seed: int = 0) -> McEstimate:
    """``alpha * E|X(1)|`` by Monte Carlo, for any drift-free law with alpha > 1."""
    if spec.has_drift:
        raise ValueError("v1_stable_limit needs zero drift")
    est = expected_norm_X1(spec, mc_samples, rng_seed)
    a = spec.alpha
    return McEstimate(a * est.mean, a * est.std_error, est.replications, est.seed)


def timespace_volume_constant(d: int) -> float:
    """Mean volume of the hull of time-space Brownian motion ``(t, B(t))``, t in [0, 1]."""
    if d < 2:
        raise ValueError("d must be >= 2")
    return 2 ** ((d + 1) / 2) * math.pi ** ((d - 1) / 2) / math.factorial(d + 1)


def chi_sqrt_moment(k: int) -> float:
    """``E sqrt(chi^2_k)``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return math.sqrt(2) * math.exp(math.lgamma((k + 1) / 2) - math.lgamma(k / 2))


def dirichlet_limit(d: int) -> float:
    """``pi^(d/2) / Gamma(d/2)``."""
    if d < 1:
        raise ValueError("d must be >= 1")
    return math.pi ** (d / 2) / math.gamma(d / 2)


def convolve_sequences(a, b, n: int | None = None) -> np.ndarray:
    """Discrete convolution ``(a * b)_k = sum_j a_j b_{k-j}``, truncated to ``k <= n``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    out = np.convolve(a, b)
    return out if n is None else out[: n + 1]


def sequence_convolution_limit(alpha: float, m: int, n: int) -> float:
    """``n^(-m/alpha) sum_{k<=n} a^{*m}_k`` with ``a_0 = 0``, ``a_k = k^(1/alpha - 1)``.

    Tends to :func:`gamma_ratio_constant` as n grows.  Only ``m - 2`` full
    convolutions are formed; the last one is folded into the final sum through
    prefix sums.
    """
    if not 1 < alpha <= 2:
        raise ValueError("alpha must lie in (1, 2]")
    if m < 1 or n < m:
        raise ValueError("need m >= 1 and n >= m")
    a = np.zeros(n + 1)
    a[1:] = np.arange(1, n + 1, dtype=float) ** (1 / alpha - 1)
    if m == 1:
        total = float(np.sum(a))
    else:
        c = a
        for _ in range(m - 2):
            c = convolve_sequences(c, a, n)
        prefix = np.cumsum(c)
        # sum_{k<=n} (c * a)_k = sum_j a_j * prefix(n - j)
        total = float(np.dot(a, prefix[::-1]))
    return total / float(n) ** (m / alpha)


def perp_covariance_det(covariance, mu) -> float:
    """Determinant of the covariance restricted to the hyperplane orthogonal to ``mu``."""
    frame = drift_frame(mu)
    cov = frame.T @ np.asarray(covariance, dtype=float) @ frame.T.T
    return float(np.linalg.det(cov[1:, 1:])) if cov.shape[0] > 1 else 1.0


def drift_limits(mu, sigma_perp_det: float | None, d: int):
    """Limits of ``V_1(n)/n``, ``p(n)/n`` and (finite variance) ``V_d(n)/n^((d+1)/2)``."""
    mu = np.asarray(mu, dtype=float).reshape(-1)
    norm = float(np.linalg.norm(mu))
    if norm == 0:
        raise ValueError("drift must be nonzero")
    params = {"d": d, "mu": tuple(float(x) for x in mu)}
    v1 = LimitConstant(norm, FormulaId.DRIFT_V1, params)
    steiner = LimitConstant(norm / 2, FormulaId.DRIFT_STEINER, params, vector=mu / 2)
    vd = None
    if sigma_perp_det is not None:
        if sigma_perp_det < 0:
            raise ValueError("determinant must be nonnegative")
        vd = LimitConstant(
            norm * math.sqrt(sigma_perp_det) * timespace_volume_constant(d),
            FormulaId.DRIFT_VD,
            {**params, "det_perp": sigma_perp_det},
        )
    return v1, steiner, vd


def variance_upper_bound(n: int, second_central_moment: float) -> float:
    """``n E|Y - mu|^2``, an upper bound for ``Var V_1(n)``."""
    if n < 0 or second_central_moment < 0:
        raise ValueError("inputs must be nonnegative")
    return n * second_central_moment


def closed_form_mean_limit(spec: StableLawSpec, m: int) -> LimitConstant | None:
    """Limit of ``E V_m(n)`` under the natural scaling, when a closed form exists.

    Zero drift: ``E V_m(n) / b_n^m``.  Drift: ``E V_1(n) / n`` and, for
    Gaussian steps, ``E V_d(n) / n^((d+1)/2)``.  Returns None otherwise.
    """
    d, s = spec.dim, spec.structure
    if spec.has_drift:
        if m == 1:
            return drift_limits(spec.mu, None, d)[0]
        if m == d and isinstance(s, Gaussian) and d >= 2:
            det = perp_covariance_det(s.covariance, spec.mu)
            return drift_limits(spec.mu, det, d)[2]
        return None
    if spec.alpha <= 1:
        return None
    if isinstance(s, Gaussian):
        cov = s.covariance
        c = cov[0, 0]
        if c > 0 and np.allclose(cov, c * np.eye(d), rtol=0, atol=1e-12 * c):
            return LimitConstant(bm_expected_Vm(d, m) * c ** (m / 2), FormulaId.BM_VM, {"d": d, "m": m})
        return None
    if isinstance(s, RotInv):
        value = rotinv_expected_Vm(spec.alpha, s.gamma, d, m)
        return LimitConstant(value, FormulaId.ROTINV_VM, {"alpha": spec.alpha, "gamma": s.gamma, "d": d, "m": m})
    return None


def limit_table(d: int) -> list[LimitConstant]:
    """Closed-form constants available in dimension ``d``."""
    if d < 1:
        raise ValueError("d must be >= 1")
    rows = [LimitConstant(bm_expected_Vm(d, m), FormulaId.BM_VM, {"d": d, "m": m}) for m in range(1, d + 1)]
    rows += [LimitConstant(gamma_ratio_constant(2.0, m), FormulaId.GAMMA_RATIO, {"alpha": 2, "m": m})
             for m in range(1, d + 1)]
    if d >= 2:
        rows.append(LimitConstant(timespace_volume_constant(d), FormulaId.TIMESPACE_VOL, {"d": d}))
    return rows
