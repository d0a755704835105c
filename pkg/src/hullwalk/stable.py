"""Step distributions in the domain of attraction of alpha-stable laws.

The scalar "standard" stable law has characteristic function
``exp(-|t|^alpha (1 - i beta sign(t) tan(pi alpha / 2)))`` for alpha != 1,
so the symmetric case is ``exp(-|t|^alpha)``.  At alpha = 2 this is a normal
with variance 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.special import ndtri

from .montecarlo import McEstimate, stream

PSD_TOL = 1e-10
UNIT_TOL = 1e-12


class SpecError(ValueError):
    """Invalid step-law specification; ``key`` names the offending field."""

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message)
        self.key = key


@dataclass(frozen=True)
class Gaussian:
    covariance: np.ndarray

    @property
    def symmetric(self) -> bool:
        return True


@dataclass(frozen=True)
class RotInv:
    gamma: float = 1.0

    @property
    def symmetric(self) -> bool:
        return True


@dataclass(frozen=True)
class DiscreteSpectral:
    """Independent scalar stables along fixed directions.

    With ``symmetric=False`` each scalar is totally skewed (beta = 1).
    """

    directions: np.ndarray
    weights: np.ndarray
    symmetric: bool = True


Structure = Union[Gaussian, RotInv, DiscreteSpectral]


@dataclass(frozen=True, eq=False)
class StableLawSpec:
    dim: int
    alpha: float
    structure: Structure
    mu: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        d = int(self.dim)
        if d < 1:
            raise SpecError("dim must be >= 1", "dim")
        object.__setattr__(self, "dim", d)
        a = float(self.alpha)
        if not (0 < a <= 2) or math.isnan(a):
            raise SpecError(f"alpha must lie in (0, 2], got {self.alpha}", "alpha")
        object.__setattr__(self, "alpha", a)
        mu = np.zeros(d) if self.mu is None else np.asarray(self.mu, dtype=float).reshape(-1)
        if mu.shape != (d,) or not np.all(np.isfinite(mu)):
            raise SpecError(f"drift must be a finite vector of length {d}", "mu")
        object.__setattr__(self, "mu", mu)

        s = self.structure
        if isinstance(s, Gaussian):
            if a != 2:
                raise SpecError("Gaussian structure requires alpha = 2", "alpha")
            cov = np.asarray(s.covariance, dtype=float)
            if cov.shape != (d, d):
                raise SpecError(f"covariance must be {d}x{d}", "covariance")
            if np.max(np.abs(cov - cov.T), initial=0.0) > PSD_TOL:
                raise SpecError("covariance must be symmetric", "covariance")
            if np.linalg.eigvalsh(0.5 * (cov + cov.T)).min() < -PSD_TOL:
                raise SpecError("covariance must be positive semidefinite", "covariance")
            object.__setattr__(self, "structure", Gaussian(0.5 * (cov + cov.T)))
        elif isinstance(s, RotInv):
            if a == 2:
                raise SpecError("alpha = 2 requires Gaussian structure", "alpha")
            if not s.gamma > 0:
                raise SpecError("gamma must be positive", "gamma")
        elif isinstance(s, DiscreteSpectral):
            if a == 2:
                raise SpecError("alpha = 2 requires Gaussian structure", "alpha")
            dirs = np.atleast_2d(np.asarray(s.directions, dtype=float))
            w = np.asarray(s.weights, dtype=float).reshape(-1)
            if dirs.shape[1] != d or dirs.shape[0] != w.size or w.size == 0:
                raise SpecError("need one weight per direction in R^d", "directions")
            if np.any(np.abs(np.linalg.norm(dirs, axis=1) - 1) > UNIT_TOL):
                raise SpecError("spectral directions must be unit vectors", "directions")
            if np.any(w <= 0):
                raise SpecError("spectral weights must be positive", "weights")
            object.__setattr__(self, "structure", DiscreteSpectral(dirs, w, bool(s.symmetric)))
        else:
            raise SpecError(f"unknown structure {type(s).__name__}", "structure")

        if a <= 1 and np.any(mu != 0):
            raise SpecError("drift not supported for alpha ≤ 1", "mu")
        if a == 1 and not self.structure.symmetric:
            raise SpecError("alpha = 1 requires a symmetric structure", "symmetric")

    @property
    def has_drift(self) -> bool:
        return bool(np.any(self.mu != 0))

    def without_drift(self) -> "StableLawSpec":
        return StableLawSpec(self.dim, self.alpha, self.structure, np.zeros(self.dim))

    def scaled(self, c: float) -> "StableLawSpec":
        """Law of ``c * Y``."""
        s = self.structure
        if isinstance(s, Gaussian):
            new = Gaussian(c * c * s.covariance)
        elif isinstance(s, RotInv):
            new = RotInv(s.gamma * c ** self.alpha)
        else:
            new = DiscreteSpectral(s.directions, s.weights * c ** self.alpha, s.symmetric)
        return StableLawSpec(self.dim, self.alpha, new, c * self.mu)


def gaussian_spec(d: int, covariance=None, mu=None) -> StableLawSpec:
    cov = np.eye(d) if covariance is None else covariance
    return StableLawSpec(d, 2.0, Gaussian(np.asarray(cov, dtype=float)), mu)


# ---------------------------------------------------------------------------
# scalar sampler


def _open_uniform(rng: np.random.Generator, shape) -> np.ndarray:
    # rng.random lies on the 2^-53 grid in [0, 1); the half-step shift gives (0, 1)
    return rng.random(shape) + 2.0 ** -54


def _cms(alpha: float, beta: float, u: np.ndarray, e: np.ndarray) -> np.ndarray:
    """Chambers-Mallows-Stuck transform of two independent open uniforms."""
    v = math.pi * (u - 0.5)
    w = -np.log(e)
    if alpha == 1:
        half = math.pi / 2 + beta * v
        return (half * np.tan(v) - beta * np.log(math.pi / 2 * w * np.cos(v) / half)) / (math.pi / 2)
    t = beta * math.tan(math.pi * alpha / 2)
    b = math.atan(t) / alpha
    s = (1 + t * t) ** (1 / (2 * alpha))
    ab = alpha * (v + b)
    return s * np.sin(ab) / np.cos(v) ** (1 / alpha) * (np.cos(v - ab) / w) ** ((1 - alpha) / alpha)


def _check_alpha_beta(alpha, beta):
    if not 0 < alpha <= 2:
        raise SpecError(f"alpha must lie in (0, 2], got {alpha}", "alpha")
    if not -1 <= beta <= 1:
        raise SpecError(f"beta must lie in [-1, 1], got {beta}", "beta")


def sample_scalar_stable(alpha: float, beta: float, rng: np.random.Generator, size=None):
    """Standard alpha-stable variates by the Chambers-Mallows-Stuck transform.

    Parameters
    ----------
    alpha : float
        Stability index in (0, 2].
    beta : float
        Skewness in [-1, 1].
    rng : numpy.random.Generator
    size : int or tuple, optional
        Output shape; a scalar is returned when omitted.
    """
    _check_alpha_beta(alpha, beta)
    if alpha == 2:
        x = math.sqrt(2.0) * rng.standard_normal(size)
        return float(x) if size is None else x
    shape = () if size is None else (size,) if np.isscalar(size) else tuple(size)
    u = _open_uniform(rng, shape + (2,))
    x = _cms(alpha, beta, u[..., 0], u[..., 1])
    return float(x) if size is None else x


def _positive_stable(alpha_half: float, u: np.ndarray, e: np.ndarray) -> np.ndarray:
    # the beta = 1 standard variate S has E exp(-lam S) = exp(-lam^a / cos(pi a / 2));
    # rescaling by cos(pi a / 2)^(1/a) removes the cosine
    c = math.cos(math.pi * alpha_half / 2) ** (1 / alpha_half)
    return c * _cms(alpha_half, 1.0, u, e)


def positive_stable_laplace(alpha_half: float, rng: np.random.Generator, size) -> np.ndarray:
    """Positive stable variates ``A`` with ``E exp(-lam A) = exp(-lam^alpha_half)``."""
    _check_alpha_beta(alpha_half, 1.0)
    u = _open_uniform(rng, (size, 2) if np.isscalar(size) else tuple(size) + (2,))
    return _positive_stable(alpha_half, u[..., 0], u[..., 1])


# ---------------------------------------------------------------------------
# vector steps


def sample_steps(spec: StableLawSpec, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` i.i.d. steps as a ``(count, d)`` array.

    All randomness for step ``i`` comes from row ``i`` of one row-major draw,
    so the first ``k`` steps do not depend on ``count``: walks drawn from the
    same stream are prefixes of each other.
    """
    d, a, s = spec.dim, spec.alpha, spec.structure
    if isinstance(s, Gaussian):
        vals, vecs = np.linalg.eigh(s.covariance)
        root = (vecs * np.sqrt(np.clip(vals, 0, None))) @ vecs.T
        out = rng.standard_normal((count, d)) @ root
    elif isinstance(s, RotInv):
        # sqrt(A) * N(0, 2 gamma^(2/alpha) I) has characteristic function exp(-gamma |xi|^alpha)
        u = _open_uniform(rng, (count, d + 2))
        amp = np.sqrt(_positive_stable(a / 2, u[:, 0], u[:, 1]))
        amp *= math.sqrt(2.0) * s.gamma ** (1 / a)
        out = amp[:, None] * ndtri(u[:, 2:])
    else:
        beta = 0.0 if s.symmetric else 1.0
        k = s.weights.size
        u = _open_uniform(rng, (count, 2 * k))
        z = _cms(a, beta, u[:, :k], u[:, k:])
        out = (z * s.weights ** (1 / a)) @ s.directions
    if spec.has_drift:
        out += spec.mu
    return out


def sample_step(spec: StableLawSpec, rng: np.random.Generator) -> np.ndarray:
    return sample_steps(spec, 1, rng)[0]


# ---------------------------------------------------------------------------
# normalisation and moments


@dataclass(frozen=True)
class NormalizationPlan:
    alpha: float
    mu: np.ndarray

    def b(self, n) -> float:
        return float(n) ** (1 / self.alpha)

    def a(self, n) -> np.ndarray:
        if self.alpha > 1:
            return float(n) * self.mu
        return np.zeros_like(self.mu)

    def a_path(self, n: int) -> np.ndarray:
        """Centerings ``a_0..a_n`` stacked as rows."""
        k = np.arange(n + 1, dtype=float)[:, None]
        return k * (self.mu if self.alpha > 1 else np.zeros_like(self.mu))


def normalization_plan(spec: StableLawSpec) -> NormalizationPlan:
    return NormalizationPlan(spec.alpha, spec.mu.copy())


def normalization(spec: StableLawSpec, n: int) -> tuple[float, np.ndarray]:
    """``(b_n, a_n)`` with ``b_n = n^(1/alpha)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    plan = normalization_plan(spec)
    return plan.b(n), plan.a(n)


def expected_norm_X1(spec: StableLawSpec, mc_samples: int = 1_000_000, rng_seed: int = 0) -> McEstimate:
    """Monte Carlo ``E|X(1)|`` for one step of the drift-free law."""
    if spec.alpha <= 1:
        raise SpecError("first moment infinite", "alpha")
    rng = stream(rng_seed, 11)
    base = spec.without_drift()
    chunk = 250_000
    norms = np.concatenate([
        np.linalg.norm(sample_steps(base, min(chunk, mc_samples - lo), rng), axis=1)
        for lo in range(0, mc_samples, chunk)
    ])
    return McEstimate.from_samples(norms, rng_seed)


def second_central_moment(spec: StableLawSpec) -> float:
    """``E|Y - mu|^2``: the covariance trace, or infinity for alpha < 2."""
    if isinstance(spec.structure, Gaussian):
        return float(np.trace(spec.structure.covariance))
    return math.inf
