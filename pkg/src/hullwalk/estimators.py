"""Monte Carlo estimators for hulls of random walks.

Every replicate ``r`` draws its walk from the stream ``(seed, tag, r, k)``;
``k`` separates independent walks used within one replicate.  Because the
step sampler is prefix-consistent, replicate ``r`` at length ``n`` is the
prefix of replicate ``r`` at any longer length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial
from itertools import combinations

import numpy as np
from scipy import stats

from .geometry import convex_hull, intrinsic_volume, steiner_point
from .montecarlo import McEstimate, VectorEstimate, jackknife_variance, map_replicates, stream
from .stable import StableLawSpec, sample_steps
from .walk import WalkPath, apply_psi_n, drift_frame, generate_walk

TAG_HULL = 1
TAG_VYSOTSKY = 2
TAG_GRAM = 3

VYSOTSKY_BUDGET = 2500
KS_C_01 = math.sqrt(-math.log(0.005) / 2)  # 1.6276, asymptotic 1% two-sample constant


class BudgetError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Gram determinants


def gram_det_sqrt(vectors, rel_tol: float = 1e-12) -> float:
    """``sqrt(det <x_k, x_l>)``: the m-volume spanned by the rows of ``vectors``.

    Computed from the triangular factor of a QR decomposition; returns 0 when
    the vectors are numerically dependent.
    """
    x = np.atleast_2d(np.asarray(vectors, dtype=float))
    m, d = x.shape
    if m > d:
        return 0.0
    norms = np.linalg.norm(x, axis=1)
    if np.any(norms == 0):
        return 0.0
    r = np.abs(np.diag(np.linalg.qr(x.T, mode="r")))
    if np.any(r <= rel_tol * norms.max()):
        return 0.0
    return float(np.prod(r))


def gram_det_sqrt_batch(x: np.ndarray) -> np.ndarray:
    """Vectorised :func:`gram_det_sqrt` over leading axes of ``(..., m, d)``."""
    x = np.asarray(x, dtype=float)
    m = x.shape[-2]
    if m == 1:
        return np.linalg.norm(x[..., 0, :], axis=-1)
    if m == 2:
        # Lagrange identity: |a|^2 |b|^2 - <a, b>^2 = sum_{i<j} (a_i b_j - a_j b_i)^2
        a, b = x[..., 0, :], x[..., 1, :]
        d = x.shape[-1]
        acc = np.zeros(x.shape[:-2])
        for i in range(d):
            for j in range(i + 1, d):
                acc += (a[..., i] * b[..., j] - a[..., j] * b[..., i]) ** 2
        return np.sqrt(acc)
    r = np.linalg.qr(np.swapaxes(x, -1, -2), mode="r")
    return np.abs(np.prod(np.diagonal(r, axis1=-2, axis2=-1), axis=-1))


def gram_limit_mc(spec: StableLawSpec, m: int, mc_samples: int = 100_000, rng_seed=0) -> McEstimate:
    """``E sqrt(det <X^(k)(1), X^(l)(1)>)`` over ``m`` independent copies of ``X(1)``."""
    if spec.alpha <= 1:
        raise ValueError("first moment infinite")
    if spec.has_drift:
        raise ValueError("gram limit needs zero drift")
    if not 1 <= m <= spec.dim:
        raise ValueError("need 1 <= m <= d")
    x = sample_steps(spec, mc_samples * m, stream(rng_seed, TAG_GRAM)).reshape(mc_samples, m, spec.dim)
    return McEstimate.from_samples(gram_det_sqrt_batch(x), rng_seed)


# ---------------------------------------------------------------------------
# per-replicate hull functionals


@dataclass(frozen=True)
class HullOptions:
    vm_method: str = "auto"
    num_directions: int = 4096
    num_rotations: int = 1024


def _walk(spec, n, seed, tag, rep, k=0) -> np.ndarray:
    return generate_walk(spec, n, (seed, tag, rep, k)).points


def _vm_values(ms, spec, n, seed, opts: HullOptions, rep: int) -> np.ndarray:
    hull = convex_hull(_walk(spec, n, seed, TAG_HULL, rep))
    return np.array([
        intrinsic_volume(hull, m, opts.num_directions, opts.num_rotations, (seed, TAG_HULL, rep),
                         method=opts.vm_method).value
        for m in ms
    ])


def _steiner_values(spec, n, seed, opts: HullOptions, rep: int) -> np.ndarray:
    hull = convex_hull(_walk(spec, n, seed, TAG_HULL, rep))
    return steiner_point(hull, opts.num_directions, (seed, TAG_HULL, rep)).value


def replicate_intrinsic_volumes(
    spec: StableLawSpec, n: int, ms, replications: int, rng_seed: int,
    options: HullOptions | None = None, workers: int = 1,
) -> np.ndarray:
    """``V_m`` of each replicate hull, shape ``(replications, len(ms))``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    ms = tuple(int(m) for m in ms)
    if any(not 1 <= m <= spec.dim for m in ms):
        raise ValueError(f"m must lie in 1..{spec.dim}")
    fn = partial(_vm_values, ms, spec, n, rng_seed, options or HullOptions())
    return map_replicates(fn, replications, workers).reshape(replications, len(ms))


def empirical_mean_Vm(
    spec: StableLawSpec, n: int, m: int, replications: int, rng_seed: int,
    vm_method: str = "auto", workers: int = 1, **mc,
) -> McEstimate:
    """Mean of ``V_m(conv{S(0..n)})`` across independent replicate walks."""
    opts = HullOptions(vm_method, **mc)
    v = replicate_intrinsic_volumes(spec, n, (m,), replications, rng_seed, opts, workers)
    return McEstimate.from_samples(v[:, 0], rng_seed)


def empirical_variance_Vm(
    spec: StableLawSpec, n: int, m: int, replications: int, rng_seed: int,
    vm_method: str = "auto", workers: int = 1, **mc,
) -> McEstimate:
    """Sample variance of ``V_m(n)`` with a jackknife standard error."""
    opts = HullOptions(vm_method, **mc)
    v = replicate_intrinsic_volumes(spec, n, (m,), replications, rng_seed, opts, workers)
    var, se = jackknife_variance(v[:, 0])
    return McEstimate(var, se, replications, rng_seed)


def empirical_steiner_point(
    spec: StableLawSpec, n: int, replications: int, rng_seed: int, workers: int = 1, **mc,
) -> VectorEstimate:
    """Mean Steiner point of the replicate hulls."""
    if n < 1:
        raise ValueError("n must be >= 1")
    fn = partial(_steiner_values, spec, n, rng_seed, HullOptions(**mc))
    pts = map_replicates(fn, replications, workers).reshape(replications, spec.dim)
    return VectorEstimate.from_samples(pts, rng_seed)


# ---------------------------------------------------------------------------
# Vysotsky's combinatorial formula


def vysotsky_tuples(n: int, m: int) -> np.ndarray:
    """All ``(j_1..j_m)`` with ``j_k >= 1`` and ``j_1 + ... + j_m <= n``.

    There are ``C(n, m)`` of them: partial sums ``j_1 < j_1 + j_2 < ...``
    are exactly the m-subsets of ``{1..n}``.
    """
    cuts = np.array(list(combinations(range(1, n + 1), m)), dtype=np.intp).reshape(-1, m)
    return np.diff(cuts, axis=1, prepend=0)


def _vysotsky_values(spec, n, m, tuples, weights, seed, reps) -> list[float]:
    out = []
    for rep in reps:
        walks = np.stack([_walk(spec, n, seed, TAG_VYSOTSKY, rep, k) for k in range(m)])
        # vectors S^(k)(j_k) for every tuple: (T, m, d)
        vecs = walks[np.arange(m)[None, :], tuples]
        out.append(float(np.dot(gram_det_sqrt_batch(vecs), weights)))
    return out


def _vysotsky_chunk(args, rep):
    spec, n, m, tuples, weights, seed = args
    return _vysotsky_values(spec, n, m, tuples, weights, seed, [rep])[0]


def vysotsky_mean_Vm(
    spec: StableLawSpec, n: int, m: int, mc_samples: int, rng_seed: int,
    workers: int = 1, budget: int = VYSOTSKY_BUDGET,
) -> McEstimate:
    """``E V_m(n)`` through the tuple sum over independent walks.

    Each sample draws ``m`` independent walks and evaluates
    ``(1/m!) sum Delta(S^(1)(j_1), ..., S^(m)(j_m)) / (j_1 ... j_m)`` over all
    tuples, sharing the walk prefixes between tuples.
    """
    if spec.alpha <= 1 or spec.has_drift:
        raise ValueError("tuple-sum estimator needs alpha > 1 and zero drift")
    if not 1 <= m <= spec.dim or n < m:
        raise ValueError("need 1 <= m <= d and n >= m")
    if math.comb(n, m) > budget:
        raise BudgetError(f"instance too large: {math.comb(n, m)} tuples exceed the budget of {budget}")
    tuples = vysotsky_tuples(n, m)
    weights = 1.0 / (np.prod(tuples, axis=1) * math.factorial(m))
    # walk k enters only through its own position S^(k)(j_k)
    fn = partial(_vysotsky_chunk, (spec, n, m, tuples, weights, rng_seed))
    return McEstimate.from_samples(map_replicates(fn, mc_samples, workers), rng_seed)


# ---------------------------------------------------------------------------
# distributional probes


def scaled_hull_functional(spec: StableLawSpec, points: np.ndarray, n: int, functional: str, rng_seed=0) -> float:
    """A hull functional after the natural rescaling of the walk.

    Zero drift: ``V_m / b_n^m`` and ``|p| / b_n``.  With drift the walk is
    first mapped through the drift frame scaling, so ``V_d`` is divided by
    ``n b_n^(d-1)``.
    """
    if spec.has_drift:
        frame = drift_frame(spec.mu)
        pts = apply_psi_n(WalkPath(spec, n, points), frame, n)
        scale = 1.0
    else:
        pts = points
        scale = float(n) ** (1 / spec.alpha)
    hull = convex_hull(pts)
    if functional == "SteinerNorm":
        return float(np.linalg.norm(steiner_point(hull, rng_seed=rng_seed).value)) / scale
    if functional.startswith("V") and functional[1:].isdigit():
        m = int(functional[1:])
        if not 1 <= m <= spec.dim:
            raise ValueError(f"functional {functional} out of range")
        return intrinsic_volume(hull, m, rng_seed=rng_seed).value / scale**m
    raise ValueError(f"unknown functional {functional!r}")


def _probe_value(spec, n, functional, seed, rep):
    pts = _walk(spec, n, seed, TAG_HULL, rep)
    return scaled_hull_functional(spec, pts, n, functional, (seed, TAG_HULL, rep))


def hull_distribution_probe(
    spec: StableLawSpec, n: int, replications: int, functional: str, rng_seed: int, workers: int = 1,
) -> np.ndarray:
    """Sorted sample of the rescaled functional across replicate walks."""
    fn = partial(_probe_value, spec, n, functional, rng_seed)
    return np.sort(map_replicates(fn, replications, workers))


@dataclass(frozen=True)
class KsResult:
    statistic: float
    critical: float

    @property
    def passed(self) -> bool:
        return self.statistic < self.critical


def ks_two_sample(x, y) -> KsResult:
    """Two-sample Kolmogorov-Smirnov statistic against its asymptotic 1% critical value."""
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    stat = float(stats.ks_2samp(x, y).statistic)
    crit = KS_C_01 * math.sqrt((x.size + y.size) / (x.size * y.size))
    return KsResult(stat, crit)
