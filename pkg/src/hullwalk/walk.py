"""Random-walk paths and the rescaling maps applied to them."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .montecarlo import stream
from .stable import NormalizationPlan, StableLawSpec, sample_steps

FRAME_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class WalkPath:
    spec: StableLawSpec
    n: int
    points: np.ndarray  # (n + 1, d), points[0] = 0
    seed: int | None = None
    stream_id: tuple = ()


def generate_walk(spec: StableLawSpec, n: int, rng_stream, seed: int | None = None) -> WalkPath:
    """Walk ``S(0) = 0, S(k) = Y_1 + ... + Y_k`` for ``k <= n``.

    ``rng_stream`` is either a numpy Generator or a key tuple
    ``(seed, *stream_id)`` passed to :func:`hullwalk.montecarlo.stream`.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    stream_id: tuple = ()
    if isinstance(rng_stream, np.random.Generator):
        rng = rng_stream
    else:
        key = tuple(int(k) for k in rng_stream)
        seed, stream_id = key[0], key[1:]
        rng = stream(*key)
    pts = np.zeros((n + 1, spec.dim))
    if n:
        np.cumsum(sample_steps(spec, n, rng), axis=0, out=pts[1:])
    return WalkPath(spec, n, pts, seed, stream_id)


def center_scale(path: WalkPath, plan: NormalizationPlan) -> np.ndarray:
    """``(S(k) - a_k) / b_n`` for ``k = 0..n``."""
    n = path.n
    return (path.points - plan.a_path(n)) / plan.b(max(n, 1))


@dataclass(frozen=True, eq=False)
class DriftFrame:
    """Orthonormal basis ``e_bar`` (rows of ``T``) with ``e_bar_1 = mu / |mu|``."""

    mu: np.ndarray
    T: np.ndarray

    @property
    def basis(self) -> np.ndarray:
        return self.T


def drift_frame(mu) -> DriftFrame:
    """Gram-Schmidt on ``mu`` followed by the standard basis.

    The standard vector most parallel to ``mu`` (lowest index on ties) is
    skipped.  Completion vectors are signed so their first nonzero coordinate
    is positive; the first row always equals ``mu / |mu|``.
    """
    mu = np.asarray(mu, dtype=float).reshape(-1)
    norm = np.linalg.norm(mu)
    if norm == 0 or not np.isfinite(norm):
        raise ValueError("drift frame needs a nonzero drift")
    d = mu.size
    skip = int(np.argmax(np.abs(mu)))
    rows = [mu / norm]
    for j in range(d):
        if j == skip:
            continue
        v = np.zeros(d)
        v[j] = 1.0
        for _ in range(2):  # re-orthogonalise for accuracy
            for r in rows:
                v -= (v @ r) * r
        v /= np.linalg.norm(v)
        nz = np.flatnonzero(np.abs(v) > FRAME_TOL)
        if nz.size and v[nz[0]] < 0:
            v = -v
        rows.append(v)
    return DriftFrame(mu, np.array(rows))


def frame_coordinates(points, frame: DriftFrame) -> np.ndarray:
    return np.asarray(points, dtype=float) @ frame.T.T


def apply_psi_n(path: WalkPath, frame: DriftFrame, n: int | None = None) -> np.ndarray:
    """Frame coordinates with the drift axis divided by ``n`` and the rest by ``b_n``."""
    spec = path.spec
    if not spec.has_drift:
        raise ValueError("use center_scale")
    if spec.alpha <= 1:
        raise ValueError("drift scaling needs alpha > 1")
    n = path.n if n is None else n
    if n < 1:
        raise ValueError("n must be >= 1")
    scale = np.full(spec.dim, float(n) ** (1 / spec.alpha))
    scale[0] = n
    return frame_coordinates(path.points, frame) / scale


def psi_n_determinant(spec: StableLawSpec, n: int) -> float:
    """Jacobian of the drift scaling: ``1 / (n * b_n^(d-1))``."""
    return 1.0 / (n * float(n) ** ((spec.dim - 1) / spec.alpha))


def bounding_box_in_frame(path: WalkPath, frame: DriftFrame) -> np.ndarray:
    """Per frame axis ``(min, max)`` of the path, shape ``(d, 2)``."""
    c = frame_coordinates(path.points, frame)
    return np.stack([c.min(axis=0), c.max(axis=0)], axis=1)
