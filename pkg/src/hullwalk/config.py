"""Experiment configuration files.

One setting per line, ``section/key = value``.  A ``[section]`` header line
makes the following bare ``key = value`` lines belong to that section.
``#`` starts a comment.  Unknown keys are errors.

Example::

    experiment/kind = mean-intrinsic
    experiment/seed = 20240101
    experiment/n_list = 500, 2000, 8000
    experiment/m_list = 1
    experiment/replications = 400
    law/dim = 2
    law/alpha = 2
    law/structure = gaussian
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .stable import DiscreteSpectral, Gaussian, RotInv, SpecError, StableLawSpec

KINDS = (
    "mean-intrinsic",
    "drift-scaling",
    "timespace-volume",
    "variance",
    "vysotsky-crosscheck",
    "distribution-probe",
    "limit-table",
)

DEFAULT_SPHERE_DIRECTIONS = 4096
DEFAULT_ROTATIONS = 1024

KNOWN_KEYS = {
    "experiment": {"kind", "seed", "n_list", "m_list", "replications", "d_list", "output", "samples"},
    "law": {"dim", "alpha", "structure", "covariance", "gamma", "directions", "weights", "symmetric", "mu"},
    "mc": {"sphere_directions", "rotations", "vm_method"},
}


class ConfigError(ValueError):
    def __init__(self, message: str, key: str | None = None):
        super().__init__(message if key is None or key in message else f"{key}: {message}")
        self.key = key


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    kind: str
    seed: int
    spec: StableLawSpec | None
    n_list: tuple[int, ...] = ()
    m_list: tuple[int, ...] = (1,)
    replications: int = 0
    samples: int | None = None
    d_list: tuple[int, ...] = (2, 3, 4)
    sphere_directions: int = DEFAULT_SPHERE_DIRECTIONS
    rotations: int = DEFAULT_ROTATIONS
    vm_method: str = "auto"
    output: str | None = None
    entries: dict = field(default_factory=dict)  # normalised "section/key" -> raw value

    def echo(self) -> str:
        return "".join(f"{k} = {v}\n" for k, v in self.entries.items())


def read_entries(text: str) -> dict[str, str]:
    entries: dict[str, str] = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in KNOWN_KEYS:
                raise ConfigError(f"unknown section [{section}] on line {lineno}", section)
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'section/key = value'")
        key, value = (p.strip() for p in line.split("=", 1))
        if "/" not in key:
            if section is None:
                raise ConfigError(f"line {lineno}: key {key!r} has no section", key)
            key = f"{section}/{key}"
        sec, _, name = key.partition("/")
        if sec not in KNOWN_KEYS or name not in KNOWN_KEYS[sec]:
            raise ConfigError(f"unknown key {key!r} on line {lineno}", key)
        if key in entries:
            raise ConfigError(f"duplicate key {key!r} on line {lineno}", key)
        entries[key] = value
    return entries


def _int(entries, key, default=None, minimum=None) -> int:
    if key not in entries:
        if default is None:
            raise ConfigError(f"missing required key {key!r}", key)
        return default
    try:
        v = int(entries[key])
    except ValueError:
        raise ConfigError(f"malformed integer {entries[key]!r}", key) from None
    if minimum is not None and v < minimum:
        raise ConfigError(f"must be >= {minimum}, got {v}", key)
    return v


def _float(entries, key, default=None) -> float:
    if key not in entries:
        if default is None:
            raise ConfigError(f"missing required key {key!r}", key)
        return default
    try:
        return float(entries[key])
    except ValueError:
        raise ConfigError(f"malformed number {entries[key]!r}", key) from None


def _int_list(entries, key, default=None) -> tuple[int, ...]:
    if key not in entries:
        if default is None:
            raise ConfigError(f"missing required key {key!r}", key)
        return default
    try:
        vals = tuple(int(p) for p in entries[key].replace(",", " ").split())
    except ValueError:
        raise ConfigError(f"malformed integer list {entries[key]!r}", key) from None
    if not vals:
        raise ConfigError("list must be nonempty", key)
    return vals


def _vector(entries, key) -> np.ndarray:
    try:
        return np.array([float(p) for p in entries[key].replace(",", " ").split()])
    except ValueError:
        raise ConfigError(f"malformed vector {entries[key]!r}", key) from None


def _matrix(entries, key) -> np.ndarray:
    try:
        rows = [[float(p) for p in r.replace(",", " ").split()] for r in entries[key].split(";") if r.strip()]
        return np.array(rows, dtype=float)
    except ValueError:
        raise ConfigError(f"malformed matrix {entries[key]!r}", key) from None


def _bool(entries, key, default: bool) -> bool:
    if key not in entries:
        return default
    v = entries[key].lower()
    if v in ("true", "yes", "1"):
        return True
    if v in ("false", "no", "0"):
        return False
    raise ConfigError(f"malformed boolean {entries[key]!r}", key)


def build_spec(entries: dict[str, str]) -> StableLawSpec:
    d = _int(entries, "law/dim", minimum=1)
    alpha = _float(entries, "law/alpha")
    if not 0 < alpha <= 2:
        raise ConfigError(f"alpha must lie in (0, 2], got {entries['law/alpha']}", "law/alpha")
    default_structure = "gaussian" if alpha == 2 else "rotinv"
    kind = entries.get("law/structure", default_structure).lower()
    if kind == "gaussian":
        cov = _matrix(entries, "law/covariance") if "law/covariance" in entries else np.eye(d)
        structure = Gaussian(cov)
    elif kind == "rotinv":
        structure = RotInv(_float(entries, "law/gamma", 1.0))
    elif kind == "spectral":
        if "law/directions" not in entries:
            raise ConfigError("spectral structure needs directions", "law/directions")
        dirs = _matrix(entries, "law/directions")
        w = _vector(entries, "law/weights") if "law/weights" in entries else np.ones(len(dirs))
        structure = DiscreteSpectral(dirs, w, _bool(entries, "law/symmetric", True))
    else:
        raise ConfigError(f"unknown structure {kind!r}", "law/structure")
    mu = _vector(entries, "law/mu") if "law/mu" in entries else None
    try:
        return StableLawSpec(d, alpha, structure, mu)
    except SpecError as exc:
        raise ConfigError(str(exc), f"law/{exc.key}" if exc.key else None) from None


def config_from_entries(entries: dict[str, str]) -> ExperimentConfig:
    if "experiment/kind" not in entries:
        raise ConfigError("missing required key 'experiment/kind'", "experiment/kind")
    kind = entries["experiment/kind"]
    if kind not in KINDS:
        raise ConfigError(f"unknown experiment kind {kind!r}", "experiment/kind")
    seed = _int(entries, "experiment/seed", minimum=0)
    common = dict(
        kind=kind,
        seed=seed,
        sphere_directions=_int(entries, "mc/sphere_directions", DEFAULT_SPHERE_DIRECTIONS, minimum=1),
        rotations=_int(entries, "mc/rotations", DEFAULT_ROTATIONS, minimum=1),
        vm_method=entries.get("mc/vm_method", "auto"),
        output=entries.get("experiment/output"),
        entries=dict(entries),
    )
    if common["vm_method"] not in ("auto", "kubota"):
        raise ConfigError(f"unknown method {common['vm_method']!r}", "mc/vm_method")
    if kind == "limit-table":
        d_list = _int_list(entries, "experiment/d_list", (2, 3, 4))
        if any(d < 1 for d in d_list):
            raise ConfigError("dimensions must be >= 1", "experiment/d_list")
        return ExperimentConfig(spec=None, d_list=d_list, **common)

    spec = build_spec(entries)
    n_list = _int_list(entries, "experiment/n_list")
    if n_list[0] < 1 or any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ConfigError("n_list must be positive and strictly increasing", "experiment/n_list")
    m_list = _int_list(entries, "experiment/m_list", (1,))
    if any(not 1 <= m <= spec.dim for m in m_list):
        raise ConfigError(f"m values must lie in 1..{spec.dim}", "experiment/m_list")
    reps = _int(entries, "experiment/replications")
    if reps < 2:
        raise ConfigError(f"replications must be >= 2, got {reps}", "experiment/replications")
    samples = _int(entries, "experiment/samples", reps, minimum=2)

    if kind in ("drift-scaling", "timespace-volume") and not spec.has_drift:
        raise ConfigError(f"{kind} needs a nonzero drift", "law/mu")
    if kind == "timespace-volume" and (spec.alpha != 2 or spec.dim < 2):
        raise ConfigError("timespace-volume needs Gaussian steps in d >= 2", "law/alpha")
    if kind == "vysotsky-crosscheck" and (spec.has_drift or spec.alpha <= 1):
        raise ConfigError("vysotsky-crosscheck needs alpha > 1 and zero drift", "law/mu")
    if kind in ("mean-intrinsic", "variance", "distribution-probe") and spec.alpha <= 1:
        raise ConfigError("mean functionals need alpha > 1", "law/alpha")
    return ExperimentConfig(spec=spec, n_list=n_list, m_list=m_list, replications=reps, samples=samples, **common)


def parse_config_text(text: str) -> ExperimentConfig:
    return config_from_entries(read_entries(text))


def parse_config(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    return parse_config_text(text)
