"""Runs configured experiments and writes ``results.csv`` plus ``manifest.txt``."""

from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .config import ExperimentConfig
from .estimators import (
    empirical_mean_Vm,
    empirical_variance_Vm,
    hull_distribution_probe,
    ks_two_sample,
    vysotsky_mean_Vm,
)
from .limits import LimitConstant, closed_form_mean_limit, limit_table
from .stable import StableLawSpec

HEADER = ("experiment", "n", "m", "scaling", "estimate", "std_error", "limit", "rel_error", "seed")


@dataclass(frozen=True)
class Row:
    experiment: str
    n: int
    m: int
    scaling: str
    estimate: float
    std_error: float | None
    limit: float | None
    seed: int

    @property
    def rel_error(self) -> float | None:
        if self.limit is None:
            return None
        return abs(self.estimate - self.limit) / abs(self.limit) if self.limit else abs(self.estimate)


@dataclass
class ExperimentRecord:
    config: ExperimentConfig
    rows: list[Row] = field(default_factory=list)
    row_seeds: list[tuple[str, int, int, int]] = field(default_factory=list)  # (module, n, m, seed)
    wall_time: float = 0.0
    samples: list[tuple[int, int, float]] = field(default_factory=list)  # raw probe draws

    def sorted_rows(self) -> list[Row]:
        return sorted(self.rows, key=lambda r: (r.n, r.m, r.experiment))


# ---------------------------------------------------------------------------
# scaling dispatch


def _b(spec: StableLawSpec, n: int) -> float:
    return float(n) ** (1 / spec.alpha)


SCALINGS = {
    "b_n^m": lambda spec, n, m: _b(spec, n) ** m,
    "n": lambda spec, n, m: float(n),
    "n^((m+1)/2)": lambda spec, n, m: float(n) ** ((m + 1) / 2),
    "n*b_n^(d-1)": lambda spec, n, m: n * _b(spec, n) ** (spec.dim - 1),
    "n^(m+1)": lambda spec, n, m: float(n) ** (m + 1),
    "b_n^(2m)": lambda spec, n, m: _b(spec, n) ** (2 * m),
}


def scaling_label(spec: StableLawSpec, m: int, kind: str = "mean") -> str:
    """Name of the normalisation applied to ``V_m(n)`` (or its variance)."""
    if kind == "variance":
        return "n^(m+1)" if spec.has_drift else "b_n^(2m)"
    if not spec.has_drift:
        return "b_n^m"
    if m == 1:
        return "n"
    if m == spec.dim:
        return "n*b_n^(d-1)"
    return "n^((m+1)/2)"


def scaling_value(label: str, spec: StableLawSpec, n: int, m: int) -> float:
    return SCALINGS[label](spec, n, m)


def row_seed(seed: int, index: int, part: int = 0) -> int:
    """Integer seed for row ``index`` derived from the global seed."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(index), int(part)))
    return int(ss.generate_state(1, np.uint32)[0])


# ---------------------------------------------------------------------------
# experiment kinds


def _grid(cfg: ExperimentConfig, ms=None):
    ms = cfg.m_list if ms is None else ms
    return [(i, n, m) for i, (n, m) in enumerate((n, m) for n in cfg.n_list for m in ms)]


def _limit_value(lim: LimitConstant | None) -> float | None:
    return None if lim is None else lim.value


def _run_means(cfg: ExperimentConfig, rec: ExperimentRecord, workers: int, ms=None):
    spec = cfg.spec
    for i, n, m in _grid(cfg, ms):
        seed = row_seed(cfg.seed, i)
        label = scaling_label(spec, m)
        scale = scaling_value(label, spec, n, m)
        est = empirical_mean_Vm(spec, n, m, cfg.replications, seed, cfg.vm_method, workers,
                                num_directions=cfg.sphere_directions, num_rotations=cfg.rotations)
        rec.rows.append(Row(cfg.kind, n, m, label, est.mean / scale, est.std_error / scale,
                            _limit_value(closed_form_mean_limit(spec, m)), seed))
        rec.row_seeds.append(("estimators", n, m, seed))


def _run_timespace(cfg, rec, workers):
    _run_means(cfg, rec, workers, ms=(cfg.spec.dim,))


def _run_variance(cfg, rec, workers):
    spec = cfg.spec
    for i, n, m in _grid(cfg):
        seed = row_seed(cfg.seed, i)
        label = scaling_label(spec, m, "variance")
        scale = scaling_value(label, spec, n, m)
        est = empirical_variance_Vm(spec, n, m, cfg.replications, seed, cfg.vm_method, workers,
                                    num_directions=cfg.sphere_directions, num_rotations=cfg.rotations)
        rec.rows.append(Row(cfg.kind, n, m, label, est.mean / scale, est.std_error / scale, None, seed))
        rec.row_seeds.append(("estimators", n, m, seed))


def _run_vysotsky(cfg, rec, workers):
    spec = cfg.spec
    for i, n, m in _grid(cfg):
        s_v, s_h = row_seed(cfg.seed, i, 0), row_seed(cfg.seed, i, 1)
        vys = vysotsky_mean_Vm(spec, n, m, cfg.samples, s_v, workers)
        hull = empirical_mean_Vm(spec, n, m, cfg.samples, s_h, cfg.vm_method, workers,
                                 num_directions=cfg.sphere_directions, num_rotations=cfg.rotations)
        rec.rows.append(Row(f"{cfg.kind}/vysotsky", n, m, "1", vys.mean, vys.std_error, None, s_v))
        rec.rows.append(Row(f"{cfg.kind}/hull", n, m, "1", hull.mean, hull.std_error, None, s_h))
        rec.row_seeds += [("estimators.vysotsky", n, m, s_v), ("estimators.hull", n, m, s_h)]


def _run_probe(cfg, rec, workers):
    spec = cfg.spec
    label = "psi_n" if spec.has_drift else "b_n^m"
    for i, n, m in _grid(cfg):
        s_a, s_b = row_seed(cfg.seed, i, 0), row_seed(cfg.seed, i, 1)
        a = hull_distribution_probe(spec, n, cfg.replications, f"V{m}", s_a, workers)
        b = hull_distribution_probe(spec, 4 * n, cfg.replications, f"V{m}", s_b, workers)
        ks = ks_two_sample(a, b)
        se = float(np.std(a, ddof=1) / math.sqrt(a.size))
        rec.rows.append(Row(f"{cfg.kind}/mean", n, m, label, float(a.mean()), se, None, s_a))
        rec.rows.append(Row(f"{cfg.kind}/ks", n, m, f"ks(n;4n) crit={ks.critical:.6g}", ks.statistic, None, None, s_b))
        rec.row_seeds += [("estimators.probe", n, m, s_a), ("estimators.probe", 4 * n, m, s_b)]
        rec.samples += [(n, m, v) for v in a] + [(4 * n, m, v) for v in b]


def _run_limit_table(cfg, rec, workers):
    for d in cfg.d_list:
        for lim in limit_table(d):
            m = int(lim.parameters.get("m", d))
            rec.rows.append(Row(f"{cfg.kind}/{lim.formula_id.value}", d, m, lim.label, lim.value, 0.0, lim.value, cfg.seed))


RUNNERS = {
    "mean-intrinsic": _run_means,
    "drift-scaling": _run_means,
    "timespace-volume": _run_timespace,
    "variance": _run_variance,
    "vysotsky-crosscheck": _run_vysotsky,
    "distribution-probe": _run_probe,
    "limit-table": _run_limit_table,
}


def run(cfg: ExperimentConfig, out_dir=None, workers: int = 1) -> ExperimentRecord:
    """Run ``cfg``; when ``out_dir`` is given write results.csv and manifest.txt there."""
    start = time.perf_counter()
    rec = ExperimentRecord(cfg)
    RUNNERS[cfg.kind](cfg, rec, max(1, int(workers)))
    rec.wall_time = time.perf_counter() - start
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        emit_csv(rec, out / "results.csv")
        (out / "manifest.txt").write_text(manifest_text(rec))
        if rec.samples:
            _emit_samples(rec.samples, out / "samples.csv")
    return rec


# ---------------------------------------------------------------------------
# output


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.12g}"


def csv_text(rec: ExperimentRecord) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    for r in rec.sorted_rows():
        w.writerow([r.experiment, r.n, r.m, r.scaling, _fmt(r.estimate), _fmt(r.std_error),
                    _fmt(r.limit), _fmt(r.rel_error), r.seed])
    return buf.getvalue()


def emit_csv(rec: ExperimentRecord, path) -> None:
    Path(path).write_text(csv_text(rec))


def _emit_samples(samples, path) -> None:
    lines = ["n,m,value"] + [f"{n},{m},{_fmt(v)}" for n, m, v in samples]
    Path(path).write_text("\n".join(lines) + "\n")


def manifest_text(rec: ExperimentRecord) -> str:
    """Config echo followed by comment lines; parseable as a config file."""
    lines = [rec.config.echo().rstrip("\n"), f"# hullwalk {__version__}"]
    lines += [f"# seed {module} n={n} m={m} = {s}" for module, n, m, s in rec.row_seeds]
    lines.append(f"# wall_time_s = {rec.wall_time:.3f}")
    return "\n".join(lines) + "\n"
