"""
Batch experiments: sample states, synthesize controls, write run records.

Output directory layout::

    runs.csv          one row per sample
    summary.json      convergence rate, error quantiles, histogram
    scatter.csv       concurrence,measurement (sample order as in runs.csv)
    histogram.csv     bin_left,count (last row is the overflow bin)
    paths/sample_NNNNN.json   control schedule, initial and final state
"""
from __future__ import annotations

import csv
import hashlib
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .control import ControlPath, SynthesisConfig, composed_unitary, measurement_error, synthesize
from .controllability import (
    LieBasis, SU4_DIM, control_generators, dla_closure, format_report, random_hermitian,
)
from .exceptions import EmptyInput
from .linalg import dagger
from .quantum import STATE_KINDS, concurrence, sample_state, spectrum_bounds, zz_expectation

log = logging.getLogger(__name__)

CSV_HEADER = (
    "sample_id", "state_kind", "concurrence", "measurement", "error_kind", "error",
    "iterations", "converged", "seed", "wall_time_ms",
)
HIST_BINS = 20
HIST_RANGE = (0.0, 0.1)


@dataclass
class ExperimentConfig:
    n_samples: int = 100
    state_kind: str = "all"
    synthesis: SynthesisConfig = field(default_factory=SynthesisConfig)
    drift_magnitude: float = 0.0
    output_dir: str | None = "runs"
    seed: int = 0
    workers: int = 1
    # wall-clock times make runs.csv non-reproducible, so they are opt-in
    record_wall_time: bool = False

    def __post_init__(self):
        if isinstance(self.synthesis, dict):
            self.synthesis = SynthesisConfig(**self.synthesis)
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if self.state_kind not in STATE_KINDS + ("all",):
            raise ValueError(f"state_kind must be one of {STATE_KINDS + ('all',)}, got {self.state_kind!r}")
        if not self.drift_magnitude >= 0:
            raise ValueError("drift_magnitude must be >= 0")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class RunRecord:
    sample_id: int
    state_kind: str
    concurrence: float
    measurement: float
    error_kind: str
    error: float
    iterations: int
    converged: bool
    seed: int
    wall_time: float = 0.0
    path: ControlPath | None = field(default=None, repr=False)
    rho0: np.ndarray | None = field(default=None, repr=False)
    rho_final: np.ndarray | None = field(default=None, repr=False)

    def csv_row(self, with_time: bool) -> list[str]:
        return [
            str(self.sample_id), self.state_kind, repr(self.concurrence), repr(self.measurement),
            self.error_kind, repr(self.error), str(self.iterations), str(self.converged).lower(),
            str(self.seed), f"{self.wall_time * 1e3:.3f}" if with_time else "",
        ]


@dataclass
class Summary:
    n_samples: int
    n_converged: int
    convergence_rate: float
    quantiles: dict[str, float]
    histogram_edges: list[float]
    histogram_counts: list[int]
    overflow: int
    mean_iterations: float
    max_error: float


def sample_seed(seed: int, sample_id: int) -> int:
    """Batch seed XOR a stable 63-bit hash of the sample id."""
    h = hashlib.blake2b(str(sample_id).encode(), digest_size=8).digest()
    return (seed ^ int.from_bytes(h, "little")) & (2**63 - 1)


def sample_kind(kind: str, sample_id: int) -> str:
    return STATE_KINDS[sample_id % len(STATE_KINDS)] if kind == "all" else kind


def batch_drift(cfg: ExperimentConfig) -> np.ndarray | None:
    if cfg.drift_magnitude == 0:
        return None
    return random_hermitian(np.random.default_rng(cfg.seed), cfg.drift_magnitude)


def run_sample(sample_id: int, kind: str, rho0: np.ndarray, seed: int, synth: SynthesisConfig,
               drift: np.ndarray | None = None) -> RunRecord:
    """Synthesize controls for one state; failures become unconverged records."""
    start = time.perf_counter()
    try:
        res = synthesize(rho0, replace(synth, seed=seed), drift)
    except Exception:
        log.exception("sample %d failed", sample_id)
        c = concurrence(rho0) if np.all(np.isfinite(rho0)) else 0.0
        meas = zz_expectation(rho0)
        err_kind, err = measurement_error(c, meas)
        return RunRecord(sample_id, kind, c, meas, err_kind, err, 0, False, seed,
                         time.perf_counter() - start, None, rho0, rho0)
    return RunRecord(
        sample_id=sample_id,
        state_kind=kind,
        concurrence=res.target,
        measurement=res.measurement,
        error_kind=res.error_kind,
        error=res.relative_error,
        iterations=res.total_iterations,
        converged=res.converged,
        seed=seed,
        wall_time=time.perf_counter() - start,
        path=res.path,
        rho0=rho0,
        rho_final=res.rho_final,
    )


def _job(args):
    return run_sample(*args)


def run_batch(cfg: ExperimentConfig, states: Sequence[np.ndarray] | None = None,
              write: bool = True) -> list[RunRecord]:
    """Run ``cfg.n_samples`` independent syntheses and write the output files.

    ``states`` replaces the sampler for the first ``len(states)`` samples;
    those rows get state_kind ``injected``. Records come back sorted by
    sample id and do not depend on the worker count.
    """
    out = Path(cfg.output_dir) if (write and cfg.output_dir is not None) else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        (out / "paths").mkdir(exist_ok=True)
    drift = batch_drift(cfg)
    jobs = []
    for i in range(cfg.n_samples):
        seed = sample_seed(cfg.seed, i)
        if states is not None and i < len(states):
            kind, rho0 = "injected", np.asarray(states[i], dtype=complex)
        else:
            kind = sample_kind(cfg.state_kind, i)
            rho0 = sample_state(kind, seed)
        jobs.append((i, kind, rho0, seed, cfg.synthesis, drift))

    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            records = list(pool.map(_job, jobs, chunksize=max(1, len(jobs) // (4 * cfg.workers))))
    else:
        records = [_job(j) for j in jobs]
    records.sort(key=lambda r: r.sample_id)

    if out is not None:
        write_outputs(out, cfg, records, drift)
    return records


def summarize(records: Sequence[RunRecord]) -> Summary:
    if not records:
        raise EmptyInput("no run records to summarize")
    errors = np.array([r.error for r in records], dtype=float)
    n_conv = sum(r.converged for r in records)
    edges = np.linspace(*HIST_RANGE, HIST_BINS + 1)
    inside = errors[errors <= HIST_RANGE[1]]
    counts, _ = np.histogram(inside, bins=edges)
    return Summary(
        n_samples=len(records),
        n_converged=int(n_conv),
        convergence_rate=n_conv / len(records),
        quantiles={f"q{q}": float(np.quantile(errors, q / 100)) for q in (50, 90, 99)},
        histogram_edges=[float(e) for e in edges],
        histogram_counts=[int(c) for c in counts],
        overflow=int(np.sum(errors > HIST_RANGE[1])),
        mean_iterations=float(np.mean([r.iterations for r in records])),
        max_error=float(errors.max()),
    )


def _pairs(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m)]


def matrix_from_pairs(data) -> np.ndarray:
    """Inverse of the ``[[re, im], ...]`` 4x4 encoding used in the JSON files."""
    arr = np.asarray(data, dtype=float)
    if arr.shape != (4, 4, 2):
        raise ValueError(f"expected a 4x4 array of [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def write_outputs(out: Path, cfg: ExperimentConfig, records: Sequence[RunRecord],
                  drift: np.ndarray | None) -> None:
    with open(out / "runs.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in records:
            w.writerow(r.csv_row(cfg.record_wall_time))

    with open(out / "scatter.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("concurrence", "measurement"))
        for r in records:
            w.writerow((repr(r.concurrence), repr(r.measurement)))

    s = summarize(records)
    with open(out / "histogram.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("bin_left", "count"))
        for left, c in zip(s.histogram_edges[:-1], s.histogram_counts):
            w.writerow((f"{left:.3f}", c))
        w.writerow((f"{HIST_RANGE[1]:.3f}", s.overflow))

    summary = asdict(s)
    summary["config"] = cfg.to_dict()
    summary["drift"] = _pairs(drift) if drift is not None else None
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")

    for r in records:
        dump = {
            "sample_id": r.sample_id,
            "state_kind": r.state_kind,
            "seed": r.seed,
            "concurrence": r.concurrence,
            "measurement": r.measurement,
            "converged": r.converged,
            "rho0": _pairs(r.rho0),
            "rho_final": _pairs(r.rho_final),
        }
        if r.path is not None:
            dump.update(r.path.to_dict())
        (out / "paths" / f"sample_{r.sample_id:05d}.json").write_text(json.dumps(dump, indent=1) + "\n")


def load_records(csv_path: str | Path) -> list[dict]:
    with open(csv_path, newline="") as fh:
        return list(csv.DictReader(fh))


def replay_final_state(dump: dict, drift: np.ndarray | None = None) -> np.ndarray:
    """Apply the product of a dumped schedule's slice propagators to its ``rho0``."""
    path = ControlPath.from_dict(dump)
    U = composed_unitary(path, drift)
    return U @ matrix_from_pairs(dump["rho0"]) @ dagger(U)


@dataclass
class ControllabilityReport:
    dimension: int
    rounds: list[int]
    dmc: bool
    labels: list[str]
    drift_verdicts: dict[float, list[bool]]
    text: str

    @property
    def all_drifts_dmc(self) -> bool:
        return all(all(v) for v in self.drift_verdicts.values())


def check_controllability(n_drifts: int = 10, magnitudes: Sequence[float] = (1.0,),
                          seed: int = 0) -> ControllabilityReport:
    """Algebra of the six control generators, alone and with random drifts added."""
    gens = control_generators()
    lie: LieBasis = dla_closure(gens)
    rng = np.random.default_rng(seed)
    verdicts: dict[float, list[bool]] = {}
    for mag in magnitudes:
        verdicts[float(mag)] = [
            dla_closure(gens.with_extra(1j * random_hermitian(rng, mag), "iHd")).dimension == SU4_DIM
            for _ in range(n_drifts)
        ]
    lines = [format_report(lie), "drift robustness:"]
    for mag, v in verdicts.items():
        lines.append(f"  magnitude {mag:g}: {sum(v)}/{len(v)} DMC")
    return ControllabilityReport(lie.dimension, lie.rounds, lie.dimension == SU4_DIM,
                                 lie.labels, verdicts, "\n".join(lines))


def bounds_report(rho: np.ndarray) -> dict:
    b = spectrum_bounds(rho)
    return {"m": b.m, "M": b.M, "concurrence": b.concurrence, "zz": zz_expectation(rho)}
