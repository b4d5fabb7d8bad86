"""
Brillouin-zone sweeps: per-point projector preparation, geometric-tensor
extraction, Chern integration, serialization and the oracle validation
suites.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from qgtprobe import __version__
from qgtprobe.circuit import DEFAULT_SHOTS, NoiseConfig, PostSelectionError, Shots
from qgtprobe.ite import DEFAULT_TAU, OverlapError, prepare_ground_projector_ite
from qgtprobe.model import GaplessError, ModelPoint, exact_ground_projector
from qgtprobe.qgt import (
    DEFAULT_DELTA,
    DEFAULT_GRID_N,
    DEFAULT_ROBUST_EPS,
    GridSpec,
    chern_number,
    extract_qgt,
    projector_derivative,
)
from qgtprobe.vqa import OptimizationError, OptimizerConfig, prepare_ground_projector_vqa

CSV_COLUMNS = ("kx", "ky", "g_xx", "g_xy", "g_yy", "F_xy", "success_fraction", "flags")
METHODS = ("exact", "vqa", "ite")
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RunConfig:
    """Everything that determines a sweep. ``shots=None`` means exact mode."""

    method: str = "vqa"
    m: float = 1.25
    grid_n: int = DEFAULT_GRID_N
    delta: float = DEFAULT_DELTA
    tau: float = DEFAULT_TAU
    shots: int | None = DEFAULT_SHOTS
    depolarizing_p: float = 0.0
    readout_q: float = 0.0
    mitigate: bool = False
    purify: bool = True
    robust_eps: float = DEFAULT_ROBUST_EPS
    base_seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.shots is not None and self.shots < 1:
            raise ValueError("shots must be >= 1 (or None for exact mode)")
        if not self.tau > 0:
            raise ValueError("tau must be positive")
        if self.robust_eps < 0:
            raise ValueError("robust_eps must be >= 0")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if not 0 <= self.base_seed <= _MASK64:
            raise ValueError("base_seed must be a 64-bit unsigned integer")
        NoiseConfig(self.depolarizing_p, self.readout_q)
        self.grid

    @property
    def grid(self) -> GridSpec:
        return GridSpec(self.grid_n, self.delta, self.m)

    @property
    def exact(self) -> bool:
        return self.shots is None

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        return cls(**d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, s: str) -> "RunConfig":
        return cls.from_dict(json.loads(s))


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def point_seed(base_seed: int, index: int) -> int:
    """Seed of grid point ``index``: base seed XOR a 64-bit hash of the index."""
    return (base_seed ^ _splitmix64(index)) & _MASK64


@dataclass
class PointRecord:
    kx: float
    ky: float
    g_xx: float
    g_xy: float
    g_yy: float
    F_xy: float
    success_fraction: float
    flags: list[str] = field(default_factory=list)

    def row(self) -> list[str]:
        nums = [self.kx, self.ky, self.g_xx, self.g_xy, self.g_yy, self.F_xy, self.success_fraction]
        return [format(v, ".17g") for v in nums] + [";".join(self.flags)]

    @classmethod
    def from_row(cls, row: dict) -> "PointRecord":
        flags = [f for f in row["flags"].split(";") if f]
        return cls(*(float(row[c]) for c in CSV_COLUMNS[:-1]), flags=flags)


def _prepare(cfg: RunConfig, p: ModelPoint, seed: int):
    """Ground projector at ``p`` and its post-selection success fraction."""
    if cfg.method == "exact":
        return exact_ground_projector(p), 1.0, []
    mode = None
    if not cfg.exact:
        mode = Shots(cfg.shots, seed, NoiseConfig(cfg.depolarizing_p, cfg.readout_q), cfg.mitigate)
    if cfg.method == "vqa":
        return prepare_ground_projector_vqa(p, mode, OptimizerConfig(seed=seed), cfg.purify), 1.0, []
    try:
        proj, frac = prepare_ground_projector_ite(p, cfg.tau, mode, cfg.purify)
        return proj, frac, []
    except OverlapError:
        proj, frac = prepare_ground_projector_ite(p, cfg.tau, mode, cfg.purify, initial="plus")
        return proj, frac, ["ite_plus_start"]


def evaluate_point(cfg: RunConfig, kx: float, ky: float, seed: int) -> PointRecord:
    """Geometric tensor at an arbitrary momentum, drawing shots from ``seed``."""
    p = ModelPoint(kx, ky, cfg.m)
    seeds = np.random.SeedSequence(seed).generate_state(3, np.uint64)
    nan = float("nan")

    def failed(flag):
        return PointRecord(kx, ky, nan, nan, nan, nan, nan, [flag])

    try:
        pg, f0, fl0 = _prepare(cfg, p, int(seeds[0]))
        px, f1, fl1 = _prepare(cfg, p.shifted(dkx=cfg.delta), int(seeds[1]))
        py, f2, fl2 = _prepare(cfg, p.shifted(dky=cfg.delta), int(seeds[2]))
    except GaplessError:
        return failed("gapless")
    except (OverlapError, PostSelectionError) as exc:
        return failed(f"preparation_failed:{type(exc).__name__}")
    except OptimizationError:
        return failed("optimizer_failed")
    except ValueError as exc:
        return failed(f"invalid:{exc}".replace(",", " ").replace(";", " "))
    pe = np.eye(2) - pg
    q = extract_qgt(
        pg,
        pe,
        projector_derivative(pg, px, cfg.delta),
        projector_derivative(pg, py, cfg.delta),
        cfg.robust_eps,
    )
    flags = set(q.flags) | set(fl0) | set(fl1) | set(fl2)
    if np.max(np.abs(pg @ pg - pg)) > 1e-6:
        flags.add("not_idempotent")
    if min(q.g_xx, q.g_yy) < -1e-9:
        flags.add("negative_metric")
    if q.residual > 1e-8:
        flags.add("imaginary_residue")
    frac = float(np.mean([f0, f1, f2]))
    return PointRecord(kx, ky, q.g_xx, q.g_xy, q.g_yy, q.F_xy, frac, sorted(flags))


def compute_point(cfg: RunConfig, index: int) -> PointRecord:
    """Record of grid point ``index`` (row-major over (i, j)), reproducible alone."""
    n = cfg.grid_n
    if not 0 <= index < n * n:
        raise IndexError(f"grid index {index} outside [0, {n * n})")
    i, j = divmod(index, n)
    ks = cfg.grid.ks
    return evaluate_point(cfg, float(ks[i]), float(ks[j]), point_seed(cfg.base_seed, index))


def _compute_chunk(args):
    cfg, indices = args
    return [(idx, compute_point(cfg, idx)) for idx in indices]


@dataclass
class SweepResult:
    records: list[PointRecord]
    manifest: dict

    @property
    def config(self) -> RunConfig:
        return RunConfig.from_dict(self.manifest["config"])

    def field(self, name: str = "F_xy") -> np.ndarray:
        n = self.config.grid_n
        return np.array([getattr(r, name) for r in self.records]).reshape(n, n)

    def flagged(self) -> list[int]:
        return [i for i, r in enumerate(self.records) if r.flags]

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_COLUMNS)
            for r in self.records:
                w.writerow(r.row())

    def write(self, out_dir) -> tuple[Path, Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        csv_path, man_path = out / "records.csv", out / "manifest.json"
        self.write_csv(csv_path)
        man_path.write_text(json.dumps(self.manifest, indent=2, sort_keys=True))
        return csv_path, man_path

    @classmethod
    def read(cls, out_dir) -> "SweepResult":
        out = Path(out_dir)
        manifest = json.loads((out / "manifest.json").read_text())
        with open(out / "records.csv", newline="") as fh:
            records = [PointRecord.from_row(r) for r in csv.DictReader(fh)]
        return cls(records, manifest)


def sweep(cfg: RunConfig) -> SweepResult:
    """Evaluate every grid point; failures are flagged per point, never raised."""
    t0 = time.perf_counter()
    total = cfg.grid_n**2
    if cfg.workers == 1:
        results = [(idx, compute_point(cfg, idx)) for idx in range(total)]
    else:
        chunks = [(cfg, list(range(s, total, cfg.workers))) for s in range(cfg.workers)]
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = [item for part in pool.map(_compute_chunk, chunks) for item in part]
    records = [r for _, r in sorted(results, key=lambda t: t[0])]
    manifest = {
        "config": cfg.to_dict(),
        "tool": "qgtprobe",
        "version": __version__,
        "wall_time_s": time.perf_counter() - t0,
        "point_seeds": [point_seed(cfg.base_seed, idx) for idx in range(total)],
    }
    return SweepResult(records, manifest)


@dataclass(frozen=True)
class ChernReport:
    chern: float
    nearest: int
    residual: float
    skipped: int = 0

    def __str__(self) -> str:
        s = f"C = {self.chern:+.6f}  nearest integer {self.nearest:+d}  residual {self.residual:.2e}"
        return s + (f"  ({self.skipped} non-finite point(s) skipped)" if self.skipped else "")


def chern(result: SweepResult, skip_nonfinite: bool = False) -> ChernReport:
    """Chern number of a sweep's curvature field.

    By default a field with non-finite entries (e.g. gapless points) is
    rejected; ``skip_nonfinite`` integrates over the remaining points.
    """
    f = result.field("F_xy")
    bad = ~np.isfinite(f)
    if bad.any() and skip_nonfinite:
        f = np.where(bad, 0.0, f)
    c = chern_number(f, result.config.grid)
    nearest = int(np.rint(c))
    return ChernReport(c, nearest, abs(c - nearest), int(bad.sum()) if skip_nonfinite else 0)
