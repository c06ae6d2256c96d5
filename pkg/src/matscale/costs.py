"""Closed-form estimators for workflow storage footprints and training/NAS
budgets. All file/byte arithmetic is exact 64-bit integer math; byte
figures display in SI units (1 TB = 10^12 bytes) unless binary units are
requested."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

_INT64_MAX = 2**63 - 1

_SI_UNITS = ["B", "kB", "MB", "GB", "TB", "PB", "EB"]
_BINARY_UNITS = ["B", "KiB", "MiB", "GiB", "TiB", "PiB", "EiB"]


@dataclass
class WorkflowSpec:
    n_structures: int
    settings_per_structure: int
    files_per_run: int
    bytes_per_run: int

    def __post_init__(self):
        for name in (
            "n_structures",
            "settings_per_structure",
            "files_per_run",
            "bytes_per_run",
        ):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")


@dataclass
class TrainingSpec:
    n_steps: int
    t_batch: float  # seconds per step spent batching data
    t_grad: float   # seconds per step spent on the gradient update

    def __post_init__(self):
        if self.n_steps < 1:
            raise ValueError(f"n_steps must be >= 1, got {self.n_steps}")
        if self.t_batch < 0 or self.t_grad < 0:
            raise ValueError("step times must be non-negative")


@dataclass
class NasSpec:
    n_architectures: int
    hours_per_architecture: float
    price_per_gpu_hour: float

    def __post_init__(self):
        if (
            self.n_architectures < 0
            or self.hours_per_architecture < 0
            or self.price_per_gpu_hour < 0
        ):
            raise ValueError("NAS budget inputs must be non-negative")


class WorkflowEstimate(NamedTuple):
    runs: int
    files: int
    bytes: int


class NasBudget(NamedTuple):
    gpu_hours: float
    cost: float


def _checked_mul(a: int, b: int, what: str) -> int:
    out = a * b
    if out > _INT64_MAX:
        raise OverflowError(f"{what} ({out}) exceeds the 64-bit integer range")
    return out


def workflow_estimate(w: WorkflowSpec) -> WorkflowEstimate:
    """Total runs, output files, and bytes for a high-throughput workflow."""
    runs = _checked_mul(w.n_structures, w.settings_per_structure, "run count")
    files = _checked_mul(runs, w.files_per_run, "file count")
    total_bytes = _checked_mul(runs, w.bytes_per_run, "byte count")
    return WorkflowEstimate(runs=runs, files=files, bytes=total_bytes)


def training_time(t: TrainingSpec) -> float:
    """Wall seconds: steps times (batching + gradient-update) time."""
    return t.n_steps * (t.t_batch + t.t_grad)


def nas_budget(n: NasSpec) -> NasBudget:
    """GPU-hours and cost of training every candidate architecture."""
    gpu_hours = n.n_architectures * n.hours_per_architecture
    return NasBudget(gpu_hours=gpu_hours, cost=gpu_hours * n.price_per_gpu_hour)


def speedup(t_slow: float, t_fast: float) -> float:
    if t_fast <= 0:
        raise ValueError(f"t_fast must be positive, got {t_fast}")
    return t_slow / t_fast


def format_bytes(n: int, binary: bool = False) -> str:
    """Human-readable byte count: SI decimal by default, binary on request."""
    if n < 0:
        raise ValueError(f"byte count must be non-negative, got {n}")
    base = 1024 if binary else 1000
    units = _BINARY_UNITS if binary else _SI_UNITS
    value = float(n)
    for unit in units[:-1]:
        if value < base:
            return _trim(value, unit)
        value /= base
    return _trim(value, units[-1])


def _trim(value: float, unit: str) -> str:
    text = f"{value:.2f}".rstrip("0").rstrip(".")
    return f"{text} {unit}"
