"""Task generation: Poisson arrivals and a benchmark-derived task catalog."""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

DEFAULT_SCALE = 0.05
CATALOG_SIZE = 18
DEFAULT_SIZE_CHOICES = (2.0e7, 4.0e7)  # bits (20 Mb, 40 Mb)


def _default_catalog_text() -> str:
    return resources.files("vfogsim.data").joinpath("spec_cpu95.txt").read_text()


@dataclass(frozen=True)
class TaskCatalog:
    """Fixed set of candidate task instruction counts, in MI."""

    entries_mi: tuple[float, ...]
    scale: float = DEFAULT_SCALE

    def __post_init__(self):
        if len(self.entries_mi) != CATALOG_SIZE:
            raise ValueError(f"catalog must have exactly {CATALOG_SIZE} entries")
        if any(e <= 0 for e in self.entries_mi):
            raise ValueError("catalog entries must be positive")

    @classmethod
    def load(cls, path: str | Path | None = None, scale: float = DEFAULT_SCALE) -> "TaskCatalog":
        """Load (name, billion-instructions) rows and scale them to MI."""
        text = Path(path).read_text() if path is not None else _default_catalog_text()
        billions = []
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            _, value = line.split()
            billions.append(float(value))
        entries = tuple(b * 1000.0 * scale for b in billions)
        return cls(entries_mi=entries, scale=scale)

    @property
    def max_mi(self) -> float:
        return max(self.entries_mi)


@dataclass
class Stamps:
    """Per-stage timestamps of one task's trip through the queuing network."""

    client_queue_enter: float | None = None
    client_trans_start: float | None = None
    client_trans_end: float | None = None
    rsu_queue_enter: float | None = None
    rsu_trans_start: float | None = None
    rsu_trans_end: float | None = None
    service_queue_enter: float | None = None
    process_start: float | None = None
    process_end: float | None = None


@dataclass
class Task:
    """One offloading request."""

    id: int
    cu: float  # millions of instructions
    size_bits: float
    origin: int  # client vehicle id
    t_created: float
    stamps: Stamps = field(default_factory=Stamps)

    def d_client(self) -> float:
        return self.stamps.client_trans_end - self.t_created

    def d_rsu(self) -> float:
        return self.stamps.rsu_trans_end - self.stamps.rsu_queue_enter

    def d_service(self) -> float:
        return self.stamps.process_end - self.stamps.service_queue_enter

    def d_total(self) -> float:
        return self.stamps.process_end - self.t_created


def next_arrival_gap(rng: np.random.Generator, rate: float) -> float:
    """Exponential inter-arrival gap for a Poisson process of the given rate."""
    if rate <= 0:
        raise ValueError("arrival rate must be strictly positive")
    return rng.exponential(1.0 / rate)


def sample_task(
    rng: np.random.Generator,
    catalog: TaskCatalog,
    origin: int,
    now: float,
    task_id: int = 0,
    size_choices: tuple[float, ...] = DEFAULT_SIZE_CHOICES,
) -> Task:
    """Draw a task uniformly from the catalog with a uniformly chosen size."""
    cu = catalog.entries_mi[rng.integers(len(catalog.entries_mi))]
    size = size_choices[rng.integers(len(size_choices))]
    return Task(id=task_id, cu=cu, size_bits=size, origin=origin, t_created=now)


def processing_delay(cu: float, cpu: float) -> float:
    """Seconds to execute cu MI on a cpu-MIPS processor."""
    if cpu <= 0:
        raise ValueError("cpu must be strictly positive")
    return cu / cpu
