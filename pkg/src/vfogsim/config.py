"""Scenario configuration: geometry, fleets, radio constants, hardware tables."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

from .mobility import GridNetwork
from .radio import LinkBudget
from .workload import DEFAULT_SCALE, TaskCatalog

KMH_TO_MS = 1.0 / 3.6


@dataclass(frozen=True)
class RadioConfig:
    bandwidth_hz: float = 40e6
    tx_power_w: float = 1.0
    tx_gain_dbi: float = 5.0
    rx_gain_dbi: float = 5.0
    noise_dbm_per_hz: float = -174.0
    carrier_hz: float = 5.9e9  # vehicular band; configurable

    def budget(self) -> LinkBudget:
        return LinkBudget.from_db(
            bandwidth_hz=self.bandwidth_hz,
            tx_power_w=self.tx_power_w,
            tx_gain_dbi=self.tx_gain_dbi,
            rx_gain_dbi=self.rx_gain_dbi,
            noise_dbm_per_hz=self.noise_dbm_per_hz,
            carrier_hz=self.carrier_hz,
        )


@dataclass(frozen=True)
class Normalization:
    """Divisors applied to each observation block before flattening.

    `cu` and `q_p` default to the loaded catalog maximum (and 10x it), and
    `dt` to the maximum in-region distance from the RSU; None means "derive".
    """

    sz: float = 4e7
    cu: float | None = None
    pp: float = 100_000.0
    dt: float | None = None
    q_t: float = 4e8
    q_p: float | None = None

    def resolve(self, catalog: TaskCatalog, grid: GridNetwork) -> "ResolvedNormalization":
        return ResolvedNormalization(
            sz=self.sz,
            cu=self.cu if self.cu is not None else catalog.max_mi,
            pp=self.pp,
            dt=self.dt if self.dt is not None else grid.max_rsu_distance(),
            q_t=self.q_t,
            q_p=self.q_p if self.q_p is not None else 10.0 * catalog.max_mi,
        )


@dataclass(frozen=True)
class ResolvedNormalization:
    sz: float
    cu: float
    pp: float
    dt: float
    q_t: float
    q_p: float

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ScenarioConfig:
    name: str = "scenario1"
    length_m: float = 1000.0
    width_m: float = 1000.0
    block_m: float = 200.0
    rsu_position: tuple[float, float] = (500.0, 500.0)
    n_clients: int = 5
    m_service: int = 2
    arrival_rate: float = 3.0  # tasks per second per client
    velocity_kmh_choices: tuple[float, ...] = (10.0, 20.0, 25.0, 40.0)
    max_velocity_kmh: float = 48.0
    size_bits_choices: tuple[float, ...] = (2e7, 4e7)
    radio: RadioConfig = field(default_factory=RadioConfig)
    rsu_mips: float = 18_375.0
    cloud_mips: float = 100_000.0
    cloud_uplink_bps: float = 1e9
    internet_delay_range: tuple[float, float] = (0.05, 0.2)
    service_mips_choices: tuple[float, ...] = (18_375.0, 42_820.0, 71_120.0)
    catalog_scale: float = DEFAULT_SCALE
    catalog_file: str | None = None
    episode_seconds: float = 60.0
    trace_cadence_s: float = 0.1
    normalization: Normalization = field(default_factory=Normalization)

    def __post_init__(self):
        if self.n_clients < 0 or self.m_service < 0:
            raise ValueError("fleet sizes must be nonnegative")
        if self.arrival_rate <= 0:
            raise ValueError("arrival_rate must be positive")
        if any(v > self.max_velocity_kmh + 1e-9 for v in self.velocity_kmh_choices):
            raise ValueError("velocity choices exceed the configured speed cap")

    def grid(self) -> GridNetwork:
        return GridNetwork(
            length_m=self.length_m,
            width_m=self.width_m,
            block_m=self.block_m,
            rsu_position=tuple(self.rsu_position),
        )

    def catalog(self) -> TaskCatalog:
        return TaskCatalog.load(self.catalog_file, scale=self.catalog_scale)

    def resolved_normalization(self) -> ResolvedNormalization:
        return self.normalization.resolve(self.catalog(), self.grid())

    # --- JSON round trip -------------------------------------------------

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        data = dict(data)
        if "radio" in data:
            data["radio"] = RadioConfig(**data["radio"])
        if "normalization" in data:
            data["normalization"] = Normalization(**data["normalization"])
        for key in ("rsu_position", "velocity_kmh_choices", "size_bits_choices",
                    "service_mips_choices", "internet_delay_range"):
            if key in data:
                data[key] = tuple(data[key])
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> "ScenarioConfig":
        return cls.from_dict(json.loads(text))

    @classmethod
    def load(cls, source: str | Path) -> "ScenarioConfig":
        """Load from a file path or a shipped preset name (scenario1/2/3)."""
        path = Path(source)
        if path.exists():
            return cls.from_json(path.read_text())
        name = str(source)
        preset = resources.files("vfogsim.data").joinpath(f"{name}.cfg")
        if name.startswith("scenario") and preset.is_file():
            return cls.from_json(preset.read_text())
        raise FileNotFoundError(f"no such config file or preset: {source}")


def preset(name: str, **overrides) -> ScenarioConfig:
    """The three shipped fleet-size presets."""
    fleets = {"scenario1": (5, 2), "scenario2": (10, 4), "scenario3": (20, 8)}
    if name not in fleets:
        raise ValueError(f"unknown preset {name!r}")
    n, m = fleets[name]
    return ScenarioConfig(name=name, n_clients=n, m_service=m, **overrides)
