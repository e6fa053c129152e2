"""Deterministic vehicular fog offloading simulator with an RL environment API."""

from .config import Normalization, RadioConfig, ScenarioConfig, preset
from .env import OffloadingEnv, StepResult, observation_vector
from .mobility import GridNetwork, advance_vehicle, distance, random_road_position
from .radio import LinkBudget, link_rate, received_power, transmission_delay
from .simcore import EpisodeResult, Observation, Simulation, run_episode
from .workload import Task, TaskCatalog, next_arrival_gap, processing_delay, sample_task

__all__ = [
    "EpisodeResult", "GridNetwork", "LinkBudget", "Normalization", "Observation",
    "OffloadingEnv", "RadioConfig", "ScenarioConfig", "Simulation", "StepResult",
    "Task", "TaskCatalog", "advance_vehicle", "distance", "link_rate",
    "next_arrival_gap", "observation_vector", "preset", "processing_delay",
    "random_road_position", "received_power", "run_episode", "sample_task",
    "transmission_delay",
]

__version__ = "0.1.0"
