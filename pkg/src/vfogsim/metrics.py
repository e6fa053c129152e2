"""Experiment statistics: delay means with confidence intervals, queue traces,
traffic intensity, and CSV output."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .simcore import EpisodeResult

Z_95 = 1.96


@dataclass(frozen=True)
class RunStatistics:
    mean_delay: float
    ci95_halfwidth: float
    n_samples: int  # number of episodes feeding the CI
    completion_ratio: float
    mean_d_client: float
    mean_d_rsu: float
    mean_d_service: float


def _episode_means(result: EpisodeResult) -> tuple[float, float, float, float] | None:
    tasks = result.completed_tasks()
    if not tasks:
        return None
    total = np.mean([t.d_total() for t in tasks])
    client = np.mean([t.d_client() for t in tasks])
    rsu = np.mean([t.d_rsu() for t in tasks])
    service = np.mean([t.d_service() for t in tasks])
    return total, client, rsu, service


def aggregate(results: list[EpisodeResult]) -> RunStatistics:
    """Per-episode mean delays pooled into a mean and a 95% CI across episodes."""
    if not results:
        raise ValueError("aggregate requires at least one episode")
    means = [m for m in (_episode_means(r) for r in results) if m is not None]
    if not means:
        raise ValueError("no completed tasks in any episode")
    totals = np.array([m[0] for m in means])
    n = len(totals)
    halfwidth = 0.0 if n < 2 else Z_95 * float(np.std(totals, ddof=1)) / math.sqrt(n)
    generated = sum(r.n_generated for r in results)
    completed = sum(r.n_completed for r in results)
    return RunStatistics(
        mean_delay=float(np.mean(totals)),
        ci95_halfwidth=halfwidth,
        n_samples=n,
        completion_ratio=completed / generated if generated else 0.0,
        mean_d_client=float(np.mean([m[1] for m in means])),
        mean_d_rsu=float(np.mean([m[2] for m in means])),
        mean_d_service=float(np.mean([m[3] for m in means])),
    )


def traffic_intensity(a: float, L: float, R: float) -> float:
    """Queue traffic intensity a*L/R (arrival rate x mean size over service rate)."""
    if R <= 0:
        raise ValueError("service rate R must be strictly positive")
    return a * L / R


def queue_trace(result: EpisodeResult) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sampled totals over all transmission queues: (times, waiting tasks, waiting bits).

    Counts exclude the item currently in service (classic queue-length
    convention); both a task count and a bit total are reported.
    """
    return (np.array(result.trace_times),
            np.array(result.trace_tasks),
            np.array(result.trace_bits))


def trace_slope(result: EpisodeResult) -> float:
    """Slope of a linear fit to the waiting-task trace (tasks per second)."""
    t, tasks, _ = queue_trace(result)
    if len(t) < 2:
        return 0.0
    return float(np.polyfit(t, tasks, 1)[0])


# --- CSV output ----------------------------------------------------------

SUMMARY_HEADER = ["scenario", "policy", "mean_delay", "ci95", "completion_ratio",
                  "mean_d_client", "mean_d_rsu", "mean_d_service", "n_episodes"]
TRACE_HEADER = ["seed", "t", "queue_len_tasks", "queue_len_bits"]


def write_summary_csv(path, scenario: str, policy: str, stats: RunStatistics):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_HEADER)
        writer.writerow([
            scenario, policy,
            f"{stats.mean_delay:.6f}", f"{stats.ci95_halfwidth:.6f}",
            f"{stats.completion_ratio:.6f}",
            f"{stats.mean_d_client:.6f}", f"{stats.mean_d_rsu:.6f}",
            f"{stats.mean_d_service:.6f}", stats.n_samples,
        ])


def write_trace_csv(path, results: list[EpisodeResult]):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_HEADER)
        for result in results:
            for t, tasks, bits in zip(result.trace_times, result.trace_tasks, result.trace_bits):
                writer.writerow([result.seed, f"{t:.3f}", tasks, f"{bits:.0f}"])
