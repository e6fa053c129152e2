"""Fine-grained time-stepped reference simulator.

An independent re-implementation of the queuing network used to cross-check
the event engine on small scenarios. Work is integrated explicitly over a
fixed dt grid (remaining bits / MI decremented at each server), with
completions resolved at their exact sub-step instants so that the
discretization error stays far below the dt bound.

Decisions are taken by a task-keyed callback (`policy(task, m) -> action`)
so that both simulators can be driven by an identical decision sequence.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .simcore import ScenarioScript
from .mobility import distance
from .radio import link_rate


@dataclass
class _Server:
    """One FIFO server with explicit remaining-work accounting."""

    rate: float = 0.0  # work units per second for the current item
    remaining: float = 0.0
    task: object = None
    buffer: list = field(default_factory=list)

    @property
    def busy(self) -> bool:
        return self.task is not None

    def completion_time(self, now: float) -> float:
        return now + self.remaining / self.rate

    def advance(self, elapsed: float):
        if self.task is not None:
            self.remaining -= self.rate * elapsed


@dataclass
class RefRecord:
    t_created: float
    client_trans_end: float | None = None
    rsu_trans_end: float | None = None
    process_end: float | None = None
    action: int | None = None

    @property
    def completed(self) -> bool:
        return self.process_end is not None

    @property
    def d_total(self) -> float:
        return self.process_end - self.t_created


def run_reference(script: ScenarioScript, policy, dt: float = 1e-4) -> dict[int, RefRecord]:
    """Simulate the scripted episode on a dt grid; returns per-task records."""
    cfg = script.config
    m = cfg.m_service
    horizon = cfg.episode_seconds

    uplinks = [_Server() for _ in range(cfg.n_clients)]
    outgoing = [_Server() for _ in range(m + 1)]
    processors = [_Server() for _ in range(m)] + [_Server()]  # services then RSU
    proc_rates = [s.cpu for s in script.services] + [cfg.rsu_mips]
    internet: list[list] = []  # [finish_time, task]
    cloud_exec: list[list] = []  # [finish_time, task]

    records = {a.task.id: RefRecord(t_created=a.time) for a in script.arrivals}
    arrivals = list(script.arrivals)
    next_arrival = 0

    def start_uplink(i: int, now: float):
        srv = uplinks[i]
        task = srv.buffer.pop(0)
        pos = script.trajectories[i].position(now)
        srv.rate = link_rate(script.budget, distance(pos, script.grid.rsu_position))
        srv.remaining = task.size_bits
        srv.task = task

    def start_outgoing(j: int, now: float):
        srv = outgoing[j]
        task = srv.buffer.pop(0)
        srv.rate = script.rsu_service_rates[j] if j < m else cfg.cloud_uplink_bps
        srv.remaining = task.size_bits
        srv.task = task

    def start_processor(k: int, now: float):
        srv = processors[k]
        task = srv.buffer.pop(0)
        srv.rate = proc_rates[k]
        srv.remaining = task.cu
        srv.task = task

    def route(task, now: float):
        action = policy(task, m)
        records[task.id].action = action
        if action < m:
            outgoing[action].buffer.append(task)
            if not outgoing[action].busy:
                start_outgoing(action, now)
        elif action == m:
            records[task.id].rsu_trans_end = now
            processors[m].buffer.append(task)
            if not processors[m].busy:
                start_processor(m, now)
        elif action == m + 1:
            outgoing[m].buffer.append(task)
            if not outgoing[m].busy:
                start_outgoing(m, now)
        else:
            raise ValueError(f"action {action} out of range")

    t = 0.0
    while t < horizon:
        window_end = min(t + dt, horizon)
        cursor = t
        while True:
            # earliest sub-event within the current window
            t_star = window_end
            source = None
            if next_arrival < len(arrivals) and arrivals[next_arrival].time < t_star:
                t_star, source = arrivals[next_arrival].time, ("arrival", None)
            for i, srv in enumerate(uplinks):
                if srv.busy and srv.completion_time(cursor) < t_star:
                    t_star, source = srv.completion_time(cursor), ("uplink", i)
            for j, srv in enumerate(outgoing):
                if srv.busy and srv.completion_time(cursor) < t_star:
                    t_star, source = srv.completion_time(cursor), ("outgoing", j)
            for k, srv in enumerate(processors):
                if srv.busy and srv.completion_time(cursor) < t_star:
                    t_star, source = srv.completion_time(cursor), ("processor", k)
            for entry in internet:
                if entry[0] < t_star:
                    t_star, source = entry[0], ("internet", entry)
            for entry in cloud_exec:
                if entry[0] < t_star:
                    t_star, source = entry[0], ("cloud", entry)

            elapsed = t_star - cursor
            for srv in uplinks + outgoing + processors:
                srv.advance(elapsed)
            cursor = t_star
            if source is None:
                break

            kind, key = source
            if kind == "arrival":
                arrival = arrivals[next_arrival]
                next_arrival += 1
                srv = uplinks[arrival.client]
                srv.buffer.append(arrival.task)
                if not srv.busy:
                    start_uplink(arrival.client, cursor)
            elif kind == "uplink":
                srv = uplinks[key]
                task, srv.task = srv.task, None
                records[task.id].client_trans_end = cursor
                if srv.buffer:
                    start_uplink(key, cursor)
                route(task, cursor)
            elif kind == "outgoing":
                srv = outgoing[key]
                task, srv.task = srv.task, None
                records[task.id].rsu_trans_end = cursor
                if srv.buffer:
                    start_outgoing(key, cursor)
                if key < m:
                    processors[key].buffer.append(task)
                    if not processors[key].busy:
                        start_processor(key, cursor)
                else:
                    internet.append([cursor + script.internet_delays[task.id], task])
            elif kind == "processor":
                srv = processors[key]
                task, srv.task = srv.task, None
                records[task.id].process_end = cursor
                if srv.buffer:
                    start_processor(key, cursor)
            elif kind == "internet":
                internet.remove(key)
                task = key[1]
                cloud_exec.append([cursor + task.cu / cfg.cloud_mips, task])
            elif kind == "cloud":
                cloud_exec.remove(key)
                records[key[1].id].process_end = cursor
        t = window_end
    return records
