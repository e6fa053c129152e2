"""Deterministic discrete-event engine for the offloading queuing network.

Topology: one uplink queue per client vehicle, m+1 outgoing queues at the
RSU (one wireless link per service vehicle plus the cloud uplink), one RSU
processor queue, one processor queue per service vehicle, and an
infinite-server cloud behind an internet-latency stage. All queues are FIFO
with a single server; events are executed in strict (time, seq) order.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .config import KMH_TO_MS, ScenarioConfig
from .mobility import ServiceVehicleState, Trajectory, ClientVehicleState, distance, random_road_position
from .radio import LinkBudget, link_rate, transmission_delay
from .workload import Task, TaskCatalog, next_arrival_gap, processing_delay, sample_task

TASK_GENERATED = "TaskGenerated"
CLIENT_TRANS_DONE = "ClientTransDone"
RSU_DECISION = "RsuDecisionPoint"
RSU_TRANS_DONE = "RsuTransDone"
INTERNET_DONE = "InternetDelayDone"
PROCESSING_DONE = "ProcessingDone"
EPISODE_END = "EpisodeEnd"


class ProtocolError(Exception):
    """A policy or protocol client violated the decision contract."""


@dataclass
class Arrival:
    time: float
    client: int
    task: Task
    internet_delay: float


@dataclass
class ScenarioScript:
    """All randomness of an episode, pre-drawn: fleets, paths, arrivals.

    Both the event engine and the time-stepped reference simulator consume
    the same script, so their inputs are identical by construction.
    """

    config: ScenarioConfig
    seed: int
    grid: object
    budget: LinkBudget
    catalog: TaskCatalog
    trajectories: list[Trajectory]
    client_rates: list[float]
    services: list[ServiceVehicleState]
    rsu_service_rates: list[float]  # bits/s, constant per episode (parked)
    arrivals: list[Arrival]  # sorted by time
    internet_delays: dict[int, float]


def build_script(config: ScenarioConfig, seed: int) -> ScenarioScript:
    grid = config.grid()
    budget = config.radio.budget()
    catalog = config.catalog()
    root = np.random.SeedSequence(seed)
    n, m = config.n_clients, config.m_service
    children = root.spawn(2 + 2 * n)
    svc_rng = np.random.default_rng(children[0])
    place_rng = np.random.default_rng(children[1])

    services = []
    for j in range(m):
        x, y, _ = random_road_position(svc_rng, grid)
        cpu = config.service_mips_choices[svc_rng.integers(len(config.service_mips_choices))]
        services.append(ServiceVehicleState(id=j, x=x, y=y, cpu=cpu))
    rsu_service_rates = [
        link_rate(budget, distance(grid.rsu_position, (s.x, s.y))) for s in services
    ]

    trajectories = []
    arrivals: list[Arrival] = []
    internet_delays: dict[int, float] = {}
    lo, hi = config.internet_delay_range
    for i in range(n):
        x, y, heading = random_road_position(place_rng, grid)
        vel = config.velocity_kmh_choices[place_rng.integers(len(config.velocity_kmh_choices))]
        state = ClientVehicleState(
            id=i, x=x, y=y, heading=heading, velocity=vel * KMH_TO_MS, rate=config.arrival_rate
        )
        mobility_rng = np.random.default_rng(children[2 + 2 * i])
        workload_rng = np.random.default_rng(children[3 + 2 * i])
        trajectories.append(Trajectory(state, grid, mobility_rng))
        t = 0.0
        while True:
            t += next_arrival_gap(workload_rng, config.arrival_rate)
            if t >= config.episode_seconds:
                break
            task = sample_task(workload_rng, catalog, origin=i, now=t,
                               size_choices=config.size_bits_choices)
            delay = workload_rng.uniform(lo, hi)
            arrivals.append(Arrival(time=t, client=i, task=task, internet_delay=delay))

    arrivals.sort(key=lambda a: (a.time, a.client))
    for idx, a in enumerate(arrivals):
        a.task.id = idx
        internet_delays[idx] = a.internet_delay

    return ScenarioScript(
        config=config,
        seed=seed,
        grid=grid,
        budget=budget,
        catalog=catalog,
        trajectories=trajectories,
        client_rates=[config.arrival_rate] * n,
        services=services,
        rsu_service_rates=rsu_service_rates,
        arrivals=arrivals,
        internet_delays=internet_delays,
    )


class TransQueue:
    """Single-server FIFO transmission queue measured in bits."""

    __slots__ = ("waiting", "current", "rate", "start", "end")

    def __init__(self):
        self.waiting: deque[Task] = deque()
        self.current: Task | None = None
        self.rate = 0.0
        self.start = 0.0
        self.end = 0.0

    def load_bits(self, t: float, include_current: bool = True) -> float:
        load = sum(task.size_bits for task in self.waiting)
        if include_current and self.current is not None:
            load += self.rate * (self.end - t)
        return load


class ProcQueue:
    """Single-server FIFO processing queue measured in MI."""

    __slots__ = ("cpu", "waiting", "current", "start", "end")

    def __init__(self, cpu: float):
        self.cpu = cpu
        self.waiting: deque[Task] = deque()
        self.current: Task | None = None
        self.start = 0.0
        self.end = 0.0

    def load_mi(self, t: float, include_current: bool = True) -> float:
        load = sum(task.cu for task in self.waiting)
        if include_current and self.current is not None:
            load += self.cpu * (self.end - t)
        return load


@dataclass
class Observation:
    """State observed by the offloading agent at one decision point."""

    sz: float
    cu: float
    pp: np.ndarray  # MIPS, length m+2: services, RSU, cloud
    dt: np.ndarray  # meters to RSU, length m
    q_t: np.ndarray  # bits, length m+1: service links, cloud uplink
    q_p: np.ndarray  # MI, length m+1: service processors, RSU processor

    @property
    def m(self) -> int:
        return len(self.dt)

    @property
    def n_actions(self) -> int:
        return self.m + 2


@dataclass
class EpisodeResult:
    """Everything recorded during one simulated episode."""

    config: ScenarioConfig
    seed: int
    tasks: list[Task]
    destinations: dict[int, int]  # task id -> action index
    n_generated: int
    n_completed: int
    n_censored: int
    trace_times: list[float]
    trace_tasks: list[int]  # waiting tasks over all transmission queues
    trace_bits: list[float]
    reward_trace: list[float]
    event_log: list[tuple] | None = None

    def completed_tasks(self) -> list[Task]:
        return [t for t in self.tasks if t.stamps.process_end is not None]


class Simulation:
    """One episode of the queuing network, advanced decision point by decision point."""

    def __init__(self, config: ScenarioConfig, seed: int,
                 collect_event_log: bool = False, script: ScenarioScript | None = None):
        self.script = script if script is not None else build_script(config, seed)
        self.config = config
        self.seed = seed
        cfg = config
        m = cfg.m_service
        self.m = m
        self.clock = 0.0
        self.done = False
        self.pending: Task | None = None
        self._heap: list = []
        self._seq = 0
        self._reward_acc = 0.0
        self.reward_trace: list[float] = []
        self._log = [] if collect_event_log else None

        self.client_up = [TransQueue() for _ in range(cfg.n_clients)]
        self.rsu_out = [TransQueue() for _ in range(m + 1)]  # m service links + cloud uplink
        self.svc_proc = [ProcQueue(s.cpu) for s in self.script.services]
        self.rsu_proc = ProcQueue(cfg.rsu_mips)

        self.tasks: list[Task] = []
        self.destinations: dict[int, int] = {}
        self.n_completed = 0

        self._trace_times: list[float] = []
        self._trace_tasks: list[int] = []
        self._trace_bits: list[float] = []
        self._next_sample = 0.0

        self._push(cfg.episode_seconds, EPISODE_END, None, -1)
        for arrival in self.script.arrivals:
            self._push(arrival.time, TASK_GENERATED, arrival.task, arrival.client)

    # --- scheduling ------------------------------------------------------

    def _push(self, time: float, kind: str, task: Task | None, node: int):
        heapq.heappush(self._heap, (time, self._seq, kind, task, node))
        self._seq += 1

    def _record(self, time: float, kind: str, task: Task | None, node: int):
        if self._log is not None:
            self._log.append((time, kind, -1 if task is None else task.id, node))

    # --- trace sampling --------------------------------------------------

    def _waiting_totals(self) -> tuple[int, float]:
        count, bits = 0, 0.0
        for q in self.client_up:
            count += len(q.waiting)
            bits += sum(t.size_bits for t in q.waiting)
        for q in self.rsu_out:
            count += len(q.waiting)
            bits += sum(t.size_bits for t in q.waiting)
        return count, bits

    def _sample_until(self, t: float):
        cadence = self.config.trace_cadence_s
        if cadence <= 0:
            return
        limit = min(t, self.config.episode_seconds)
        while self._next_sample <= limit + 1e-12:
            count, bits = self._waiting_totals()
            self._trace_times.append(self._next_sample)
            self._trace_tasks.append(count)
            self._trace_bits.append(bits)
            self._next_sample += cadence

    # --- server starts ---------------------------------------------------

    def _start_client_trans(self, i: int, t: float):
        q = self.client_up[i]
        task = q.waiting.popleft()
        pos = self.script.trajectories[i].position(t)
        rate = link_rate(self.script.budget, distance(pos, self.script.grid.rsu_position))
        q.current, q.rate, q.start = task, rate, t
        q.end = t + transmission_delay(task.size_bits, rate)
        task.stamps.client_trans_start = t
        self._push(q.end, CLIENT_TRANS_DONE, task, i)

    def _start_rsu_trans(self, j: int, t: float):
        q = self.rsu_out[j]
        task = q.waiting.popleft()
        rate = self.script.rsu_service_rates[j] if j < self.m else self.config.cloud_uplink_bps
        q.current, q.rate, q.start = task, rate, t
        q.end = t + transmission_delay(task.size_bits, rate)
        task.stamps.rsu_trans_start = t
        self._push(q.end, RSU_TRANS_DONE, task, j)

    def _start_processing(self, proc: ProcQueue, node: int, t: float):
        task = proc.waiting.popleft()
        proc.current, proc.start = task, t
        proc.end = t + processing_delay(task.cu, proc.cpu)
        task.stamps.process_start = t
        self._push(proc.end, PROCESSING_DONE, task, node)

    # --- event handlers --------------------------------------------------

    def _complete(self, task: Task, t: float):
        task.stamps.process_end = t
        self.n_completed += 1
        self._reward_acc += 5.0 - task.d_total()

    def _handle(self, time: float, kind: str, task: Task | None, node: int) -> bool:
        """Execute one event; returns True when a decision point was produced."""
        self._record(time, kind, task, node)
        if kind == TASK_GENERATED:
            self.tasks.append(task)
            task.stamps.client_queue_enter = time
            q = self.client_up[node]
            q.waiting.append(task)
            if q.current is None:
                self._start_client_trans(node, time)
            return False
        if kind == CLIENT_TRANS_DONE:
            q = self.client_up[node]
            q.current = None
            task.stamps.client_trans_end = time
            task.stamps.rsu_queue_enter = time
            if q.waiting:
                self._start_client_trans(node, time)
            self.pending = task
            return True
        if kind == RSU_TRANS_DONE:
            q = self.rsu_out[node]
            q.current = None
            task.stamps.rsu_trans_end = time
            task.stamps.service_queue_enter = time
            if q.waiting:
                self._start_rsu_trans(node, time)
            if node < self.m:
                proc = self.svc_proc[node]
                proc.waiting.append(task)
                if proc.current is None:
                    self._start_processing(proc, node, time)
            else:
                delay = self.script.internet_delays[task.id]
                self._push(time + delay, INTERNET_DONE, task, self.m + 1)
            return False
        if kind == INTERNET_DONE:
            # infinite cloud servers: processing starts immediately
            task.stamps.process_start = time
            self._push(time + processing_delay(task.cu, self.config.cloud_mips),
                       PROCESSING_DONE, task, self.m + 1)
            return False
        if kind == PROCESSING_DONE:
            if node < self.m:
                proc = self.svc_proc[node]
            elif node == self.m:
                proc = self.rsu_proc
            else:
                proc = None
            if proc is not None:
                proc.current = None
                if proc.waiting:
                    self._start_processing(proc, node, time)
            self._complete(task, time)
            return False
        raise AssertionError(f"unhandled event kind {kind}")

    # --- public stepping API ---------------------------------------------

    def next_decision(self) -> Task | None:
        """Advance until a task awaits an offloading decision, or the episode ends."""
        if self.done:
            return None
        if self.pending is not None:
            raise ProtocolError("previous decision has not been dispatched")
        while self._heap:
            time, _, kind, task, node = heapq.heappop(self._heap)
            self._sample_until(time)
            self.clock = time
            if kind == EPISODE_END:
                self._sample_until(self.config.episode_seconds)
                self.done = True
                return None
            if self._handle(time, kind, task, node):
                return task
        self.done = True
        return None

    def observe(self) -> Observation:
        if self.pending is None:
            raise ProtocolError("no task awaiting a decision")
        q_t, q_p = self.queue_snapshot()
        services = self.script.services
        pp = np.array([s.cpu for s in services] + [self.config.rsu_mips, self.config.cloud_mips])
        rsu = self.script.grid.rsu_position
        dt = np.array([distance((s.x, s.y), rsu) for s in services])
        return Observation(sz=self.pending.size_bits, cu=self.pending.cu,
                           pp=pp, dt=dt, q_t=q_t, q_p=q_p)

    def queue_snapshot(self) -> tuple[np.ndarray, np.ndarray]:
        """Loads of the RSU outgoing and processing queues, including in-service work."""
        t = self.clock
        q_t = np.array([q.load_bits(t) for q in self.rsu_out])
        q_p = np.array([p.load_mi(t) for p in self.svc_proc] + [self.rsu_proc.load_mi(t)])
        return q_t, q_p

    def dispatch(self, action: int):
        """Route the pending task per the chosen action index."""
        if self.pending is None:
            raise ProtocolError("dispatch without a pending decision")
        action = int(action)
        if not 0 <= action <= self.m + 1:
            raise ProtocolError(f"action {action} out of range for m={self.m}")
        task, self.pending = self.pending, None
        t = self.clock
        self.destinations[task.id] = action
        self._record(t, RSU_DECISION, task, action)
        if action < self.m:  # wireless hop to a service vehicle
            q = self.rsu_out[action]
            q.waiting.append(task)
            if q.current is None:
                self._start_rsu_trans(action, t)
        elif action == self.m:  # local processing at the RSU, no second hop
            task.stamps.rsu_trans_start = t
            task.stamps.rsu_trans_end = t
            task.stamps.service_queue_enter = t
            self.rsu_proc.waiting.append(task)
            if self.rsu_proc.current is None:
                self._start_processing(self.rsu_proc, self.m, t)
        else:  # cloud: fixed-rate uplink, internet latency, infinite servers
            q = self.rsu_out[self.m]
            q.waiting.append(task)
            if q.current is None:
                self._start_rsu_trans(self.m, t)

    def take_reward(self) -> float:
        """Reward accumulated since the last call: sum of (5 - d_total) over completions."""
        r, self._reward_acc = self._reward_acc, 0.0
        self.reward_trace.append(r)
        return r

    def result(self) -> EpisodeResult:
        n_gen = len(self.tasks)
        return EpisodeResult(
            config=self.config,
            seed=self.seed,
            tasks=self.tasks,
            destinations=self.destinations,
            n_generated=n_gen,
            n_completed=self.n_completed,
            n_censored=n_gen - self.n_completed,
            trace_times=self._trace_times,
            trace_tasks=self._trace_tasks,
            trace_bits=self._trace_bits,
            reward_trace=self.reward_trace,
            event_log=self._log,
        )


def run_episode(config: ScenarioConfig, policy, seed: int,
                collect_event_log: bool = False,
                script: ScenarioScript | None = None) -> EpisodeResult:
    """Run one full episode, asking `policy(observation)` at every decision point."""
    sim = Simulation(config, seed, collect_event_log=collect_event_log, script=script)
    while sim.next_decision() is not None:
        sim.take_reward()
        action = policy(sim.observe())
        sim.dispatch(action)
    sim.take_reward()
    return sim.result()


def dump_event_log(result: EpisodeResult, path):
    """Write the optional line-oriented event log: `time kind task_id node_id`."""
    if result.event_log is None:
        raise ValueError("episode was run without event logging")
    with open(path, "w") as fh:
        for time, kind, task_id, node_id in result.event_log:
            fh.write(f"{time:.9f} {kind} {task_id} {node_id}\n")
