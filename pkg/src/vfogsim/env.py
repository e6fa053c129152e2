"""Event-driven MDP facade over the simulator, plus its wire protocol.

One decision point per offloading request: the observation is taken when a
task fully arrives at the RSU, the action routes it, and the reward is the
sum of (5 - d_total) over tasks completed since the previous decision.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .config import ResolvedNormalization, ScenarioConfig
from .simcore import Observation, ProtocolError, Simulation


@dataclass
class StepResult:
    reward: float
    observation: Observation | None
    done: bool
    info: dict


def observation_vector(obs: Observation, norms: ResolvedNormalization) -> np.ndarray:
    """Flatten an observation to the fixed order [sz, cu, pp, dt, q_t, q_p].

    Each block is divided by its normalization constant; length is 3m+6.
    """
    return np.concatenate([
        [obs.sz / norms.sz, obs.cu / norms.cu],
        obs.pp / norms.pp,
        obs.dt / norms.dt,
        obs.q_t / norms.q_t,
        obs.q_p / norms.q_p,
    ])


class OffloadingEnv:
    """Sequential reset/step environment over episodes of the simulator."""

    def __init__(self, config: ScenarioConfig):
        self.config = config
        self.norms = config.resolved_normalization()
        self._sim: Simulation | None = None
        self._done = True

    @property
    def n_actions(self) -> int:
        return self.config.m_service + 2

    def reset(self, seed: int) -> Observation | None:
        """Start a fresh episode; returns the first observation (None if no tasks)."""
        self._sim = Simulation(self.config, seed)
        task = self._sim.next_decision()
        self._done = task is None
        return None if task is None else self._sim.observe()

    def step(self, action: int) -> StepResult:
        if self._sim is None or self._done:
            raise ProtocolError("step called on an inactive episode")
        self._sim.dispatch(action)
        task = self._sim.next_decision()
        reward = self._sim.take_reward()
        self._done = task is None
        obs = None if self._done else self._sim.observe()
        info = {
            "completed": self._sim.n_completed,
            "generated": len(self._sim.tasks),
        }
        return StepResult(reward=reward, observation=obs, done=self._done, info=info)

    def result(self):
        return self._sim.result()


class ProtocolHandler:
    """Newline-delimited JSON protocol over any line transport.

    reset -> obs, act -> step, close -> shutdown. Malformed messages get an
    error reply; out-of-order messages raise ProtocolError so the transport
    can reset the connection.
    """

    def __init__(self, config: ScenarioConfig):
        self.env = OffloadingEnv(config)
        self.closed = False

    def _obs_vector(self, obs: Observation | None) -> list[float]:
        if obs is None:
            return []
        return observation_vector(obs, self.env.norms).tolist()

    def handle_line(self, line: str) -> str | None:
        """Process one request line; returns the reply line (None after close)."""
        try:
            msg = json.loads(line)
            kind = msg["type"]
        except (json.JSONDecodeError, KeyError, TypeError):
            return json.dumps({"type": "error", "message": "malformed message"})
        if kind == "close":
            self.closed = True
            return None
        if kind == "reset":
            try:
                seed = int(msg["seed"])
            except (KeyError, ValueError, TypeError):
                return json.dumps({"type": "error", "message": "reset requires an integer seed"})
            obs = self.env.reset(seed)
            return json.dumps({"type": "obs", "vector": self._obs_vector(obs),
                               "done": obs is None})
        if kind == "act":
            if "index" not in msg:
                return json.dumps({"type": "error", "message": "act requires an index"})
            index = msg["index"]
            if not isinstance(index, int) or not 0 <= index < self.env.n_actions:
                return json.dumps({"type": "error",
                                   "message": f"action index out of range [0, {self.env.n_actions})"})
            result = self.env.step(index)  # ProtocolError propagates: order violation
            return json.dumps({"type": "step", "reward": result.reward,
                               "vector": self._obs_vector(result.observation),
                               "done": result.done})
        return json.dumps({"type": "error", "message": f"unknown message type {kind!r}"})


def serve_stream(config: ScenarioConfig, infile, outfile):
    """Serve the protocol over a pair of text streams until close/EOF."""
    handler = ProtocolHandler(config)
    for line in infile:
        if not line.strip():
            continue
        reply = handler.handle_line(line)
        if handler.closed:
            break
        outfile.write(reply + "\n")
        outfile.flush()
