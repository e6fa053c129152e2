"""Offloading policies: the three baselines plus a feed-forward evaluator."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import ResolvedNormalization
from .env import observation_vector
from .simcore import Observation

ACTIVATIONS = {
    "tanh": np.tanh,
    "relu": lambda x: np.maximum(x, 0.0),
}


class RandomPolicy:
    """Uniform choice over all m+2 destinations."""

    def __init__(self, rng: np.random.Generator):
        self.rng = rng

    def __call__(self, obs: Observation) -> int:
        return int(self.rng.integers(obs.n_actions))


class CloudOnlyPolicy:
    """Send every task to the cloud, regardless of the observation."""

    def __call__(self, obs: Observation) -> int:
        return obs.m + 1


class GreedyPolicy:
    """Pick the destination with the least combined normalized queue load.

    Service j scores q_t[j]/norm_t + q_p[j]/norm_p, the RSU scores only its
    processing load and the cloud only its uplink load; ties go to the
    lowest index.
    """

    def __init__(self, norm_t: float = 4e8, norm_p: float = 2.6e5):
        self.norm_t = norm_t
        self.norm_p = norm_p

    def __call__(self, obs: Observation) -> int:
        m = obs.m
        scores = [obs.q_t[j] / self.norm_t + obs.q_p[j] / self.norm_p for j in range(m)]
        scores.append(obs.q_p[m] / self.norm_p)  # RSU
        scores.append(obs.q_t[m] / self.norm_t)  # cloud uplink
        return int(np.argmin(scores))


@dataclass(frozen=True)
class PolicyWeights:
    """Feed-forward network weights plus the normalization they were trained with."""

    layers: tuple  # ((W: ndarray rows x cols, b: ndarray), ...)
    activation: str
    normalization: dict

    @property
    def input_dim(self) -> int:
        return self.layers[0][0].shape[1]

    @property
    def output_dim(self) -> int:
        return self.layers[-1][0].shape[0]

    @classmethod
    def load(cls, path: str | Path) -> "PolicyWeights":
        data = json.loads(Path(path).read_text())
        if data.get("format") != "mlp-policy":
            raise ValueError("not an mlp-policy weight file")
        if data.get("activation", "tanh") not in ACTIVATIONS:
            raise ValueError(f"unknown activation {data.get('activation')!r}")
        layers = []
        prev_rows = None
        for spec in data["layers"]:
            rows, cols = int(spec["rows"]), int(spec["cols"])
            w = np.array(spec["weights"], dtype=float).reshape(rows, cols)
            b = np.array(spec["bias"], dtype=float)
            if b.shape != (rows,):
                raise ValueError("bias length does not match layer rows")
            if prev_rows is not None and cols != prev_rows:
                raise ValueError("adjacent layer dimensions do not chain")
            prev_rows = rows
            layers.append((w, b))
        return cls(layers=tuple(layers), activation=data.get("activation", "tanh"),
                   normalization=dict(data["normalization"]))

    def forward(self, x: np.ndarray) -> np.ndarray:
        act = ACTIVATIONS[self.activation]
        for w, b in self.layers[:-1]:
            x = act(w @ x + b)
        w, b = self.layers[-1]
        return w @ x + b


class MlpPolicy:
    """Deterministic argmax evaluator for trained weight files."""

    def __init__(self, weights: PolicyWeights, norms: ResolvedNormalization):
        for key, value in weights.normalization.items():
            ours = getattr(norms, key, None)
            if ours is None or not math.isclose(ours, float(value), rel_tol=1e-9):
                raise ValueError(
                    f"weight file normalization {key}={value} does not match run config "
                    f"({key}={ours}); refusing to evaluate"
                )
        self.weights = weights
        self.norms = norms

    @classmethod
    def load(cls, path: str | Path, norms: ResolvedNormalization) -> "MlpPolicy":
        return cls(PolicyWeights.load(path), norms)

    def logits(self, obs: Observation) -> np.ndarray:
        x = observation_vector(obs, self.norms)
        if len(x) != self.weights.input_dim:
            raise ValueError(
                f"observation length {len(x)} does not match weight input {self.weights.input_dim}"
            )
        return self.weights.forward(x)

    def __call__(self, obs: Observation) -> int:
        return int(np.argmax(self.logits(obs)))
