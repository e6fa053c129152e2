import json
import math
from pathlib import Path

import numpy as np
import pytest

from vfogsim.config import ScenarioConfig
from vfogsim.policies import (
    CloudOnlyPolicy,
    GreedyPolicy,
    MlpPolicy,
    PolicyWeights,
    RandomPolicy,
)
from vfogsim.simcore import Observation

FIXTURES = Path(__file__).parent / "fixtures"
NORMS = ScenarioConfig.load("scenario1").resolved_normalization()


def make_obs(m=2, q_t=None, q_p=None):
    return Observation(
        sz=2e7,
        cu=1000.0,
        pp=np.full(m + 2, 18_375.0),
        dt=np.full(m, 250.0),
        q_t=np.array(q_t if q_t is not None else np.zeros(m + 1), dtype=float),
        q_p=np.array(q_p if q_p is not None else np.zeros(m + 1), dtype=float),
    )


class TestRandomPolicy:
    def test_uniform_over_actions(self):
        policy = RandomPolicy(np.random.default_rng(0))
        obs = make_obs(m=2)
        n = 40_000
        counts = np.bincount([policy(obs) for _ in range(n)], minlength=4)
        sigma = math.sqrt(n * 0.25 * 0.75)
        assert np.all(np.abs(counts - n * 0.25) < 3 * sigma)
        assert counts.argmax() < 4

    def test_reproducible_and_in_range(self):
        a = [RandomPolicy(np.random.default_rng(3))(make_obs()) for _ in range(1)]
        b = [RandomPolicy(np.random.default_rng(3))(make_obs()) for _ in range(1)]
        assert a == b
        policy = RandomPolicy(np.random.default_rng(1))
        assert all(policy(make_obs(m=5)) < 7 for _ in range(1000))


class TestCloudOnlyPolicy:
    def test_always_cloud(self):
        policy = CloudOnlyPolicy()
        assert policy(make_obs(m=2)) == 3
        assert policy(make_obs(m=8)) == 9
        loaded = make_obs(m=2, q_t=[1e9, 1e9, 1e9], q_p=[1e6, 1e6, 1e6])
        assert policy(loaded) == 3


class TestGreedyPolicy:
    def test_all_zero_ties_to_lowest_index(self):
        assert GreedyPolicy()(make_obs(m=2)) == 0

    def test_hand_argmin(self):
        # normalized scores: service0=6, service1=4, rsu=5, cloud=5
        policy = GreedyPolicy(norm_t=1.0, norm_p=1.0)
        obs = make_obs(m=2, q_t=[3.0, 1.0, 5.0], q_p=[3.0, 3.0, 5.0])
        assert policy(obs) == 1

    def test_tie_break_prefers_service_over_rsu(self):
        policy = GreedyPolicy(norm_t=1.0, norm_p=1.0)
        obs = make_obs(m=2, q_t=[9.0, 2.0, 9.0], q_p=[9.0, 2.0, 4.0])
        # service1 = 4, rsu = 4, others worse: lower index wins
        assert policy(obs) == 1

    def test_in_range_for_any_m(self):
        policy = GreedyPolicy()
        for m in range(1, 10):
            assert 0 <= policy(make_obs(m=m)) < m + 2


class TestMlpPolicy:
    def test_one_hot_bias_constant_action(self):
        m = 2
        w = PolicyWeights(
            layers=((np.zeros((4, 14)), np.array([0.0, 0.0, 1.0, 0.0])),),
            activation="tanh",
            normalization=NORMS.as_dict(),
        )
        policy = MlpPolicy(w, NORMS)
        assert policy(make_obs(m=m)) == 2

    def test_golden_forward_pass(self):
        weights = PolicyWeights.load(FIXTURES / "mlp_fixture.json")
        golden = json.loads((FIXTURES / "golden_forward.json").read_text())
        logits = weights.forward(np.array(golden["observation_vector"]))
        assert np.allclose(logits, golden["logits"], atol=1e-6)

    def test_argmax_invariant_to_final_bias_shift(self):
        weights = PolicyWeights.load(FIXTURES / "mlp_fixture.json")
        policy = MlpPolicy(weights, NORMS)
        obs = make_obs(m=2, q_t=[1e7, 2e7, 0.0], q_p=[5e4, 1e4, 2e4])
        base = policy(obs)
        w, b = weights.layers[-1]
        shifted = PolicyWeights(layers=weights.layers[:-1] + ((w, b + 7.5),),
                                activation=weights.activation,
                                normalization=weights.normalization)
        assert MlpPolicy(shifted, NORMS)(obs) == base

    def test_normalization_mismatch_refused(self):
        weights = PolicyWeights.load(FIXTURES / "mlp_fixture.json")
        bad = dict(weights.normalization, sz=1.0)
        with pytest.raises(ValueError, match="normalization"):
            MlpPolicy(PolicyWeights(weights.layers, weights.activation, bad), NORMS)

    def test_dimension_chain_validated(self, tmp_path):
        doc = json.loads((FIXTURES / "mlp_fixture.json").read_text())
        doc["layers"][1]["cols"] = 5
        doc["layers"][1]["weights"] = [0.0] * 20
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(doc))
        with pytest.raises(ValueError):
            PolicyWeights.load(path)
