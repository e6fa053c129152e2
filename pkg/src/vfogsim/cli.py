"""Experiment runner and environment server.

Run policy x scenario sweeps over seed ranges, writing summary and trace
CSVs, or host the newline-delimited JSON environment protocol for an
external trainer.
"""

from __future__ import annotations

import argparse
import socketserver
import sys
from dataclasses import replace
from multiprocessing import Pool
from pathlib import Path

import numpy as np

from .config import ScenarioConfig
from .env import ProtocolHandler, serve_stream
from .metrics import aggregate, write_summary_csv, write_trace_csv
from .policies import CloudOnlyPolicy, GreedyPolicy, MlpPolicy, RandomPolicy
from .simcore import run_episode

_POLICY_RNG_TAG = 0x5EED


def build_policy(spec: str, config: ScenarioConfig, seed: int):
    """Instantiate a policy from its CLI name for one episode seed."""
    norms = config.resolved_normalization()
    if spec == "random":
        rng = np.random.default_rng(np.random.SeedSequence([seed, _POLICY_RNG_TAG]))
        return RandomPolicy(rng)
    if spec == "cloud":
        return CloudOnlyPolicy()
    if spec == "greedy":
        return GreedyPolicy(norm_t=norms.q_t, norm_p=norms.q_p)
    if spec.startswith("mlp:"):
        return MlpPolicy.load(spec[len("mlp:"):], norms)
    raise ValueError(f"unknown policy {spec!r} (expected random|cloud|greedy|mlp:<weightfile>)")


def _run_one(args):
    config, policy_spec, seed = args
    policy = build_policy(policy_spec, config, seed)
    return run_episode(config, policy, seed)


def parse_seeds(text: str) -> list[int]:
    """`A..B` (inclusive) or a single integer."""
    if ".." in text:
        lo, hi = text.split("..", 1)
        lo, hi = int(lo), int(hi)
        if hi < lo:
            raise ValueError(f"empty seed range {text!r}")
        return list(range(lo, hi + 1))
    return [int(text)]


def run_experiment(config: ScenarioConfig, policy_spec: str, seeds: list[int],
                   out_dir: Path, jobs: int = 1):
    """Run each seed as an independent episode and write summary/trace CSVs."""
    build_policy(policy_spec, config, seeds[0])  # fail fast on bad policy/weights
    work = [(config, policy_spec, s) for s in seeds]
    if jobs > 1:
        with Pool(jobs) as pool:
            results = pool.map(_run_one, work)
    else:
        results = [_run_one(w) for w in work]
    # results arrive in seed order either way, so output is jobs-invariant
    stats = aggregate(results)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_summary_csv(out_dir / "summary.csv", config.name, policy_spec, stats)
    write_trace_csv(out_dir / "trace.csv", results)
    print(f"{config.name} {policy_spec} mean_delay={stats.mean_delay:.4f} "
          f"ci95={stats.ci95_halfwidth:.4f} completion={stats.completion_ratio:.4f} "
          f"episodes={stats.n_samples}")
    return stats, results


class _EnvTCPHandler(socketserver.StreamRequestHandler):
    def handle(self):
        handler = ProtocolHandler(self.server.scenario_config)
        for raw in self.rfile:
            line = raw.decode()
            if not line.strip():
                continue
            try:
                reply = handler.handle_line(line)
            except Exception:
                break  # protocol-order violation: reset the connection
            if handler.closed:
                break
            self.wfile.write((reply + "\n").encode())
            self.wfile.flush()


def serve(config: ScenarioConfig, transport: str):
    if transport == "stdio":
        serve_stream(config, sys.stdin, sys.stdout)
        return
    host, _, port = transport.rpartition(":")
    server = socketserver.TCPServer((host or "127.0.0.1", int(port)), _EnvTCPHandler)
    server.scenario_config = config
    try:
        server.serve_forever()
    finally:
        server.server_close()


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="vfogsim",
        description="Vehicular fog offloading simulator: experiment runner and env server.",
    )
    parser.add_argument("--config", required=True,
                        help="config file path or preset name (scenario1/2/3)")
    parser.add_argument("--policy", default="greedy",
                        help="random|cloud|greedy|mlp:<weightfile>")
    parser.add_argument("--seeds", default="0", help="seed range A..B (inclusive) or one seed")
    parser.add_argument("--out", default="out", help="output directory for CSVs")
    parser.add_argument("--serve", metavar="ADDR",
                        help="serve the env protocol on host:port or 'stdio' instead of running")
    parser.add_argument("--trace-cadence", type=float, default=None,
                        help="queue-trace sample period in seconds")
    parser.add_argument("--jobs", type=int, default=1, help="parallel episode workers")
    args = parser.parse_args(argv)

    try:
        config = ScenarioConfig.load(args.config)
        if args.trace_cadence is not None:
            config = replace(config, trace_cadence_s=args.trace_cadence)
        if args.serve:
            serve(config, args.serve)
            return 0
        seeds = parse_seeds(args.seeds)
        run_experiment(config, args.policy, seeds, Path(args.out), jobs=args.jobs)
        return 0
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
