/** Environments the rollout collector can drive: the remote simulator and a
 * tiny known-optimum MDP used to sanity-check the PPO machinery. */

import { Rng } from "./rng.js";
import { ObsReply, StepReply, spawnSimulator, StdioEnvClient, TcpEnvClient } from "./protocol.js";

export interface Env {
  /** Start an episode; the env picks the next seed from its configured sequence. */
  reset(): Promise<ObsReply>;
  step(action: number): Promise<StepReply>;
  close(): void;
}

/** Remote simulator episodes, walking a seed sequence so no seed repeats. */
export class RemoteEnv implements Env {
  private client: StdioEnvClient | TcpEnvClient;
  private nextSeed: number;

  constructor(address: string, firstSeed: number, private readonly seedStride = 1) {
    // address is either a scenario name (spawn over stdio) or host:port
    const tcp = address.match(/^([\w.-]+):(\d+)$/);
    this.client = tcp
      ? new TcpEnvClient(tcp[1], Number(tcp[2]))
      : spawnSimulator(address);
    this.nextSeed = firstSeed;
  }

  async reset(): Promise<ObsReply> {
    // a fully censored episode can come back done immediately; skip it
    for (;;) {
      const seed = this.nextSeed;
      this.nextSeed += this.seedStride;
      const obs = await this.client.reset(seed);
      if (!obs.done) return obs;
    }
  }

  step(action: number): Promise<StepReply> {
    return this.client.act(action);
  }

  close(): void {
    this.client.close();
  }
}

/** Reward +5 only for action 0, noisy observations, fixed-length episodes. */
export class SanityEnv implements Env {
  private t = 0;
  private rng: Rng;

  constructor(
    public readonly obsDim = 6,
    public readonly nActions = 4,
    private readonly episodeLen = 50,
    seed = 0,
  ) {
    this.rng = new Rng(seed);
  }

  private observe(): number[] {
    const vec: number[] = [];
    for (let i = 0; i < this.obsDim; i++) vec.push(this.rng.float());
    return vec;
  }

  async reset(): Promise<ObsReply> {
    this.t = 0;
    return { vector: this.observe(), done: false };
  }

  async step(action: number): Promise<StepReply> {
    this.t += 1;
    return {
      reward: action === 0 ? 5 : 0,
      vector: this.observe(),
      done: this.t >= this.episodeLen,
    };
  }

  close(): void {}
}
