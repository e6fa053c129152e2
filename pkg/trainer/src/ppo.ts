/** PPO with a categorical actor and a separate value head: GAE advantages,
 * clipped surrogate objective, entropy bonus, Adam. Collection is
 * single-threaded across the configured envs, so a seed replays exactly. */

import { Adam, argmax, Grads, Mlp, scaleGrads, softmax, zeroGrads } from "./nn.js";
import { Rng } from "./rng.js";
import { Env } from "./envs.js";

export interface PPOConfig {
  obsDim: number;
  nActions: number;
  totalSteps: number;
  rolloutLength: number; // steps collected per update, split across envs
  minibatchSize: number;
  epochs: number; // passes over each rollout
  clipRatio: number;
  gamma: number;
  lambda: number;
  learningRate: number;
  entropyCoeff: number;
  valueCoeff: number;
  targetKl: number; // stop the update's epochs once approx KL exceeds 1.5x this
  anneal: boolean; // decay lr and entropy bonus linearly to zero over training
  hiddenSizes: number[];
  seed: number;
}

export const DEFAULT_PPO: Omit<PPOConfig, "obsDim" | "nActions"> = {
  totalSteps: 1_000_000,
  rolloutLength: 2048,
  minibatchSize: 64,
  epochs: 10,
  clipRatio: 0.2,
  gamma: 0.99,
  lambda: 0.95,
  learningRate: 3e-4,
  entropyCoeff: 0.01,
  valueCoeff: 0.5,
  targetKl: 0.02,
  anneal: true,
  hiddenSizes: [64, 64],
  seed: 0,
};

export interface CurvePoint {
  update: number;
  meanEpisodeReward: number;
  meanDelay: number; // estimated as 5 - reward per decision, see note below
}

interface Rollout {
  obs: Float64Array[];
  actions: Int32Array;
  logProbs: Float64Array;
  values: Float64Array;
  advantages: Float64Array;
  returns: Float64Array;
}

function validate(config: PPOConfig): void {
  if (!(config.clipRatio > 0 && config.clipRatio < 1)) throw new Error("clipRatio must be in (0,1)");
  if (!(config.gamma > 0 && config.gamma <= 1)) throw new Error("gamma must be in (0,1]");
  for (const key of ["totalSteps", "rolloutLength", "minibatchSize", "epochs"] as const) {
    if (config[key] <= 0) throw new Error(`${key} must be positive`);
  }
  if (config.hiddenSizes.some((h) => h <= 0)) throw new Error("hidden sizes must be positive");
}

export class PPOTrainer {
  readonly actor: Mlp;
  readonly critic: Mlp;
  readonly curve: CurvePoint[] = [];
  private actorOpt: Adam;
  private criticOpt: Adam;
  private rng: Rng;
  private pendingObs: (Float64Array | null)[];
  private episodeRewards: number[] = [];
  private episodeSteps: number[] = [];
  private runningReward = 0;
  private runningSteps = 0;
  private frac = 1; // annealing factor, 1 -> 0 over training

  constructor(readonly config: PPOConfig, private readonly envs: Env[]) {
    validate(config);
    if (envs.length === 0) throw new Error("need at least one env");
    this.rng = new Rng(config.seed);
    const actorSizes = [config.obsDim, ...config.hiddenSizes, config.nActions];
    const criticSizes = [config.obsDim, ...config.hiddenSizes, 1];
    this.actor = new Mlp(actorSizes, this.rng);
    this.critic = new Mlp(criticSizes, this.rng);
    // final policy layer starts small so the initial policy is near-uniform
    const last = this.actor.layers[this.actor.layers.length - 1];
    for (let i = 0; i < last.w.length; i++) last.w[i] *= 0.01;
    this.actorOpt = new Adam(this.actor, config.learningRate);
    this.criticOpt = new Adam(this.critic, config.learningRate);
    this.pendingObs = envs.map(() => null);
  }

  private sampleAction(probs: Float64Array): number {
    const r = this.rng.float();
    let acc = 0;
    for (let i = 0; i < probs.length; i++) {
      acc += probs[i];
      if (r < acc) return i;
    }
    return probs.length - 1;
  }

  private async collect(): Promise<Rollout> {
    const cfg = this.config;
    const perEnv = Math.ceil(cfg.rolloutLength / this.envs.length);
    const total = perEnv * this.envs.length;
    const obs: Float64Array[] = [];
    const actions = new Int32Array(total);
    const logProbs = new Float64Array(total);
    const values = new Float64Array(total);
    const rewards = new Float64Array(total);
    const dones = new Uint8Array(total);
    const advantages = new Float64Array(total);
    const returns = new Float64Array(total);

    let k = 0;
    for (let e = 0; e < this.envs.length; e++) {
      const env = this.envs[e];
      let cur = this.pendingObs[e];
      if (cur === null) {
        cur = Float64Array.from((await env.reset()).vector);
        this.runningReward = 0;
        this.runningSteps = 0;
      }
      const segStart = k;
      for (let t = 0; t < perEnv; t++, k++) {
        const probs = softmax(this.actor.forward(cur).out);
        const action = this.sampleAction(probs);
        const step = await env.step(action);
        obs.push(cur);
        actions[k] = action;
        logProbs[k] = Math.log(probs[action] + 1e-12);
        values[k] = this.critic.forward(cur).out[0];
        rewards[k] = step.reward;
        dones[k] = step.done ? 1 : 0;
        this.runningReward += step.reward;
        this.runningSteps += 1;
        if (step.done) {
          this.episodeRewards.push(this.runningReward);
          this.episodeSteps.push(this.runningSteps);
          this.runningReward = 0;
          this.runningSteps = 0;
          cur = Float64Array.from((await env.reset()).vector);
        } else {
          cur = Float64Array.from(step.vector);
        }
      }
      this.pendingObs[e] = cur;

      // GAE over this env's contiguous segment, bootstrapping past the end
      let lastGae = 0;
      let nextValue = this.critic.forward(cur).out[0];
      for (let t = segStart + perEnv - 1; t >= segStart; t--) {
        const nonTerminal = dones[t] ? 0 : 1;
        const delta = rewards[t] + cfg.gamma * nextValue * nonTerminal - values[t];
        lastGae = delta + cfg.gamma * cfg.lambda * nonTerminal * lastGae;
        advantages[t] = lastGae;
        returns[t] = advantages[t] + values[t];
        nextValue = values[t];
      }
    }

    // normalize advantages over the whole rollout
    let mean = 0;
    for (const a of advantages) mean += a;
    mean /= total;
    let varAcc = 0;
    for (const a of advantages) varAcc += (a - mean) * (a - mean);
    const std = Math.sqrt(varAcc / total) + 1e-8;
    for (let i = 0; i < total; i++) advantages[i] = (advantages[i] - mean) / std;

    return { obs, actions, logProbs, values, advantages, returns };
  }

  private update(rollout: Rollout): void {
    const cfg = this.config;
    const n = rollout.actions.length;
    const indices = new Int32Array(n);
    for (let i = 0; i < n; i++) indices[i] = i;
    const actorGrads = zeroGrads(this.actor);
    const criticGrads = zeroGrads(this.critic);

    for (let epoch = 0; epoch < cfg.epochs; epoch++) {
      this.rng.shuffle(indices);
      let klAcc = 0;
      let klCount = 0;
      for (let start = 0; start < n; start += cfg.minibatchSize) {
        const batch = indices.subarray(start, Math.min(start + cfg.minibatchSize, n));
        scaleGrads(actorGrads, 0);
        scaleGrads(criticGrads, 0);
        for (const i of batch) {
          const x = rollout.obs[i];
          const adv = rollout.advantages[i];
          const action = rollout.actions[i];

          const cache = this.actor.forward(x);
          const probs = softmax(cache.out);
          const logp = Math.log(probs[action] + 1e-12);
          const ratio = Math.exp(logp - rollout.logProbs[i]);
          klAcc += rollout.logProbs[i] - logp;
          klCount += 1;
          // clipped surrogate: zero gradient once the ratio leaves the trust band
          const inBand = adv >= 0 ? ratio < 1 + cfg.clipRatio : ratio > 1 - cfg.clipRatio;
          const dSurr = inBand ? -adv * ratio : 0;

          let entropy = 0;
          for (const p of probs) if (p > 0) entropy -= p * Math.log(p);

          const dLogits = new Float64Array(probs.length);
          for (let j = 0; j < probs.length; j++) {
            const dLogp = (j === action ? 1 : 0) - probs[j];
            const dEntropy = -probs[j] * (Math.log(probs[j] + 1e-12) + entropy);
            dLogits[j] = dSurr * dLogp - cfg.entropyCoeff * this.frac * dEntropy;
          }
          this.actor.backward(cache, dLogits, actorGrads);

          const vCache = this.critic.forward(x);
          const dV = new Float64Array(1);
          dV[0] = cfg.valueCoeff * (vCache.out[0] - rollout.returns[i]);
          this.critic.backward(vCache, dV, criticGrads);
        }
        scaleGrads(actorGrads, 1 / batch.length);
        scaleGrads(criticGrads, 1 / batch.length);
        this.actorOpt.step(actorGrads);
        this.criticOpt.step(criticGrads);
      }
      if (klAcc / klCount > 1.5 * cfg.targetKl) break;
    }
  }

  /** Run until totalSteps env steps have been consumed; returns the curve. */
  async train(onUpdate?: (point: CurvePoint) => void): Promise<CurvePoint[]> {
    const updates = Math.ceil(this.config.totalSteps / this.config.rolloutLength);
    for (let u = 0; u < updates; u++) {
      if (this.config.anneal) {
        this.frac = Math.max(1 - u / updates, 0.05);
        this.actorOpt.lr = this.config.learningRate * this.frac;
        this.criticOpt.lr = this.config.learningRate * this.frac;
      }
      this.episodeRewards = [];
      this.episodeSteps = [];
      const rollout = await this.collect();
      this.update(rollout);
      const nEp = this.episodeRewards.length;
      const meanReward = nEp ? this.episodeRewards.reduce((a, b) => a + b, 0) / nEp : NaN;
      const meanSteps = nEp ? this.episodeSteps.reduce((a, b) => a + b, 0) / nEp : NaN;
      // reward per decision is 5 - delay when every decision completes, so
      // this is an estimate (censored tasks bias it slightly upward)
      const point: CurvePoint = {
        update: u,
        meanEpisodeReward: meanReward,
        meanDelay: 5 - meanReward / meanSteps,
      };
      this.curve.push(point);
      onUpdate?.(point);
    }
    return this.curve;
  }

  /** Deterministic evaluation action (argmax over logits). */
  greedyAction(obs: Float64Array): number {
    return argmax(this.actor.forward(obs).out);
  }
}

export function curveToCsv(curve: CurvePoint[]): string {
  const rows = curve.map(
    (p) => `${p.update},${p.meanEpisodeReward},${p.meanDelay}`,
  );
  return ["update,mean_episode_reward,mean_delay", ...rows].join("\n") + "\n";
}
