import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";
import { SanityEnv } from "../src/envs.js";
import { DEFAULT_PPO, PPOTrainer } from "../src/ppo.js";
import { Rng } from "../src/rng.js";
import { exportWeights, importWeights } from "../src/weights.js";
import { DEFAULT_NORMALIZATION } from "../src/train.js";

function sanityTrainer(seed: number, totalSteps: number): PPOTrainer {
  const env = new SanityEnv(6, 4, 50, seed + 100);
  return new PPOTrainer(
    {
      ...DEFAULT_PPO,
      obsDim: 6,
      nActions: 4,
      totalSteps,
      rolloutLength: 512,
      seed,
    },
    [env],
  );
}

describe("PPO on the known-optimum MDP", () => {
  it("picks the rewarded action at least 99% of the time, for every seed tried", async () => {
    for (const seed of [0, 1, 2]) {
      const trainer = sanityTrainer(seed, 20_000);
      await trainer.train();
      const rng = new Rng(777);
      let hits = 0;
      const trials = 1000;
      for (let t = 0; t < trials; t++) {
        const obs = Float64Array.from({ length: 6 }, () => rng.float());
        if (trainer.greedyAction(obs) === 0) hits += 1;
      }
      expect(hits / trials).toBeGreaterThanOrEqual(0.99);
    }
  }, 300_000);

  it("is reproducible from the seed", async () => {
    const a = sanityTrainer(5, 2048);
    const b = sanityTrainer(5, 2048);
    await a.train();
    await b.train();
    expect(Array.from(a.actor.layers[0].w)).toEqual(Array.from(b.actor.layers[0].w));
  }, 120_000);

  it("smoke run exports a weight file with chained dimensions", async () => {
    const trainer = sanityTrainer(9, 1000);
    await trainer.train();
    const dir = mkdtempSync(join(tmpdir(), "smoke-"));
    const path = join(dir, "policy.json");
    exportWeights(trainer.actor, DEFAULT_NORMALIZATION, path);
    const { net } = importWeights(path);
    expect(net.sizes).toEqual([6, 64, 64, 4]);
  }, 120_000);

  it("rejects invalid hyperparameters", () => {
    expect(
      () =>
        new PPOTrainer(
          { ...DEFAULT_PPO, obsDim: 6, nActions: 4, clipRatio: 1.5 },
          [new SanityEnv()],
        ),
    ).toThrow(/clipRatio/);
    expect(
      () =>
        new PPOTrainer(
          { ...DEFAULT_PPO, obsDim: 6, nActions: 4, gamma: 0 },
          [new SanityEnv()],
        ),
    ).toThrow(/gamma/);
  });
});
