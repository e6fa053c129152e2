/** Training entry point: PPO against the simulator over the NDJSON protocol.
 *
 *   node dist/train.js --scenario scenario2 --steps 1000000 --out out/
 *
 * Writes out/policy.json (mlp-policy weight file) and out/learning_curve.csv.
 */

import { mkdirSync, writeFileSync } from "node:fs";
import { join } from "node:path";
import { parseArgs } from "node:util";
import { RemoteEnv } from "./envs.js";
import { curveToCsv, DEFAULT_PPO, PPOTrainer } from "./ppo.js";
import { exportWeights, Normalization } from "./weights.js";

// Must match the evaluation run config; the evaluator refuses the weight
// file otherwise, so a silent mismatch cannot slip through.
export const DEFAULT_NORMALIZATION: Normalization = {
  sz: 40000000.0,
  cu: 26000.0,
  pp: 100000.0,
  dt: 707.1067811865476,
  q_t: 400000000.0,
  q_p: 260000.0,
};

export async function main(argv: string[]): Promise<void> {
  const { values } = parseArgs({
    args: argv,
    options: {
      scenario: { type: "string", default: "scenario2" },
      steps: { type: "string", default: String(DEFAULT_PPO.totalSteps) },
      out: { type: "string", default: "out" },
      seed: { type: "string", default: "0" },
      envs: { type: "string", default: "1" },
      rollout: { type: "string", default: String(DEFAULT_PPO.rolloutLength) },
      minibatch: { type: "string", default: String(DEFAULT_PPO.minibatchSize) },
      entropy: { type: "string", default: String(DEFAULT_PPO.entropyCoeff) },
      snapshots: { type: "boolean", default: false }, // keep every trailing-best checkpoint
      "first-env-seed": { type: "string", default: "1000" }, // keep 0..99 held out
    },
  });

  const nEnvs = Number(values.envs);
  const firstSeed = Number(values["first-env-seed"]);
  const envs = Array.from(
    { length: nEnvs },
    (_, i) => new RemoteEnv(values.scenario!, firstSeed + i, nEnvs),
  );
  const probe = await envs[0].reset();
  const obsDim = probe.vector.length;
  const m = (obsDim - 6) / 4;

  const trainer = new PPOTrainer(
    {
      ...DEFAULT_PPO,
      obsDim,
      nActions: m + 2,
      totalSteps: Number(values.steps),
      rolloutLength: Number(values.rollout),
      minibatchSize: Number(values.minibatch),
      entropyCoeff: Number(values.entropy),
      seed: Number(values.seed),
    },
    envs,
  );

  mkdirSync(values.out!, { recursive: true });
  const started = Date.now();
  // PPO on this env can destabilize late in training, so keep the checkpoint
  // with the best trailing-5-update mean delay alongside the latest one
  let bestTrailing = Infinity;
  await trainer.train((point) => {
    const elapsed = ((Date.now() - started) / 60000).toFixed(1);
    console.log(
      `update ${point.update}  reward/ep ${point.meanEpisodeReward.toFixed(1)}  ` +
        `est delay ${point.meanDelay.toFixed(3)}s  (${elapsed} min)`,
    );
    // checkpoint every update so a killed run still leaves artifacts
    exportWeights(trainer.actor, DEFAULT_NORMALIZATION, join(values.out!, "policy.json"));
    writeFileSync(join(values.out!, "learning_curve.csv"), curveToCsv(trainer.curve));
    const tail = trainer.curve.slice(-5).map((p) => p.meanDelay);
    const trailing = tail.reduce((a, b) => a + b, 0) / tail.length;
    if (tail.length === 5 && Number.isFinite(trailing) && trailing < bestTrailing) {
      bestTrailing = trailing;
      exportWeights(trainer.actor, DEFAULT_NORMALIZATION, join(values.out!, "policy_best.json"));
      if (values.snapshots) {
        exportWeights(
          trainer.actor,
          DEFAULT_NORMALIZATION,
          join(values.out!, `policy_u${point.update}.json`),
        );
      }
    }
  });
  envs.forEach((e) => e.close());
}

const isMain = process.argv[1] && import.meta.url.endsWith(process.argv[1].split("/").pop()!);
if (isMain) {
  main(process.argv.slice(2)).catch((err) => {
    console.error(err);
    process.exit(1);
  });
}
