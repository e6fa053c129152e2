export { Rng } from "./rng.js";
export { Adam, argmax, Mlp, softmax, zeroGrads } from "./nn.js";
export { exportWeights, importWeights } from "./weights.js";
export type { Normalization, WeightFile } from "./weights.js";
export { spawnSimulator, StdioEnvClient, TcpEnvClient, ProtocolViolation } from "./protocol.js";
export { RemoteEnv, SanityEnv } from "./envs.js";
export type { Env } from "./envs.js";
export { curveToCsv, DEFAULT_PPO, PPOTrainer } from "./ppo.js";
export type { CurvePoint, PPOConfig } from "./ppo.js";
