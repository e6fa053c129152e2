/** The "mlp-policy" weight file: the only artifact the evaluator accepts.
 *
 * {
 *   "format": "mlp-policy", "version": 1, "activation": "tanh",
 *   "normalization": {"sz": ..., "cu": ..., "pp": ..., "dt": ..., "q_t": ..., "q_p": ...},
 *   "layers": [{"rows": R, "cols": C, "weights": [R*C row-major], "bias": [R]}, ...]
 * }
 */

import { readFileSync, writeFileSync } from "node:fs";
import { Mlp } from "./nn.js";

export interface Normalization {
  sz: number;
  cu: number;
  pp: number;
  dt: number;
  q_t: number;
  q_p: number;
}

export interface WeightFile {
  format: "mlp-policy";
  version: number;
  activation: "tanh";
  normalization: Normalization;
  layers: { rows: number; cols: number; weights: number[]; bias: number[] }[];
}

export function exportWeights(net: Mlp, normalization: Normalization, path: string): void {
  const doc: WeightFile = {
    format: "mlp-policy",
    version: 1,
    activation: "tanh",
    normalization,
    layers: net.layers.map((l) => ({
      rows: l.rows,
      cols: l.cols,
      weights: Array.from(l.w),
      bias: Array.from(l.b),
    })),
  };
  writeFileSync(path, JSON.stringify(doc) + "\n");
}

export function importWeights(path: string): { net: Mlp; normalization: Normalization } {
  const doc = JSON.parse(readFileSync(path, "utf-8")) as WeightFile;
  if (doc.format !== "mlp-policy") throw new Error(`${path}: not an mlp-policy weight file`);
  if (doc.activation !== "tanh") throw new Error(`${path}: unsupported activation`);
  const sizes = [doc.layers[0].cols, ...doc.layers.map((l) => l.rows)];
  const net = new Mlp(sizes);
  doc.layers.forEach((spec, i) => {
    if (spec.weights.length !== spec.rows * spec.cols || spec.bias.length !== spec.rows) {
      throw new Error(`${path}: layer ${i} shape mismatch`);
    }
    if (i > 0 && spec.cols !== doc.layers[i - 1].rows) {
      throw new Error(`${path}: layer ${i} does not chain`);
    }
    net.layers[i].w.set(spec.weights);
    net.layers[i].b.set(spec.bias);
  });
  return { net, normalization: doc.normalization };
}
