/** Minimal dense MLP with tanh hidden layers, linear output, and Adam.
 *
 * Weights are stored row-major as rows x cols matrices computing y = W x + b,
 * the same orientation as the exported weight files, so export is a plain
 * copy with no transposition.
 */

import { Rng } from "./rng.js";

export interface Layer {
  rows: number;
  cols: number;
  w: Float64Array; // row-major rows x cols
  b: Float64Array; // length rows
}

export interface ForwardCache {
  /** Layer inputs: x0, h1, ..., h_{L-1} (post-activation). */
  inputs: Float64Array[];
  /** Pre-activation of each hidden layer (needed for tanh'). */
  pre: Float64Array[];
  out: Float64Array;
}

export class Mlp {
  readonly layers: Layer[];

  constructor(public readonly sizes: number[], rng?: Rng) {
    if (sizes.length < 2) throw new Error("need at least input and output sizes");
    this.layers = [];
    for (let i = 0; i < sizes.length - 1; i++) {
      const rows = sizes[i + 1];
      const cols = sizes[i];
      const w = new Float64Array(rows * cols);
      if (rng) {
        // orthogonal-ish init is overkill here; scaled gaussian works fine
        const scale = Math.sqrt(2 / (rows + cols));
        for (let k = 0; k < w.length; k++) w[k] = scale * rng.gauss();
      }
      this.layers.push({ rows, cols, w, b: new Float64Array(rows) });
    }
  }

  forward(x: Float64Array): ForwardCache {
    const inputs: Float64Array[] = [];
    const pre: Float64Array[] = [];
    let cur = x;
    for (let l = 0; l < this.layers.length; l++) {
      const { rows, cols, w, b } = this.layers[l];
      inputs.push(cur);
      const y = new Float64Array(rows);
      for (let r = 0; r < rows; r++) {
        let acc = b[r];
        const off = r * cols;
        for (let c = 0; c < cols; c++) acc += w[off + c] * cur[c];
        y[r] = acc;
      }
      if (l < this.layers.length - 1) {
        pre.push(y);
        const h = new Float64Array(rows);
        for (let r = 0; r < rows; r++) h[r] = Math.tanh(y[r]);
        cur = h;
      } else {
        cur = y;
      }
    }
    return { inputs, pre, out: cur };
  }

  /** Accumulate dLoss/dparams into grads given dLoss/dout for one sample. */
  backward(cache: ForwardCache, dOut: Float64Array, grads: Grads): void {
    let delta = dOut;
    for (let l = this.layers.length - 1; l >= 0; l--) {
      const { rows, cols, w } = this.layers[l];
      const input = cache.inputs[l];
      const gw = grads.w[l];
      const gb = grads.b[l];
      for (let r = 0; r < rows; r++) {
        const d = delta[r];
        gb[r] += d;
        const off = r * cols;
        for (let c = 0; c < cols; c++) gw[off + c] += d * input[c];
      }
      if (l > 0) {
        const prevRows = cols;
        const next = new Float64Array(prevRows);
        for (let c = 0; c < prevRows; c++) {
          let acc = 0;
          for (let r = 0; r < rows; r++) acc += w[r * cols + c] * delta[r];
          const t = Math.tanh(cache.pre[l - 1][c]);
          next[c] = acc * (1 - t * t);
        }
        delta = next;
      }
    }
  }

  parameterCount(): number {
    return this.layers.reduce((n, l) => n + l.w.length + l.b.length, 0);
  }
}

export interface Grads {
  w: Float64Array[];
  b: Float64Array[];
}

export function zeroGrads(net: Mlp): Grads {
  return {
    w: net.layers.map((l) => new Float64Array(l.w.length)),
    b: net.layers.map((l) => new Float64Array(l.b.length)),
  };
}

export function scaleGrads(grads: Grads, factor: number): void {
  for (const buf of [...grads.w, ...grads.b]) {
    for (let i = 0; i < buf.length; i++) buf[i] *= factor;
  }
}

export class Adam {
  private m: Float64Array[];
  private v: Float64Array[];
  private t = 0;

  constructor(
    private readonly net: Mlp,
    public lr: number,
    private readonly beta1 = 0.9,
    private readonly beta2 = 0.999,
    private readonly eps = 1e-8,
  ) {
    const shapes = net.layers.flatMap((l) => [l.w.length, l.b.length]);
    this.m = shapes.map((n) => new Float64Array(n));
    this.v = shapes.map((n) => new Float64Array(n));
  }

  step(grads: Grads): void {
    this.t += 1;
    const correct1 = 1 - Math.pow(this.beta1, this.t);
    const correct2 = 1 - Math.pow(this.beta2, this.t);
    let slot = 0;
    for (let l = 0; l < this.net.layers.length; l++) {
      for (const [param, grad] of [
        [this.net.layers[l].w, grads.w[l]],
        [this.net.layers[l].b, grads.b[l]],
      ] as const) {
        const m = this.m[slot];
        const v = this.v[slot];
        slot += 1;
        for (let i = 0; i < param.length; i++) {
          const g = grad[i];
          m[i] = this.beta1 * m[i] + (1 - this.beta1) * g;
          v[i] = this.beta2 * v[i] + (1 - this.beta2) * g * g;
          param[i] -= (this.lr * (m[i] / correct1)) / (Math.sqrt(v[i] / correct2) + this.eps);
        }
      }
    }
  }
}

export function softmax(logits: Float64Array): Float64Array {
  let max = -Infinity;
  for (const v of logits) if (v > max) max = v;
  let sum = 0;
  const out = new Float64Array(logits.length);
  for (let i = 0; i < logits.length; i++) {
    out[i] = Math.exp(logits[i] - max);
    sum += out[i];
  }
  for (let i = 0; i < out.length; i++) out[i] /= sum;
  return out;
}

export function argmax(values: Float64Array): number {
  let best = 0;
  for (let i = 1; i < values.length; i++) if (values[i] > values[best]) best = i;
  return best;
}
