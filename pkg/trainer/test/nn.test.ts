import { readFileSync } from "node:fs";
import { join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";
import { argmax, Mlp, softmax, zeroGrads } from "../src/nn.js";
import { importWeights } from "../src/weights.js";
import { Rng } from "../src/rng.js";

const HERE = fileURLToPath(new URL(".", import.meta.url));
const FIXTURES = join(HERE, "..", "..", "tests", "fixtures");

describe("forward pass", () => {
  it("matches the evaluator on the shipped golden fixture", () => {
    // cross-implementation oracle: the simulator's evaluator computed these
    // logits for this exact observation from the same weight file
    const { net } = importWeights(join(FIXTURES, "mlp_fixture.json"));
    const golden = JSON.parse(readFileSync(join(FIXTURES, "golden_forward.json"), "utf-8"));
    const out = net.forward(Float64Array.from(golden.observation_vector)).out;
    for (let i = 0; i < out.length; i++) {
      expect(Math.abs(out[i] - golden.logits[i])).toBeLessThan(1e-6);
    }
  });

  it("single zero-weight layer with one-hot bias is a constant policy", () => {
    const net = new Mlp([5, 3]);
    net.layers[0].b[2] = 1;
    expect(argmax(net.forward(new Float64Array(5)).out)).toBe(2);
  });
});

describe("backward pass", () => {
  it("agrees with central finite differences", () => {
    const rng = new Rng(42);
    const net = new Mlp([4, 6, 3], rng);
    const x = Float64Array.from({ length: 4 }, () => rng.gauss());
    // scalar loss: sum of squared logits
    const loss = () => {
      const out = net.forward(x).out;
      return out.reduce((acc, v) => acc + v * v, 0);
    };
    const cache = net.forward(x);
    const dOut = Float64Array.from(cache.out, (v) => 2 * v);
    const grads = zeroGrads(net);
    net.backward(cache, dOut, grads);

    const eps = 1e-6;
    for (let l = 0; l < net.layers.length; l++) {
      for (const [param, grad] of [
        [net.layers[l].w, grads.w[l]],
        [net.layers[l].b, grads.b[l]],
      ] as const) {
        for (let i = 0; i < param.length; i += 7) {
          const saved = param[i];
          param[i] = saved + eps;
          const up = loss();
          param[i] = saved - eps;
          const down = loss();
          param[i] = saved;
          expect(Math.abs(grad[i] - (up - down) / (2 * eps))).toBeLessThan(1e-5);
        }
      }
    }
  });
});

describe("softmax", () => {
  it("sums to one and is shift invariant", () => {
    const logits = Float64Array.from([1.5, -0.5, 3.0]);
    const p = softmax(logits);
    expect(p[0] + p[1] + p[2]).toBeCloseTo(1, 12);
    const shifted = softmax(Float64Array.from(logits, (v) => v + 100));
    for (let i = 0; i < 3; i++) expect(shifted[i]).toBeCloseTo(p[i], 12);
  });
});
