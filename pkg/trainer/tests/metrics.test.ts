import { describe, expect, it } from "vitest";

import { relevanceGain, spearmanPerm } from "../src/metrics.js";
import { Rng, hashSeed } from "../src/rng.js";

describe("relevanceGain", () => {
  it("anchors rank 1 at 1.0 and rank 3 at 0.5", () => {
    expect(relevanceGain(1)).toBe(1.0);
    expect(relevanceGain(3)).toBeCloseTo(0.5, 12);
  });

  it("decreases with rank and rejects rank < 1", () => {
    for (let r = 1; r < 20; r++) {
      expect(relevanceGain(r + 1)).toBeLessThan(relevanceGain(r));
    }
    expect(() => relevanceGain(0)).toThrow();
  });
});

describe("spearmanPerm", () => {
  it("hits the exact extremes", () => {
    expect(spearmanPerm([1, 2, 3, 4], [1, 2, 3, 4])).toBe(1.0);
    expect(spearmanPerm([1, 2, 3, 4], [4, 3, 2, 1])).toBe(-1.0);
  });

  it("matches the hand-computed 4-variable case", () => {
    // every variable's rank moves by 1: rho = 1 - 6*4/(4*15) = 0.6
    expect(Math.abs(spearmanPerm([1, 2, 3, 4], [2, 1, 4, 3]) - 0.6)).toBeLessThan(1e-12);
  });

  it("is symmetric in its arguments", () => {
    const rng = new Rng("sym");
    for (let rep = 0; rep < 10; rep++) {
      const a = Array.from({ length: 9 }, (_, i) => i + 1);
      const b = a.slice();
      rng.shuffle(a);
      rng.shuffle(b);
      expect(spearmanPerm(a, b)).toBeCloseTo(spearmanPerm(b, a), 12);
    }
  });

  it("rejects mismatched or non-permutation inputs", () => {
    expect(() => spearmanPerm([1, 2], [1, 2, 3])).toThrow();
    expect(() => spearmanPerm([1, 1, 2], [1, 2, 3])).toThrow();
    expect(() => spearmanPerm([1], [1])).toThrow();
  });
});

describe("Rng", () => {
  it("is reproducible per seed string", () => {
    const a = new Rng("x");
    const b = new Rng("x");
    const c = new Rng("y");
    const seqA = Array.from({ length: 5 }, () => a.next());
    const seqB = Array.from({ length: 5 }, () => b.next());
    const seqC = Array.from({ length: 5 }, () => c.next());
    expect(seqA).toEqual(seqB);
    expect(seqA).not.toEqual(seqC);
    expect(hashSeed("x")).toBe(hashSeed("x"));
  });

  it("keeps next() in [0, 1) and int(n) in range", () => {
    const rng = new Rng("range");
    for (let i = 0; i < 1000; i++) {
      const u = rng.next();
      expect(u).toBeGreaterThanOrEqual(0);
      expect(u).toBeLessThan(1);
      const k = rng.int(7);
      expect(k).toBeGreaterThanOrEqual(0);
      expect(k).toBeLessThan(7);
    }
  });

  it("shuffles all elements without loss", () => {
    const rng = new Rng("shuffle");
    const items = Array.from({ length: 20 }, (_, i) => i);
    const shuffled = items.slice();
    rng.shuffle(shuffled);
    expect(shuffled).not.toEqual(items);
    expect([...shuffled].sort((a, b) => a - b)).toEqual(items);
  });

  it("produces roughly standard gaussians", () => {
    const rng = new Rng("gauss");
    const n = 20000;
    let sum = 0;
    let sumSq = 0;
    for (let i = 0; i < n; i++) {
      const x = rng.gaussian();
      sum += x;
      sumSq += x * x;
    }
    const mean = sum / n;
    const variance = sumSq / n - mean * mean;
    expect(Math.abs(mean)).toBeLessThan(0.05);
    expect(Math.abs(variance - 1)).toBeLessThan(0.1);
  });
});
