import { describe, expect, it } from "vitest";

import { toGraphData } from "../src/graph.js";
import { lambdarankLoss } from "../src/loss.js";
import { Model } from "../src/model.js";
import { Rng } from "../src/rng.js";
import { makeGraph, makeRecord, permuteRecord, randomClauses, randomPermutation } from "./helpers.js";

const TINY = {
  id: "tiny",
  numVars: 3,
  clauses: [
    [1, -2],
    [2, 3],
    [-1, -3],
  ],
  labelOrder: [2, 3, 1],
};

describe("Model.forward", () => {
  it("is equivariant under variable renaming", () => {
    const rng = new Rng("equiv");
    for (let rep = 0; rep < 5; rep++) {
      const numVars = 6;
      const record = makeRecord({
        id: `equiv-${rep}`,
        numVars,
        clauses: randomClauses(numVars, 10, rng),
      });
      const perm = randomPermutation(numVars, rng);
      const model = new Model(7, 8, 4, new Rng(`m:${rep}`));
      const base = model.forward(toGraphData(record)).scores;
      const permuted = model.forward(toGraphData(permuteRecord(record, perm))).scores;
      for (let v = 1; v <= numVars; v++) {
        expect(Math.abs(permuted[perm[v - 1]! - 1]! - base[v - 1]!)).toBeLessThan(1e-9);
      }
    }
  });

  it("is deterministic for a fixed init seed", () => {
    const g = makeGraph(TINY);
    const a = new Model(7, 8, 3, new Rng("seed-a")).forward(g).scores;
    const b = new Model(7, 8, 3, new Rng("seed-a")).forward(g).scores;
    const c = new Model(7, 8, 3, new Rng("seed-b")).forward(g).scores;
    expect(Array.from(a)).toEqual(Array.from(b));
    expect(Array.from(a)).not.toEqual(Array.from(c));
  });

  it("rejects graphs with the wrong feature width", () => {
    const g = makeGraph(TINY);
    const model = new Model(9, 4, 2, new Rng("dim"));
    expect(() => model.forward(g)).toThrow(/expects 9/);
  });

  it("applies dropout only in training mode", () => {
    const g = makeGraph(TINY);
    const model = new Model(7, 8, 3, new Rng("drop"));
    const evalScores = model.forward(g).scores;
    const evalAgain = model.forward(g, { train: false, dropout: 0.5 }).scores;
    const trainScores = model.forward(g, { train: true, dropout: 0.5, rng: new Rng("mask") }).scores;
    expect(Array.from(evalAgain)).toEqual(Array.from(evalScores));
    expect(Array.from(trainScores)).not.toEqual(Array.from(evalScores));
  });
});

describe("Model.backward", () => {
  it("matches finite differences through the whole network", () => {
    const g = makeGraph(TINY);
    const model = new Model(7, 4, 2, new Rng("fd-model"));
    const { scores, cache } = model.forward(g);
    const { grad } = lambdarankLoss(scores, TINY.labelOrder);
    const analytic = model.backward(g, cache, grad);

    const h = 1e-5;
    let worst = 0;
    for (const { name } of model.shapes) {
      const theta = model.params[name]!;
      for (let i = 0; i < theta.length; i++) {
        const saved = theta[i]!;
        theta[i] = saved + h;
        const up = lambdarankLoss(model.forward(g).scores, TINY.labelOrder).loss;
        theta[i] = saved - h;
        const down = lambdarankLoss(model.forward(g).scores, TINY.labelOrder).loss;
        theta[i] = saved;
        worst = Math.max(worst, Math.abs(analytic[name]![i]! - (up - down) / (2 * h)));
      }
    }
    expect(worst).toBeLessThan(1e-6);
  });

  it("returns zero gradients for zero upstream signal", () => {
    const g = makeGraph(TINY);
    const model = new Model(7, 4, 2, new Rng("zero"));
    const { cache } = model.forward(g);
    const grads = model.backward(g, cache, new Float64Array(g.numVars));
    for (const data of Object.values(grads)) {
      for (const x of data) expect(x).toBe(0);
    }
  });
});

describe("checkpoints", () => {
  it("round-trips through JSON with identical scores", () => {
    const g = makeGraph(TINY);
    const model = new Model(7, 8, 3, new Rng("ckpt"));
    const restored = Model.fromCheckpoint(JSON.parse(JSON.stringify(model.toCheckpoint())));
    expect(restored.hidden).toBe(8);
    expect(restored.rounds).toBe(3);
    expect(Array.from(restored.forward(g).scores)).toEqual(Array.from(model.forward(g).scores));
  });

  it("rejects foreign payloads and truncated parameters", () => {
    expect(() => Model.fromCheckpoint({ format: "other" } as never)).toThrow(/checkpoint/);
    const ckpt = new Model(7, 4, 2, new Rng("trunc")).toCheckpoint();
    ckpt.params.Win = ckpt.params.Win!.slice(0, 3);
    expect(() => Model.fromCheckpoint(ckpt)).toThrow(/Win/);
  });
});
