import { describe, expect, it } from "vitest";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { loadGraphFile, toGraphData } from "../src/graph.js";
import { makeRecord } from "./helpers.js";

const BASE = {
  numVars: 3,
  clauses: [
    [1, -2],
    [2, 3],
  ],
};

describe("toGraphData", () => {
  it("indexes a valid record into CSR form", () => {
    const g = toGraphData(makeRecord({ ...BASE, labelOrder: [2, 3, 1] }));
    expect(g.numVars).toBe(3);
    expect(g.numClauses).toBe(2);
    expect(g.numNodes).toBe(6);
    expect(g.featureDim).toBe(7);
    expect(g.labelOrder).toEqual([2, 3, 1]);

    // clause node 3 receives x1 (+), x2 (-), meta (0)
    const { rowPtr, colIdx, signIdx } = g.toClause;
    const row3 = Array.from(colIdx.slice(rowPtr[3]!, rowPtr[4]!));
    const signs3 = Array.from(signIdx.slice(rowPtr[3]!, rowPtr[4]!));
    expect(row3).toEqual([0, 1, 5]);
    expect(signs3).toEqual([2, 0, 1]);
    // variable rows in toClause are empty; reversed direction fills them
    expect(rowPtr[1]).toBe(rowPtr[0]);
    const rev = g.toVarMeta;
    expect(Array.from(rev.colIdx.slice(rev.rowPtr[1]!, rev.rowPtr[2]!))).toEqual([3, 4]);
    // meta node sees both clauses in the reversed direction
    expect(rev.rowPtr[6]! - rev.rowPtr[5]!).toBe(2);
  });

  it("accepts unlabeled records with a null labelOrder", () => {
    expect(toGraphData(makeRecord(BASE)).labelOrder).toBeNull();
  });

  it("rejects node kinds out of layout order", () => {
    const record = makeRecord(BASE);
    (record.node_kinds as string[])[0] = "clause";
    (record.node_kinds as string[])[3] = "variable";
    expect(() => toGraphData(record)).toThrow(/node 0/);
  });

  it("rejects edges that do not point into clauses", () => {
    const record = makeRecord(BASE);
    (record.edge_list as number[][]).push([0, 1, 1]);
    expect(() => toGraphData(record)).toThrow(/tripartite/);
  });

  it("rejects ragged feature rows", () => {
    const record = makeRecord(BASE);
    (record.features as number[][])[2] = [1, 2];
    expect(() => toGraphData(record)).toThrow(/ragged/);
  });

  it("rejects a label_order that is not a permutation", () => {
    expect(() => toGraphData(makeRecord({ ...BASE, labelOrder: [1, 1, 2] }))).toThrow(
      /permutation/,
    );
    expect(() => toGraphData(makeRecord({ ...BASE, labelOrder: [1, 2] }))).toThrow(/permutation/);
  });

  it("rejects unknown polarity weights via the schema", () => {
    const record = makeRecord(BASE);
    (record.edge_list as number[][])[0]![2] = 2;
    expect(() => toGraphData(record)).toThrow();
  });
});

describe("loadGraphFile", () => {
  it("reads one record per line and skips blanks", () => {
    const dir = mkdtempSync(join(tmpdir(), "graphs-"));
    const path = join(dir, "graphs.jsonl");
    const lines = [
      JSON.stringify(makeRecord({ ...BASE, id: "a" })),
      "",
      JSON.stringify(makeRecord({ ...BASE, id: "b", labelOrder: [3, 2, 1] })),
    ];
    writeFileSync(path, lines.join("\n") + "\n");
    const graphs = loadGraphFile(path);
    expect(graphs.map((g) => g.instanceId)).toEqual(["a", "b"]);
    expect(graphs[1]!.labelOrder).toEqual([3, 2, 1]);
  });

  it("throws on an empty file", () => {
    const dir = mkdtempSync(join(tmpdir(), "graphs-"));
    const path = join(dir, "empty.jsonl");
    writeFileSync(path, "\n");
    expect(() => loadGraphFile(path)).toThrow(/no graph records/);
  });
});
