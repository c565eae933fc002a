// Shared fixtures: build graph records the same shape the solver-side
// exporter writes, without depending on it.

import { toGraphData, type GraphData } from "../src/graph.js";
import { Rng } from "../src/rng.js";

export const FEATURE_DIM = 7;

export interface RecordOptions {
  id?: string;
  numVars: number;
  clauses: number[][]; // signed 1-based literals
  labelOrder?: number[];
  featureSeed?: string;
}

export function makeRecord(opts: RecordOptions): Record<string, unknown> {
  const { numVars, clauses } = opts;
  const numNodes = numVars + clauses.length + 1;
  const meta = numNodes - 1;
  const kinds: string[] = [];
  for (let i = 0; i < numNodes; i++) {
    kinds.push(i < numVars ? "variable" : i < meta ? "clause" : "meta");
  }
  const rng = new Rng(opts.featureSeed ?? `feat:${opts.id ?? "t"}`);
  const features: number[][] = [];
  for (let i = 0; i < numNodes; i++) {
    features.push(Array.from({ length: FEATURE_DIM }, () => rng.next()));
  }
  const edges: [number, number, number][] = [];
  clauses.forEach((clause, ci) => {
    const clauseNode = numVars + ci;
    for (const lit of clause) {
      edges.push([Math.abs(lit) - 1, clauseNode, Math.sign(lit)]);
    }
    edges.push([meta, clauseNode, 0]);
  });
  const record: Record<string, unknown> = {
    instance_id: opts.id ?? "t-0",
    num_vars: numVars,
    num_clauses: clauses.length,
    node_kinds: kinds,
    features,
    edge_list: edges,
  };
  if (opts.labelOrder) record.label_order = opts.labelOrder;
  return record;
}

export function makeGraph(opts: RecordOptions): GraphData {
  return toGraphData(makeRecord(opts));
}

/**
 * Relabel variables: perm[v-1] is the new 1-based id of old variable v.
 * Feature rows move with their variables so the result describes the
 * same formula under a renaming.
 */
export function permuteRecord(
  record: Record<string, unknown>,
  perm: number[],
): Record<string, unknown> {
  const numVars = record.num_vars as number;
  const clausesFeatures = (record.features as number[][]).slice(numVars);
  const features: number[][] = new Array(numVars);
  for (let v = 1; v <= numVars; v++) {
    features[perm[v - 1]! - 1] = (record.features as number[][])[v - 1]!;
  }
  const edges = (record.edge_list as [number, number, number][]).map(([src, dst, w]) => {
    const mapped = src < numVars ? perm[src]! - 1 : src;
    return [mapped, dst, w] as [number, number, number];
  });
  const out: Record<string, unknown> = {
    ...record,
    features: [...features, ...clausesFeatures],
    edge_list: edges,
  };
  if (record.label_order) {
    out.label_order = (record.label_order as number[]).map((v) => perm[v - 1]!);
  }
  return out;
}

/** Uniform random 3-CNF-ish clauses (no duplicate vars within a clause). */
export function randomClauses(numVars: number, numClauses: number, rng: Rng): number[][] {
  const clauses: number[][] = [];
  for (let c = 0; c < numClauses; c++) {
    const vars: number[] = [];
    while (vars.length < Math.min(3, numVars)) {
      const v = rng.int(numVars) + 1;
      if (!vars.includes(v)) vars.push(v);
    }
    clauses.push(vars.map((v) => (rng.next() < 0.5 ? -v : v)));
  }
  return clauses;
}

export function randomPermutation(n: number, rng: Rng): number[] {
  const perm = Array.from({ length: n }, (_, i) => i + 1);
  rng.shuffle(perm);
  return perm;
}
