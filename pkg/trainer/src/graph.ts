// ---------------------------------------------------------------------------
// Instance-graph loading. One JSON record per line, as exported by the
// solver-side pipeline: variable nodes first, then clause nodes, then a
// single meta node; edges run variable/meta -> clause with a polarity
// weight (+1/-1 for literals, 0 for meta shortcuts).
//
// The loader validates the schema, then builds CSR adjacency for the two
// message-passing directions so the model never touches raw edge lists.
// ---------------------------------------------------------------------------

import { readFileSync } from "node:fs";
import { z } from "zod";

export const NODE_KINDS = ["variable", "clause", "meta"] as const;

const graphRecordSchema = z.object({
  instance_id: z.string().min(1),
  num_vars: z.number().int().nonnegative(),
  num_clauses: z.number().int().nonnegative(),
  node_kinds: z.array(z.enum(NODE_KINDS)),
  features: z.array(z.array(z.number())),
  edge_list: z.array(
    z.tuple([
      z.number().int().nonnegative(),
      z.number().int().nonnegative(),
      z.union([z.literal(1), z.literal(-1), z.literal(0)]),
    ]),
  ),
  label_order: z.array(z.number().int().positive()).optional(),
  label_scores: z.array(z.number()).optional(),
});

export type GraphRecord = z.infer<typeof graphRecordSchema>;

/** Sign index used to pick message weights: -1 -> 0, 0 -> 1, +1 -> 2. */
export function signIndex(weight: number): number {
  return weight + 1;
}

export interface Csr {
  /** numNodes+1 offsets into colIdx/signIdx; empty rows for non-targets. */
  rowPtr: Int32Array;
  colIdx: Int32Array;
  signIdx: Uint8Array;
}

export interface GraphData {
  instanceId: string;
  numVars: number;
  numClauses: number;
  numNodes: number;
  featureDim: number;
  /** Row-major numNodes x featureDim. */
  features: Float64Array;
  /** Edges aggregated into clause nodes (sources: variables + meta). */
  toClause: Csr;
  /** The same edges reversed, aggregated into variable/meta nodes. */
  toVarMeta: Csr;
  /** 1-based variable ids, best first; present only on labeled records. */
  labelOrder: number[] | null;
}

function buildCsr(
  numNodes: number,
  edges: [number, number, number][],
  reverse: boolean,
): Csr {
  const counts = new Int32Array(numNodes + 1);
  for (const [src, dst] of edges) counts[(reverse ? src : dst) + 1]++;
  const rowPtr = new Int32Array(numNodes + 1);
  for (let i = 0; i < numNodes; i++) rowPtr[i + 1] = rowPtr[i]! + counts[i + 1]!;
  const colIdx = new Int32Array(edges.length);
  const signIdxArr = new Uint8Array(edges.length);
  const cursor = rowPtr.slice(0, numNodes);
  for (const [src, dst, weight] of edges) {
    const row = reverse ? src : dst;
    const slot = cursor[row]!++;
    colIdx[slot] = reverse ? dst : src;
    signIdxArr[slot] = signIndex(weight);
  }
  return { rowPtr, colIdx, signIdx: signIdxArr };
}

/** Validate one parsed JSON object and index it for message passing. */
export function toGraphData(raw: unknown): GraphData {
  const record = graphRecordSchema.parse(raw);
  const numNodes = record.num_vars + record.num_clauses + 1;
  if (record.node_kinds.length !== numNodes) {
    throw new Error(
      `${record.instance_id}: ${record.node_kinds.length} node kinds for ${numNodes} nodes`,
    );
  }
  for (let i = 0; i < numNodes; i++) {
    const expected =
      i < record.num_vars ? "variable" : i < numNodes - 1 ? "clause" : "meta";
    if (record.node_kinds[i] !== expected) {
      throw new Error(`${record.instance_id}: node ${i} is ${record.node_kinds[i]}, expected ${expected}`);
    }
  }
  if (record.features.length !== numNodes) {
    throw new Error(`${record.instance_id}: feature rows != node count`);
  }
  const featureDim = record.features[0]?.length ?? 0;
  const features = new Float64Array(numNodes * featureDim);
  for (let i = 0; i < numNodes; i++) {
    const row = record.features[i]!;
    if (row.length !== featureDim) {
      throw new Error(`${record.instance_id}: ragged feature rows`);
    }
    features.set(row, i * featureDim);
  }
  for (const [src, dst] of record.edge_list) {
    const srcOk = src < record.num_vars || src === numNodes - 1;
    const dstOk = dst >= record.num_vars && dst < numNodes - 1;
    if (src >= numNodes || !srcOk || !dstOk) {
      throw new Error(`${record.instance_id}: edge ${src}->${dst} breaks the tripartite layout`);
    }
  }
  let labelOrder: number[] | null = null;
  if (record.label_order !== undefined) {
    labelOrder = record.label_order;
    const seen = new Set(labelOrder);
    if (
      labelOrder.length !== record.num_vars ||
      seen.size !== record.num_vars ||
      labelOrder.some((v) => v < 1 || v > record.num_vars)
    ) {
      throw new Error(`${record.instance_id}: label_order is not a permutation of 1..${record.num_vars}`);
    }
  }
  return {
    instanceId: record.instance_id,
    numVars: record.num_vars,
    numClauses: record.num_clauses,
    numNodes,
    featureDim,
    features,
    toClause: buildCsr(numNodes, record.edge_list, false),
    toVarMeta: buildCsr(numNodes, record.edge_list, true),
    labelOrder,
  };
}

export function loadGraphFile(path: string): GraphData[] {
  const lines = readFileSync(path, "utf-8").split("\n");
  const graphs: GraphData[] = [];
  for (const line of lines) {
    if (!line.trim()) continue;
    graphs.push(toGraphData(JSON.parse(line)));
  }
  if (graphs.length === 0) throw new Error(`no graph records in ${path}`);
  return graphs;
}
