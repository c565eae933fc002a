// Inference: score variables and emit branching orders.

import { performance } from "node:perf_hooks";

import type { GraphData } from "./graph.js";
import type { Model } from "./model.js";

export interface OrderLine {
  inference_time_ms: number;
  instance_id: string;
  order: number[];
  scores: number[];
}

/** Descending score; ties broken toward the lower variable index. Variables are 1-based. */
export function scoresToOrder(scores: ArrayLike<number>): number[] {
  const order = Array.from({ length: scores.length }, (_, i) => i + 1);
  order.sort((a, b) => {
    const diff = scores[b - 1]! - scores[a - 1]!;
    return diff !== 0 ? diff : a - b;
  });
  return order;
}

export function predictOne(model: Model, graph: GraphData): OrderLine {
  const started = performance.now();
  const { scores } = model.forward(graph);
  const order = scoresToOrder(scores);
  const elapsed = performance.now() - started;
  return {
    inference_time_ms: elapsed,
    instance_id: graph.instanceId,
    order,
    scores: Array.from(scores),
  };
}
