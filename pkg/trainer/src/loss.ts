// ---------------------------------------------------------------------------
// Pairwise ranking loss over a labeled variable order.
//
// For every ordered pair (i, j) where the label ranks i strictly above
// j, the loss takes a logistic term on the score margin, weighted by
// the relevance-gain difference of the two rank positions:
//
//   L = (1/P) * sum_{(i,j)} |gain(R_i) - gain(R_j)| * log(1 + exp(-(s_i - s_j)))
//
// Only score differences enter, so adding a constant to every score
// leaves the loss (and the induced order) unchanged.
// ---------------------------------------------------------------------------

import { relevanceGain } from "./metrics.js";

export interface LossResult {
  loss: number;
  /** dL/ds, indexed by variable - 1. */
  grad: Float64Array;
  pairs: number;
}

function softplus(x: number): number {
  // max(x,0) + log1p(exp(-|x|)) avoids overflow on either tail
  return Math.max(x, 0) + Math.log1p(Math.exp(-Math.abs(x)));
}

function sigmoid(x: number): number {
  if (x >= 0) {
    return 1.0 / (1.0 + Math.exp(-x));
  }
  const e = Math.exp(x);
  return e / (1.0 + e);
}

/**
 * Loss and gradient of per-variable scores against a labeled order.
 *
 * @param scores - score per variable, indexed by variable - 1.
 * @param labelOrder - 1-based variable ids, best first.
 */
export function lambdarankLoss(
  scores: ArrayLike<number>,
  labelOrder: readonly number[],
): LossResult {
  const n = labelOrder.length;
  if (n < 2) throw new Error(`ranking loss needs >= 2 variables, got ${n}`);
  if (scores.length !== n) {
    throw new Error(`got ${scores.length} scores for ${n} ranked variables`);
  }

  const gains = new Float64Array(n);
  for (let p = 0; p < n; p++) gains[p] = relevanceGain(p + 1);

  const grad = new Float64Array(n);
  let loss = 0;
  let pairs = 0;
  for (let p = 0; p < n; p++) {
    const i = labelOrder[p]! - 1;
    for (let q = p + 1; q < n; q++) {
      const j = labelOrder[q]! - 1;
      const weight = Math.abs(gains[p]! - gains[q]!);
      const margin = scores[i]! - scores[j]!;
      loss += weight * softplus(-margin);
      // d/dmargin softplus(-margin) = -sigmoid(-margin)
      const slope = weight * sigmoid(-margin);
      grad[i] -= slope;
      grad[j] += slope;
      pairs++;
    }
  }

  loss /= pairs;
  for (let i = 0; i < n; i++) grad[i] /= pairs;
  return { loss, grad, pairs };
}
