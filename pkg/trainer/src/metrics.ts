// ---------------------------------------------------------------------------
// Ranking metrics shared by the loss, training log, and tests.
// ---------------------------------------------------------------------------

/** Gain of rank r (1-based): 1/log2(r+1), so rank 1 has gain 1.0. */
export function relevanceGain(rank: number): number {
  if (rank < 1) throw new Error(`rank must be >= 1, got ${rank}`);
  return 1.0 / Math.log2(rank + 1);
}

/**
 * Spearman correlation of two permutations of the same 1-based variable
 * ids. Permutations carry no ties, so the closed form
 * 1 - 6*sum(d^2)/(n(n^2-1)) is exact.
 */
export function spearmanPerm(orderA: readonly number[], orderB: readonly number[]): number {
  const n = orderA.length;
  if (n < 2) throw new Error("spearman needs at least 2 variables");
  if (orderB.length !== n) throw new Error("orders have different lengths");
  const rankA = new Map<number, number>();
  const rankB = new Map<number, number>();
  for (let i = 0; i < n; i++) {
    rankA.set(orderA[i]!, i + 1);
    rankB.set(orderB[i]!, i + 1);
  }
  if (rankA.size !== n || rankB.size !== n) {
    throw new Error("orders contain repeated variables");
  }
  let d2 = 0;
  for (const [variable, ra] of rankA) {
    const rb = rankB.get(variable);
    if (rb === undefined) throw new Error("orders cover different variable sets");
    const d = ra - rb;
    d2 += d * d;
  }
  return 1.0 - (6.0 * d2) / (n * (n * n - 1));
}
