// AdamW with decoupled weight decay and global-norm gradient clipping.

import type { ParamMap } from "./model.js";

export interface AdamWConfig {
  learningRate: number;
  weightDecay: number;
  gradientClip: number; // 0 disables clipping
  beta1?: number;
  beta2?: number;
  eps?: number;
}

export class AdamW {
  private readonly cfg: Required<AdamWConfig>;
  private readonly m: ParamMap = {};
  private readonly v: ParamMap = {};
  private step = 0;

  constructor(params: ParamMap, cfg: AdamWConfig) {
    this.cfg = {
      beta1: 0.9,
      beta2: 0.999,
      eps: 1e-8,
      ...cfg,
    };
    for (const [name, data] of Object.entries(params)) {
      this.m[name] = new Float64Array(data.length);
      this.v[name] = new Float64Array(data.length);
    }
  }

  /** Returns the pre-clip global gradient norm. */
  update(params: ParamMap, grads: ParamMap): number {
    const { learningRate, weightDecay, gradientClip, beta1, beta2, eps } = this.cfg;
    let sq = 0;
    for (const g of Object.values(grads)) {
      for (let i = 0; i < g.length; i++) sq += g[i]! * g[i]!;
    }
    const norm = Math.sqrt(sq);
    const scale = gradientClip > 0 && norm > gradientClip ? gradientClip / norm : 1;

    this.step += 1;
    const bc1 = 1 - Math.pow(beta1, this.step);
    const bc2 = 1 - Math.pow(beta2, this.step);
    for (const [name, theta] of Object.entries(params)) {
      const g = grads[name]!;
      const m = this.m[name]!;
      const v = this.v[name]!;
      for (let i = 0; i < theta.length; i++) {
        const gi = g[i]! * scale;
        m[i] = beta1 * m[i]! + (1 - beta1) * gi;
        v[i] = beta2 * v[i]! + (1 - beta2) * gi * gi;
        const mHat = m[i]! / bc1;
        const vHat = v[i]! / bc2;
        theta[i] -= learningRate * (mHat / (Math.sqrt(vHat) + eps) + weightDecay * theta[i]!);
      }
    }
    return norm;
  }
}
