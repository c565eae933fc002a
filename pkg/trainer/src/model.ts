// ---------------------------------------------------------------------------
// Message-passing scorer over instance graphs, with hand-written
// backprop (no autograd dependency at this size).
//
// Alternating directional rounds: even rounds aggregate variable/meta
// states into clauses, odd rounds aggregate clause states back into
// variables and the meta node. Messages are sign-conditioned (separate
// weights per edge polarity -1/0/+1) and combined with additive
// attention over each destination's incoming edges:
//
//   m_e      = W_msg[sign(e)] h_src
//   logit_e  = leakyrelu(aDst . h_dst + aSrc . m_e)
//   alpha    = softmax over the destination's incoming edges
//   h'_dst   = relu(W_self h_dst + sum_e alpha_e m_e + b)
//
// Nodes with no incoming edges in a round pass through unchanged.
// Dropout (inverted, train-time only) applies to the input embedding
// and to each round's updated states. Readout is a linear map on
// variable-node states.
// ---------------------------------------------------------------------------

import type { Csr, GraphData } from "./graph.js";
import { Rng } from "./rng.js";
import { addOuter, axpy, dotOff, matTvecAdd, matvecInto } from "./tensor.js";

const LEAKY_SLOPE = 0.2;
const SIGN_NAMES = ["neg", "zero", "pos"] as const;
const PHASE_NAMES = ["Clause", "Var"] as const; // 0: into clauses, 1: into vars+meta

export interface ParamShape {
  name: string;
  rows: number;
  cols: number;
}

export function paramShapes(featureDim: number, hidden: number): ParamShape[] {
  const shapes: ParamShape[] = [
    { name: "Win", rows: hidden, cols: featureDim },
    { name: "bin", rows: hidden, cols: 1 },
  ];
  for (const phase of PHASE_NAMES) {
    for (const sign of SIGN_NAMES) {
      shapes.push({ name: `Wmsg${phase}_${sign}`, rows: hidden, cols: hidden });
    }
    shapes.push({ name: `aSrc${phase}`, rows: hidden, cols: 1 });
    shapes.push({ name: `aDst${phase}`, rows: hidden, cols: 1 });
    shapes.push({ name: `Wself${phase}`, rows: hidden, cols: hidden });
    shapes.push({ name: `b${phase}`, rows: hidden, cols: 1 });
  }
  shapes.push({ name: "wOut", rows: hidden, cols: 1 });
  shapes.push({ name: "bOut", rows: 1, cols: 1 });
  return shapes;
}

export type ParamMap = Record<string, Float64Array>;

interface PhaseCache {
  phaseIdx: number;
  hIn: Float64Array; // node states entering the round
  m: Float64Array; // per-edge messages, E x H
  u: Float64Array; // per-edge pre-leakyrelu attention logits
  alpha: Float64Array; // per-edge softmax weights
  z: Float64Array; // pre-relu updated states (valid only on updated rows)
  dropMask: Float64Array | null; // inverted-dropout scales on updated rows
}

export interface ForwardCache {
  z0: Float64Array;
  inputMask: Float64Array | null;
  phases: PhaseCache[];
  hFinal: Float64Array;
}

export interface ForwardOptions {
  train?: boolean;
  dropout?: number;
  rng?: Rng;
}

export interface Checkpoint {
  format: string;
  version: number;
  feature_dim: number;
  hidden: number;
  rounds: number;
  params: Record<string, number[]>;
}

const CHECKPOINT_FORMAT = "order-trainer-checkpoint";

export class Model {
  readonly featureDim: number;
  readonly hidden: number;
  readonly rounds: number;
  readonly shapes: ParamShape[];
  readonly params: ParamMap;

  constructor(featureDim: number, hidden: number, rounds: number, init?: Rng) {
    if (featureDim < 1 || hidden < 1 || rounds < 1) {
      throw new Error("featureDim, hidden, and rounds must be >= 1");
    }
    this.featureDim = featureDim;
    this.hidden = hidden;
    this.rounds = rounds;
    this.shapes = paramShapes(featureDim, hidden);
    this.params = {};
    for (const { name, rows, cols } of this.shapes) {
      const data = new Float64Array(rows * cols);
      if (init && !name.startsWith("b")) {
        // glorot-uniform; vectors count as 1 x n maps
        const limit = Math.sqrt(6.0 / (rows + cols));
        for (let i = 0; i < data.length; i++) data[i] = (init.next() * 2 - 1) * limit;
      }
      this.params[name] = data;
    }
  }

  zeroGrads(): ParamMap {
    const grads: ParamMap = {};
    for (const { name, rows, cols } of this.shapes) {
      grads[name] = new Float64Array(rows * cols);
    }
    return grads;
  }

  private csrFor(graph: GraphData, phaseIdx: number): Csr {
    return phaseIdx === 0 ? graph.toClause : graph.toVarMeta;
  }

  forward(
    graph: GraphData,
    options: ForwardOptions = {},
  ): { scores: Float64Array; cache: ForwardCache } {
    if (graph.featureDim !== this.featureDim) {
      throw new Error(
        `graph has ${graph.featureDim}-dim features, model expects ${this.featureDim}`,
      );
    }
    const H = this.hidden;
    const N = graph.numNodes;
    const p = this.params;
    const train = options.train ?? false;
    const dropout = train ? options.dropout ?? 0 : 0;
    if (dropout > 0 && !options.rng) {
      throw new Error("dropout requires an rng");
    }

    // input embedding
    const z0 = new Float64Array(N * H);
    let h = new Float64Array(N * H);
    for (let i = 0; i < N; i++) {
      matvecInto(p.Win!, graph.features, i * this.featureDim, z0, i * H, H, this.featureDim);
      for (let d = 0; d < H; d++) {
        const z = z0[i * H + d]! + p.bin![d]!;
        z0[i * H + d] = z;
        h[i * H + d] = z > 0 ? z : 0;
      }
    }
    let inputMask: Float64Array | null = null;
    if (dropout > 0) {
      inputMask = this.sampleMask(N * H, dropout, options.rng!);
      for (let i = 0; i < N * H; i++) h[i] *= inputMask[i]!;
    }

    const phases: PhaseCache[] = [];
    for (let t = 0; t < this.rounds; t++) {
      const phaseIdx = t % 2;
      const tag = PHASE_NAMES[phaseIdx]!;
      const csr = this.csrFor(graph, phaseIdx);
      const E = csr.colIdx.length;
      const Wmsg = SIGN_NAMES.map((s) => p[`Wmsg${tag}_${s}`]!);
      const aSrc = p[`aSrc${tag}`]!;
      const aDst = p[`aDst${tag}`]!;
      const Wself = p[`Wself${tag}`]!;
      const bias = p[`b${tag}`]!;

      const hIn = h;
      const hOut = h.slice(); // pass-through for rows without updates
      const m = new Float64Array(E * H);
      const u = new Float64Array(E);
      const alpha = new Float64Array(E);
      const z = new Float64Array(N * H);
      let dropMask: Float64Array | null = null;

      for (let dst = 0; dst < N; dst++) {
        const start = csr.rowPtr[dst]!;
        const end = csr.rowPtr[dst + 1]!;
        if (start === end) continue;

        const dstDot = dotOff(aDst, 0, hIn, dst * H, H);
        let maxLogit = -Infinity;
        for (let e = start; e < end; e++) {
          const src = csr.colIdx[e]!;
          matvecInto(Wmsg[csr.signIdx[e]!]!, hIn, src * H, m, e * H, H, H);
          const pre = dstDot + dotOff(aSrc, 0, m, e * H, H);
          u[e] = pre;
          const logit = pre > 0 ? pre : LEAKY_SLOPE * pre;
          alpha[e] = logit;
          if (logit > maxLogit) maxLogit = logit;
        }
        let total = 0;
        for (let e = start; e < end; e++) {
          const w = Math.exp(alpha[e]! - maxLogit);
          alpha[e] = w;
          total += w;
        }
        for (let e = start; e < end; e++) alpha[e] = alpha[e]! / total;

        matvecInto(Wself, hIn, dst * H, z, dst * H, H, H);
        for (let d = 0; d < H; d++) z[dst * H + d] += bias[d]!;
        for (let e = start; e < end; e++) axpy(alpha[e]!, m, e * H, z, dst * H, H);
        for (let d = 0; d < H; d++) {
          const zd = z[dst * H + d]!;
          hOut[dst * H + d] = zd > 0 ? zd : 0;
        }
        if (dropout > 0) {
          if (!dropMask) {
            dropMask = new Float64Array(N * H).fill(1);
          }
          const keep = 1 - dropout;
          for (let d = 0; d < H; d++) {
            const scale = options.rng!.next() < keep ? 1 / keep : 0;
            dropMask[dst * H + d] = scale;
            hOut[dst * H + d] *= scale;
          }
        }
      }

      phases.push({ phaseIdx, hIn, m, u, alpha, z, dropMask });
      h = hOut;
    }

    const scores = new Float64Array(graph.numVars);
    for (let v = 0; v < graph.numVars; v++) {
      scores[v] = dotOff(p.wOut!, 0, h, v * H, H) + p.bOut![0]!;
    }
    return { scores, cache: { z0, inputMask, phases, hFinal: h } };
  }

  /** Gradients of sum_v dScores[v] * score_v with respect to every parameter. */
  backward(graph: GraphData, cache: ForwardCache, dScores: Float64Array): ParamMap {
    const H = this.hidden;
    const N = graph.numNodes;
    const p = this.params;
    const grads = this.zeroGrads();

    let dh = new Float64Array(N * H);
    for (let v = 0; v < graph.numVars; v++) {
      const g = dScores[v]!;
      if (g === 0) continue;
      grads.bOut![0]! += g;
      axpy(g, cache.hFinal, v * H, grads.wOut!, 0, H);
      axpy(g, p.wOut!, 0, dh, v * H, H);
    }

    for (let t = this.rounds - 1; t >= 0; t--) {
      const phase = cache.phases[t]!;
      const tag = PHASE_NAMES[phase.phaseIdx]!;
      const csr = this.csrFor(graph, phase.phaseIdx);
      const Wmsg = SIGN_NAMES.map((s) => p[`Wmsg${tag}_${s}`]!);
      const gWmsg = SIGN_NAMES.map((s) => grads[`Wmsg${tag}_${s}`]!);
      const aSrc = p[`aSrc${tag}`]!;
      const aDst = p[`aDst${tag}`]!;
      const Wself = p[`Wself${tag}`]!;
      const gaSrc = grads[`aSrc${tag}`]!;
      const gaDst = grads[`aDst${tag}`]!;
      const gWself = grads[`Wself${tag}`]!;
      const gBias = grads[`b${tag}`]!;
      const { hIn, m, u, alpha, z, dropMask } = phase;

      const dhIn = new Float64Array(N * H);
      const dz = new Float64Array(H);
      const dm = new Float64Array(H);

      for (let dst = 0; dst < N; dst++) {
        const start = csr.rowPtr[dst]!;
        const end = csr.rowPtr[dst + 1]!;
        if (start === end) {
          // unchanged this round: gradient passes straight through
          for (let d = 0; d < H; d++) dhIn[dst * H + d] += dh[dst * H + d]!;
          continue;
        }
        for (let d = 0; d < H; d++) {
          let g = dh[dst * H + d]!;
          if (dropMask) g *= dropMask[dst * H + d]!;
          dz[d] = z[dst * H + d]! > 0 ? g : 0;
        }
        for (let d = 0; d < H; d++) gBias[d]! += dz[d]!;
        addOuter(gWself, dz, 0, hIn, dst * H, H, H);
        matTvecAdd(Wself, dz, 0, dhIn, dst * H, H, H);

        // softmax attention: dAgg = dz; t_e = dz . m_e
        let mixed = 0;
        for (let e = start; e < end; e++) {
          mixed += alpha[e]! * dotOff(dz, 0, m, e * H, H);
        }
        for (let e = start; e < end; e++) {
          const src = csr.colIdx[e]!;
          const te = dotOff(dz, 0, m, e * H, H);
          const dAlpha = alpha[e]! * (te - mixed);
          const du = dAlpha * (u[e]! > 0 ? 1 : LEAKY_SLOPE);
          if (du !== 0) {
            axpy(du, hIn, dst * H, gaDst, 0, H);
            axpy(du, aDst, 0, dhIn, dst * H, H);
            axpy(du, m, e * H, gaSrc, 0, H);
          }
          for (let d = 0; d < H; d++) dm[d] = alpha[e]! * dz[d]! + du * aSrc[d]!;
          const sign = csr.signIdx[e]!;
          addOuter(gWmsg[sign]!, dm, 0, hIn, src * H, H, H);
          matTvecAdd(Wmsg[sign]!, dm, 0, dhIn, src * H, H, H);
        }
      }
      dh = dhIn;
    }

    // input embedding
    const dz0 = new Float64Array(H);
    for (let i = 0; i < N; i++) {
      for (let d = 0; d < H; d++) {
        let g = dh[i * H + d]!;
        if (cache.inputMask) g *= cache.inputMask[i * H + d]!;
        dz0[d] = cache.z0[i * H + d]! > 0 ? g : 0;
      }
      for (let d = 0; d < H; d++) grads.bin![d]! += dz0[d]!;
      addOuter(grads.Win!, dz0, 0, graph.features, i * this.featureDim, H, this.featureDim);
    }
    return grads;
  }

  private sampleMask(size: number, dropout: number, rng: Rng): Float64Array {
    const keep = 1 - dropout;
    const mask = new Float64Array(size);
    for (let i = 0; i < size; i++) mask[i] = rng.next() < keep ? 1 / keep : 0;
    return mask;
  }

  toCheckpoint(): Checkpoint {
    const params: Record<string, number[]> = {};
    for (const { name } of this.shapes) params[name] = Array.from(this.params[name]!);
    return {
      format: CHECKPOINT_FORMAT,
      version: 1,
      feature_dim: this.featureDim,
      hidden: this.hidden,
      rounds: this.rounds,
      params,
    };
  }

  static fromCheckpoint(raw: Checkpoint): Model {
    if (raw.format !== CHECKPOINT_FORMAT) {
      throw new Error(`not a model checkpoint (format ${JSON.stringify(raw.format)})`);
    }
    const model = new Model(raw.feature_dim, raw.hidden, raw.rounds);
    for (const { name, rows, cols } of model.shapes) {
      const values = raw.params[name];
      if (!values || values.length !== rows * cols) {
        throw new Error(`checkpoint parameter ${name} missing or wrong size`);
      }
      model.params[name]!.set(values);
    }
    return model;
  }
}
