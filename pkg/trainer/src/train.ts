// Training loop: minibatched LambdaRank over labeled instance graphs.

import type { GraphData } from "./graph.js";
import { lambdarankLoss } from "./loss.js";
import { Model, type ParamMap } from "./model.js";
import { AdamW } from "./optimizer.js";
import { Rng } from "./rng.js";

export interface TrainConfig {
  learningRate: number;
  epochs: number;
  batchSize: number;
  dropout: number;
  weightDecay: number;
  gradientClip: number;
  rounds: number;
  hidden: number;
  seed: number;
  valFraction: number;
}

export const TRAIN_DEFAULTS: TrainConfig = {
  learningRate: 0.001,
  epochs: 10,
  batchSize: 128,
  dropout: 0.2,
  weightDecay: 0.01,
  gradientClip: 1.0,
  rounds: 6,
  hidden: 32,
  seed: 0,
  valFraction: 0.1,
};

export function validateConfig(cfg: TrainConfig): void {
  const positive: (keyof TrainConfig)[] = [
    "learningRate",
    "epochs",
    "batchSize",
    "gradientClip",
    "rounds",
    "hidden",
  ];
  for (const key of positive) {
    if (!(cfg[key] > 0)) throw new Error(`${key} must be positive, got ${cfg[key]}`);
  }
  for (const key of ["epochs", "batchSize", "rounds", "hidden", "seed"] as const) {
    if (!Number.isInteger(cfg[key])) throw new Error(`${key} must be an integer, got ${cfg[key]}`);
  }
  if (cfg.weightDecay < 0) throw new Error(`weightDecay must be >= 0, got ${cfg.weightDecay}`);
  if (!(cfg.dropout >= 0 && cfg.dropout < 1)) {
    throw new Error(`dropout must be in [0, 1), got ${cfg.dropout}`);
  }
  if (!(cfg.valFraction >= 0 && cfg.valFraction < 1)) {
    throw new Error(`valFraction must be in [0, 1), got ${cfg.valFraction}`);
  }
}

export interface EpochStats {
  epoch: number;
  trainLoss: number;
  valLoss: number | null;
}

export interface TrainResult {
  model: Model;
  history: EpochStats[];
}

function meanLoss(model: Model, graphs: GraphData[]): number {
  let total = 0;
  for (const g of graphs) {
    const { scores } = model.forward(g);
    total += lambdarankLoss(scores, g.labelOrder!).loss;
  }
  return total / graphs.length;
}

function accumulate(into: ParamMap, from: ParamMap, scale: number): void {
  for (const [name, g] of Object.entries(from)) {
    const acc = into[name]!;
    for (let i = 0; i < g.length; i++) acc[i] += scale * g[i]!;
  }
}

export function train(
  graphs: GraphData[],
  cfg: TrainConfig,
  log: (line: string) => void = () => {},
): TrainResult {
  validateConfig(cfg);
  const bad = graphs.filter((g) => g.labelOrder === null || g.numVars < 2);
  if (bad.length > 0) {
    const ids = bad.slice(0, 5).map((g) => g.instanceId);
    throw new Error(
      `${bad.length} records unusable for training (missing label_order or < 2 variables): ` +
        ids.join(", ") +
        (bad.length > 5 ? ", ..." : ""),
    );
  }
  if (graphs.length === 0) throw new Error("no training records");
  const featureDim = graphs[0]!.featureDim;

  const rng = new Rng(`train:${cfg.seed}`);
  const indices = Array.from(graphs.keys());
  rng.shuffle(indices);
  const numVal = Math.floor(graphs.length * cfg.valFraction);
  const valSet = indices.slice(0, numVal).map((i) => graphs[i]!);
  const trainSet = indices.slice(numVal).map((i) => graphs[i]!);
  if (trainSet.length === 0) throw new Error("validation split leaves no training records");

  const model = new Model(featureDim, cfg.hidden, cfg.rounds, new Rng(`init:${cfg.seed}`));
  const optimizer = new AdamW(model.params, {
    learningRate: cfg.learningRate,
    weightDecay: cfg.weightDecay,
    gradientClip: cfg.gradientClip,
  });
  const dropRng = new Rng(`dropout:${cfg.seed}`);

  const history: EpochStats[] = [];
  const order = Array.from(trainSet.keys());
  for (let epoch = 1; epoch <= cfg.epochs; epoch++) {
    rng.shuffle(order);
    let epochLoss = 0;
    for (let at = 0; at < order.length; at += cfg.batchSize) {
      const batch = order.slice(at, at + cfg.batchSize);
      const grads = model.zeroGrads();
      let batchLoss = 0;
      for (const idx of batch) {
        const g = trainSet[idx]!;
        const { scores, cache } = model.forward(g, {
          train: true,
          dropout: cfg.dropout,
          rng: dropRng,
        });
        const { loss, grad } = lambdarankLoss(scores, g.labelOrder!);
        batchLoss += loss;
        accumulate(grads, model.backward(g, cache, grad), 1 / batch.length);
      }
      optimizer.update(model.params, grads);
      epochLoss += batchLoss;
    }
    const trainLoss = epochLoss / trainSet.length;
    const valLoss = valSet.length > 0 ? meanLoss(model, valSet) : null;
    history.push({ epoch, trainLoss, valLoss });
    const valText = valLoss === null ? "" : ` val_loss=${valLoss.toFixed(6)}`;
    log(`epoch ${epoch}/${cfg.epochs} train_loss=${trainLoss.toFixed(6)}${valText}`);
  }
  return { model, history };
}
