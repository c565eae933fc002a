export { Rng, hashSeed } from "./rng.js";
export { relevanceGain, spearmanPerm } from "./metrics.js";
export { lambdarankLoss, type LossResult } from "./loss.js";
export {
  loadGraphFile,
  toGraphData,
  type GraphData,
  type Csr,
} from "./graph.js";
export { Model, paramShapes, type Checkpoint, type ParamMap } from "./model.js";
export { AdamW, type AdamWConfig } from "./optimizer.js";
export {
  TRAIN_DEFAULTS,
  train,
  validateConfig,
  type TrainConfig,
  type TrainResult,
  type EpochStats,
} from "./train.js";
export { predictOne, scoresToOrder, type OrderLine } from "./predict.js";
