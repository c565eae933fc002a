#!/usr/bin/env node
// Command-line entry points: `train` fits a scorer on labeled graphs,
// `predict` writes branching orders for new ones.

import * as fs from "node:fs";
import * as path from "node:path";

import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { z } from "zod";

import { loadGraphFile } from "./graph.js";
import { Model } from "./model.js";
import { predictOne } from "./predict.js";
import { TRAIN_DEFAULTS, train, type TrainConfig } from "./train.js";

const configFileSchema = z
  .object({
    learning_rate: z.number().optional(),
    epochs: z.number().optional(),
    batch_size: z.number().optional(),
    dropout: z.number().optional(),
    weight_decay: z.number().optional(),
    gradient_clip: z.number().optional(),
    rounds: z.number().optional(),
    hidden: z.number().optional(),
    seed: z.number().optional(),
    val_fraction: z.number().optional(),
  })
  .strict();

type ConfigFile = z.infer<typeof configFileSchema>;

const FILE_KEY_TO_FIELD: Record<keyof ConfigFile, keyof TrainConfig> = {
  learning_rate: "learningRate",
  epochs: "epochs",
  batch_size: "batchSize",
  dropout: "dropout",
  weight_decay: "weightDecay",
  gradient_clip: "gradientClip",
  rounds: "rounds",
  hidden: "hidden",
  seed: "seed",
  val_fraction: "valFraction",
};

export function resolveTrainConfig(
  filePath: string | undefined,
  overrides: Partial<TrainConfig>,
): TrainConfig {
  const cfg: TrainConfig = { ...TRAIN_DEFAULTS };
  if (filePath) {
    const parsed = configFileSchema.safeParse(JSON.parse(fs.readFileSync(filePath, "utf-8")));
    if (!parsed.success) {
      throw new Error(`bad config file ${filePath}: ${parsed.error.issues[0]?.message}`);
    }
    for (const [key, field] of Object.entries(FILE_KEY_TO_FIELD) as [
      keyof ConfigFile,
      keyof TrainConfig,
    ][]) {
      const value = parsed.data[key];
      if (value !== undefined) cfg[field] = value;
    }
  }
  for (const [field, value] of Object.entries(overrides)) {
    if (value !== undefined) cfg[field as keyof TrainConfig] = value as number;
  }
  return cfg;
}

function writeLines(outPath: string, lines: string[]): void {
  fs.mkdirSync(path.dirname(path.resolve(outPath)), { recursive: true });
  fs.writeFileSync(outPath, lines.map((l) => l + "\n").join(""));
}

export async function main(argv: string[]): Promise<number> {
  let exitCode = 0;
  await yargs(argv)
    .scriptName("order-trainer")
    .command(
      "train",
      "fit a branching-order scorer on labeled graphs",
      (y) =>
        y
          .option("graphs", { type: "string", demandOption: true, describe: "labeled graphs jsonl" })
          .option("out", { type: "string", demandOption: true, describe: "checkpoint json to write" })
          .option("config", { type: "string", describe: "json config file" })
          .option("learning-rate", { type: "number" })
          .option("epochs", { type: "number" })
          .option("batch-size", { type: "number" })
          .option("dropout", { type: "number" })
          .option("weight-decay", { type: "number" })
          .option("gradient-clip", { type: "number" })
          .option("rounds", { type: "number" })
          .option("hidden", { type: "number" })
          .option("seed", { type: "number" })
          .option("val-fraction", { type: "number" }),
      (args) => {
        const cfg = resolveTrainConfig(args.config, {
          learningRate: args.learningRate,
          epochs: args.epochs,
          batchSize: args.batchSize,
          dropout: args.dropout,
          weightDecay: args.weightDecay,
          gradientClip: args.gradientClip,
          rounds: args.rounds,
          hidden: args.hidden,
          seed: args.seed,
          valFraction: args.valFraction,
        });
        const graphs = loadGraphFile(args.graphs);
        console.error(`training on ${graphs.length} graphs`);
        const { model } = train(graphs, cfg, (line) => console.error(line));
        fs.mkdirSync(path.dirname(path.resolve(args.out)), { recursive: true });
        fs.writeFileSync(args.out, JSON.stringify(model.toCheckpoint()) + "\n");
        console.error(`wrote ${args.out}`);
      },
    )
    .command(
      "predict",
      "score graphs and write branching orders",
      (y) =>
        y
          .option("model", { type: "string", demandOption: true, describe: "checkpoint json" })
          .option("graphs", { type: "string", demandOption: true, describe: "graphs jsonl" })
          .option("out", { type: "string", demandOption: true, describe: "orders jsonl to write" }),
      (args) => {
        const model = Model.fromCheckpoint(JSON.parse(fs.readFileSync(args.model, "utf-8")));
        const graphs = loadGraphFile(args.graphs);
        const lines = graphs.map((g) => JSON.stringify(predictOne(model, g)));
        writeLines(args.out, lines);
        console.error(`wrote ${graphs.length} orders to ${args.out}`);
      },
    )
    .demandCommand(1, "specify a command: train or predict")
    .strict()
    .fail((msg, err) => {
      console.error(msg ?? err?.message ?? "error");
      exitCode = 2;
    })
    .parseAsync();
  return exitCode;
}

const entry = process.argv[1] ? path.resolve(process.argv[1]) : "";
if (entry && import.meta.url === `file://${entry}`) {
  main(hideBin(process.argv))
    .then((code) => {
      process.exitCode = code;
    })
    .catch((err) => {
      console.error(err instanceof Error ? err.message : String(err));
      process.exitCode = 1;
    });
}
