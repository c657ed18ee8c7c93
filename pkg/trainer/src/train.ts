import * as tf from '@tensorflow/tfjs';
import { BatchSampler, Example, makeBatch, readDataset } from './data.js';
import { maskedCrossEntropy, ModelConfig, Transformer } from './model.js';
import { learningRate, ScheduleConfig } from './schedule.js';
import { greedyDecode } from './decode.js';
import { Scheme, tolerantMatch } from './tokens.js';
import { Vocab } from './vocab.js';

export interface TrainConfig {
  model: ModelConfig;
  batchSize: number;
  steps: number;
  schedule: ScheduleConfig;
  evalEvery: number;
  evalExamples: number;
  tolerance: number;       // fraction; 0 means exact sequence value match
  maxDecodeLen: number;
  divergenceLoss?: number; // abort guard
  seed?: number;
}

export interface EvalResult {
  step: number;
  loss: number;
  accuracy: number;
}

export interface TrainArtifacts {
  model: Transformer;
  history: EvalResult[];
}

export function evaluateAccuracy(model: Transformer, examples: Example[], vocabIn: Vocab,
                                 vocabOut: Vocab, scheme: Scheme, tau: number,
                                 maxLen: number, batchSize = 32): number {
  let correct = 0;
  for (let start = 0; start < examples.length; start += batchSize) {
    const chunk = examples.slice(start, start + batchSize);
    const rows = chunk.map((e) => vocabIn.encode(e.inputTokens));
    const decoded = greedyDecode(model, rows, vocabIn, vocabOut, maxLen);
    for (let i = 0; i < chunk.length; i++) {
      if (tolerantMatch(decoded[i], chunk[i].outputTokens, scheme, tau)) correct += 1;
    }
  }
  return correct / examples.length;
}

export function trainLoop(train: Example[], heldOut: Example[], vocabIn: Vocab,
                          vocabOut: Vocab, scheme: Scheme, cfg: TrainConfig,
                          log: (msg: string) => void = console.log): TrainArtifacts {
  const model = new Transformer(cfg.model);
  const optimizer = tf.train.adam(cfg.schedule.baseRate, 0.9, 0.999, 1e-8);
  const sampler = new BatchSampler(train, cfg.batchSize, cfg.seed ?? 1);
  const history: EvalResult[] = [];
  let lastLoss = NaN;
  for (let step = 0; step < cfg.steps; step++) {
    (optimizer as unknown as { learningRate: number }).learningRate =
      learningRate(step, cfg.schedule);
    const batchExamples = sampler.next();
    const applied = optimizer.minimize(() => {
      const batch = makeBatch(batchExamples, vocabIn, vocabOut);
      const logits = model.forward(batch.encIds, batch.decInput, vocabIn.padId,
                                   vocabOut.padId);
      const out = maskedCrossEntropy(logits, batch.decTarget, batch.targetMask,
                                     cfg.model.vocabOut);
      batch.encIds.dispose();
      batch.decInput.dispose();
      batch.decTarget.dispose();
      batch.targetMask.dispose();
      return out;
    }, true, model.trainableVariables());
    lastLoss = applied ? (applied.dataSync()[0] as number) : lastLoss;
    applied?.dispose();
    if (cfg.divergenceLoss && lastLoss > cfg.divergenceLoss) {
      throw new Error(`training diverged: loss ${lastLoss} at step ${step}`);
    }
    if ((step + 1) % cfg.evalEvery === 0 || step + 1 === cfg.steps) {
      const sample = heldOut.slice(0, cfg.evalExamples);
      const accuracy = evaluateAccuracy(model, sample, vocabIn, vocabOut, scheme,
                                        cfg.tolerance, cfg.maxDecodeLen);
      history.push({ step: step + 1, loss: lastLoss, accuracy });
      log(`step ${step + 1}/${cfg.steps} loss ${lastLoss.toFixed(4)} ` +
          `acc@${(cfg.tolerance * 100).toFixed(1)}% ${(accuracy * 100).toFixed(1)}%`);
    }
  }
  return { model, history };
}

export function loadSplit(datasetPath: string, heldOutFraction = 0.02,
                          limit?: number): { train: Example[]; heldOut: Example[] } {
  const all = readDataset(datasetPath, limit);
  const cut = Math.max(1, Math.floor(all.length * (1 - heldOutFraction)));
  return { train: all.slice(0, cut), heldOut: all.slice(cut) };
}
