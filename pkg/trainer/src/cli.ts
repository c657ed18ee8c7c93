import * as fs from 'node:fs';
import yargs from 'yargs';
import { hideBin } from 'yargs/helpers';
import { initBackend } from './backend.js';
import { loadCheckpoint, saveCheckpoint } from './checkpoint.js';
import { loadSplit } from './train.js';
import { trainLoop, TrainConfig } from './train.js';
import { SCHEMES } from './tokens.js';
import { writePredictions } from './predict.js';
import { Vocab } from './vocab.js';

interface RunConfig extends TrainConfig {
  dataset: string;
  vocabIn: string;
  vocabOut: string;
  scheme: keyof typeof SCHEMES;
  checkpoint: string;
  limit?: number;
}

async function runTrain(configPath: string): Promise<void> {
  console.log(`tf backend: ${await initBackend()}`);
  const cfg = JSON.parse(fs.readFileSync(configPath, 'utf-8')) as RunConfig;
  const vocabIn = Vocab.load(cfg.vocabIn);
  const vocabOut = Vocab.load(cfg.vocabOut);
  cfg.model.vocabIn = vocabIn.size;
  cfg.model.vocabOut = vocabOut.size;
  const { train, heldOut } = loadSplit(cfg.dataset, 0.02, cfg.limit);
  console.log(`training on ${train.length} examples, ${heldOut.length} held out`);
  const { model, history } = trainLoop(train, heldOut, vocabIn, vocabOut,
                                       SCHEMES[cfg.scheme], cfg);
  saveCheckpoint(model, cfg.steps, cfg.checkpoint);
  const final = history[history.length - 1];
  console.log(`done: loss ${final.loss.toFixed(4)} accuracy ${(final.accuracy * 100).toFixed(2)}%`);
  console.log(`checkpoint written to ${cfg.checkpoint}`);
}

async function runPredict(checkpointPath: string, datasetPath: string, vocabInPath: string,
                          vocabOutPath: string, outPath: string,
                          maxLen: number): Promise<void> {
  console.log(`tf backend: ${await initBackend()}`);
  const { model } = loadCheckpoint(checkpointPath);
  const vocabIn = Vocab.load(vocabInPath);
  const vocabOut = Vocab.load(vocabOutPath);
  const n = writePredictions(model, datasetPath, vocabIn, vocabOut, outPath, maxLen);
  console.log(`wrote ${n} predictions to ${outPath}`);
}

yargs(hideBin(process.argv))
  .command('train <config>', 'train from a JSON run config', (y) =>
    y.positional('config', { type: 'string', demandOption: true }),
    (argv) => runTrain(argv.config as string))
  .command('predict', 'decode a dataset with a checkpoint', (y) => y
    .option('checkpoint', { type: 'string', demandOption: true })
    .option('dataset', { type: 'string', demandOption: true })
    .option('vocab-in', { type: 'string', demandOption: true })
    .option('vocab-out', { type: 'string', demandOption: true })
    .option('out', { type: 'string', demandOption: true })
    .option('max-len', { type: 'number', default: 160 }),
    (argv) => runPredict(argv.checkpoint as string, argv.dataset as string,
                         argv['vocab-in'] as string, argv['vocab-out'] as string,
                         argv.out as string, argv['max-len'] as number))
  .demandCommand(1)
  .strict()
  .parse();
