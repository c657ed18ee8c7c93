import * as fs from 'node:fs';
import { readDataset } from './data.js';
import { greedyDecode } from './decode.js';
import { Transformer } from './model.js';
import { Vocab } from './vocab.js';

/**
 * Decode every dataset input and write one space-separated token sequence
 * per line, aligned with the dataset: the format `matseq eval` scores.
 */
export function writePredictions(model: Transformer, datasetPath: string, vocabIn: Vocab,
                                 vocabOut: Vocab, outPath: string, maxLen: number,
                                 batchSize = 32, limit?: number): number {
  const examples = readDataset(datasetPath, limit);
  const lines: string[] = [];
  for (let start = 0; start < examples.length; start += batchSize) {
    const chunk = examples.slice(start, start + batchSize);
    const rows = chunk.map((e) => vocabIn.encode(e.inputTokens));
    for (const tokens of greedyDecode(model, rows, vocabIn, vocabOut, maxLen)) {
      lines.push(tokens.join(' '));
    }
  }
  fs.writeFileSync(outPath, lines.join('\n') + '\n');
  return lines.length;
}
