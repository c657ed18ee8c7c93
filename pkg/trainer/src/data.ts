import * as fs from 'node:fs';
import * as tf from '@tensorflow/tfjs';
import { Vocab } from './vocab.js';

export interface Example {
  inputTokens: string[];
  outputTokens: string[];
}

/** Read a matseq dataset file (JSON records, one per line). */
export function readDataset(path: string, limit?: number): Example[] {
  const out: Example[] = [];
  const text = fs.readFileSync(path, 'utf-8');
  for (const line of text.split('\n')) {
    if (!line.trim()) continue;
    const rec = JSON.parse(line);
    out.push({
      inputTokens: (rec.input_tokens as string).split(' '),
      outputTokens: (rec.output_tokens as string).split(' '),
    });
    if (limit !== undefined && out.length >= limit) break;
  }
  return out;
}

export interface Batch {
  encIds: tf.Tensor2D;    // [B, Tin] padded token ids
  decInput: tf.Tensor2D;  // [B, Tout+1] = BOS, y1..yT (teacher forcing)
  decTarget: tf.Tensor2D; // [B, Tout+1] = y1..yT, EOS
  targetMask: tf.Tensor2D; // 1 where decTarget is a real token or EOS
}

function padTo(ids: number[], length: number, padId: number): number[] {
  const out = ids.slice();
  while (out.length < length) out.push(padId);
  return out;
}

/** Assemble padded teacher-forcing tensors for a slice of examples. */
export function makeBatch(examples: Example[], vocabIn: Vocab, vocabOut: Vocab): Batch {
  const encLen = Math.max(...examples.map((e) => e.inputTokens.length));
  const decLen = Math.max(...examples.map((e) => e.outputTokens.length)) + 1;
  const enc: number[][] = [];
  const din: number[][] = [];
  const dtg: number[][] = [];
  const msk: number[][] = [];
  for (const ex of examples) {
    enc.push(padTo(vocabIn.encode(ex.inputTokens), encLen, vocabIn.padId));
    const y = vocabOut.encode(ex.outputTokens);
    din.push(padTo([vocabOut.bosId, ...y], decLen, vocabOut.padId));
    dtg.push(padTo([...y, vocabOut.eosId], decLen, vocabOut.padId));
    msk.push(padTo(new Array(y.length + 1).fill(1), decLen, 0));
  }
  return {
    encIds: tf.tensor2d(enc, undefined, 'int32'),
    decInput: tf.tensor2d(din, undefined, 'int32'),
    decTarget: tf.tensor2d(dtg, undefined, 'int32'),
    targetMask: tf.tensor2d(msk, undefined, 'float32'),
  };
}

/** Deterministic in-memory shuffler (LCG; keeps runs reproducible). */
export class BatchSampler {
  private order: number[];
  private cursor = 0;
  private state: number;

  constructor(private examples: Example[], private batchSize: number, seed = 1) {
    this.state = seed >>> 0;
    this.order = examples.map((_, i) => i);
    this.shuffle();
  }

  private nextRand(): number {
    // Numerical Recipes LCG; plenty for shuffling
    this.state = (Math.imul(this.state, 1664525) + 1013904223) >>> 0;
    return this.state / 2 ** 32;
  }

  private shuffle(): void {
    for (let i = this.order.length - 1; i > 0; i--) {
      const j = Math.floor(this.nextRand() * (i + 1));
      [this.order[i], this.order[j]] = [this.order[j], this.order[i]];
    }
  }

  next(): Example[] {
    if (this.cursor + this.batchSize > this.order.length) {
      this.shuffle();
      this.cursor = 0;
    }
    const idx = this.order.slice(this.cursor, this.cursor + this.batchSize);
    this.cursor += this.batchSize;
    return idx.map((i) => this.examples[i]);
  }
}
