import * as tf from '@tensorflow/tfjs';
import { Transformer } from './model.js';
import { Vocab } from './vocab.js';

/** Greedy decoding; stops a row once it emits EOS, caps at maxLen tokens. */
export function greedyDecode(model: Transformer, encRows: number[][], vocabIn: Vocab,
                             vocabOut: Vocab, maxLen: number): string[][] {
  const batch = encRows.length;
  const encLen = Math.max(...encRows.map((r) => r.length));
  const padded = encRows.map((r) => [...r, ...Array(encLen - r.length).fill(vocabIn.padId)]);
  const sequences: number[][] = encRows.map(() => [vocabOut.bosId]);
  const done: boolean[] = new Array(batch).fill(false);

  const { memory, mask } = tf.tidy(() => {
    const encIds = tf.tensor2d(padded, undefined, 'int32');
    const out = model.encode(encIds, vocabIn.padId);
    return { memory: tf.keep(out.memory), mask: tf.keep(out.mask) };
  });
  try {
    for (let step = 0; step < maxLen; step++) {
      const next = tf.tidy(() => {
        const decIds = tf.tensor2d(sequences, undefined, 'int32');
        const logits = model.decode(decIds, memory, mask, vocabOut.padId);
        const time = sequences[0].length;
        const last = logits.slice([0, time - 1, 0], [batch, 1, -1]).squeeze([1]);
        return last.argMax(-1);
      });
      const ids = next.dataSync();
      next.dispose();
      for (let b = 0; b < batch; b++) {
        const id = done[b] ? vocabOut.padId : ids[b];
        if (id === vocabOut.eosId) done[b] = true;
        sequences[b].push(id);
      }
      if (done.every(Boolean)) break;
    }
  } finally {
    memory.dispose();
    mask.dispose();
  }
  return sequences.map((seq) => {
    const body: string[] = [];
    for (const id of seq.slice(1)) {
      if (id === vocabOut.eosId || id === vocabOut.padId) break;
      body.push(vocabOut.tokens[id]);
    }
    return body;
  });
}
