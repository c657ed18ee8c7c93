import * as tf from '@tensorflow/tfjs';

/**
 * Post-norm encoder-decoder transformer with learned positions and a tied
 * output head, written against raw ops so the variable inventory is exactly:
 *   input side   d_e (w_i + w_p + 2)
 *   output side  (w_o + w_p + 2) d_d + w_o
 *   per encoder layer  12 d^2 + 13 d
 *   per decoder layer  14 d^2 + 2 d_e d + 19 d
 */
export interface ModelConfig {
  encLayers: number;
  decLayers: number;
  encDim: number;
  decDim: number;
  heads: number;
  vocabIn: number;
  vocabOut: number;
  maxPositions: number;
  seed?: number;
}

const NEG_INF = -1e9;

function normal(shape: number[], std: number, seed: number): tf.Tensor {
  return tf.randomNormal(shape, 0, std, 'float32', seed);
}

export class Transformer {
  readonly vars = new Map<string, tf.Variable>();
  private seedCounter: number;
  private static instances = 0;
  private readonly namespace: string;

  constructor(readonly config: ModelConfig) {
    if (config.encDim % config.heads || config.decDim % config.heads) {
      throw new Error('model dimensions must be divisible by the head count');
    }
    // the engine requires globally unique variable names; keep map keys logical
    this.namespace = `t${Transformer.instances++}/`;
    this.seedCounter = (config.seed ?? 1) * 1000;
    const { encDim: de, decDim: dd, vocabIn, vocabOut, maxPositions } = config;
    this.add('enc_embed', [vocabIn, de], 0.02);
    this.add('enc_pos', [maxPositions, de], 0.02);
    this.addLayerNorm('enc_emb_ln', de);
    for (let i = 0; i < config.encLayers; i++) {
      const p = `enc${i}`;
      this.addAttention(`${p}_self`, de, de);
      this.addLayerNorm(`${p}_ln1`, de);
      this.addFfn(`${p}_ffn`, de);
      this.addLayerNorm(`${p}_ln2`, de);
    }
    this.add('dec_embed', [vocabOut, dd], 0.02);
    this.add('dec_pos', [maxPositions, dd], 0.02);
    this.addLayerNorm('dec_emb_ln', dd);
    for (let i = 0; i < config.decLayers; i++) {
      const p = `dec${i}`;
      this.addAttention(`${p}_self`, dd, dd);
      this.addLayerNorm(`${p}_ln1`, dd);
      this.addAttention(`${p}_cross`, dd, de);
      this.addLayerNorm(`${p}_ln2`, dd);
      this.addFfn(`${p}_ffn`, dd);
      this.addLayerNorm(`${p}_ln3`, dd);
    }
    this.add('out_bias', [vocabOut], 0.0);
  }

  private nextSeed(): number {
    return ++this.seedCounter;
  }

  private add(name: string, shape: number[], std: number): void {
    const init = std === 0 ? tf.zeros(shape) : normal(shape, std, this.nextSeed());
    // tf.variable shares the initial tensor's buffer; do not dispose init
    this.vars.set(name, tf.variable(init as tf.Tensor, true, this.namespace + name));
  }

  private addLayerNorm(name: string, dim: number): void {
    this.vars.set(`${name}_g`,
                  tf.variable(tf.ones([dim]), true, `${this.namespace}${name}_g`));
    this.vars.set(`${name}_b`,
                  tf.variable(tf.zeros([dim]), true, `${this.namespace}${name}_b`));
  }

  private addAttention(name: string, dim: number, kvDim: number): void {
    const std = 1 / Math.sqrt(kvDim);
    this.add(`${name}_wq`, [dim, dim], 1 / Math.sqrt(dim));
    this.add(`${name}_wk`, [kvDim, dim], std);
    this.add(`${name}_wv`, [kvDim, dim], std);
    this.add(`${name}_wo`, [dim, dim], 1 / Math.sqrt(dim));
    for (const part of ['bq', 'bk', 'bv', 'bo']) this.add(`${name}_${part}`, [dim], 0.0);
  }

  private addFfn(name: string, dim: number): void {
    this.add(`${name}_w1`, [dim, 4 * dim], 1 / Math.sqrt(dim));
    this.add(`${name}_b1`, [4 * dim], 0.0);
    this.add(`${name}_w2`, [4 * dim, dim], 1 / Math.sqrt(4 * dim));
    this.add(`${name}_b2`, [dim], 0.0);
  }

  get(name: string): tf.Variable {
    const v = this.vars.get(name);
    if (!v) throw new Error(`no variable ${name}`);
    return v;
  }

  parameterCount(): number {
    let total = 0;
    for (const v of this.vars.values()) total += v.size;
    return total;
  }

  trainableVariables(): tf.Variable[] {
    return [...this.vars.values()];
  }

  private layerNorm(x: tf.Tensor, name: string): tf.Tensor {
    const mean = x.mean(-1, true);
    const centred = x.sub(mean);
    const variance = centred.square().mean(-1, true);
    const inv = variance.add(1e-5).rsqrt();
    return centred.mul(inv).mul(this.get(`${name}_g`)).add(this.get(`${name}_b`));
  }

  private dense(x: tf.Tensor, w: string, b: string): tf.Tensor {
    const weight = this.get(w);
    const [inDim, outDim] = weight.shape as [number, number];
    const flat = x.reshape([-1, inDim]);
    return flat.matMul(weight).add(this.get(b)).reshape([...x.shape.slice(0, -1), outDim]);
  }

  private splitHeads(x: tf.Tensor, batch: number, time: number): tf.Tensor {
    const { heads } = this.config;
    const dim = x.shape[x.shape.length - 1] as number;
    return x.reshape([batch, time, heads, dim / heads]).transpose([0, 2, 1, 3]);
  }

  /** Scaled dot-product attention; mask is additive, broadcast to [B,h,Tq,Tk]. */
  private attention(name: string, queries: tf.Tensor, keysValues: tf.Tensor,
                    mask: tf.Tensor | null): tf.Tensor {
    const [batch, tq] = [queries.shape[0] as number, queries.shape[1] as number];
    const tk = keysValues.shape[1] as number;
    const q = this.splitHeads(this.dense(queries, `${name}_wq`, `${name}_bq`), batch, tq);
    const k = this.splitHeads(this.dense(keysValues, `${name}_wk`, `${name}_bk`), batch, tk);
    const v = this.splitHeads(this.dense(keysValues, `${name}_wv`, `${name}_bv`), batch, tk);
    const headDim = q.shape[3] as number;
    let scores = q.matMul(k, false, true).div(Math.sqrt(headDim));
    if (mask) scores = scores.add(mask);
    const mixed = tf.softmax(scores).matMul(v)
      .transpose([0, 2, 1, 3])
      .reshape([batch, tq, this.config.heads * headDim]);
    return this.dense(mixed, `${name}_wo`, `${name}_bo`);
  }

  private ffn(x: tf.Tensor, name: string): tf.Tensor {
    return this.dense(this.dense(x, `${name}_w1`, `${name}_b1`).relu(),
                      `${name}_w2`, `${name}_b2`);
  }

  private embed(ids: tf.Tensor, embed: string, pos: string, ln: string): tf.Tensor {
    const time = ids.shape[1] as number;
    if (time > this.config.maxPositions) {
      throw new Error(`sequence length ${time} exceeds maxPositions ${this.config.maxPositions}`);
    }
    const table = this.get(embed);
    const vocab = table.shape[0] as number;
    // one-hot matmul rather than gather: the wasm backend has no kernel for
    // the gather gradient, and at these vocabulary sizes the cost is small
    const oneHot = tf.oneHot(tf.cast(ids.flatten(), 'int32'), vocab);
    const tok = oneHot.matMul(table).reshape([ids.shape[0] as number, time, -1]);
    const positions = this.get(pos).slice([0, 0], [time, -1]).expandDims(0);
    return this.layerNorm(tok.add(positions), ln);
  }

  /** [B, Tin] padding ids -> additive key mask [B, 1, 1, Tin]. */
  static paddingMask(ids: tf.Tensor, padId: number): tf.Tensor {
    return tf.cast(tf.equal(ids, padId), 'float32').mul(NEG_INF)
      .expandDims(1).expandDims(1);
  }

  static causalMask(time: number): tf.Tensor {
    // lower-triangular ones -> 0 on the visible band, NEG_INF on the future
    const band = tf.linalg.bandPart(tf.ones([time, time]), -1, 0);
    return tf.sub(band, 1).mul(-NEG_INF).expandDims(0).expandDims(0);
  }

  encode(encIds: tf.Tensor, padId: number): { memory: tf.Tensor; mask: tf.Tensor } {
    const mask = Transformer.paddingMask(encIds, padId);
    let h = this.embed(encIds, 'enc_embed', 'enc_pos', 'enc_emb_ln');
    for (let i = 0; i < this.config.encLayers; i++) {
      const p = `enc${i}`;
      h = this.layerNorm(h.add(this.attention(`${p}_self`, h, h, mask)), `${p}_ln1`);
      h = this.layerNorm(h.add(this.ffn(h, `${p}_ffn`)), `${p}_ln2`);
    }
    return { memory: h, mask };
  }

  decode(decIds: tf.Tensor, memory: tf.Tensor, memMask: tf.Tensor,
         padId: number): tf.Tensor {
    const time = decIds.shape[1] as number;
    const causal = Transformer.causalMask(time);
    const selfMask = causal.add(Transformer.paddingMask(decIds, padId));
    let h = this.embed(decIds, 'dec_embed', 'dec_pos', 'dec_emb_ln');
    for (let i = 0; i < this.config.decLayers; i++) {
      const p = `dec${i}`;
      h = this.layerNorm(h.add(this.attention(`${p}_self`, h, h, selfMask)), `${p}_ln1`);
      h = this.layerNorm(h.add(this.attention(`${p}_cross`, h, memory, memMask)), `${p}_ln2`);
      h = this.layerNorm(h.add(this.ffn(h, `${p}_ffn`)), `${p}_ln3`);
    }
    // tied head: project onto the transposed decoder embedding
    const dd = this.config.decDim;
    return h.reshape([-1, dd]).matMul(this.get('dec_embed'), false, true)
      .add(this.get('out_bias'))
      .reshape([decIds.shape[0] as number, time, this.config.vocabOut]);
  }

  forward(encIds: tf.Tensor, decIds: tf.Tensor, encPadId: number,
          decPadId: number): tf.Tensor {
    const { memory, mask } = this.encode(encIds, encPadId);
    return this.decode(decIds, memory, mask, decPadId);
  }

  dispose(): void {
    for (const v of this.vars.values()) v.dispose();
    this.vars.clear();
  }
}

/** Cross-entropy averaged over unmasked target positions. */
export function maskedCrossEntropy(logits: tf.Tensor, targets: tf.Tensor,
                                   mask: tf.Tensor, vocab: number): tf.Scalar {
  const logProbs = tf.logSoftmax(logits);
  const oneHot = tf.oneHot(tf.cast(targets, 'int32').flatten(), vocab)
    .reshape(logits.shape as number[]);
  const nll = logProbs.mul(oneHot).sum(-1).mul(-1);
  return nll.mul(mask).sum().div(mask.sum()) as tf.Scalar;
}
