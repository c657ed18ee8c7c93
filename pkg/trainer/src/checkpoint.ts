import * as fs from 'node:fs';
import * as tf from '@tensorflow/tfjs';
import { ModelConfig, Transformer } from './model.js';

interface StoredWeight {
  shape: number[];
  data: string; // base64 float32
}

export interface Checkpoint {
  config: ModelConfig;
  step: number;
  weights: Record<string, StoredWeight>;
}

export function saveCheckpoint(model: Transformer, step: number, path: string): void {
  const weights: Record<string, StoredWeight> = {};
  for (const [name, variable] of model.vars) {
    const data = variable.dataSync() as Float32Array;
    weights[name] = {
      shape: variable.shape.slice(),
      data: Buffer.from(data.buffer, data.byteOffset, data.byteLength).toString('base64'),
    };
  }
  const payload: Checkpoint = { config: model.config, step, weights };
  fs.writeFileSync(path, JSON.stringify(payload));
}

export function loadCheckpoint(path: string): { model: Transformer; step: number } {
  const payload = JSON.parse(fs.readFileSync(path, 'utf-8')) as Checkpoint;
  const model = new Transformer(payload.config);
  for (const [name, stored] of Object.entries(payload.weights)) {
    const buf = Buffer.from(stored.data, 'base64');
    const array = new Float32Array(buf.buffer, buf.byteOffset, buf.byteLength / 4);
    model.get(name).assign(tf.tensor(Array.from(array), stored.shape, 'float32'));
  }
  return { model, step: payload.step };
}
