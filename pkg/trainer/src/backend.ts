import { createRequire } from 'node:module';
import * as tf from '@tensorflow/tfjs';
import * as wasm from '@tensorflow/tfjs-backend-wasm';

/** Prefer the wasm backend (SIMD); fall back to the plain JS cpu backend. */
export async function initBackend(): Promise<string> {
  try {
    const require2 = createRequire(import.meta.url);
    const pkgJson = require2.resolve('@tensorflow/tfjs-backend-wasm/package.json');
    wasm.setWasmPaths(pkgJson.replace(/package\.json$/, 'dist/'));
    await tf.setBackend('wasm');
    await tf.ready();
  } catch {
    await tf.setBackend('cpu');
    await tf.ready();
  }
  return tf.getBackend();
}
