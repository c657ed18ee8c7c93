/**
 * Minimal token -> matrix parsing plus the generic tolerance check, kept
 * semantically identical to the evaluator on the Python side so internal
 * training accuracy matches `matseq eval` verdict for verdict.
 */

export interface Scheme {
  kind: 'positional' | 'balanced' | 'float';
  param: number;
  precisionDigits: number;
}

export const SCHEMES: Record<string, Scheme> = {
  P10: { kind: 'positional', param: 10, precisionDigits: 3 },
  P100: { kind: 'positional', param: 100, precisionDigits: 2 },
  P1000: { kind: 'positional', param: 1000, precisionDigits: 3 },
  P10000: { kind: 'positional', param: 10000, precisionDigits: 4 },
  B1999: { kind: 'balanced', param: 999, precisionDigits: 3 },
  FP15: { kind: 'float', param: 14, precisionDigits: 3 },
};

export function mantissaTokens(s: Scheme): number {
  const maxMantissa = 10 ** s.precisionDigits - 1;
  if (s.kind === 'positional') {
    let k = 1;
    while (s.param ** k <= maxMantissa) k += 1;
    return k;
  }
  if (s.kind === 'balanced') {
    const base = 2 * s.param + 1;
    let k = 1;
    while ((base ** k - 1) / 2 < maxMantissa) k += 1;
    return k;
  }
  return 0;
}

export function tokensPerNumber(s: Scheme): number {
  if (s.kind === 'positional') return mantissaTokens(s) + 2;
  if (s.kind === 'balanced') return mantissaTokens(s) + 1;
  return 1;
}

const EXP_RE = /^E(-?\d+)$/;
const FP_RE = /^FP(-?\d+)\/(-?\d+)$/;
const DIM_RE = /^V(\d+)$/;

function parseNumber(tokens: string[], s: Scheme): number {
  const arity = tokensPerNumber(s);
  if (tokens.length !== arity) throw new Error('wrong arity');
  let signed: number;
  let exponent: number;
  if (s.kind === 'float') {
    const m = FP_RE.exec(tokens[0]);
    if (!m) throw new Error(`bad float token ${tokens[0]}`);
    signed = parseInt(m[1], 10);
    exponent = parseInt(m[2], 10);
  } else if (s.kind === 'positional') {
    const sign = tokens[0] === '+' ? 1 : tokens[0] === '-' ? -1 : NaN;
    if (Number.isNaN(sign)) throw new Error(`bad sign ${tokens[0]}`);
    let mantissa = 0;
    for (const tok of tokens.slice(1, -1)) {
      const digit = Number(tok);
      if (!Number.isInteger(digit) || digit < 0 || digit >= s.param) {
        throw new Error(`bad digit ${tok}`);
      }
      mantissa = mantissa * s.param + digit;
    }
    const em = EXP_RE.exec(tokens[tokens.length - 1]);
    if (!em) throw new Error(`bad exponent ${tokens[tokens.length - 1]}`);
    signed = sign * mantissa;
    exponent = parseInt(em[1], 10);
  } else {
    const base = 2 * s.param + 1;
    let acc = 0;
    for (const tok of tokens.slice(0, -1)) {
      const digit = Number(tok);
      if (!Number.isInteger(digit) || Math.abs(digit) > s.param) {
        throw new Error(`bad balanced digit ${tok}`);
      }
      acc = acc * base + digit;
    }
    const em = EXP_RE.exec(tokens[tokens.length - 1]);
    if (!em) throw new Error(`bad exponent ${tokens[tokens.length - 1]}`);
    signed = acc;
    exponent = parseInt(em[1], 10);
  }
  if (exponent < -100 || exponent > 100) throw new Error('exponent out of range');
  const mantissa = Math.abs(signed);
  const floor = 10 ** (s.precisionDigits - 1);
  if (mantissa === 0) {
    if (exponent !== 0 || tokens[0] === '-') throw new Error('non-canonical zero');
    return 0;
  }
  if (mantissa < floor || mantissa > 10 ** s.precisionDigits - 1) {
    throw new Error(`mantissa ${mantissa} out of range`);
  }
  return Number(`${signed}e${exponent}`);
}

export interface ParsedMatrix {
  rows: number;
  cols: number;
  data: number[]; // row-major
}

/** Strict inverse of the serialiser: V tokens, then exactly rows*cols numbers. */
export function tokensToMatrix(tokens: string[], scheme: Scheme): ParsedMatrix {
  if (tokens.length < 2) throw new Error('missing dimension tokens');
  const rm = DIM_RE.exec(tokens[0]);
  const cm = DIM_RE.exec(tokens[1]);
  if (!rm || !cm) throw new Error('bad dimension tokens');
  const rows = parseInt(rm[1], 10);
  const cols = parseInt(cm[1], 10);
  const arity = tokensPerNumber(scheme);
  if (tokens.length !== 2 + rows * cols * arity) throw new Error('wrong element count');
  const data: number[] = [];
  for (let k = 0; k < rows * cols; k++) {
    data.push(parseNumber(tokens.slice(2 + k * arity, 2 + (k + 1) * arity), scheme));
  }
  return { rows, cols, data };
}

/** ||P - O||_1 / ||O||_1 with the shared zero conventions. */
export function relErrorL1(p: ParsedMatrix, o: ParsedMatrix): number {
  if (p.rows !== o.rows || p.cols !== o.cols) return Infinity;
  let err = 0;
  let ref = 0;
  for (let i = 0; i < o.data.length; i++) {
    err += Math.abs(p.data[i] - o.data[i]);
    ref += Math.abs(o.data[i]);
  }
  if (ref === 0) return err === 0 ? 0 : Infinity;
  return err / ref;
}

/** Generic verdict used for the desk-scale tasks (transpose, add). */
export function tolerantMatch(predicted: string[], target: string[], scheme: Scheme,
                              tau: number): boolean {
  let p: ParsedMatrix;
  let o: ParsedMatrix;
  try {
    p = tokensToMatrix(predicted, scheme);
    o = tokensToMatrix(target, scheme);
  } catch {
    return false;
  }
  const err = relErrorL1(p, o);
  if (tau === 0) return err === 0;
  return err < tau;
}
