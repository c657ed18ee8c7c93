import * as fs from 'node:fs';

/**
 * Token table backed by a newline-delimited vocabulary file: the id of a
 * file token is its line number. PAD/BOS/EOS are appended locally after the
 * file tokens, so dataset token ids match the file exactly.
 */
export class Vocab {
  readonly tokens: string[];
  readonly index: Map<string, number>;
  readonly padId: number;
  readonly bosId: number;
  readonly eosId: number;

  constructor(fileTokens: string[]) {
    this.tokens = [...fileTokens, '<pad>', '<bos>', '<eos>'];
    this.index = new Map();
    this.tokens.forEach((tok, i) => {
      if (this.index.has(tok)) throw new Error(`duplicate token ${tok}`);
      this.index.set(tok, i);
    });
    this.padId = this.index.get('<pad>')!;
    this.bosId = this.index.get('<bos>')!;
    this.eosId = this.index.get('<eos>')!;
  }

  static load(path: string): Vocab {
    const text = fs.readFileSync(path, 'utf-8');
    const lines = text.split('\n');
    if (lines.length && lines[lines.length - 1] === '') lines.pop();
    return new Vocab(lines);
  }

  get size(): number {
    return this.tokens.length;
  }

  encode(tokens: string[]): number[] {
    return tokens.map((tok) => {
      const id = this.index.get(tok);
      if (id === undefined) throw new Error(`unknown token ${tok}`);
      return id;
    });
  }

  decode(ids: number[]): string[] {
    return ids.map((id) => {
      if (id < 0 || id >= this.tokens.length) throw new Error(`bad token id ${id}`);
      return this.tokens[id];
    });
  }
}
