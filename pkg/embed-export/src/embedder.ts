/**
 * Embedding backends.
 *
 * "hashed-<d>" is the built-in model: every token gets a fixed pseudo-random
 * vector derived from a 64-bit hash of its text, and a document row is the
 * mean over its first max_length token vectors. It needs no downloads and is
 * bit-reproducible across platforms, which makes it the default in offline
 * environments. Any model name containing "/" is treated as a transformers.js
 * feature-extraction model (e.g. Xenova/all-MiniLM-L6-v2) and used with mean
 * pooling when that runtime and its weights are available locally.
 */

export class ModelUnavailableError extends Error {}

export interface Embedder {
  name: string;
  dim: number;
  maxLength: number;
  pooling: "mean";
  embed(texts: string[]): Promise<Float32Array[]>;
}

const TOKEN_RE = /[\p{L}\p{N}]{2,}/gu;

export function tokenize(text: string, maxLength: number): string[] {
  const tokens = text.toLowerCase().match(TOKEN_RE) ?? [];
  return tokens.slice(0, maxLength);
}

const FNV_OFFSET = 0xcbf29ce484222325n;
const FNV_PRIME = 0x100000001b3n;
const MASK64 = (1n << 64n) - 1n;

function fnv1a64(text: string): bigint {
  let hash = FNV_OFFSET;
  const bytes = Buffer.from(text, "utf-8");
  for (const byte of bytes) {
    hash = ((hash ^ BigInt(byte)) * FNV_PRIME) & MASK64;
  }
  return hash;
}

/** splitmix64: fixed-point-free mixing, identical output on every platform */
function* splitmix64(seed: bigint): Generator<number> {
  let state = seed & MASK64;
  while (true) {
    state = (state + 0x9e3779b97f4a7c15n) & MASK64;
    let z = state;
    z = ((z ^ (z >> 30n)) * 0xbf58476d1ce4e5b9n) & MASK64;
    z = ((z ^ (z >> 27n)) * 0x94d049bb133111ebn) & MASK64;
    z = z ^ (z >> 31n);
    yield Number(z >> 11n) / 2 ** 53; // uniform in [0, 1)
  }
}

class HashedEmbedder implements Embedder {
  readonly name: string;
  readonly dim: number;
  readonly maxLength: number;
  readonly pooling = "mean" as const;
  private cache = new Map<string, Float32Array>();

  constructor(dim: number, maxLength: number) {
    this.name = `hashed-${dim}`;
    this.dim = dim;
    this.maxLength = maxLength;
  }

  private tokenVector(token: string): Float32Array {
    let vec = this.cache.get(token);
    if (vec === undefined) {
      vec = new Float32Array(this.dim);
      const stream = splitmix64(fnv1a64(token));
      for (let i = 0; i < this.dim; i++) {
        vec[i] = 2 * stream.next().value - 1;
      }
      this.cache.set(token, vec);
    }
    return vec;
  }

  async embed(texts: string[]): Promise<Float32Array[]> {
    return texts.map((text) => {
      const tokens = tokenize(text, this.maxLength);
      const out = new Float32Array(this.dim);
      if (tokens.length === 0) return out;
      for (const token of tokens) {
        const vec = this.tokenVector(token);
        for (let i = 0; i < this.dim; i++) out[i] += vec[i];
      }
      for (let i = 0; i < this.dim; i++) out[i] /= tokens.length;
      return out;
    });
  }
}

class TransformerEmbedder implements Embedder {
  readonly name: string;
  readonly maxLength: number;
  readonly pooling = "mean" as const;
  dim = 0;
  private pipe: any;

  constructor(name: string, maxLength: number, pipe: any) {
    this.name = name;
    this.maxLength = maxLength;
    this.pipe = pipe;
  }

  async embed(texts: string[]): Promise<Float32Array[]> {
    const rows: Float32Array[] = [];
    for (const text of texts) {
      const output = await this.pipe(text, { pooling: "mean", normalize: false });
      const data = Float32Array.from(output.data as Iterable<number>);
      if (this.dim === 0) this.dim = data.length;
      rows.push(data);
    }
    return rows;
  }
}

const HASHED_RE = /^hashed-(\d+)$/;

export async function createEmbedder(model: string, maxLength: number): Promise<Embedder> {
  const hashed = HASHED_RE.exec(model);
  if (hashed) {
    const dim = parseInt(hashed[1], 10);
    if (dim <= 0 || dim > 8192) {
      throw new ModelUnavailableError(`hashed model dimension ${hashed[1]} out of range`);
    }
    return new HashedEmbedder(dim, maxLength);
  }
  if (model.includes("/")) {
    let mod: any;
    try {
      const moduleName = "@xenova/transformers"; // resolved at run time only
      mod = await import(moduleName);
    } catch {
      throw new ModelUnavailableError(
        `model ${model} unavailable: @xenova/transformers is not installed ` +
          `(npm install @xenova/transformers, with its weights cached locally)`,
      );
    }
    try {
      const pipe = await mod.pipeline("feature-extraction", model);
      return new TransformerEmbedder(model, maxLength, pipe);
    } catch (err) {
      throw new ModelUnavailableError(`model ${model} unavailable: ${(err as Error).message}`);
    }
  }
  throw new ModelUnavailableError(
    `unknown model ${model}: use hashed-<dim> or a transformers.js model id`,
  );
}
