/**
 * FLEMB1 binary embedding files.
 *
 * Layout (all integers little-endian, independent of platform):
 *   bytes 0..5    magic "FLEMB1"
 *   bytes 6..9    u32 dimension d
 *   bytes 10..17  u64 row count n
 *   id table      n entries of (u32 byte length, UTF-8 article id)
 *   payload       n rows of d float32 values, row-major, in id order
 */

import * as fs from "node:fs";
import * as os from "node:os";

export const MAGIC = Buffer.from("FLEMB1", "ascii");
const HEADER_SIZE = 6 + 4 + 8;

export class FormatError extends Error {}

export interface EmbeddingFile {
  ids: string[];
  dim: number;
  /** row-major n*dim values */
  rows: Float32Array;
}

export function encodeEmbeddings(ids: string[], rows: Float32Array, dim: number): Buffer {
  if (dim <= 0) throw new FormatError("embedding dimension must be positive");
  if (rows.length !== ids.length * dim) {
    throw new FormatError(`payload has ${rows.length} floats, expected ${ids.length * dim}`);
  }
  if (new Set(ids).size !== ids.length) {
    throw new FormatError("duplicate article ids in embedding file");
  }
  for (const v of rows) {
    if (!Number.isFinite(v)) throw new FormatError("embedding rows contain non-finite values");
  }
  const idBuffers = ids.map((id) => Buffer.from(id, "utf-8"));
  const idBytes = idBuffers.reduce((sum, b) => sum + 4 + b.length, 0);
  const out = Buffer.alloc(HEADER_SIZE + idBytes + rows.length * 4);
  MAGIC.copy(out, 0);
  out.writeUInt32LE(dim, 6);
  out.writeBigUInt64LE(BigInt(ids.length), 10);
  let offset = HEADER_SIZE;
  for (const raw of idBuffers) {
    out.writeUInt32LE(raw.length, offset);
    offset += 4;
    raw.copy(out, offset);
    offset += raw.length;
  }
  if (os.endianness() === "LE") {
    Buffer.from(rows.buffer, rows.byteOffset, rows.length * 4).copy(out, offset);
  } else {
    for (let i = 0; i < rows.length; i++) {
      out.writeFloatLE(rows[i], offset + i * 4);
    }
  }
  return out;
}

export interface Sidecar {
  model: string;
  dim: number;
  pooling: string;
  max_length: number;
}

export function writeEmbeddings(
  path: string,
  ids: string[],
  rows: Float32Array,
  dim: number,
  sidecar?: Sidecar,
): void {
  fs.writeFileSync(path, encodeEmbeddings(ids, rows, dim));
  if (sidecar) {
    fs.writeFileSync(path + ".json", JSON.stringify(sidecar, Object.keys(sidecar).sort(), 2) + "\n");
  }
}

export function decodeEmbeddings(blob: Buffer, origin = "<buffer>"): EmbeddingFile {
  if (blob.length < HEADER_SIZE) {
    throw new FormatError(`${origin}: truncated header (${blob.length} bytes)`);
  }
  if (!blob.subarray(0, 6).equals(MAGIC)) {
    throw new FormatError(`${origin}: bad magic ${JSON.stringify(blob.subarray(0, 6).toString("latin1"))}`);
  }
  const dim = blob.readUInt32LE(6);
  if (dim === 0) throw new FormatError(`${origin}: zero embedding dimension`);
  const count = Number(blob.readBigUInt64LE(10));
  let offset = HEADER_SIZE;
  const ids: string[] = [];
  for (let i = 0; i < count; i++) {
    if (offset + 4 > blob.length) throw new FormatError(`${origin}: id table truncated`);
    const len = blob.readUInt32LE(offset);
    offset += 4;
    if (offset + len > blob.length) throw new FormatError(`${origin}: id table truncated`);
    ids.push(blob.subarray(offset, offset + len).toString("utf-8"));
    offset += len;
  }
  if (new Set(ids).size !== ids.length) throw new FormatError(`${origin}: duplicate article ids`);
  const expected = count * dim * 4;
  const payload = blob.subarray(offset);
  if (payload.length < expected) {
    throw new FormatError(
      `${origin}: payload shorter than n*d*4 (${payload.length} bytes, expected ${expected})`,
    );
  }
  if (payload.length > expected) {
    throw new FormatError(`${origin}: ${payload.length - expected} trailing bytes after payload`);
  }
  const rows = new Float32Array(count * dim);
  for (let i = 0; i < rows.length; i++) {
    rows[i] = payload.readFloatLE(i * 4);
  }
  for (const v of rows) {
    if (!Number.isFinite(v)) throw new FormatError(`${origin}: payload contains non-finite values`);
  }
  return { ids, dim, rows };
}

export function readEmbeddings(path: string): EmbeddingFile {
  if (!fs.existsSync(path)) throw new FormatError(`embedding file ${path} does not exist`);
  return decodeEmbeddings(fs.readFileSync(path), path);
}

export interface VerifyReport {
  ok: true;
  n: number;
  d: number;
  bytes: number;
}

export function verifyEmbeddings(path: string): VerifyReport {
  const file = readEmbeddings(path);
  return { ok: true, n: file.ids.length, d: file.dim, bytes: fs.statSync(path).size };
}

export function row(file: EmbeddingFile, index: number): Float32Array {
  return file.rows.subarray(index * file.dim, (index + 1) * file.dim);
}

export function cosine(a: Float32Array, b: Float32Array): number {
  let dot = 0;
  let na = 0;
  let nb = 0;
  for (let i = 0; i < a.length; i++) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na === 0 || nb === 0) return 0;
  return dot / Math.sqrt(na * nb);
}
