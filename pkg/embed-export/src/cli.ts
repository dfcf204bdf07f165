#!/usr/bin/env node
/**
 * embed-export: turn a JSONL article corpus into a FLEMB1 embedding file.
 *
 *   embed-export export --corpus corpus.jsonl --out articles.flemb
 *                       [--model hashed-256] [--max-length 512]
 *   embed-export verify articles.flemb
 *
 * Exit codes: 0 ok, 1 usage error, 2 data/model error.
 */

import { readCorpus, CorpusError } from "./corpus.js";
import { createEmbedder, ModelUnavailableError } from "./embedder.js";
import { FormatError, verifyEmbeddings, writeEmbeddings } from "./format.js";

const USAGE = `usage:
  embed-export export --corpus <corpus.jsonl> --out <file.flemb> [--model hashed-256] [--max-length 512]
  embed-export verify <file.flemb>`;

function fail(code: number, message: string): never {
  console.error(message);
  process.exit(code);
}

function parseFlags(argv: string[]): Map<string, string> {
  const flags = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    if (!key.startsWith("--") || i + 1 >= argv.length) {
      fail(1, `bad arguments near ${key}\n${USAGE}`);
    }
    flags.set(key.slice(2), argv[i + 1]);
  }
  return flags;
}

async function runExport(argv: string[]): Promise<void> {
  const flags = parseFlags(argv);
  const corpusPath = flags.get("corpus");
  const outPath = flags.get("out");
  if (!corpusPath || !outPath) fail(1, `--corpus and --out are required\n${USAGE}`);
  const model = flags.get("model") ?? "hashed-256";
  const maxLength = parseInt(flags.get("max-length") ?? "512", 10);
  if (!Number.isFinite(maxLength) || maxLength <= 0) fail(1, "--max-length must be positive");

  const { articles, badLines } = readCorpus(corpusPath);
  for (const bad of badLines.slice(0, 20)) {
    console.error(`warning: line ${bad.line}: ${bad.error}`);
  }
  if (articles.length === 0) fail(2, `${corpusPath}: no readable articles`);

  const embedder = await createEmbedder(model, maxLength);
  const texts = articles.map((a) => `${a.title} ${a.body}`);
  const rows = await embedder.embed(texts);
  const dim = embedder.dim || rows[0].length;
  const flat = new Float32Array(rows.length * dim);
  rows.forEach((vec, i) => flat.set(vec, i * dim));
  writeEmbeddings(outPath, articles.map((a) => a.id), flat, dim, {
    model: embedder.name,
    dim,
    pooling: embedder.pooling,
    max_length: maxLength,
  });
  console.log(`wrote ${outPath}: n=${articles.length}, d=${dim} (model ${embedder.name})`);
}

function runVerify(argv: string[]): void {
  if (argv.length !== 1) fail(1, USAGE);
  const report = verifyEmbeddings(argv[0]);
  console.log(`OK, n=${report.n}, d=${report.d}, ${report.bytes} bytes`);
}

async function main(): Promise<void> {
  const [command, ...rest] = process.argv.slice(2);
  try {
    if (command === "export") {
      await runExport(rest);
    } else if (command === "verify") {
      runVerify(rest);
    } else {
      fail(1, USAGE);
    }
  } catch (err) {
    if (err instanceof FormatError || err instanceof CorpusError || err instanceof ModelUnavailableError) {
      fail(2, `error: ${err.message}`);
    }
    throw err;
  }
}

main();
