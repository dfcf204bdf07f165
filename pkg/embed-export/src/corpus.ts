/**
 * Reader for the pipeline's JSONL corpus files: one object per line with
 * id, source, title, body, published (ISO date) and optional url. Only id,
 * title and body matter here; malformed lines are reported and skipped,
 * duplicate ids abort because rows are keyed by id downstream.
 */

import * as fs from "node:fs";

export interface CorpusArticle {
  id: string;
  title: string;
  body: string;
}

export class CorpusError extends Error {}

export interface CorpusReadResult {
  articles: CorpusArticle[];
  badLines: { line: number; error: string }[];
}

export function readCorpus(path: string): CorpusReadResult {
  if (!fs.existsSync(path)) throw new CorpusError(`corpus file ${path} does not exist`);
  const articles: CorpusArticle[] = [];
  const badLines: { line: number; error: string }[] = [];
  const seen = new Map<string, number>();
  const lines = fs.readFileSync(path, "utf-8").split("\n");
  lines.forEach((line, index) => {
    const lineNo = index + 1;
    if (!line.trim()) return;
    let obj: unknown;
    try {
      obj = JSON.parse(line);
    } catch {
      badLines.push({ line: lineNo, error: "malformed JSON" });
      return;
    }
    if (typeof obj !== "object" || obj === null) {
      badLines.push({ line: lineNo, error: "expected a JSON object" });
      return;
    }
    const record = obj as Record<string, unknown>;
    const id = record.id;
    const title = record.title;
    const body = record.body;
    if (typeof id !== "string" || !id) {
      badLines.push({ line: lineNo, error: "missing id" });
      return;
    }
    if (typeof title !== "string" || typeof body !== "string" || !body.trim()) {
      badLines.push({ line: lineNo, error: "missing title or body" });
      return;
    }
    const first = seen.get(id);
    if (first !== undefined) {
      throw new CorpusError(`${path}: duplicate article id ${JSON.stringify(id)} on line ${lineNo} (first seen on line ${first})`);
    }
    seen.set(id, lineNo);
    articles.push({ id, title, body });
  });
  return { articles, badLines };
}
