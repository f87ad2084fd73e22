/**
 * Writers for the two file formats the core loads, plus the sidecar manifest.
 *
 * Static: first line "V d", then one line per word: token followed by d
 * decimal reals, space-separated. Contextual: line-delimited JSON records
 * with doc_id, sentence_index, token_index, stem, vector. UTF-8 throughout.
 */

import { mkdirSync, writeFileSync } from "node:fs";
import { dirname } from "node:path";

import { EncodedOccurrence } from "./contextual.js";

function formatComponent(value: number): string {
  return value.toFixed(8);
}

export function writeStaticVectors(path: string, vectors: Map<string, Float64Array>): void {
  const words = [...vectors.keys()].sort();
  let dimension = 0;
  for (const word of words) {
    dimension = vectors.get(word)!.length;
    break;
  }
  const lines = [`${words.length} ${dimension}`];
  for (const word of words) {
    const components = [...vectors.get(word)!].map(formatComponent).join(" ");
    lines.push(`${word} ${components}`);
  }
  mkdirSync(dirname(path), { recursive: true });
  writeFileSync(path, lines.join("\n") + "\n", "utf-8");
}

export function writeContextualRecords(path: string, encoded: EncodedOccurrence[]): void {
  const lines = encoded.map(({ occurrence, vector }) =>
    JSON.stringify({
      doc_id: occurrence.doc_id,
      sentence_index: occurrence.sentence_index,
      token_index: occurrence.token_index,
      stem: occurrence.stem,
      vector: [...vector].map((x) => Number(x.toFixed(8))),
    }),
  );
  mkdirSync(dirname(path), { recursive: true });
  writeFileSync(path, lines.join("\n") + (lines.length ? "\n" : ""), "utf-8");
}

export interface ManifestFields {
  mode: "static" | "contextual";
  model: string;
  seed: number;
  dimensions: number;
  layer: string;
  pooling: string;
  skipped: string[];
  [extra: string]: unknown;
}

export function writeManifest(path: string, fields: ManifestFields): void {
  mkdirSync(dirname(path), { recursive: true });
  const ordered = Object.fromEntries(Object.entries(fields).sort(([a], [b]) => (a < b ? -1 : 1)));
  writeFileSync(path, JSON.stringify(ordered, null, 2) + "\n", "utf-8");
}
