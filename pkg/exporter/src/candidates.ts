/**
 * Readers for the candidate files the core's export-candidates command emits:
 * a vocabulary file (one stem per line) and an occurrence file (line-delimited
 * JSON records with doc_id, sentence_index, token_index, stem).
 */

import { readFileSync } from "node:fs";

export interface Occurrence {
  doc_id: string;
  sentence_index: number;
  token_index: number;
  stem: string;
}

export function readVocabulary(path: string): string[] {
  const text = readFileSync(path, "utf-8");
  return text.split("\n").filter((line) => line.length > 0);
}

export function readOccurrences(path: string): Occurrence[] {
  const text = readFileSync(path, "utf-8");
  const records: Occurrence[] = [];
  const lines = text.split("\n");
  for (let i = 0; i < lines.length; i++) {
    if (!lines[i].trim()) continue;
    let parsed: unknown;
    try {
      parsed = JSON.parse(lines[i]);
    } catch (err) {
      throw new Error(`${path}:${i + 1}: invalid JSON record: ${err}`);
    }
    const record = parsed as Record<string, unknown>;
    for (const field of ["doc_id", "sentence_index", "token_index", "stem"]) {
      if (!(field in record)) {
        throw new Error(`${path}:${i + 1}: record missing field '${field}'`);
      }
    }
    records.push({
      doc_id: String(record.doc_id),
      sentence_index: Number(record.sentence_index),
      token_index: Number(record.token_index),
      stem: String(record.stem),
    });
  }
  return records;
}

/**
 * Rebuild the preprocessed corpus as ordered sentences of stems.
 * Documents keep file order; sentences and tokens sort by their indices.
 */
export function sentencesFromOccurrences(occurrences: Occurrence[]): string[][] {
  const docOrder: string[] = [];
  const byDoc = new Map<string, Map<number, Map<number, string>>>();
  for (const occ of occurrences) {
    if (!byDoc.has(occ.doc_id)) {
      byDoc.set(occ.doc_id, new Map());
      docOrder.push(occ.doc_id);
    }
    const sentences = byDoc.get(occ.doc_id)!;
    if (!sentences.has(occ.sentence_index)) sentences.set(occ.sentence_index, new Map());
    sentences.get(occ.sentence_index)!.set(occ.token_index, occ.stem);
  }
  const out: string[][] = [];
  for (const docId of docOrder) {
    const sentences = byDoc.get(docId)!;
    for (const sIndex of [...sentences.keys()].sort((a, b) => a - b)) {
      const tokens = sentences.get(sIndex)!;
      out.push([...tokens.keys()].sort((a, b) => a - b).map((t) => tokens.get(t)!));
    }
  }
  return out;
}
