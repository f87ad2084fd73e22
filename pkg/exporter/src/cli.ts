#!/usr/bin/env node
/**
 * kwnet-export: produce embedding files for the kwnet core.
 *
 *   static      train skip-gram vectors over the preprocessed corpus
 *   contextual  emit one vector per token occurrence
 *
 * Inputs are the candidate files written by `kwnet export-candidates`:
 * vocabulary.txt and occurrences.jsonl.
 */

import { join } from "node:path";
import { pathToFileURL } from "node:url";

import { readOccurrences, readVocabulary, sentencesFromOccurrences } from "./candidates.js";
import { CONTEXTUAL_DEFAULTS, encodeOccurrences, encoderMetadata } from "./contextual.js";
import { writeContextualRecords, writeManifest, writeStaticVectors } from "./formats.js";
import { SKIPGRAM_DEFAULTS, trainSkipGram } from "./skipgram.js";

interface Flags {
  [key: string]: string;
}

function parseFlags(argv: string[]): Flags {
  const flags: Flags = {};
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    if (!key.startsWith("--") || i + 1 >= argv.length) {
      throw new Error(`malformed arguments near '${key}'`);
    }
    flags[key.slice(2)] = argv[i + 1];
  }
  return flags;
}

function required(flags: Flags, name: string): string {
  const value = flags[name];
  if (value === undefined) throw new Error(`missing required flag --${name}`);
  return value;
}

function integer(flags: Flags, name: string, fallback?: number): number {
  const raw = flags[name];
  if (raw === undefined) {
    if (fallback === undefined) throw new Error(`missing required flag --${name}`);
    return fallback;
  }
  const value = Number(raw);
  if (!Number.isInteger(value)) throw new Error(`--${name} must be an integer, got '${raw}'`);
  return value;
}

function runStatic(flags: Flags): void {
  const vocabularyPath = required(flags, "vocabulary");
  const occurrencesPath = required(flags, "occurrences");
  const out = required(flags, "out");
  const dimensions = integer(flags, "dimensions");
  const options = {
    dimensions,
    window: integer(flags, "window", SKIPGRAM_DEFAULTS.window),
    epochs: integer(flags, "epochs", SKIPGRAM_DEFAULTS.epochs),
    negative: integer(flags, "negative", SKIPGRAM_DEFAULTS.negative),
    learningRate: flags["learning-rate"] ? Number(flags["learning-rate"]) : SKIPGRAM_DEFAULTS.learningRate,
    minCount: integer(flags, "min-count", SKIPGRAM_DEFAULTS.minCount),
    seed: integer(flags, "seed", SKIPGRAM_DEFAULTS.seed),
  };
  const vocabulary = readVocabulary(vocabularyPath);
  const occurrences = readOccurrences(occurrencesPath);
  const sentences = sentencesFromOccurrences(occurrences);
  const { vectors, skipped } = trainSkipGram(sentences, options);
  const missing = vocabulary.filter((w) => !vectors.has(w) && !skipped.includes(w)).sort();
  writeStaticVectors(join(out, "vectors.txt"), vectors);
  writeManifest(join(out, "manifest.json"), {
    mode: "static",
    model: "sgns-v1",
    seed: options.seed,
    dimensions,
    layer: "input-embeddings",
    pooling: "none",
    skipped: [...skipped, ...missing].sort(),
    window: options.window,
    epochs: options.epochs,
    negative: options.negative,
    learningRate: options.learningRate,
    minCount: options.minCount,
    vocabulary: vocabulary.length,
    exported: vectors.size,
  });
  console.log(`wrote ${vectors.size} vectors (d=${dimensions}) to ${join(out, "vectors.txt")}`);
  if (skipped.length > 0) {
    console.log(`skipped ${skipped.length} terms below min count ${options.minCount}`);
  }
}

function runContextual(flags: Flags): void {
  const occurrencesPath = required(flags, "occurrences");
  const out = required(flags, "out");
  const options = {
    dimensions: integer(flags, "dimensions"),
    model: flags["model"] ?? CONTEXTUAL_DEFAULTS.model,
    window: integer(flags, "window", CONTEXTUAL_DEFAULTS.window),
    seed: integer(flags, "seed", CONTEXTUAL_DEFAULTS.seed),
  };
  const occurrences = readOccurrences(occurrencesPath);
  const encoded = encodeOccurrences(occurrences, options);
  const metadata = encoderMetadata(options.model);
  writeContextualRecords(join(out, "contextual.jsonl"), encoded);
  writeManifest(join(out, "manifest.json"), {
    mode: "contextual",
    model: options.model,
    seed: options.seed,
    dimensions: options.dimensions,
    layer: metadata.layer,
    pooling: metadata.pooling,
    skipped: [],
    window: options.window,
    occurrences: encoded.length,
    truncated: 0, // the hashed encoder has no input length cap
  });
  console.log(`wrote ${encoded.length} occurrence vectors to ${join(out, "contextual.jsonl")}`);
}

export function main(argv: string[]): number {
  const [mode, ...rest] = argv;
  try {
    if (mode === "static") {
      runStatic(parseFlags(rest));
    } else if (mode === "contextual") {
      runContextual(parseFlags(rest));
    } else {
      console.error("usage: kwnet-export <static|contextual> [flags]");
      return 1;
    }
    return 0;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
}

if (process.argv[1] && import.meta.url === pathToFileURL(process.argv[1]).href) {
  process.exit(main(process.argv.slice(2)));
}
