/**
 * Skip-gram with negative sampling, trained over the preprocessed corpus
 * sentences. Single-threaded and fully seeded, so a fixed configuration
 * always produces the same vectors.
 */

import { Rng } from "./rng.js";

export interface SkipGramOptions {
  dimensions: number;
  window: number;
  epochs: number;
  negative: number;
  learningRate: number;
  minCount: number;
  seed: number;
}

export const SKIPGRAM_DEFAULTS = {
  window: 5,
  epochs: 15,
  negative: 5,
  learningRate: 0.025,
  minCount: 1,
  seed: 1,
};

export interface SkipGramResult {
  vectors: Map<string, Float64Array>;
  /** vocabulary terms below minCount, excluded from training and output */
  skipped: string[];
}

interface Vocabulary {
  words: string[];
  index: Map<string, number>;
  counts: number[];
  skipped: string[];
}

export function buildVocabulary(sentences: string[][], minCount: number): Vocabulary {
  const counts = new Map<string, number>();
  for (const sentence of sentences) {
    for (const stem of sentence) {
      counts.set(stem, (counts.get(stem) ?? 0) + 1);
    }
  }
  const kept = [...counts.keys()].filter((w) => counts.get(w)! >= minCount);
  // frequency-descending with a lexicographic tie-break keeps ordering stable
  kept.sort((a, b) => counts.get(b)! - counts.get(a)! || (a < b ? -1 : 1));
  const skipped = [...counts.keys()].filter((w) => counts.get(w)! < minCount).sort();
  return {
    words: kept,
    index: new Map(kept.map((w, i) => [w, i])),
    counts: kept.map((w) => counts.get(w)!),
    skipped,
  };
}

/** cumulative distribution over count^0.75, sampled by binary search */
function negativeTable(counts: number[]): Float64Array {
  const cumulative = new Float64Array(counts.length);
  let total = 0;
  for (let i = 0; i < counts.length; i++) {
    total += Math.pow(counts[i], 0.75);
    cumulative[i] = total;
  }
  for (let i = 0; i < counts.length; i++) cumulative[i] /= total;
  return cumulative;
}

function sampleNegative(cumulative: Float64Array, rng: Rng): number {
  const u = rng.next();
  let lo = 0;
  let hi = cumulative.length - 1;
  while (lo < hi) {
    const mid = (lo + hi) >> 1;
    if (cumulative[mid] < u) lo = mid + 1;
    else hi = mid;
  }
  return lo;
}

function sigmoid(x: number): number {
  if (x > 8) return 1;
  if (x < -8) return 0;
  return 1 / (1 + Math.exp(-x));
}

export function trainSkipGram(sentences: string[][], options: SkipGramOptions): SkipGramResult {
  const { dimensions, window, epochs, negative, learningRate, minCount, seed } = options;
  if (dimensions < 1) throw new Error(`dimensions must be >= 1, got ${dimensions}`);
  const vocab = buildVocabulary(sentences, minCount);
  const n = vocab.words.length;
  if (n === 0) {
    return { vectors: new Map(), skipped: vocab.skipped };
  }
  const rng = new Rng(seed);
  const input = new Float64Array(n * dimensions);
  const output = new Float64Array(n * dimensions);
  for (let i = 0; i < input.length; i++) {
    input[i] = rng.nextCentered(0.5 / dimensions);
  }
  const cumulative = negativeTable(vocab.counts);
  const encoded = sentences
    .map((s) => s.map((w) => vocab.index.get(w)).filter((i): i is number => i !== undefined))
    .filter((s) => s.length > 0);
  const totalSteps = epochs * encoded.reduce((acc, s) => acc + s.length, 0);
  let step = 0;

  const gradient = new Float64Array(dimensions);
  for (let epoch = 0; epoch < epochs; epoch++) {
    for (const sentence of encoded) {
      for (let center = 0; center < sentence.length; center++) {
        const lr = Math.max(learningRate * (1 - step / (totalSteps + 1)), learningRate * 1e-4);
        step++;
        const reach = 1 + rng.nextInt(window); // dynamic window, 1..window
        const target = sentence[center];
        for (let offset = -reach; offset <= reach; offset++) {
          const position = center + offset;
          if (offset === 0 || position < 0 || position >= sentence.length) continue;
          const context = sentence[position];
          const l1 = context * dimensions;
          gradient.fill(0);
          for (let k = 0; k <= negative; k++) {
            let sample: number;
            let label: number;
            if (k === 0) {
              sample = target;
              label = 1;
            } else {
              sample = sampleNegative(cumulative, rng);
              if (sample === target) continue;
              label = 0;
            }
            const l2 = sample * dimensions;
            let dot = 0;
            for (let j = 0; j < dimensions; j++) dot += input[l1 + j] * output[l2 + j];
            const g = (label - sigmoid(dot)) * lr;
            for (let j = 0; j < dimensions; j++) {
              gradient[j] += g * output[l2 + j];
              output[l2 + j] += g * input[l1 + j];
            }
          }
          for (let j = 0; j < dimensions; j++) input[l1 + j] += gradient[j];
        }
      }
    }
  }

  const vectors = new Map<string, Float64Array>();
  for (let i = 0; i < n; i++) {
    vectors.set(vocab.words[i], input.slice(i * dimensions, (i + 1) * dimensions));
  }
  return { vectors, skipped: vocab.skipped };
}
