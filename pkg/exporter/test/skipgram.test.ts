import { describe, expect, it } from "vitest";

import { buildVocabulary, trainSkipGram } from "../src/skipgram.js";

const OPTIONS = {
  dimensions: 16,
  window: 2,
  epochs: 10,
  negative: 3,
  learningRate: 0.025,
  minCount: 1,
  seed: 5,
};

function cosine(u: Float64Array, v: Float64Array): number {
  let dot = 0;
  let nu = 0;
  let nv = 0;
  for (let i = 0; i < u.length; i++) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  return dot / Math.sqrt(nu * nv);
}

// two interchangeable words (sun/moon) sharing contexts, one unrelated word
const SENTENCES: string[][] = [];
for (let i = 0; i < 40; i++) {
  SENTENCES.push(["bright", "sun", "shines", "above"]);
  SENTENCES.push(["bright", "moon", "shines", "above"]);
  SENTENCES.push(["turtle", "swims", "slowly", "away"]);
}

describe("buildVocabulary", () => {
  it("orders by frequency then lexicographically", () => {
    const vocab = buildVocabulary([["b", "a", "b"], ["c", "a"]], 1);
    expect(vocab.words.slice(0, 2)).toEqual(["a", "b"]);
    expect(vocab.skipped).toEqual([]);
  });

  it("moves rare terms to the skip list", () => {
    const vocab = buildVocabulary([["a", "a", "rare"]], 2);
    expect(vocab.words).toEqual(["a"]);
    expect(vocab.skipped).toEqual(["rare"]);
  });
});

describe("trainSkipGram", () => {
  it("produces one vector per kept term with the requested dimension", () => {
    const { vectors, skipped } = trainSkipGram(SENTENCES, OPTIONS);
    expect(skipped).toEqual([]);
    expect(vectors.size).toBe(9);
    for (const vector of vectors.values()) {
      expect(vector).toHaveLength(16);
    }
  });

  it("is reproducible for a fixed seed", () => {
    const a = trainSkipGram(SENTENCES, OPTIONS);
    const b = trainSkipGram(SENTENCES, OPTIONS);
    for (const [word, vector] of a.vectors) {
      expect([...b.vectors.get(word)!]).toEqual([...vector]);
    }
  });

  it("changes with the seed", () => {
    const a = trainSkipGram(SENTENCES, OPTIONS);
    const b = trainSkipGram(SENTENCES, { ...OPTIONS, seed: 6 });
    expect([...a.vectors.get("sun")!]).not.toEqual([...b.vectors.get("sun")!]);
  });

  it("places words with shared contexts closer than unrelated words", () => {
    const { vectors } = trainSkipGram(SENTENCES, { ...OPTIONS, epochs: 40 });
    const related = cosine(vectors.get("sun")!, vectors.get("moon")!);
    const unrelated = cosine(vectors.get("sun")!, vectors.get("turtle")!);
    expect(related).toBeGreaterThan(unrelated);
  });

  it("excludes skipped terms from the output", () => {
    const { vectors, skipped } = trainSkipGram(SENTENCES.concat([["hapax"]]), {
      ...OPTIONS,
      minCount: 2,
    });
    expect(skipped).toEqual(["hapax"]);
    expect(vectors.has("hapax")).toBe(false);
  });

  it("handles an empty corpus", () => {
    const { vectors, skipped } = trainSkipGram([], OPTIONS);
    expect(vectors.size).toBe(0);
    expect(skipped).toEqual([]);
  });
});
