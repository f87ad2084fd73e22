/**
 * Deterministic PRNG so exports are byte-identical for a fixed seed.
 * splitmix32 for seeding/hashing, mulberry32 for the stream.
 */

export function hashString(text: string): number {
  // FNV-1a, 32-bit
  let h = 0x811c9dc5;
  for (let i = 0; i < text.length; i++) {
    h ^= text.charCodeAt(i);
    h = Math.imul(h, 0x01000193);
  }
  return h >>> 0;
}

export class Rng {
  private state: number;

  constructor(seed: number) {
    this.state = seed >>> 0;
    // scramble trivial seeds so 0 and 1 do not produce degenerate streams
    for (let i = 0; i < 4; i++) this.next();
  }

  /** uniform in [0, 1) */
  next(): number {
    this.state = (this.state + 0x6d2b79f5) >>> 0;
    let t = this.state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  }

  /** integer in [0, bound) */
  nextInt(bound: number): number {
    return Math.floor(this.next() * bound);
  }

  /** uniform in [-half, half) */
  nextCentered(half: number): number {
    return (this.next() * 2 - 1) * half;
  }
}
