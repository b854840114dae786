// The sliders' one hard invariant: tau stays strictly increasing under
// any drag sequence, including deliberately hostile ones.

import { describe, expect, it } from "vitest";
import {
  MAX_K,
  MIN_GAP,
  MIN_K,
  defaultTau,
  dragTau,
  initialState,
  isOrdered,
  setK,
  setScale,
} from "../src/state.js";

// deterministic xorshift so failures replay
function rng(seed: number): () => number {
  let s = seed >>> 0 || 1;
  return () => {
    s ^= s << 13; s >>>= 0;
    s ^= s >> 17;
    s ^= s << 5; s >>>= 0;
    return s / 2 ** 32;
  };
}

describe("tau ordering under drags", () => {
  it("survives 400 random drag scripts", () => {
    for (let script = 0; script < 400; script++) {
      const rand = rng(script + 1);
      const k = MIN_K + Math.floor(rand() * (MAX_K - MIN_K + 1));
      let tau = defaultTau(k);
      for (let step = 0; step < 60; step++) {
        const i = Math.floor(rand() * tau.length);
        // drags deliberately overshoot far past the neighbors
        const raw = (rand() - 0.5) * 16;
        tau = dragTau(tau, i, raw);
        expect(isOrdered(tau)).toBe(true);
      }
    }
  });

  it("clamps a drag past the right neighbor to just below it", () => {
    const tau = dragTau([-1, 0, 1], 1, 5);
    expect(tau[1]).toBeCloseTo(1 - MIN_GAP, 12);
    expect(isOrdered(tau)).toBe(true);
  });

  it("clamps a drag past the left neighbor to just above it", () => {
    const tau = dragTau([-1, 0, 1], 1, -5);
    expect(tau[1]).toBeCloseTo(-1 + MIN_GAP, 12);
    expect(isOrdered(tau)).toBe(true);
  });

  it("end sliders move freely outward", () => {
    let tau = dragTau([-1, 0, 1], 0, -4.75);
    expect(tau[0]).toBe(-4.75);
    tau = dragTau(tau, 2, 4.9);
    expect(tau[2]).toBe(4.9);
    expect(isOrdered(tau)).toBe(true);
  });

  it("ignores non-finite drag values", () => {
    const tau = dragTau([-1, 0, 1], 1, Number.NaN);
    expect(tau).toEqual([-1, 0, 1]);
  });
});

describe("category count", () => {
  it("is capped at the usable range", () => {
    const s = initialState();
    expect(setK(s, 1).k).toBe(MIN_K);
    expect(setK(s, 99).k).toBe(MAX_K);
  });

  it("resizing preserves ordering in both directions", () => {
    let s = initialState();
    for (const k of [2, 11, 7, 3, 11, 2, 5]) {
      s = setK(s, k);
      expect(s.tau.length).toBe(s.k - 1);
      expect(isOrdered(s.tau)).toBe(true);
    }
  });
});

describe("scale slider", () => {
  it("never goes nonpositive", () => {
    const s = initialState();
    expect(setScale(s, 0).scale).toBeGreaterThan(0);
    expect(setScale(s, -3).scale).toBeGreaterThan(0);
    expect(setScale(s, 2.4).scale).toBe(2.4);
  });
});
