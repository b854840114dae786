// Loading a fitted-model archive: thresholds, per-condition shifts,
// and the highlighted interval for a picked condition.  The fixture is
// a real archive written by the backend.

import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";
import {
  ArchiveError,
  highlightInterval,
  parseModelArchive,
} from "../src/archive.js";

const fixture = readFileSync(
  new URL("./fixtures/rating-study.json", import.meta.url),
  "utf8"
);

describe("parsing a fitted model", () => {
  const model = parseModelArchive(fixture);

  it("recovers the fitted thresholds in order", () => {
    expect(model.tau.length).toBe(4);
    expect(model.tau[0]).toBeCloseTo(-2.5897188353122917, 12);
    expect(model.tau[3]).toBeCloseTo(-0.24503912475153053, 12);
    expect(model.link).toBe("probit");
    expect(model.scaleLabels).toEqual(["1", "2", "3", "4", "5"]);
  });

  it("maps each level to its latent shift, reference at zero", () => {
    const by = Object.fromEntries(model.conditions.map((c) => [c.level, c]));
    expect(by.Active.shift).toBe(0);
    expect(by.Active.reference).toBe(true);
    expect(by.Minimal.shift).toBeCloseTo(-0.4909247081750268, 12);
    expect(by.Self.shift).toBeCloseTo(0.04704160392893278, 12);
    expect(by.Minimal.reference).toBe(false);
  });

  it("rejects garbage, non-objects, and future versions", () => {
    expect(() => parseModelArchive("{nope")).toThrow(ArchiveError);
    expect(() => parseModelArchive("[1,2]")).toThrow(/JSON object/);
    const bumped = JSON.stringify({
      ...JSON.parse(fixture),
      format_version: 2,
    });
    expect(() => parseModelArchive(bumped)).toThrow(/format_version/);
  });

  it("leaves no partial state behind on a bad parse", () => {
    // parse failures throw before returning anything usable
    let model2 = null;
    try {
      model2 = parseModelArchive("{broken");
    } catch {
      /* expected */
    }
    expect(model2).toBeNull();
  });
});

describe("highlighted interval for a picked condition", () => {
  const model = parseModelArchive(fixture);

  it("puts Minimal in the (tau_3, tau_4] band, category 4", () => {
    const minimal = model.conditions.find((c) => c.level === "Minimal")!;
    const hl = highlightInterval(model.tau, minimal.shift);
    expect(hl.lower).toBeCloseTo(model.tau[2], 14); // tau_3 of four
    expect(hl.upper).toBeCloseTo(model.tau[3], 14); // tau_4
    expect(model.scaleLabels[hl.categoryIndex]).toBe("4");
  });

  it("puts the reference condition in the top band here", () => {
    const hl = highlightInterval(model.tau, 0);
    expect(hl.lower).toBeCloseTo(model.tau[3], 14);
    expect(hl.upper).toBeNull();
    expect(model.scaleLabels[hl.categoryIndex]).toBe("5");
  });

  it("treats a mean exactly on a cutpoint as inside the band below it", () => {
    const hl = highlightInterval([-1, 0, 1], 0);
    expect(hl.lower).toBe(-1);
    expect(hl.upper).toBe(0);
    expect(hl.categoryIndex).toBe(1);
  });

  it("handles means below every cutpoint", () => {
    const hl = highlightInterval([-1, 0, 1], -9);
    expect(hl.lower).toBeNull();
    expect(hl.upper).toBe(-1);
    expect(hl.categoryIndex).toBe(0);
  });
});
