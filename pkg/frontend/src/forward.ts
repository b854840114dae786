// Local copy of the backend's forward computation: cutpoints, shift
// and scale in, category probabilities out.  Deliberately the same
// cdf-difference formula; shared-vectors.json holds backend outputs
// and the test suite keeps this file within 1e-9 of them.

import { LINKS, type LinkName } from "./math.js";

export function forwardProbabilities(
  tau: number[],
  shift: number,
  scale: number,
  link: LinkName
): number[] {
  if (!(scale > 0)) throw new Error("scale must be positive");
  for (let i = 1; i < tau.length; i++) {
    if (!(tau[i] > tau[i - 1])) throw new Error("tau must be increasing");
  }
  const cdf = LINKS[link].cdf;
  const cum = tau.map((t) => cdf((t - shift) / scale));
  const probs: number[] = [];
  let prev = 0;
  for (const c of cum) {
    probs.push(c - prev);
    prev = c;
  }
  probs.push(1 - prev);
  return probs;
}

// Inverse direction for the proportion-entry box.  Entries are
// normalized here so users can type counts or percentages; zeros are
// rejected because a zero-mass category has no finite cutpoint.
export function cutpointsFromProportions(
  entries: number[],
  link: LinkName
): number[] {
  if (entries.length < 2) throw new Error("need at least 2 proportions");
  for (let k = 0; k < entries.length; k++) {
    if (!(entries[k] > 0)) {
      throw new Error(`proportion ${k + 1} must be strictly positive`);
    }
  }
  const total = entries.reduce((a, b) => a + b, 0);
  const quantile = LINKS[link].quantile;
  const tau: number[] = [];
  let cum = 0;
  for (let k = 0; k < entries.length - 1; k++) {
    cum += entries[k] / total;
    tau.push(quantile(cum));
  }
  return tau;
}
