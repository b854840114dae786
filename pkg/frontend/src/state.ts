// Explorer state and the slider rules.  The one real invariant is
// that tau stays strictly increasing no matter what drag events come
// in, so every mutation goes through the clamp here.

import { normalQuantile, type LinkName } from "./math.js";
import type { LoadedModel } from "./archive.js";

export const MIN_K = 2;
export const MAX_K = 11; // more cutpoint sliders than this stops being usable
export const MIN_GAP = 1e-6;
export const MIN_SCALE = 0.05;

export interface ExplorerState {
  k: number;
  tau: number[]; // length k - 1, strictly increasing
  shift: number;
  scale: number;
  link: LinkName;
  model: LoadedModel | null;
  taggedCondition: string | null; // selected level when a model is loaded
  tauLocked: boolean; // thresholds pinned to the fitted model
}

export function initialState(): ExplorerState {
  return {
    k: 5,
    tau: defaultTau(5),
    shift: 0,
    scale: 1,
    link: "probit",
    model: null,
    taggedCondition: null,
    tauLocked: false,
  };
}

// evenly filled categories make a neutral starting picture
export function defaultTau(k: number): number[] {
  const tau: number[] = [];
  for (let i = 1; i < k; i++) tau.push(normalQuantile(i / k));
  return tau;
}

/** Clamp one dragged cutpoint so the vector stays strictly ordered. */
export function dragTau(tau: number[], index: number, raw: number): number[] {
  const next = tau.slice();
  let v = raw;
  if (!Number.isFinite(v)) return next;
  if (index > 0 && v < next[index - 1] + MIN_GAP) v = next[index - 1] + MIN_GAP;
  if (index < next.length - 1 && v > next[index + 1] - MIN_GAP) {
    v = next[index + 1] - MIN_GAP;
  }
  next[index] = v;
  return next;
}

export function setK(state: ExplorerState, rawK: number): ExplorerState {
  const k = Math.min(MAX_K, Math.max(MIN_K, Math.round(rawK)));
  if (k === state.k) return state;
  // preserve what the user placed: trim from the top, or extend past
  // the last cutpoint with unit steps
  let tau = state.tau.slice(0, k - 1);
  while (tau.length < k - 1) {
    tau.push((tau.length ? tau[tau.length - 1] : -1) + 1);
  }
  return { ...state, k, tau, tauLocked: false };
}

export function setScale(state: ExplorerState, raw: number): ExplorerState {
  const scale = Math.max(MIN_SCALE, raw);
  return { ...state, scale };
}

export function isOrdered(tau: number[]): boolean {
  for (let i = 1; i < tau.length; i++) {
    if (!(tau[i] > tau[i - 1])) return false;
  }
  return true;
}
