// Page wiring.  All state lives in one object; every input event
// funnels through update(), which renders from the backend when it can
// and falls back to the local formula when it cannot.

import { makeForwardClient, fetchCutpoints, BackendError } from "./api.js";
import { parseModelArchive, highlightInterval, ArchiveError } from "./archive.js";
import { forwardProbabilities } from "./forward.js";
import { LINK_NAMES, type LinkName } from "./math.js";
import { renderBars, renderDensity } from "./render.js";
import {
  MAX_K,
  MIN_K,
  dragTau,
  initialState,
  setK,
  setScale,
  type ExplorerState,
} from "./state.js";

const $ = <T extends HTMLElement>(id: string): T =>
  document.getElementById(id) as T;

const state: ExplorerState = initialState();
const client = makeForwardClient("");
let updateTicket = 0;

function categoryLabels(): string[] {
  if (state.model && state.tauLocked) return state.model.scaleLabels;
  return Array.from({ length: state.k }, (_, i) => String(i + 1));
}

function currentHighlight(): number | null {
  if (!state.model || state.taggedCondition === null) return null;
  return highlightInterval(state.tau, state.shift).categoryIndex;
}

async function probsFor(
  shift: number,
  scale: number
): Promise<number[] | null> {
  const req = { tau: state.tau, shift, scale, link: state.link };
  try {
    const probs = await client.forward(req);
    if (probs !== null) banner(false);
    return probs;
  } catch (err) {
    if (err instanceof BackendError) throw err; // bad request, not outage
    banner(true);
    return forwardProbabilities(state.tau, shift, scale, state.link);
  }
}

async function update(): Promise<void> {
  const ticket = ++updateTicket;
  syncControls();
  const intervention = await probsFor(state.shift, state.scale);
  if (intervention === null || ticket !== updateTicket) return;
  const baseline = await probsFor(0, 1);
  if (baseline === null || ticket !== updateTicket) return;
  const hl = currentHighlight();
  $("bars").innerHTML = renderBars(categoryLabels(), baseline, intervention, hl);
  $("density").innerHTML = renderDensity(
    state.tau, state.shift, state.scale, state.link, 560, 180, hl
  );
  const total = intervention.reduce((a, b) => a + b, 0);
  $("sum-check").textContent = `bars sum to ${total.toFixed(2)}`;
}

function banner(show: boolean): void {
  $("offline-banner").style.display = show ? "" : "none";
}

function message(text: string): void {
  const el = $("message");
  el.textContent = text;
  el.style.display = text ? "" : "none";
}

// ---- control construction ------------------------------------------------

function buildTauSliders(): void {
  const host = $("tau-sliders");
  host.innerHTML = "";
  state.tau.forEach((t, i) => {
    const row = document.createElement("label");
    row.className = "slider-row";
    const span = document.createElement("span");
    const input = document.createElement("input");
    input.type = "range";
    input.min = "-5";
    input.max = "5";
    input.step = "0.01";
    input.value = String(t);
    input.disabled = state.tauLocked;
    input.addEventListener("input", () => {
      state.tau = dragTau(state.tau, i, Number(input.value));
      input.value = String(state.tau[i]); // show the clamped position
      span.textContent = labelFor(i);
      void update();
    });
    span.textContent = labelFor(i);
    row.append(span, input);
    host.append(row);
  });

  function labelFor(i: number): string {
    const labels = categoryLabels();
    return `${labels[i]}|${labels[i + 1]} = ${state.tau[i].toFixed(2)}`;
  }
}

function syncControls(): void {
  ($("k") as HTMLInputElement).value = String(state.k);
  $("k-value").textContent = String(state.k);
  ($("shift") as HTMLInputElement).value = String(state.shift);
  $("shift-value").textContent = state.shift.toFixed(2);
  ($("scale") as HTMLInputElement).value = String(state.scale);
  $("scale-value").textContent = state.scale.toFixed(2);
  ($("link") as HTMLSelectElement).value = state.link;
  const rows = $("tau-sliders").querySelectorAll("input");
  if (rows.length === state.tau.length) {
    rows.forEach((input, i) => {
      (input as HTMLInputElement).value = String(state.tau[i]);
      (input as HTMLInputElement).disabled = state.tauLocked;
    });
  } else {
    buildTauSliders();
  }
}

function bind(): void {
  const k = $("k") as HTMLInputElement;
  k.min = String(MIN_K);
  k.max = String(MAX_K);
  k.addEventListener("input", () => {
    Object.assign(state, setK(state, Number(k.value)));
    buildTauSliders();
    void update();
  });

  ($("shift") as HTMLInputElement).addEventListener("input", (e) => {
    state.shift = Number((e.target as HTMLInputElement).value);
    void update();
  });
  ($("scale") as HTMLInputElement).addEventListener("input", (e) => {
    Object.assign(state, setScale(state, Number((e.target as HTMLInputElement).value)));
    void update();
  });

  const link = $("link") as HTMLSelectElement;
  for (const name of LINK_NAMES) {
    const opt = document.createElement("option");
    opt.value = opt.textContent = name;
    link.append(opt);
  }
  link.addEventListener("change", () => {
    state.link = link.value as LinkName;
    void update();
  });

  $("props-apply").addEventListener("click", () => {
    void applyProportions();
  });

  ($("archive-file") as HTMLInputElement).addEventListener("change", (e) => {
    const file = (e.target as HTMLInputElement).files?.[0];
    if (file) void loadArchive(file);
  });

  $("tau-unlock").addEventListener("change", (e) => {
    state.tauLocked = !(e.target as HTMLInputElement).checked;
    buildTauSliders();
    void update();
  });
}

async function applyProportions(): Promise<void> {
  message("");
  const raw = ($("props") as HTMLInputElement).value;
  const entries = raw.split(/[,\s]+/).filter(Boolean).map(Number);
  if (entries.length < 2 || entries.some((v) => !Number.isFinite(v))) {
    message("enter at least two numbers, e.g. 10, 15, 75");
    return;
  }
  if (entries.some((v) => !(v > 0))) {
    message("every proportion must be positive: a zero-mass category has no cutpoint");
    return;
  }
  const total = entries.reduce((a, b) => a + b, 0);
  const props = entries.map((v) => v / total);
  try {
    state.tau = await fetchCutpoints("", props, state.link);
  } catch (err) {
    if (err instanceof BackendError) {
      message(err.message);
      return;
    }
    // offline: same formula locally
    banner(true);
    const { cutpointsFromProportions } = await import("./forward.js");
    state.tau = cutpointsFromProportions(props, state.link);
  }
  state.k = entries.length;
  state.tauLocked = false;
  buildTauSliders();
  void update();
}

async function loadArchive(file: File): Promise<void> {
  message("");
  let text: string;
  try {
    text = await file.text();
  } catch {
    message("could not read the file");
    return;
  }
  try {
    state.model = parseModelArchive(text);
  } catch (err) {
    message(err instanceof ArchiveError ? err.message : "archive load failed");
    return;
  }
  state.link = state.model.link;
  state.tau = state.model.tau.slice();
  state.k = state.model.scaleLabels.length;
  state.tauLocked = true;
  ($("tau-unlock") as HTMLInputElement).checked = false;

  const picker = $("condition") as HTMLSelectElement;
  picker.innerHTML = "";
  for (const c of state.model.conditions) {
    const opt = document.createElement("option");
    opt.value = c.level;
    opt.textContent = c.reference ? `${c.level} (reference)` : c.level;
    picker.append(opt);
  }
  picker.disabled = false;
  picker.onchange = () => {
    const cond = state.model?.conditions.find((c) => c.level === picker.value);
    if (!cond) return;
    state.taggedCondition = cond.level;
    state.shift = cond.shift;
    void update();
  };
  state.taggedCondition = state.model.conditions[0]?.level ?? null;
  state.shift = 0;
  $("model-info").textContent =
    `${state.model.kind} fit, ${state.model.link} link, ` +
    `logLik ${state.model.logLik.toFixed(2)}`;
  buildTauSliders();
  void update();
}

bind();
buildTauSliders();
void update();
