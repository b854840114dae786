// HTML/SVG string builders.  Kept free of document access so the test
// suite can check them as plain functions.

import { LINKS, type LinkName } from "./math.js";

export function pct(p: number): string {
  return `${(100 * p).toFixed(1)}%`;
}

/** Side-by-side baseline and intervention bars for each category. */
export function renderBars(
  labels: string[],
  baseline: number[],
  intervention: number[],
  highlightIndex: number | null
): string {
  const rows = labels.map((label, i) => {
    const hl = i === highlightIndex;
    const b = Math.round(1000 * baseline[i]) / 10;
    const v = Math.round(1000 * intervention[i]) / 10;
    return `
    <div class="bar-row${hl ? " highlight" : ""}">
      <div class="bar-label">${label}</div>
      <div class="bar-track">
        <div class="bar baseline" style="width:${b}%"></div>
        <div class="bar intervention" style="width:${v}%"></div>
      </div>
      <div class="bar-nums">${pct(baseline[i])} / ${pct(intervention[i])}</div>
    </div>`;
  });
  return rows.join("\n");
}

/** Latent density with shaded bands between cutpoints, as inline SVG. */
export function renderDensity(
  tau: number[],
  shift: number,
  scale: number,
  link: LinkName,
  width = 560,
  height = 180,
  highlightIndex: number | null = null
): string {
  const lo = Math.min(-4, (tau[0] ?? 0) - 1) * scale + shift;
  const hi = Math.max(4, (tau[tau.length - 1] ?? 0) + 1) * scale + shift;
  const pdf = (x: number) => LINKS[link].pdf((x - shift) / scale) / scale;
  const n = 240;
  let peak = 0;
  const pts: Array<[number, number]> = [];
  for (let i = 0; i <= n; i++) {
    const x = lo + ((hi - lo) * i) / n;
    const y = pdf(x);
    peak = Math.max(peak, y);
    pts.push([x, y]);
  }
  const sx = (x: number) => ((x - lo) / (hi - lo)) * width;
  const sy = (y: number) => height - 8 - (y / peak) * (height - 20);

  // one shaded band per category, highlight band drawn stronger
  const edges = [lo, ...tau, hi];
  const bands = edges.slice(0, -1).map((a, k) => {
    const b = edges[k + 1];
    const inner = pts.filter(([x]) => x >= a && x <= b);
    const path = [
      `M ${sx(a).toFixed(1)} ${sy(0).toFixed(1)}`,
      ...inner.map(([x, y]) => `L ${sx(x).toFixed(1)} ${sy(y).toFixed(1)}`),
      `L ${sx(b).toFixed(1)} ${sy(0).toFixed(1)} Z`,
    ].join(" ");
    const cls = k === highlightIndex ? "band band-highlight" : "band";
    return `<path class="${cls} band-${k % 2}" d="${path}"/>`;
  });

  const curve = pts
    .map(([x, y], i) => `${i ? "L" : "M"} ${sx(x).toFixed(1)} ${sy(y).toFixed(1)}`)
    .join(" ");
  const cuts = tau.map(
    (t) =>
      `<line class="cut" x1="${sx(t).toFixed(1)}" y1="8" ` +
      `x2="${sx(t).toFixed(1)}" y2="${height - 8}"/>`
  );
  return (
    `<svg viewBox="0 0 ${width} ${height}" role="img">` +
    bands.join("") +
    `<path class="curve" d="${curve}"/>` +
    cuts.join("") +
    `</svg>`
  );
}
