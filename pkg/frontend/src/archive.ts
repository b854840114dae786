// Reading a fitted-model archive into something the sliders can use:
// fitted thresholds, and one latent shift per factor level (reference
// level shifts by zero).

import type { LinkName } from "./math.js";

export interface ConditionShift {
  factor: string;
  level: string;
  shift: number;
  reference: boolean;
}

export interface LoadedModel {
  kind: string;
  link: LinkName;
  scaleLabels: string[];
  tau: number[];
  conditions: ConditionShift[];
  logLik: number;
}

export class ArchiveError extends Error {}

export function parseModelArchive(text: string): LoadedModel {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch {
    throw new ArchiveError("archive is not valid JSON");
  }
  if (typeof doc !== "object" || doc === null || Array.isArray(doc)) {
    throw new ArchiveError("archive must be a JSON object");
  }
  const d = doc as Record<string, unknown>;
  if (d.format_version !== 1) {
    throw new ArchiveError(
      `unsupported format_version ${JSON.stringify(d.format_version)}`
    );
  }
  const link = d.link as LinkName;
  if (link !== "probit" && link !== "logit" && link !== "cloglog") {
    throw new ArchiveError(`unknown link ${JSON.stringify(d.link)}`);
  }
  const labels = d.scale_labels as string[];
  const est = d.estimates as { names: string[]; values: number[] };
  if (
    !Array.isArray(labels) ||
    !est ||
    !Array.isArray(est.names) ||
    !Array.isArray(est.values) ||
    est.names.length !== est.values.length
  ) {
    throw new ArchiveError("archive is missing estimate tables");
  }
  const byName = new Map<string, number>();
  est.names.forEach((n, i) => byName.set(n, est.values[i]));

  const tau: number[] = [];
  for (let i = 0; i + 1 < labels.length; i++) {
    const name = `${labels[i]}|${labels[i + 1]}`;
    const v = byName.get(name);
    if (v === undefined) {
      throw new ArchiveError(`archive has no threshold ${name}`);
    }
    tau.push(v);
  }

  const conditions: ConditionShift[] = [];
  const factors = (d.factors ?? []) as { name: string; levels: string[] }[];
  for (const f of factors) {
    f.levels.forEach((level, i) => {
      const coefName = `${f.name}${level}`;
      conditions.push({
        factor: f.name,
        level,
        shift: i === 0 ? 0 : byName.get(coefName) ?? 0,
        reference: i === 0,
      });
    });
  }
  return {
    kind: String(d.kind),
    link,
    scaleLabels: labels,
    tau,
    conditions,
    logLik: Number(d.log_lik),
  };
}

export interface HighlightInterval {
  lower: number | null; // null = open left end
  upper: number | null; // null = open right end
  categoryIndex: number; // 0-based index into scaleLabels
}

/** The threshold interval a condition's latent mean falls into.
 *
 * With thresholds tau and latent mean m, the predicted modal band is
 * (tau_k, tau_{k+1}] where tau_k < m <= tau_{k+1}, with open ends
 * below the first and above the last cutpoint.
 */
export function highlightInterval(
  tau: number[],
  latentMean: number
): HighlightInterval {
  let idx = 0;
  while (idx < tau.length && latentMean > tau[idx]) idx++;
  return {
    lower: idx === 0 ? null : tau[idx - 1],
    upper: idx === tau.length ? null : tau[idx],
    categoryIndex: idx,
  };
}
