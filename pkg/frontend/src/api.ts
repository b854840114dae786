// Backend client.  One in-flight /forward request at a time: a new
// slider position aborts the previous request, and a response that
// arrives after a newer request started is dropped, so the bars never
// render a stale distribution.

import type { LinkName } from "./math.js";

export interface ForwardRequest {
  tau: number[];
  shift: number;
  scale: number;
  link: LinkName;
}

export type FetchLike = (
  url: string,
  init: {
    method: string;
    headers: Record<string, string>;
    body: string;
    signal: AbortSignal;
  }
) => Promise<{ ok: boolean; status: number; json(): Promise<unknown> }>;

export class BackendError extends Error {
  constructor(message: string, readonly status: number) {
    super(message);
  }
}

export interface ForwardClient {
  /** Resolves with probabilities, or null when superseded by a newer call. */
  forward(req: ForwardRequest): Promise<number[] | null>;
}

export function makeForwardClient(
  base: string,
  fetchImpl: FetchLike = fetch as unknown as FetchLike
): ForwardClient {
  let controller: AbortController | null = null;
  let latest = 0;

  return {
    async forward(req: ForwardRequest): Promise<number[] | null> {
      controller?.abort();
      controller = new AbortController();
      const ticket = ++latest;
      let res;
      try {
        res = await fetchImpl(`${base}/forward`, {
          method: "POST",
          headers: { "Content-Type": "application/json" },
          body: JSON.stringify(req),
          signal: controller.signal,
        });
      } catch (err) {
        if (ticket !== latest) return null; // aborted by a newer call
        throw err;
      }
      if (ticket !== latest) return null;
      if (!res.ok) {
        const detail = (await res.json().catch(() => null)) as
          | { error?: string }
          | null;
        throw new BackendError(detail?.error ?? `HTTP ${res.status}`, res.status);
      }
      const body = (await res.json()) as { probs: number[] };
      if (ticket !== latest) return null;
      return body.probs;
    },
  };
}

export async function fetchCutpoints(
  base: string,
  props: number[],
  link: LinkName,
  fetchImpl: FetchLike = fetch as unknown as FetchLike
): Promise<number[]> {
  const controller = new AbortController();
  const res = await fetchImpl(`${base}/cutpoints`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify({ props, link }),
    signal: controller.signal,
  });
  if (!res.ok) {
    const detail = (await res.json().catch(() => null)) as
      | { error?: string }
      | null;
    throw new BackendError(detail?.error ?? `HTTP ${res.status}`, res.status);
  }
  const body = (await res.json()) as { tau: number[] };
  return body.tau;
}
