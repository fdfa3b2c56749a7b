// Job polling: 1 s initial interval with multiplicative backoff, cancel
// support, and a token gate so a newer request always wins over responses
// still in flight for an older one.

import type { JobRecord } from "./types.js";

export interface PollSettings {
  initialMs?: number;
  maxMs?: number;
  factor?: number;
  sleep?: (ms: number) => Promise<void>;
}

export interface PollHandle {
  settled: Promise<JobRecord>;
  cancel(): void;
}

export class PollCancelled extends Error {
  constructor() {
    super("poll cancelled");
    this.name = "PollCancelled";
  }
}

const defaultSleep = (ms: number) => new Promise<void>((r) => setTimeout(r, ms));

/**
 * Polls until the job reaches done or failed. Fetch errors are reported via
 * onTick and polling continues; backoff applies to errors and pending alike.
 */
export function pollJob(
  fetchJob: () => Promise<JobRecord>,
  settings: PollSettings = {},
  onTick?: (record: JobRecord | null, error: unknown) => void,
): PollHandle {
  const initialMs = settings.initialMs ?? 1000;
  const maxMs = settings.maxMs ?? 10_000;
  const factor = settings.factor ?? 1.5;
  const sleep = settings.sleep ?? defaultSleep;
  let cancelled = false;

  const settled = (async (): Promise<JobRecord> => {
    let delay = initialMs;
    while (true) {
      if (cancelled) throw new PollCancelled();
      try {
        const record = await fetchJob();
        onTick?.(record, null);
        if (record.status === "done" || record.status === "failed") {
          return record;
        }
      } catch (error) {
        onTick?.(null, error);
      }
      if (cancelled) throw new PollCancelled();
      await sleep(delay);
      delay = Math.min(maxMs, delay * factor);
    }
  })();

  return {
    settled,
    cancel() {
      cancelled = true;
    },
  };
}

/** Monotonic request tokens; only the latest issue may apply its response. */
export class TokenGate {
  private token = 0;

  issue(): number {
    return ++this.token;
  }

  isCurrent(token: number): boolean {
    return token === this.token;
  }
}
