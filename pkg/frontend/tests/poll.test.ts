import { describe, expect, it } from "vitest";

import { PollCancelled, pollJob, TokenGate } from "../src/poll.js";
import type { JobRecord } from "../src/types.js";

function record(status: JobRecord["status"]): JobRecord {
  return { id: "j1", status };
}

/** Instant sleep that records every requested delay. */
function recordingSleep(): { delays: number[]; sleep: (ms: number) => Promise<void> } {
  const delays: number[] = [];
  return {
    delays,
    sleep: (ms) => {
      delays.push(ms);
      return Promise.resolve();
    },
  };
}

describe("pollJob", () => {
  it("resolves once the job reaches done", async () => {
    const statuses: JobRecord["status"][] = ["pending", "running", "running", "done"];
    let i = 0;
    const { delays, sleep } = recordingSleep();
    const handle = pollJob(() => Promise.resolve(record(statuses[i++])), { sleep });
    const final = await handle.settled;
    expect(final.status).toBe("done");
    expect(i).toBe(4);
    expect(delays).toHaveLength(3);
  });

  it("starts at 1 s and backs off by 1.5x up to the cap", async () => {
    let i = 0;
    const { delays, sleep } = recordingSleep();
    const handle = pollJob(
      () => Promise.resolve(record(i++ < 8 ? "running" : "done")),
      { sleep },
    );
    await handle.settled;
    expect(delays[0]).toBe(1000);
    expect(delays[1]).toBe(1500);
    expect(delays[2]).toBe(2250);
    for (let k = 1; k < delays.length; k++) {
      expect(delays[k]).toBeLessThanOrEqual(10_000);
      expect(delays[k]).toBeGreaterThanOrEqual(delays[k - 1]);
    }
  });

  it("resolves on failed too, so the caller can show the error", async () => {
    const handle = pollJob(() => Promise.resolve(record("failed")), {
      sleep: () => Promise.resolve(),
    });
    const final = await handle.settled;
    expect(final.status).toBe("failed");
  });

  it("keeps polling through fetch errors and reports them", async () => {
    let i = 0;
    const errors: unknown[] = [];
    const handle = pollJob(
      () => {
        i++;
        if (i < 3) return Promise.reject(new TypeError("connection refused"));
        return Promise.resolve(record("done"));
      },
      { sleep: () => Promise.resolve() },
      (_, err) => {
        if (err) errors.push(err);
      },
    );
    const final = await handle.settled;
    expect(final.status).toBe("done");
    expect(errors).toHaveLength(2);
  });

  it("cancel stops the loop with PollCancelled", async () => {
    let i = 0;
    const handle = pollJob(
      () => Promise.resolve(record("running")),
      {
        sleep: () => {
          if (++i === 3) handle.cancel();
          return Promise.resolve();
        },
      },
    );
    await expect(handle.settled).rejects.toBeInstanceOf(PollCancelled);
  });
});

describe("TokenGate", () => {
  it("only the most recent token is current", () => {
    const gate = new TokenGate();
    const t1 = gate.issue();
    expect(gate.isCurrent(t1)).toBe(true);
    const t2 = gate.issue();
    expect(gate.isCurrent(t1)).toBe(false);
    expect(gate.isCurrent(t2)).toBe(true);
  });

  it("discards a stale response that lands after a newer request", async () => {
    const gate = new TokenGate();
    const applied: string[] = [];

    const request = async (label: string, delayMs: number): Promise<void> => {
      const token = gate.issue();
      await new Promise((r) => setTimeout(r, delayMs));
      if (gate.isCurrent(token)) applied.push(label);
    };

    // the first request resolves last; its token is stale by then
    const slow = request("old", 30);
    await new Promise((r) => setTimeout(r, 5));
    const fast = request("new", 1);
    await Promise.all([slow, fast]);
    expect(applied).toEqual(["new"]);
  });
});
