// Thin /v1 client. The only mutating verbs are POST (submit) and DELETE
// (remove); everything else is a read.

import type { DatasetsSummary, FeatureCollection, JobRecord, ScenarioDoc } from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly detail: unknown = null,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

/** Result not ready yet (409 while pending/running): keep polling. */
export function isNotDone(err: unknown): boolean {
  return err instanceof ApiError && err.status === 409 && err.code === "not_done";
}

/** Network failure (server down, refused): show the retry banner. */
export function isUnreachable(err: unknown): boolean {
  return err instanceof TypeError || (err instanceof Error && err.name === "NetworkError");
}

async function raiseForStatus(res: Response): Promise<void> {
  if (res.ok) return;
  let code = "internal";
  let message = `${res.status} ${res.statusText}`;
  let detail: unknown = null;
  try {
    const body = await res.json();
    if (body && typeof body === "object" && "code" in body) {
      code = String(body.code);
      message = String(body.message ?? message);
      detail = body.detail ?? null;
    }
  } catch {
    // non-JSON error body: keep the HTTP status line
  }
  throw new ApiError(res.status, code, message, detail);
}

export class PlannerApi {
  constructor(readonly base: string = "") {}

  private url(path: string): string {
    return this.base + path;
  }

  async submitScenario(doc: ScenarioDoc): Promise<{ id: string; status: string }> {
    const res = await fetch(this.url("/v1/scenarios"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(doc),
    });
    await raiseForStatus(res);
    return res.json();
  }

  async listJobs(): Promise<JobRecord[]> {
    const res = await fetch(this.url("/v1/scenarios"));
    await raiseForStatus(res);
    return res.json();
  }

  async getJob(id: string): Promise<JobRecord> {
    const res = await fetch(this.url(`/v1/scenarios/${id}`));
    await raiseForStatus(res);
    return res.json();
  }

  /** Raw text so totals can be displayed verbatim, never re-serialized. */
  async getResultText(id: string): Promise<string> {
    const res = await fetch(this.url(`/v1/scenarios/${id}/result?format=json`));
    await raiseForStatus(res);
    return res.text();
  }

  async getResultGeojson(id: string): Promise<FeatureCollection> {
    const res = await fetch(this.url(`/v1/scenarios/${id}/result?format=geojson`));
    await raiseForStatus(res);
    return res.json();
  }

  async deleteJob(id: string): Promise<void> {
    const res = await fetch(this.url(`/v1/scenarios/${id}`), { method: "DELETE" });
    await raiseForStatus(res);
  }

  async getDatasetsSummary(): Promise<DatasetsSummary> {
    const res = await fetch(this.url("/v1/datasets/summary"));
    await raiseForStatus(res);
    return res.json();
  }

  async getModel(): Promise<Record<string, unknown>> {
    const res = await fetch(this.url("/v1/model"));
    await raiseForStatus(res);
    return res.json();
  }
}
