// URL construction and typed fetch wrappers for the audit service.

import type { ConsoleState } from "./state.js";
import type {
  InferResponse,
  MetricsResponse,
  RiskResponse,
  SessionCreated,
} from "./types.js";

export class ServiceError extends Error {
  constructor(public status: number, public detail: string) {
    super(detail);
  }
}

export function metricsUrl(base: string, state: ConsoleState): string {
  const params = new URLSearchParams({
    policy: state.policy,
    theta: String(state.theta),
  });
  return `${base}/sessions/${state.sessionId}/metrics?${params.toString()}`;
}

export function riskUrl(base: string, state: ConsoleState,
                        includeHypothetical: boolean): string {
  const params = new URLSearchParams({
    policy: state.policy,
    theta: String(state.theta),
    impact_fmr: String(state.impactFmr),
    impact_fnmr: String(state.impactFnmr),
  });
  if (includeHypothetical) {
    const pairs = Object.keys(state.hypothetical).sort()
      .map((a) => `${a}:${state.hypothetical[a]}`);
    params.set("hypothetical", pairs.join(","));
  }
  return `${base}/sessions/${state.sessionId}/risk?${params.toString()}`;
}

export function inferBody(state: ConsoleState, query: string): object {
  return {
    query,
    evidence: state.evidence,
    alpha: 0,
    min_support: 0,
    policy: { kind: state.policy, theta: state.theta },
  };
}

async function raiseForStatus(response: Response): Promise<void> {
  if (response.ok) return;
  let detail = `${response.status}`;
  try {
    const body = await response.json();
    if (typeof body.detail === "string") detail = body.detail;
    else detail = JSON.stringify(body.detail ?? body);
  } catch {
    /* non-JSON error body; keep the status text */
  }
  throw new ServiceError(response.status, detail);
}

export class ApiClient {
  constructor(private base: string,
              private fetcher: typeof fetch = fetch.bind(globalThis)) {}

  async createSession(predictions: File, attributes: File,
                      schema: File): Promise<SessionCreated> {
    const form = new FormData();
    form.append("predictions", predictions);
    form.append("attributes", attributes);
    form.append("schema", schema);
    const response = await this.fetcher(`${this.base}/sessions`, {
      method: "POST",
      body: form,
    });
    await raiseForStatus(response);
    return response.json();
  }

  async metrics(state: ConsoleState): Promise<MetricsResponse> {
    const response = await this.fetcher(metricsUrl(this.base, state));
    await raiseForStatus(response);
    return response.json();
  }

  async risk(state: ConsoleState,
             includeHypothetical: boolean): Promise<RiskResponse> {
    const response = await this.fetcher(
      riskUrl(this.base, state, includeHypothetical));
    await raiseForStatus(response);
    return response.json();
  }

  async infer(state: ConsoleState, query: string): Promise<InferResponse> {
    const response = await this.fetcher(
      `${this.base}/sessions/${state.sessionId}/infer`,
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(inferBody(state, query)),
      });
    await raiseForStatus(response);
    return response.json();
  }
}
