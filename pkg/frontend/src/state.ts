// Console state and its transitions. The state holds only operator inputs
// (sliders, selections) and the session binding; every number shown in the
// UI comes from the most recent service response, never from local math.

import type { MetricsReportDoc } from "./types.js";

export interface ConsoleState {
  sessionId: string | null;
  impactFmr: number;
  impactFnmr: number;
  theta: number;
  policy: "rank_threshold" | "score_threshold";
  evidence: Record<string, string>;
  hypothetical: Record<string, string>;
}

export function initialState(): ConsoleState {
  return {
    sessionId: null,
    impactFmr: 1,
    impactFnmr: 1,
    theta: 0,
    policy: "rank_threshold",
    evidence: {},
    hypothetical: {},
  };
}

export const PRESETS = {
  // equal costs
  unit: { impactFmr: 1, impactFnmr: 1 },
  // a false match costs ten times a false non-match
  checkpoint: { impactFmr: 10, impactFnmr: 1 },
} as const;

export function applyPreset(state: ConsoleState,
                            name: keyof typeof PRESETS): ConsoleState {
  const preset = PRESETS[name];
  return { ...state, impactFmr: preset.impactFmr, impactFnmr: preset.impactFnmr };
}

export function bindSession(state: ConsoleState, sessionId: string): ConsoleState {
  // a new upload replaces the binding and resets operator selections
  return { ...initialState(), sessionId };
}

export function setEvidence(state: ConsoleState, attribute: string,
                            value: string | null): ConsoleState {
  const evidence = { ...state.evidence };
  if (value === null || value === "") {
    delete evidence[attribute];
  } else {
    evidence[attribute] = value;
  }
  return { ...state, evidence };
}

export function clearEvidence(state: ConsoleState): ConsoleState {
  return { ...state, evidence: {} };
}

export function setHypothetical(state: ConsoleState, attribute: string,
                                value: string | null): ConsoleState {
  const hypothetical = { ...state.hypothetical };
  if (value === null || value === "") {
    delete hypothetical[attribute];
  } else {
    hypothetical[attribute] = value;
  }
  return { ...state, hypothetical };
}

/** attribute -> sorted domain values, recovered from a metrics document
 * (populated groups plus empty groups cover every schema value). */
export function attributeDomains(doc: MetricsReportDoc): Map<string, string[]> {
  const domains = new Map<string, string[]>();
  const add = (attribute: string, value: string) => {
    const values = domains.get(attribute) ?? [];
    if (!values.includes(value)) values.push(value);
    domains.set(attribute, values);
  };
  for (const g of doc.groups) add(g.attribute, g.value);
  for (const e of doc.empty_groups) add(e.attribute, e.value);
  for (const values of domains.values()) values.sort();
  return domains;
}

export function hypotheticalComplete(state: ConsoleState,
                                     domains: Map<string, string[]>): boolean {
  for (const attribute of domains.keys()) {
    if (!(attribute in state.hypothetical)) return false;
  }
  return domains.size > 0;
}
