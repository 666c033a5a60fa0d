// DOM wiring: binds the upload form, sliders, presets, and selects to the
// request channels and paints the rendered HTML.

import { ApiClient, ServiceError } from "./api.js";
import { RequestChannel } from "./controller.js";
import {
  renderHypothetical,
  renderMetricsPanel,
  renderPosterior,
  renderRiskTable,
  renderUploadError,
  renderWarningChip,
} from "./render.js";
import {
  ConsoleState,
  applyPreset,
  attributeDomains,
  bindSession,
  clearEvidence,
  hypotheticalComplete,
  initialState,
  setEvidence,
  setHypothetical,
} from "./state.js";
import type { InferResponse, MetricsResponse, RiskResponse } from "./types.js";

const API_BASE = (window as { BIASLENS_API?: string }).BIASLENS_API ?? "";

let state: ConsoleState = initialState();
let domains = new Map<string, string[]>();
const api = new ApiClient(API_BASE);

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function paint(id: string, html: string): void {
  el(id).innerHTML = html;
}

const metricsChannel = new RequestChannel<MetricsResponse>(
  () => api.metrics(state),
  (response) => {
    paint("metrics-panel", renderMetricsPanel(response.report));
    domains = attributeDomains(response.report);
    renderSelectors();
  },
  (error) => paint("metrics-panel", renderUploadError(describe(error))),
);

const riskChannel = new RequestChannel<RiskResponse>(
  () => api.risk(state, hypotheticalComplete(state, domains)),
  (response) => {
    paint("risk-panel", renderRiskTable(response.report));
    paint("hypothetical-result", renderHypothetical(response.hypothetical));
  },
  (error) => paint("risk-panel", renderUploadError(describe(error))),
);

const evidenceChannel = new RequestChannel<InferResponse>(
  () => api.infer(state, el<HTMLSelectElement>("query-select").value),
  (response) => {
    paint("posterior-panel", renderPosterior(response.report));
    paint("evidence-warning", "");
  },
  (error) => {
    if (error instanceof ServiceError && error.status === 409) {
      paint("evidence-warning", renderWarningChip(error.detail));
    } else {
      paint("posterior-panel", renderUploadError(describe(error)));
    }
  },
);

function describe(error: unknown): string {
  if (error instanceof ServiceError) return error.detail;
  return error instanceof Error ? error.message : String(error);
}

function refreshAll(): void {
  if (!state.sessionId) return;
  metricsChannel.fire();
  riskChannel.fire();
  evidenceChannel.fire();
}

function renderSelectors(): void {
  const queries = ["Outcome", "Match", ...domains.keys()];
  el<HTMLSelectElement>("query-select").innerHTML = queries
    .map((q) => `<option value="${q}"${q === "Outcome" ? " selected" : ""}>${q}</option>`)
    .join("");
  const optionList = (attribute: string, current: string | undefined) => {
    const values = domains.get(attribute) ?? [];
    return [`<option value="">(any)</option>`,
            ...values.map((v) =>
              `<option value="${v}"${v === current ? " selected" : ""}>${v}</option>`),
    ].join("");
  };
  const evidenceRows = [...domains.keys()].map((attribute) => `
    <label>${attribute}
      <select class="evidence-select" data-attribute="${attribute}">
        ${optionList(attribute, state.evidence[attribute])}
      </select>
    </label>`).join("");
  paint("evidence-selects", evidenceRows);
  const hypoRows = [...domains.keys()].map((attribute) => `
    <label>${attribute}
      <select class="hypo-select" data-attribute="${attribute}">
        ${optionList(attribute, state.hypothetical[attribute])}
      </select>
    </label>`).join("");
  paint("hypothetical-selects", hypoRows);

  for (const select of document.querySelectorAll<HTMLSelectElement>(".evidence-select")) {
    select.addEventListener("change", () => {
      state = setEvidence(state, select.dataset.attribute as string,
                          select.value || null);
      evidenceChannel.request();
    });
  }
  for (const select of document.querySelectorAll<HTMLSelectElement>(".hypo-select")) {
    select.addEventListener("change", () => {
      state = setHypothetical(state, select.dataset.attribute as string,
                              select.value || null);
      riskChannel.request();
    });
  }
}

function wireControls(): void {
  const impactFmr = el<HTMLInputElement>("impact-fmr");
  const impactFnmr = el<HTMLInputElement>("impact-fnmr");
  const theta = el<HTMLInputElement>("theta");
  const policy = el<HTMLSelectElement>("policy-select");

  const syncLabels = () => {
    el("impact-fmr-value").textContent = impactFmr.value;
    el("impact-fnmr-value").textContent = impactFnmr.value;
    el("theta-value").textContent = theta.value;
  };

  impactFmr.addEventListener("input", () => {
    state = { ...state, impactFmr: Number(impactFmr.value) };
    syncLabels();
    riskChannel.request();
  });
  impactFnmr.addEventListener("input", () => {
    state = { ...state, impactFnmr: Number(impactFnmr.value) };
    syncLabels();
    riskChannel.request();
  });
  theta.addEventListener("input", () => {
    state = { ...state, theta: Number(theta.value) };
    syncLabels();
    metricsChannel.request();
    riskChannel.request();
    evidenceChannel.request();
  });
  policy.addEventListener("change", () => {
    state = { ...state, policy: policy.value as ConsoleState["policy"] };
    refreshAll();
  });

  const applyAndRefresh = (name: "unit" | "checkpoint") => {
    state = applyPreset(state, name);
    impactFmr.value = String(state.impactFmr);
    impactFnmr.value = String(state.impactFnmr);
    syncLabels();
    riskChannel.fire();
  };
  el("preset-unit").addEventListener("click", () => applyAndRefresh("unit"));
  el("preset-checkpoint").addEventListener("click",
    () => applyAndRefresh("checkpoint"));

  el("clear-evidence").addEventListener("click", () => {
    state = clearEvidence(state);
    renderSelectors();
    evidenceChannel.fire();
  });

  syncLabels();
}

function wireUpload(): void {
  el("upload-form").addEventListener("submit", async (event) => {
    event.preventDefault();
    const files = ["predictions", "attributes", "schema"].map((name) =>
      el<HTMLInputElement>(`file-${name}`).files?.[0]);
    if (files.some((f) => !f)) {
      paint("upload-status", renderUploadError("select all three files"));
      return;
    }
    try {
      const [predictions, attributes, schema] = files as [File, File, File];
      const created = await api.createSession(predictions, attributes, schema);
      state = bindSession(state, created.session_id);
      sessionStorage.setItem("biaslens-session", created.session_id);
      paint("upload-status",
            `<p class="ok">session <code>${created.session_id}</code>: ` +
            `${created.record_count} records, gallery ${created.gallery_size}</p>`);
      refreshAll();
    } catch (error) {
      paint("upload-status", renderUploadError(describe(error)));
    }
  });
}

export function boot(): void {
  wireUpload();
  wireControls();
  const saved = sessionStorage.getItem("biaslens-session");
  if (saved) {
    state = bindSession(state, saved);
    refreshAll();
  }
}

if (typeof document !== "undefined" && document.getElementById("upload-form")) {
  boot();
}
