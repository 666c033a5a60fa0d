// Pure HTML renderers. Every numeric string is copied verbatim from a
// service response field; bar widths use CSS calc() on the same string so
// no arithmetic happens in the client.

import type {
  HypotheticalDoc,
  MetricsReportDoc,
  NumField,
  PosteriorDoc,
  RiskReportDoc,
} from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function cell(field: NumField): string {
  return escapeHtml(field.display);
}

export function renderMetricsPanel(doc: MetricsReportDoc): string {
  const rows = doc.groups.map((g) => `
    <tr>
      <td>${escapeHtml(g.attribute)}</td>
      <td>${escapeHtml(g.value)}</td>
      <td class="num">${g.tp}</td>
      <td class="num">${g.tn}</td>
      <td class="num">${g.fp}</td>
      <td class="num">${g.fn}</td>
      <td class="num">${cell(g.accuracy)}</td>
      <td class="num">${cell(g.fnmr)}</td>
      <td class="num">${cell(g.fmr)}</td>
    </tr>`).join("");
  const b = doc.baseline;
  const footnote = doc.empty_groups.length
    ? `<p class="footnote">omitted (no records): ${doc.empty_groups
        .map((e) => escapeHtml(`${e.attribute}=${e.value}`)).join(", ")}</p>`
    : "";
  return `
  <div class="badge" id="rank1-badge">rank-1 accuracy
    <strong>${escapeHtml(doc.rank1.display)}</strong>
    (${cell(doc.rank1.value)})</div>
  <table class="data">
    <thead><tr><th>attribute</th><th>value</th><th>tp</th><th>tn</th>
      <th>fp</th><th>fn</th><th>accuracy</th><th>fnmr</th><th>fmr</th></tr></thead>
    <tbody>
      <tr class="baseline">
        <td>baseline</td><td>all</td>
        <td class="num">${b.tp}</td><td class="num">${b.tn}</td>
        <td class="num">${b.fp}</td><td class="num">${b.fn}</td>
        <td class="num">${cell(b.accuracy)}</td>
        <td class="num">${cell(b.fnmr)}</td>
        <td class="num">${cell(b.fmr)}</td>
      </tr>
      ${rows}
    </tbody>
  </table>
  ${footnote}`;
}

export function renderRiskTable(doc: RiskReportDoc): string {
  const rows = doc.entries.map((e) => `
    <tr>
      <td>${escapeHtml(e.attribute)}</td>
      <td>${escapeHtml(e.value)}</td>
      <td class="num">${cell(e.fnmr)}</td>
      <td class="num">${cell(e.fmr)}</td>
      <td class="num risk">${cell(e.risk)}</td>
    </tr>`).join("");
  const excluded = doc.exclusions
    .filter((x) => x.kind === "group" && x.attribute !== null)
    .map((x) => `
    <tr class="excluded">
      <td>${escapeHtml(x.attribute ?? "")}</td>
      <td>${escapeHtml(x.value ?? "")}</td>
      <td class="num">n/a</td><td class="num">n/a</td>
      <td class="num">n/a <span class="reason">${escapeHtml(x.reason)}</span></td>
    </tr>`).join("");
  const ensemble = doc.ensemble.map((item) => `
    <tr><td>${escapeHtml(item.subject_id)}</td>
      <td class="num risk">${cell(item.risk)}</td></tr>`).join("");
  const notes = doc.footnotes
    .map((note) => `<p class="footnote">${escapeHtml(note)}</p>`).join("");
  return `
  <table class="data">
    <thead><tr><th>attribute</th><th>value</th><th>fnmr</th><th>fmr</th>
      <th>risk</th></tr></thead>
    <tbody>
      <tr class="baseline">
        <td>baseline</td><td>all</td>
        <td class="num">${cell(doc.baseline.fnmr)}</td>
        <td class="num">${cell(doc.baseline.fmr)}</td>
        <td class="num risk">${cell(doc.baseline.risk)}</td>
      </tr>
      ${rows}
      ${excluded}
    </tbody>
  </table>
  <h3>ensemble risk per enrolled subject</h3>
  <table class="data">
    <thead><tr><th>subject</th><th>ensemble risk</th></tr></thead>
    <tbody>${ensemble}</tbody>
  </table>
  ${notes}`;
}

export function renderHypothetical(doc: HypotheticalDoc | undefined): string {
  if (!doc) {
    return `<p class="hint">choose a value for every attribute to compute an
      ensemble risk</p>`;
  }
  if (doc.excluded_reason !== null) {
    return `<p class="warning">n/a: ${escapeHtml(doc.excluded_reason)}</p>`;
  }
  return `<p class="ensemble">ensemble risk
    <strong>${cell(doc.risk)}</strong></p>`;
}

export function renderPosterior(doc: PosteriorDoc): string {
  const bars = doc.distribution.map((item) => `
    <div class="bar-row">
      <span class="bar-label">${escapeHtml(item.label)}</span>
      <span class="bar-track">
        <span class="bar-fill"
          style="width: calc(${escapeHtml(item.probability.display)} * 100%)"></span>
      </span>
      <span class="bar-value">${cell(item.probability)}</span>
    </div>`).join("");
  const evidence = Object.entries(doc.evidence)
    .map(([k, v]) => escapeHtml(`${k}=${v}`)).join(", ");
  const rates = doc.rates
    ? `<p class="rates">fnmr <strong>${cell(doc.rates.fnmr)}</strong>
       &nbsp; fmr <strong>${cell(doc.rates.fmr)}</strong></p>`
    : "";
  return `
  <p class="caption">posterior of ${escapeHtml(doc.query)}${
    evidence ? ` given ${evidence}` : " (prior)"}</p>
  ${bars}
  ${rates}`;
}

export function renderUploadError(detail: string): string {
  return `<p class="error">${escapeHtml(detail)}</p>`;
}

export function renderWarningChip(detail: string): string {
  return `<span class="chip warning">inconsistent evidence: ${escapeHtml(detail)}</span>`;
}

/** Numeric strings rendered in markup, for the differential tests. */
export function extractNumericStrings(html: string): string[] {
  const text = html
    .replace(/style="[^"]*"/g, " ")
    .replace(/<[^>]+>/g, " ");
  return (text.match(/\d+\/\d+|\d+\.\d+|n\/a/g) ?? []);
}
