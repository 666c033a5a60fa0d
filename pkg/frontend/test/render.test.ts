// Differential rendering tests: every numeric string painted into the DOM
// must be byte-equal to a field of the service response being rendered.

import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import {
  extractNumericStrings,
  renderHypothetical,
  renderMetricsPanel,
  renderPosterior,
  renderRiskTable,
  renderUploadError,
  renderWarningChip,
} from "../src/render.js";
import type {
  InferResponse,
  MetricsResponse,
  RiskResponse,
} from "../src/types.js";

function loadFixture<T>(name: string): T {
  const url = new URL(`./fixtures/${name}`, import.meta.url);
  return JSON.parse(readFileSync(url, "utf-8")) as T;
}

const metricsDemo = loadFixture<MetricsResponse>("metrics_demo.json");
const metricsBench = loadFixture<MetricsResponse>("metrics_bench.json");
const riskUnit = loadFixture<RiskResponse>("risk_bench_unit.json");
const riskTen = loadFixture<RiskResponse>("risk_bench_10_1.json");
const riskDegenerate = loadFixture<RiskResponse>("risk_demo_topk1.json");
const priorGender = loadFixture<InferResponse>("posterior_gender_prior.json");
const outcomeFemale = loadFixture<InferResponse>("posterior_outcome_female.json");

/** Every string the service response legitimizes: display fields, the
 * rank-1 badge, integer counts, and the service's absent marker. */
function allowedStrings(doc: unknown): Set<string> {
  const allowed = new Set<string>(["n/a"]);
  const walk = (node: unknown): void => {
    if (node === null) return;
    if (typeof node === "number") {
      allowed.add(String(node));
      return;
    }
    if (typeof node === "string") return;
    if (Array.isArray(node)) {
      node.forEach(walk);
      return;
    }
    if (typeof node === "object") {
      const record = node as Record<string, unknown>;
      if (typeof record.display === "string") allowed.add(record.display);
      Object.values(record).forEach(walk);
    }
  };
  walk(doc);
  return allowed;
}

function expectAllNumbersFromResponse(html: string, response: unknown): void {
  const allowed = allowedStrings(response);
  const rendered = extractNumericStrings(html);
  expect(rendered.length).toBeGreaterThan(0);
  for (const text of rendered) {
    expect(allowed, `rendered "${text}" is not a service value`).toContain(text);
  }
}

describe("metrics panel", () => {
  it("renders only service values", () => {
    const html = renderMetricsPanel(metricsDemo.report);
    expectAllNumbersFromResponse(html, metricsDemo);
  });

  it("shows the rank-1 badge verbatim", () => {
    const html = renderMetricsPanel(metricsDemo.report);
    expect(html).toContain("8/11");
    expect(html).toContain(metricsDemo.report.rank1.value.display);
  });

  it("reproduces the benchmark gender block", () => {
    const html = renderMetricsPanel(metricsBench.report);
    for (const value of ["0.1233", "0.0003", "0.0749", "0.0941"]) {
      expect(html).toContain(value);
    }
    expectAllNumbersFromResponse(html, metricsBench);
  });
});

describe("risk dashboard", () => {
  it("renders the worked unit-impact risks", () => {
    const html = renderRiskTable(riskUnit.report);
    const female = riskUnit.report.entries.find(
      (e) => e.attribute === "gender" && e.value === "Female",
    );
    const male = riskUnit.report.entries.find(
      (e) => e.attribute === "gender" && e.value === "Male",
    );
    expect(female?.risk.display).toBe("0.1236");
    expect(male?.risk.display).toBe("0.0750");
    expect(html).toContain("0.1236");
    expect(html).toContain("0.0750");
    expect(html).toContain(riskUnit.report.baseline.risk.display);
    expectAllNumbersFromResponse(html, riskUnit);
  });

  it("renders only service values after an impact change", () => {
    // moving the slider means a fresh response document gets rendered
    const html = renderRiskTable(riskTen.report);
    expectAllNumbersFromResponse(html, riskTen);
    expect(riskTen.params.profile).toEqual({ impact_fmr: 10, impact_fnmr: 1 });
  });

  it("renders degenerate groups as n/a with the reason", () => {
    const html = renderRiskTable(riskDegenerate.report);
    expect(html).toContain("n/a");
    expect(html).toContain("fmr undefined (zero-denominator group)");
    expectAllNumbersFromResponse(html, riskDegenerate);
  });

  it("shows the server-computed hypothetical ensemble", () => {
    const html = renderHypothetical(riskUnit.hypothetical);
    expect(html).toContain(riskUnit.hypothetical!.risk.display);
    expectAllNumbersFromResponse(html, riskUnit);
    // the hypothetical equals the enrolled male subject's ensemble value
    const male = riskUnit.report.ensemble.find((e) => e.subject_id === "mal-01");
    expect(riskUnit.hypothetical!.risk.value).toBe(male!.risk.value);
  });

  it("renders an exclusion note instead of a number when excluded", () => {
    const html = renderHypothetical({
      attributes: {}, risk: { value: null, display: "n/a" },
      excluded_reason: "group gender=Female has no risk entry",
    });
    expect(html).toContain("n/a");
    expect(html).toContain("no risk entry");
  });
});

describe("evidence panel", () => {
  it("renders prior bars verbatim", () => {
    const html = renderPosterior(priorGender.report);
    expect(html).toContain("0.6383");
    expect(html).toContain("0.3617");
    expectAllNumbersFromResponse(html, priorGender);
  });

  it("renders conditional rates for Outcome queries", () => {
    const html = renderPosterior(outcomeFemale.report);
    expect(outcomeFemale.report.rates?.fnmr.display).toBe("0.1233");
    expect(outcomeFemale.report.rates?.fmr.display).toBe("0.0003");
    expect(html).toContain("0.1233");
    expect(html).toContain("0.0003");
    expectAllNumbersFromResponse(html, outcomeFemale);
  });

  it("bar widths reuse the display string, no arithmetic", () => {
    const html = renderPosterior(priorGender.report);
    expect(html).toContain("width: calc(0.6383 * 100%)");
  });
});

describe("error surfaces", () => {
  it("renders upload diagnostics verbatim", () => {
    const html = renderUploadError("predictions: line 2: rank 'one' is not an integer");
    expect(html).toContain("line 2");
  });

  it("escapes markup in error detail", () => {
    const html = renderUploadError('<script>alert("x")</script>');
    expect(html).not.toContain("<script>");
  });

  it("renders the 409 warning chip", () => {
    const html = renderWarningChip("evidence {'yob_decade': '1920s'} has probability 0");
    expect(html).toContain("inconsistent evidence");
  });
});
