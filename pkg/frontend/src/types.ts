// Shapes of the service's JSON documents. Computed numbers arrive as
// {value, display} pairs; the console renders the strings verbatim and
// never does arithmetic on them.

export interface NumField {
  value: string | null;
  display: string;
}

export interface PolicyEcho {
  kind: "rank_threshold" | "score_threshold";
  theta: number;
  top_k: number | string;
}

export interface GroupMetricsRow {
  attribute: string;
  value: string;
  tp: number;
  tn: number;
  fp: number;
  fn: number;
  accuracy: NumField;
  fnmr: NumField;
  fmr: NumField;
}

export interface MetricsReportDoc {
  policy: PolicyEcho;
  record_count: number;
  gallery_size: number;
  baseline: Omit<GroupMetricsRow, "attribute" | "value">;
  groups: GroupMetricsRow[];
  empty_groups: { attribute: string; value: string }[];
  rank1: { hits: number; total: number; value: NumField; display: string };
}

export interface RiskEntryDoc {
  attribute: string;
  value: string;
  fnmr: NumField;
  fmr: NumField;
  risk: NumField;
}

export interface ExclusionDoc {
  kind: string;
  attribute: string | null;
  value: string | null;
  subject_id: string | null;
  reason: string;
}

export interface RiskReportDoc {
  policy: PolicyEcho;
  profile: { impact_fmr: number; impact_fnmr: number };
  baseline: { fnmr: NumField; fmr: NumField; risk: NumField };
  entries: RiskEntryDoc[];
  ensemble: { subject_id: string; risk: NumField }[];
  exclusions: ExclusionDoc[];
  footnotes: string[];
}

export interface HypotheticalDoc {
  attributes: Record<string, string>;
  risk: NumField;
  excluded_reason: string | null;
}

export interface MetricsResponse {
  session_id: string;
  params: { policy: PolicyEcho };
  report: MetricsReportDoc;
}

export interface RiskResponse {
  session_id: string;
  params: { policy: PolicyEcho; profile: { impact_fmr: number; impact_fnmr: number } };
  report: RiskReportDoc;
  hypothetical?: HypotheticalDoc;
}

export interface PosteriorDoc {
  query: string;
  evidence: Record<string, string>;
  alpha: number;
  min_support: number;
  policy: PolicyEcho;
  distribution: { label: string; probability: NumField }[];
  rates: { fnmr: NumField; fmr: NumField } | null;
}

export interface InferResponse {
  session_id: string;
  report: PosteriorDoc;
}

export interface SessionCreated {
  session_id: string;
  record_count: number;
  gallery_size: number;
}
