"""Report documents and their JSON / CSV / table renderings.

One builder per report kind, shared by the CLI and the HTTP service so the
two surfaces emit byte-identical values. Computed numbers (rates, risks,
probabilities) are rendered as {"value": <full-precision decimal string>,
"display": <4-decimal string>} pairs; absent rates render as a null value
with display "n/a". Input echoes (policy, impacts, grids) stay plain JSON
numbers.
"""

from __future__ import annotations

import io
import json

from .beliefnet import CategoricalDistribution
from .dataset import Dataset
from .metrics import DecisionPolicy, MetricsReport, rank_hits
from .risk import RiskReport, SweepPoint


def display4(x: float) -> str:
    return f"{x:.4f}"


def num(x: float | None) -> dict:
    if x is None:
        return {"value": None, "display": "n/a"}
    return {"value": repr(float(x)), "display": display4(x)}


def policy_echo(policy: DecisionPolicy) -> dict:
    return {"kind": policy.kind, "theta": policy.theta, "top_k": policy.top_k}


def metrics_document(report: MetricsReport, dataset: Dataset) -> dict:
    rank1_hits = rank_hits(dataset, 1)
    total = len(dataset.records)
    groups = []
    for (attribute, value), gm in sorted(report.groups.items()):
        groups.append({
            "attribute": attribute,
            "value": value,
            "tp": gm.counts.tp, "tn": gm.counts.tn,
            "fp": gm.counts.fp, "fn": gm.counts.fn,
            "accuracy": num(gm.accuracy),
            "fnmr": num(gm.fnmr),
            "fmr": num(gm.fmr),
        })
    gm = report.baseline
    return {
        "policy": policy_echo(report.policy),
        "record_count": total,
        "gallery_size": len(dataset.gallery),
        "baseline": {
            "tp": gm.counts.tp, "tn": gm.counts.tn,
            "fp": gm.counts.fp, "fn": gm.counts.fn,
            "accuracy": num(gm.accuracy),
            "fnmr": num(gm.fnmr),
            "fmr": num(gm.fmr),
        },
        "groups": groups,
        "empty_groups": [
            {"attribute": a, "value": v} for a, v in sorted(report.empty_groups)
        ],
        "rank1": {
            "hits": rank1_hits,
            "total": total,
            "value": num(rank1_hits / total if total else None),
            "display": f"{rank1_hits}/{total}",
        },
    }


def risk_document(report: RiskReport) -> dict:
    return {
        "policy": policy_echo(report.policy),
        "profile": {
            "impact_fmr": report.profile.impact_fmr,
            "impact_fnmr": report.profile.impact_fnmr,
        },
        "baseline": {
            "fnmr": num(report.baseline_fnmr),
            "fmr": num(report.baseline_fmr),
            "risk": num(report.baseline_risk),
        },
        "entries": [
            {
                "attribute": e.attribute,
                "value": e.value,
                "fnmr": num(e.fnmr),
                "fmr": num(e.fmr),
                "risk": num(e.risk),
            }
            for e in report.entries
        ],
        "ensemble": [
            {"subject_id": sid, "risk": num(risk)}
            for sid, risk in sorted(report.ensemble.items())
        ],
        "exclusions": [
            {
                "kind": x.kind,
                "attribute": x.attribute,
                "value": x.value,
                "subject_id": x.subject_id,
                "reason": x.reason,
            }
            for x in report.exclusions
        ],
        "footnotes": list(report.footnotes),
    }


def sweep_document(points: list[SweepPoint]) -> dict:
    return {
        "points": [
            {
                "profile": {
                    "impact_fmr": p.profile.impact_fmr,
                    "impact_fnmr": p.profile.impact_fnmr,
                },
                "theta": p.theta,
                "report": risk_document(p.report),
            }
            for p in points
        ]
    }


def posterior_document(query: str, evidence: dict[str, str],
                       distribution: CategoricalDistribution,
                       rates: tuple[float | None, float | None] | None,
                       alpha: float, min_support: int,
                       policy: DecisionPolicy) -> dict:
    doc = {
        "query": query,
        "evidence": dict(sorted(evidence.items())),
        "alpha": alpha,
        "min_support": min_support,
        "policy": policy_echo(policy),
        "distribution": [
            {"label": label, "probability": num(p)}
            for label, p in zip(distribution.labels, distribution.probabilities)
        ],
    }
    if rates is not None:
        fnmr, fmr = rates
        doc["rates"] = {"fnmr": num(fnmr), "fmr": num(fmr)}
    else:
        doc["rates"] = None
    return doc


def to_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _cell(n: dict) -> str:
    return n["display"]


def _format_table(headers: list[str], rows: list[list[str]]) -> list[str]:
    widths = [
        max(len(headers[i]), *(len(r[i]) for r in rows)) if rows else len(headers[i])
        for i in range(len(headers))
    ]
    def fmt(row):
        return "  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip()
    return [fmt(headers)] + [fmt(row) for row in rows]


def metrics_table(doc: dict) -> str:
    headers = ["attribute", "value", "tp", "tn", "fp", "fn", "accuracy", "fnmr", "fmr"]
    rows = [["baseline", "all",
             str(doc["baseline"]["tp"]), str(doc["baseline"]["tn"]),
             str(doc["baseline"]["fp"]), str(doc["baseline"]["fn"]),
             _cell(doc["baseline"]["accuracy"]), _cell(doc["baseline"]["fnmr"]),
             _cell(doc["baseline"]["fmr"])]]
    for g in doc["groups"]:
        rows.append([g["attribute"], g["value"], str(g["tp"]), str(g["tn"]),
                     str(g["fp"]), str(g["fn"]), _cell(g["accuracy"]),
                     _cell(g["fnmr"]), _cell(g["fmr"])])
    lines = _format_table(headers, rows)
    lines.append(f"rank-1 accuracy: {doc['rank1']['display']}"
                 f" ({doc['rank1']['value']['display']})")
    if doc["empty_groups"]:
        missing = ", ".join(f"{e['attribute']}={e['value']}" for e in doc["empty_groups"])
        lines.append(f"note: groups with no records omitted: {missing}")
    return "\n".join(lines) + "\n"


def metrics_csv(doc: dict) -> str:
    out = io.StringIO()
    out.write("attribute,value,tp,tn,fp,fn,accuracy,fnmr,fmr\n")
    b = doc["baseline"]
    out.write(
        f"baseline,all,{b['tp']},{b['tn']},{b['fp']},{b['fn']},"
        f"{_cell(b['accuracy'])},{_cell(b['fnmr'])},{_cell(b['fmr'])}\n"
    )
    for g in doc["groups"]:
        out.write(
            f"{g['attribute']},{g['value']},{g['tp']},{g['tn']},{g['fp']},{g['fn']},"
            f"{_cell(g['accuracy'])},{_cell(g['fnmr'])},{_cell(g['fmr'])}\n"
        )
    return out.getvalue()


def risk_table(doc: dict) -> str:
    headers = ["attribute", "value", "fnmr", "fmr", "risk"]
    rows = [["baseline", "all", _cell(doc["baseline"]["fnmr"]),
             _cell(doc["baseline"]["fmr"]), _cell(doc["baseline"]["risk"])]]
    for e in doc["entries"]:
        rows.append([e["attribute"], e["value"], _cell(e["fnmr"]), _cell(e["fmr"]),
                     _cell(e["risk"])])
    lines = _format_table(headers, rows)
    if doc["ensemble"]:
        lines.append("")
        lines.append("subject_id  ensemble_risk")
        for item in doc["ensemble"]:
            lines.append(f"{item['subject_id']}  {_cell(item['risk'])}")
    for x in doc["exclusions"]:
        target = x["subject_id"] or (
            f"{x['attribute']}={x['value']}" if x["attribute"] else "baseline"
        )
        lines.append(f"excluded {x['kind']} {target}: {x['reason']}")
    for note in doc["footnotes"]:
        lines.append(f"note: {note}")
    return "\n".join(lines) + "\n"


def risk_csv(doc: dict) -> str:
    out = io.StringIO()
    out.write("attribute,value,fnmr,fmr,risk\n")
    b = doc["baseline"]
    out.write(f"baseline,all,{_cell(b['fnmr'])},{_cell(b['fmr'])},{_cell(b['risk'])}\n")
    for e in doc["entries"]:
        out.write(
            f"{e['attribute']},{e['value']},{_cell(e['fnmr'])},{_cell(e['fmr'])},"
            f"{_cell(e['risk'])}\n"
        )
    out.write("\n")
    out.write("subject_id,ensemble_risk\n")
    for item in doc["ensemble"]:
        out.write(f"{item['subject_id']},{_cell(item['risk'])}\n")
    return out.getvalue()


def posterior_table(doc: dict) -> str:
    lines = [f"posterior of {doc['query']}"]
    if doc["evidence"]:
        ev = ", ".join(f"{k}={v}" for k, v in doc["evidence"].items())
        lines[0] += f" given {ev}"
    for item in doc["distribution"]:
        lines.append(f"{item['label']}  {item['probability']['display']}")
    if doc["rates"] is not None:
        lines.append(f"fnmr  {doc['rates']['fnmr']['display']}")
        lines.append(f"fmr   {doc['rates']['fmr']['display']}")
    return "\n".join(lines) + "\n"


# JSON Schemas for the machine-readable documents; tests validate against
# these and downstream consumers may too.
_NUM = {
    "type": "object",
    "properties": {
        "value": {"type": ["string", "null"]},
        "display": {"type": "string"},
    },
    "required": ["value", "display"],
    "additionalProperties": False,
}
_POLICY = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["rank_threshold", "score_threshold"]},
        "theta": {"type": "number"},
        "top_k": {"type": ["integer", "string"]},
    },
    "required": ["kind", "theta", "top_k"],
}
_GROUP_METRICS = {
    "type": "object",
    "properties": {
        "tp": {"type": "integer"}, "tn": {"type": "integer"},
        "fp": {"type": "integer"}, "fn": {"type": "integer"},
        "accuracy": _NUM, "fnmr": _NUM, "fmr": _NUM,
    },
    "required": ["tp", "tn", "fp", "fn", "accuracy", "fnmr", "fmr"],
}

METRICS_SCHEMA = {
    "type": "object",
    "properties": {
        "policy": _POLICY,
        "record_count": {"type": "integer"},
        "gallery_size": {"type": "integer"},
        "baseline": _GROUP_METRICS,
        "groups": {
            "type": "array",
            "items": {
                "allOf": [
                    _GROUP_METRICS,
                    {"properties": {"attribute": {"type": "string"},
                                    "value": {"type": "string"}},
                     "required": ["attribute", "value"]},
                ]
            },
        },
        "empty_groups": {"type": "array"},
        "rank1": {
            "type": "object",
            "properties": {
                "hits": {"type": "integer"},
                "total": {"type": "integer"},
                "value": _NUM,
                "display": {"type": "string"},
            },
            "required": ["hits", "total", "value", "display"],
        },
    },
    "required": ["policy", "baseline", "groups", "empty_groups", "rank1"],
}

RISK_SCHEMA = {
    "type": "object",
    "properties": {
        "policy": _POLICY,
        "profile": {
            "type": "object",
            "properties": {"impact_fmr": {"type": "number"},
                           "impact_fnmr": {"type": "number"}},
            "required": ["impact_fmr", "impact_fnmr"],
        },
        "baseline": {
            "type": "object",
            "properties": {"fnmr": _NUM, "fmr": _NUM, "risk": _NUM},
            "required": ["fnmr", "fmr", "risk"],
        },
        "entries": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "attribute": {"type": "string"},
                    "value": {"type": "string"},
                    "fnmr": _NUM, "fmr": _NUM, "risk": _NUM,
                },
                "required": ["attribute", "value", "fnmr", "fmr", "risk"],
            },
        },
        "ensemble": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {"subject_id": {"type": "string"}, "risk": _NUM},
                "required": ["subject_id", "risk"],
            },
        },
        "exclusions": {"type": "array"},
        "footnotes": {"type": "array", "items": {"type": "string"}},
    },
    "required": ["policy", "profile", "baseline", "entries", "ensemble",
                 "exclusions", "footnotes"],
}

POSTERIOR_SCHEMA = {
    "type": "object",
    "properties": {
        "query": {"type": "string"},
        "evidence": {"type": "object"},
        "alpha": {"type": "number"},
        "min_support": {"type": "integer"},
        "policy": _POLICY,
        "distribution": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {"label": {"type": "string"}, "probability": _NUM},
                "required": ["label", "probability"],
            },
        },
        "rates": {
            "anyOf": [
                {"type": "null"},
                {
                    "type": "object",
                    "properties": {"fnmr": _NUM, "fmr": _NUM},
                    "required": ["fnmr", "fmr"],
                },
            ]
        },
    },
    "required": ["query", "evidence", "distribution", "rates"],
}

SWEEP_SCHEMA = {
    "type": "object",
    "properties": {
        "points": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "profile": {"type": "object"},
                    "theta": {"type": "number"},
                    "report": RISK_SCHEMA,
                },
                "required": ["profile", "theta", "report"],
            },
        }
    },
    "required": ["points"],
}
