"""Command-line interface.

Subcommands: audit (per-group metrics), risk (risk report), infer
(posterior query), sweep (what-if grid), serve (HTTP service). A JSON
config file named by the BIASLENS_CONFIG environment variable supplies
defaults; explicit flags always win. Exit codes: 0 success, 2 input or
usage error, 3 inconsistent evidence, 4 environment error.
"""

from __future__ import annotations

import argparse
import json
import os
import socket
import sys

from .beliefnet import OUTCOME_NODE, build_network, conditional_rates, infer
from .dataset import AttributeSchema, parse_dataset
from .errors import BiaslensError, InconsistentEvidenceError
from .metrics import DecisionPolicy, group_metrics
from .risk import ImpactProfile, risk_report, whatif_sweep
from . import reports

CONFIG_ENV = "BIASLENS_CONFIG"

# config keys that may seed flag defaults
_CONFIG_KEYS = (
    "predictions", "attributes", "schema", "policy", "theta", "top_k",
    "impact_fmr", "impact_fnmr", "alpha", "min_support", "format", "out",
    "bind",
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="biaslens", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_dataset_flags(p):
        p.add_argument("--predictions", help="predictions CSV path")
        p.add_argument("--attributes", help="attributes CSV path")
        p.add_argument("--schema", help="schema JSON path")

    def add_policy_flags(p, theta_list=False):
        p.add_argument("--policy", choices=["rank_threshold", "score_threshold"])
        if theta_list:
            p.add_argument("--theta", help="comma-separated list of thresholds")
        else:
            p.add_argument("--theta", type=float)
        p.add_argument("--top-k", dest="top_k", help='positive integer or "all"')

    def add_output_flags(p):
        p.add_argument("--format", choices=["table", "json", "csv"])
        p.add_argument("--out", help="write output to this path instead of stdout")

    p = sub.add_parser("audit", help="per-group accuracy/FNMR/FMR table")
    add_dataset_flags(p)
    add_policy_flags(p)
    add_output_flags(p)

    p = sub.add_parser("risk", help="per-group and per-subject risk report")
    add_dataset_flags(p)
    add_policy_flags(p)
    p.add_argument("--impact-fmr", dest="impact_fmr", type=float)
    p.add_argument("--impact-fnmr", dest="impact_fnmr", type=float)
    add_output_flags(p)

    p = sub.add_parser("infer", help="posterior of a network node given evidence")
    add_dataset_flags(p)
    add_policy_flags(p)
    p.add_argument("--query", required=True)
    p.add_argument("--evidence", action="append", default=[],
                   metavar="NODE=VALUE", help="repeatable; also accepts commas")
    p.add_argument("--alpha", type=float)
    p.add_argument("--min-support", dest="min_support", type=int)
    add_output_flags(p)

    p = sub.add_parser("sweep", help="risk reports over impact/threshold grids")
    add_dataset_flags(p)
    add_policy_flags(p, theta_list=True)
    p.add_argument("--impact-fmr", dest="impact_fmr",
                   help="comma-separated list of FMR impacts")
    p.add_argument("--impact-fnmr", dest="impact_fnmr",
                   help="comma-separated list of FNMR impacts")
    add_output_flags(p)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--bind", help="host:port (default 127.0.0.1:8351)")
    p.add_argument("--sessions-dir", dest="sessions_dir",
                   help="directory for persisted sessions")
    p.add_argument("--console", help="serve a built operator console from this dir")
    p.add_argument("--max-upload-bytes", dest="max_upload_bytes", type=int)
    return parser


def _load_config() -> dict:
    path = os.environ.get(CONFIG_ENV)
    if not path:
        return {}
    try:
        with open(path, "rb") as fh:
            config = json.load(fh)
    except OSError as exc:
        raise BiaslensError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise BiaslensError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(config, dict):
        raise BiaslensError(f"config file {path} must hold a JSON object")
    unknown = set(config) - set(_CONFIG_KEYS)
    if unknown:
        raise BiaslensError(f"config file {path} has unknown keys: {sorted(unknown)}")
    return config


def _merged(args: argparse.Namespace, key: str, fallback=None):
    """Flag if given, else config value, else fallback."""
    value = getattr(args, key, None)
    if value is not None:
        return value
    config = args._config
    if key in config:
        return config[key]
    return fallback


def _require_path(args, key: str) -> str:
    path = _merged(args, key)
    if path is None:
        raise _UsageError(f"--{key} is required")
    if not os.path.exists(path):
        raise BiaslensError(f"{key} file not found: {path}")
    return path


def _load_dataset(args):
    schema_path = _require_path(args, "schema")
    predictions_path = _require_path(args, "predictions")
    attributes_path = _require_path(args, "attributes")
    with open(schema_path, "rb") as fh:
        schema = AttributeSchema.from_json(fh.read())
    with open(predictions_path, "rb") as pred, open(attributes_path, "rb") as attr:
        return parse_dataset(pred, attr, schema)


def _policy_from(args, theta=None) -> DecisionPolicy:
    # precedence: explicit flags beat config; a bare --theta applies to the
    # default rank_threshold policy.
    kind = _merged(args, "policy", "rank_threshold")
    if theta is None:
        theta = _merged(args, "theta", 0.0)
    top_k = _merged(args, "top_k", "all")
    if top_k != "all":
        try:
            top_k = int(top_k)
        except (TypeError, ValueError):
            raise _UsageError('--top-k must be a positive integer or "all"') from None
    return DecisionPolicy(kind=kind, theta=float(theta), top_k=top_k)


def _profile_from(args) -> ImpactProfile:
    return ImpactProfile(
        impact_fmr=float(_merged(args, "impact_fmr", 1.0)),
        impact_fnmr=float(_merged(args, "impact_fnmr", 1.0)),
    )


def _emit(args, doc: dict, table: str | None, csv_text: str | None) -> None:
    fmt = _merged(args, "format", "table")
    if fmt == "json":
        payload = reports.to_json(doc)
    elif fmt == "csv":
        if csv_text is None:
            raise _UsageError("csv output is not available for this command")
        payload = csv_text
    else:
        if table is None:
            raise _UsageError("table output is not available for this command")
        payload = table
    out = _merged(args, "out")
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)


def _parse_evidence(items: list[str]) -> dict[str, str]:
    evidence = {}
    for chunk in items:
        for item in chunk.split(","):
            item = item.strip()
            if not item:
                continue
            if "=" not in item:
                raise _UsageError(f"evidence must look like node=value, got {item!r}")
            node, value = item.split("=", 1)
            evidence[node.strip()] = value.strip()
    return evidence


def _floats_list(text: str | None, flag: str) -> list[float]:
    if text is None or str(text).strip() == "":
        raise _UsageError(f"{flag} needs a non-empty comma-separated list")
    try:
        return [float(x) for x in str(text).split(",")]
    except ValueError:
        raise _UsageError(f"{flag} must be a comma-separated list of numbers") from None


def cmd_audit(args) -> int:
    dataset = _load_dataset(args)
    report = group_metrics(dataset, _policy_from(args))
    doc = {"params": {"policy": reports.policy_echo(report.policy)},
           "report": reports.metrics_document(report, dataset)}
    _emit(args, doc, reports.metrics_table(doc["report"]),
          reports.metrics_csv(doc["report"]))
    return 0


def cmd_risk(args) -> int:
    dataset = _load_dataset(args)
    policy = _policy_from(args)
    profile = _profile_from(args)
    report = risk_report(dataset, policy, profile)
    doc = {"params": {"policy": reports.policy_echo(policy),
                      "profile": {"impact_fmr": profile.impact_fmr,
                                  "impact_fnmr": profile.impact_fnmr}},
           "report": reports.risk_document(report)}
    _emit(args, doc, reports.risk_table(doc["report"]), reports.risk_csv(doc["report"]))
    return 0


def cmd_infer(args) -> int:
    dataset = _load_dataset(args)
    policy = _policy_from(args)
    alpha = float(_merged(args, "alpha", 1.0))
    min_support = int(_merged(args, "min_support", 5))
    evidence = _parse_evidence(args.evidence)
    net = build_network(dataset, policy, alpha=alpha, min_support=min_support)
    posterior = infer(net, args.query, evidence)
    rates = None
    if args.query == OUTCOME_NODE:
        rates = conditional_rates(net, evidence)
    doc = reports.posterior_document(args.query, evidence, posterior, rates,
                                     alpha, min_support, policy)
    _emit(args, doc, reports.posterior_table(doc), None)
    return 0


def cmd_sweep(args) -> int:
    dataset = _load_dataset(args)
    kind_policy = _policy_from(args, theta=0.0)
    thetas = _floats_list(_merged(args, "theta", "0"), "--theta")
    fmr_list = _floats_list(_merged(args, "impact_fmr", "1"), "--impact-fmr")
    fnmr_list = _floats_list(_merged(args, "impact_fnmr", "1"), "--impact-fnmr")
    # singleton lists broadcast against the other impact list
    if len(fmr_list) == 1 and len(fnmr_list) > 1:
        fmr_list = fmr_list * len(fnmr_list)
    if len(fnmr_list) == 1 and len(fmr_list) > 1:
        fnmr_list = fnmr_list * len(fmr_list)
    if len(fmr_list) != len(fnmr_list):
        raise _UsageError("--impact-fmr and --impact-fnmr lists must zip together")
    profiles = [ImpactProfile(f, n) for f, n in zip(fmr_list, fnmr_list)]
    points = whatif_sweep(dataset, profiles, thetas, policy=kind_policy)
    doc = {"params": {"policy": reports.policy_echo(kind_policy),
                      "thetas": thetas,
                      "impacts": [[p.impact_fmr, p.impact_fnmr] for p in profiles]},
           "report": reports.sweep_document(points)}
    tables = []
    for point in points:
        tables.append(
            f"# impacts ({point.profile.impact_fmr:g}, "
            f"{point.profile.impact_fnmr:g}), theta {point.theta:g}"
        )
        tables.append(reports.risk_table(reports.risk_document(point.report)))
    _emit(args, doc, "\n".join(tables), None)
    return 0


def cmd_serve(args) -> int:
    from .service import create_app  # deferred: FastAPI import is slow

    bind = _merged(args, "bind", "127.0.0.1:8351")
    if ":" not in bind:
        raise _UsageError(f"--bind must look like host:port, got {bind!r}")
    host, port_text = bind.rsplit(":", 1)
    try:
        port = int(port_text)
    except ValueError:
        raise _UsageError(f"--bind port must be an integer, got {port_text!r}") from None

    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((host, port))
    except OSError as exc:
        sys.stderr.write(f"error:env: cannot bind {bind}: {exc}\n")
        return 4
    finally:
        probe.close()

    app = create_app(
        sessions_dir=_merged(args, "sessions_dir", "biaslens-sessions"),
        max_upload_bytes=_merged(args, "max_upload_bytes", None),
        console_dir=_merged(args, "console", None),
    )
    import uvicorn

    uvicorn.run(app, host=host, port=port, log_level="warning")
    return 0


_COMMANDS = {
    "audit": cmd_audit,
    "risk": cmd_risk,
    "infer": cmd_infer,
    "sweep": cmd_sweep,
    "serve": cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        args._config = _load_config()
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        sys.stderr.write(f"error:usage: {exc}\n")
        return 2
    except InconsistentEvidenceError as exc:
        sys.stderr.write(f"error:evidence: {exc}\n")
        return 3
    except BiaslensError as exc:
        sys.stderr.write(f"error:{exc.category}: {exc}\n")
        return 2
    except OSError as exc:
        sys.stderr.write(f"error:env: {exc}\n")
        return 4


if __name__ == "__main__":
    sys.exit(main())
