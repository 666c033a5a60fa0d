"""Impact-weighted risk scoring over group error rates.

A group's risk of bias is the weighted sum of its two error rates
(impact_fmr * FMR + impact_fnmr * FNMR), and a subject's ensemble risk is
the plain sum of the risks of the groups the subject belongs to, one per
schema attribute.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .dataset import Dataset, SubjectAttributes
from .errors import DegenerateRateError, ValidationError
from .metrics import DecisionPolicy, MetricsReport, group_metrics

# Standing clarification attached to every report: the FMR impact weights the
# false match rate and the FNMR impact weights the false non-match rate. A
# cost scenario that means "a false match costs 10x a false non-match" must
# therefore set impact_fmr=10, impact_fnmr=1.
IMPACT_CONVENTION_NOTE = (
    "risk = impact_fmr * FMR + impact_fnmr * FNMR; impact_fmr always "
    "multiplies the false match rate, impact_fnmr the false non-match rate."
)

DEFAULT_PROFILE_IMPACTS = (1.0, 1.0)
CHECKPOINT_PROFILE_IMPACTS = (10.0, 1.0)  # false matches cost 10x


@dataclass(frozen=True)
class ImpactProfile:
    """Cost units per false match / per false non-match."""

    impact_fmr: float = 1.0
    impact_fnmr: float = 1.0

    def __post_init__(self):
        for name, value in (("impact_fmr", self.impact_fmr),
                            ("impact_fnmr", self.impact_fnmr)):
            if not math.isfinite(value) or value < 0:
                raise ValidationError(f"{name} must be finite and >= 0, got {value}")

    def scaled(self, factor: float) -> "ImpactProfile":
        return ImpactProfile(self.impact_fmr * factor, self.impact_fnmr * factor)


@dataclass(frozen=True)
class RiskEntry:
    attribute: str
    value: str
    risk: float
    fnmr: float
    fmr: float


@dataclass(frozen=True)
class Exclusion:
    """A group or subject left out of the report, with the reason."""

    kind: str  # "group" or "subject"
    attribute: str | None
    value: str | None
    subject_id: str | None
    reason: str


@dataclass(frozen=True)
class RiskReport:
    profile: ImpactProfile
    policy: DecisionPolicy
    baseline_fnmr: float | None
    baseline_fmr: float | None
    baseline_risk: float | None
    entries: tuple[RiskEntry, ...]
    ensemble: dict[str, float]
    exclusions: tuple[Exclusion, ...]
    footnotes: tuple[str, ...]

    def entry_for(self, attribute: str, value: str) -> RiskEntry | None:
        for entry in self.entries:
            if entry.attribute == attribute and entry.value == value:
                return entry
        return None


def risk_of_bias(fnmr: float | None, fmr: float | None, profile: ImpactProfile) -> float:
    """impact_fmr * fmr + impact_fnmr * fnmr. Absent rates are rejected."""
    if fnmr is None or fmr is None:
        raise DegenerateRateError(
            "risk is undefined for a degenerate group (absent rate); exclude the "
            "group or supply a fallback rate explicitly"
        )
    for name, rate in (("fnmr", fnmr), ("fmr", fmr)):
        if not (0.0 <= rate <= 1.0):
            raise ValidationError(f"{name} must be in [0, 1], got {rate}")
    return profile.impact_fmr * fmr + profile.impact_fnmr * fnmr


def ensemble_risk(subject: SubjectAttributes, entries: list[RiskEntry] | tuple[RiskEntry, ...]) -> float:
    """Sum of the subject's per-attribute risks; order-independent.

    Exactly one entry must match the subject's value for each of its
    attributes.
    """
    total = 0.0
    for attribute, value in sorted(subject.values.items()):
        matches = [e for e in entries if e.attribute == attribute and e.value == value]
        if not matches:
            raise ValidationError(
                f"no risk entry for subject {subject.subject_id!r} attribute "
                f"{attribute}={value}"
            )
        if len(matches) > 1:
            raise ValidationError(
                f"duplicate risk entries for attribute {attribute}={value}"
            )
        total += matches[0].risk
    return total


def risk_report(dataset: Dataset, policy: DecisionPolicy | None = None,
                profile: ImpactProfile | None = None,
                metrics: MetricsReport | None = None) -> RiskReport:
    """Per-group risks plus per-subject ensemble risks.

    Degenerate groups (absent rate) and empty groups are excluded with
    reasons; subjects touching any excluded group get no ensemble value
    rather than a silently partial sum. A precomputed MetricsReport may be
    passed to avoid re-slicing in sweeps.
    """
    policy = policy or DecisionPolicy()
    profile = profile or ImpactProfile()
    if metrics is None:
        metrics = group_metrics(dataset, policy)

    entries: list[RiskEntry] = []
    exclusions: list[Exclusion] = []
    for attribute in dataset.schema.names:
        for value in dataset.schema.domain(attribute):
            key = (attribute, value)
            if key in metrics.groups:
                gm = metrics.groups[key]
                if gm.fnmr is None or gm.fmr is None:
                    missing = "fnmr" if gm.fnmr is None else "fmr"
                    exclusions.append(Exclusion(
                        kind="group", attribute=attribute, value=value,
                        subject_id=None,
                        reason=f"{missing} undefined (zero-denominator group)",
                    ))
                    continue
                entries.append(RiskEntry(
                    attribute=attribute, value=value,
                    risk=risk_of_bias(gm.fnmr, gm.fmr, profile),
                    fnmr=gm.fnmr, fmr=gm.fmr,
                ))
            elif key in metrics.empty_groups:
                exclusions.append(Exclusion(
                    kind="group", attribute=attribute, value=value, subject_id=None,
                    reason="no records with this attribute value",
                ))

    by_key = {(e.attribute, e.value): e for e in entries}
    ensemble: dict[str, float] = {}
    for subject_id in sorted(dataset.subjects):
        subject = dataset.subjects[subject_id]
        missing = [
            (a, v) for a, v in subject.values.items() if (a, v) not in by_key
        ]
        if missing:
            a, v = sorted(missing)[0]
            exclusions.append(Exclusion(
                kind="subject", attribute=None, value=None, subject_id=subject_id,
                reason=f"group {a}={v} has no risk entry",
            ))
            continue
        ensemble[subject_id] = ensemble_risk(subject, entries)

    baseline = metrics.baseline
    if baseline.fnmr is None or baseline.fmr is None:
        baseline_risk = None
        exclusions.append(Exclusion(
            kind="group", attribute=None, value=None, subject_id=None,
            reason="baseline rate undefined (zero-denominator)",
        ))
    else:
        baseline_risk = risk_of_bias(baseline.fnmr, baseline.fmr, profile)

    return RiskReport(
        profile=profile,
        policy=policy,
        baseline_fnmr=baseline.fnmr,
        baseline_fmr=baseline.fmr,
        baseline_risk=baseline_risk,
        entries=tuple(entries),
        ensemble=ensemble,
        exclusions=tuple(exclusions),
        footnotes=(IMPACT_CONVENTION_NOTE,),
    )


@dataclass(frozen=True)
class SweepPoint:
    profile: ImpactProfile
    theta: float
    report: RiskReport


def whatif_sweep(dataset: Dataset, profile_grid: list[ImpactProfile],
                 theta_grid: list[float],
                 policy: DecisionPolicy | None = None) -> list[SweepPoint]:
    """One risk report per (profile, theta) grid point, profiles outermost.

    The base policy supplies the decision kind and top_k; each grid point
    overrides theta. Group metrics are computed once per theta and shared
    across profiles (risks are linear in the profile, rates are not affected
    by it).
    """
    if not profile_grid or not theta_grid:
        raise ValidationError("sweep grids must be non-empty")
    policy = policy or DecisionPolicy()
    metrics_by_theta = {
        theta: group_metrics(dataset, policy.with_theta(theta)) for theta in theta_grid
    }
    points = []
    for profile in profile_grid:
        for theta in theta_grid:
            report = risk_report(
                dataset,
                policy.with_theta(theta),
                profile,
                metrics=metrics_by_theta[theta],
            )
            points.append(SweepPoint(profile=profile, theta=theta, report=report))
    return points
