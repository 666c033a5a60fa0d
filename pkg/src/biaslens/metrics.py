"""Trial generation and per-group error rates.

Every prediction record is expanded into one trial per gallery identity
(one genuine, the rest imposters) under a decision policy, and the trials
are tallied into accuracy / FNMR / FMR per attribute group. Candidate
scores are softmax-normalized within each record; gallery identities that
a record does not list carry probability exactly 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .dataset import Dataset, PredictionRecord, attribute_slice
from .errors import ValidationError

OUTCOMES = ("TP", "TN", "FP", "FN")


@dataclass(frozen=True)
class DecisionPolicy:
    """How a (probe, candidate) trial is decided.

    rank_threshold: match iff the candidate is the record's rank-1 prediction
    and its probability clears theta. score_threshold: match iff the
    probability clears theta, regardless of rank. top_k limits the trial
    universe to the record's k best candidates ("all" = full gallery).
    """

    kind: str = "rank_threshold"
    theta: float = 0.0
    top_k: int | str = "all"

    def __post_init__(self):
        if self.kind not in ("rank_threshold", "score_threshold"):
            raise ValidationError(f"unknown policy kind {self.kind!r}")
        if not (0.0 <= self.theta <= 1.0):
            raise ValidationError(f"theta must be in [0, 1], got {self.theta}")
        if self.top_k != "all":
            if not isinstance(self.top_k, int) or self.top_k < 1:
                raise ValidationError('top_k must be a positive integer or "all"')

    def with_theta(self, theta: float) -> "DecisionPolicy":
        return replace(self, theta=theta)


@dataclass(frozen=True)
class Trial:
    probe_id: str
    candidate: str
    is_genuine: bool
    decided_match: bool
    probability: float


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    tn: int = 0
    fp: int = 0
    fn: int = 0

    def __post_init__(self):
        if min(self.tp, self.tn, self.fp, self.fn) < 0:
            raise ValidationError("confusion counts must be non-negative")

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(
            tp=self.tp + other.tp,
            tn=self.tn + other.tn,
            fp=self.fp + other.fp,
            fn=self.fn + other.fn,
        )

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


@dataclass(frozen=True)
class GroupMetrics:
    """Accuracy/FNMR/FMR for one slice. Undefined ratios are None, never 0."""

    accuracy: float | None
    fnmr: float | None
    fmr: float | None
    counts: ConfusionCounts

    @classmethod
    def from_counts(cls, counts: ConfusionCounts) -> "GroupMetrics":
        total = counts.total
        genuine = counts.tp + counts.fn
        imposter = counts.fp + counts.tn
        return cls(
            accuracy=(counts.tp + counts.tn) / total if total else None,
            fnmr=counts.fn / genuine if genuine else None,
            fmr=counts.fp / imposter if imposter else None,
            counts=counts,
        )


@dataclass(frozen=True)
class MetricsReport:
    """group_metrics output: baseline plus one entry per populated group."""

    policy: DecisionPolicy
    baseline: GroupMetrics
    groups: dict[tuple[str, str], GroupMetrics]
    empty_groups: tuple[tuple[str, str], ...]


def softmax(scores: list[float]) -> list[float]:
    """Exponential normalization with max-subtraction for overflow safety."""
    if not scores:
        raise ValidationError("softmax requires a non-empty score list")
    if any(not math.isfinite(s) for s in scores):
        raise ValidationError("softmax requires finite scores")
    peak = max(scores)
    exps = [math.exp(s - peak) for s in scores]
    z = sum(exps)
    return [e / z for e in exps]


def record_probabilities(record: PredictionRecord) -> dict[str, float]:
    """Softmax probabilities of a record's listed candidates, by label."""
    probs = softmax([score for _, score in record.candidates])
    return {label: p for (label, _), p in zip(record.candidates, probs)}


def _trial_universe(record: PredictionRecord, policy: DecisionPolicy,
                    gallery_order: tuple[str, ...]) -> list[str]:
    if policy.top_k == "all":
        listed = [label for label, _ in record.candidates]
        listed_set = set(listed)
        return listed + [g for g in gallery_order if g not in listed_set]
    return [label for label, _ in record.candidates[: policy.top_k]]


def _decide(policy: DecisionPolicy, probability: float, is_rank1: bool) -> bool:
    if policy.kind == "rank_threshold":
        return is_rank1 and probability >= policy.theta
    return probability >= policy.theta


def generate_trials(dataset: Dataset, policy: DecisionPolicy) -> list[Trial]:
    """Expand records into decided trials.

    Per record the universe is the full gallery (listed candidates first,
    then the remaining gallery in sorted order) or the top-k candidates when
    top_k is finite. Exactly one genuine trial is emitted per record; when
    top-k truncation drops the true label, the genuine trial still appears
    with probability 0 and no match.
    """
    gallery_order = tuple(sorted(dataset.gallery))
    trials: list[Trial] = []
    for record in dataset.records:
        probs = record_probabilities(record)
        rank1 = record.rank1
        universe = _trial_universe(record, policy, gallery_order)
        saw_genuine = False
        for label in universe:
            p = probs.get(label, 0.0)
            genuine = label == record.true_label
            saw_genuine = saw_genuine or genuine
            trials.append(
                Trial(
                    probe_id=record.probe_id,
                    candidate=label,
                    is_genuine=genuine,
                    decided_match=_decide(policy, p, label == rank1),
                    probability=p,
                )
            )
        if not saw_genuine:
            trials.append(
                Trial(
                    probe_id=record.probe_id,
                    candidate=record.true_label,
                    is_genuine=True,
                    decided_match=False,
                    probability=0.0,
                )
            )
    return trials


def confusion_counts(trials: list[Trial]) -> ConfusionCounts:
    tp = tn = fp = fn = 0
    for trial in trials:
        if trial.is_genuine:
            if trial.decided_match:
                tp += 1
            else:
                fn += 1
        elif trial.decided_match:
            fp += 1
        else:
            tn += 1
    return ConfusionCounts(tp=tp, tn=tn, fp=fp, fn=fn)


def record_outcome_counts(record: PredictionRecord, policy: DecisionPolicy,
                          gallery_size: int) -> ConfusionCounts:
    """Confusion contribution of a single record, without materializing trials.

    Agrees with confusion_counts(generate_trials(...)) by construction; the
    equivalence is pinned by a property test.
    """
    probs = record_probabilities(record)
    rank1 = record.rank1
    if policy.top_k == "all":
        universe = [label for label, _ in record.candidates]
        outside = gallery_size - len(universe)
    else:
        universe = [label for label, _ in record.candidates[: policy.top_k]]
        outside = 0
    tp = tn = fp = fn = 0
    saw_genuine = False
    for label in universe:
        p = probs.get(label, 0.0)
        match = _decide(policy, p, label == rank1)
        if label == record.true_label:
            saw_genuine = True
            tp, fn = (tp + 1, fn) if match else (tp, fn + 1)
        else:
            fp, tn = (fp + 1, tn) if match else (fp, tn + 1)
    if outside:
        # unlisted gallery identities: probability exactly 0
        zero_match = _decide(policy, 0.0, False)
        genuine_outside = 1 if (not saw_genuine) else 0
        imposter_outside = outside - genuine_outside
        if zero_match:
            fp += imposter_outside
        else:
            tn += imposter_outside
        if genuine_outside:
            saw_genuine = True
            if zero_match:
                tp += 1
            else:
                fn += 1
    if not saw_genuine:
        fn += 1
    return ConfusionCounts(tp=tp, tn=tn, fp=fp, fn=fn)


def dataset_counts(dataset: Dataset, policy: DecisionPolicy) -> ConfusionCounts:
    total = ConfusionCounts()
    size = len(dataset.gallery)
    for record in dataset.records:
        total = total + record_outcome_counts(record, policy, size)
    return total


def group_metrics(dataset: Dataset, policy: DecisionPolicy) -> MetricsReport:
    """Baseline metrics plus one GroupMetrics per populated attribute value.

    Groups with no records are omitted from the map and listed separately
    for report footnotes.
    """
    if not dataset.records:
        raise ValidationError("group_metrics requires a non-empty dataset")
    baseline = GroupMetrics.from_counts(dataset_counts(dataset, policy))
    groups: dict[tuple[str, str], GroupMetrics] = {}
    empty: list[tuple[str, str]] = []
    for attribute in dataset.schema.names:
        for value in dataset.schema.domain(attribute):
            sliced = attribute_slice(dataset, attribute, value)
            if not sliced.records:
                empty.append((attribute, value))
                continue
            groups[(attribute, value)] = GroupMetrics.from_counts(
                dataset_counts(sliced, policy)
            )
    return MetricsReport(
        policy=policy,
        baseline=baseline,
        groups=groups,
        empty_groups=tuple(empty),
    )


def rank_accuracy(dataset: Dataset, k: int) -> float:
    """Fraction of records whose true label is among the k best candidates."""
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    if not dataset.records:
        raise ValidationError("rank_accuracy requires a non-empty dataset")
    hits = rank_hits(dataset, k)
    return hits / len(dataset.records)


def rank_hits(dataset: Dataset, k: int) -> int:
    hits = 0
    for record in dataset.records:
        rank = record.rank_of(record.true_label)
        if rank is not None and rank <= k:
            hits += 1
    return hits
