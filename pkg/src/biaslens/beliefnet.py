"""Discrete causal network over the bias attributes.

The default network has the six attribute nodes as independent roots, an
Outcome node with states (TP, TN, FP, FN) conditioned on all six, and a
deterministic Match node downstream of Outcome. Priors and the Outcome
table are estimated from a dataset; inference is exact variable
elimination and is checked against brute-force enumeration in the tests.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .dataset import Dataset
from .errors import InconsistentEvidenceError, ValidationError
from .metrics import DecisionPolicy, OUTCOMES, record_outcome_counts

OUTCOME_NODE = "Outcome"
MATCH_NODE = "Match"
MATCH_STATES = ("true", "false")

ROW_SUM_TOL = 1e-9

Evidence = Mapping[str, str]


@dataclass(frozen=True)
class CategoricalDistribution:
    labels: tuple[str, ...]
    probabilities: tuple[float, ...]

    def __post_init__(self):
        if len(self.labels) != len(self.probabilities):
            raise ValidationError("labels and probabilities differ in length")
        if any(p < 0 for p in self.probabilities):
            raise ValidationError("probabilities must be non-negative")
        if abs(sum(self.probabilities) - 1.0) > ROW_SUM_TOL:
            raise ValidationError(
                f"probabilities sum to {sum(self.probabilities)}, expected 1"
            )

    def probability(self, label: str) -> float:
        return self.probabilities[self.labels.index(label)]

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.labels, self.probabilities))


@dataclass(frozen=True)
class CPT:
    """Child distribution per combination of parent values. Roots have an
    empty parent list and a single row keyed by the empty tuple."""

    child: str
    parents: tuple[str, ...]
    table: dict[tuple[str, ...], CategoricalDistribution]

    def validate_against(self, domains: dict[str, tuple[str, ...]]) -> None:
        expected = set(itertools.product(*(domains[p] for p in self.parents)))
        if set(self.table) != expected:
            raise ValidationError(
                f"CPT for {self.child!r} does not cover the parent product "
                f"({len(self.table)} rows, expected {len(expected)})"
            )
        child_domain = domains[self.child]
        for assignment, dist in self.table.items():
            if dist.labels != child_domain:
                raise ValidationError(
                    f"CPT row {assignment!r} of {self.child!r} is not over the "
                    "child domain"
                )


@dataclass(frozen=True)
class BeliefNetwork:
    """node name -> domain, plus one CPT per node. Parent relation is acyclic."""

    nodes: dict[str, tuple[str, ...]]
    cpts: dict[str, CPT]

    def __post_init__(self):
        if set(self.nodes) != set(self.cpts):
            raise ValidationError("every node needs exactly one CPT")
        for name, cpt in self.cpts.items():
            if cpt.child != name:
                raise ValidationError(f"CPT filed under {name!r} is for {cpt.child!r}")
            for parent in cpt.parents:
                if parent not in self.nodes:
                    raise ValidationError(f"unknown parent {parent!r} of {name!r}")
            cpt.validate_against(self.nodes)
        self.topological_order()  # raises on cycles

    def topological_order(self) -> list[str]:
        order: list[str] = []
        seen: dict[str, int] = {}  # 0 = visiting, 1 = done

        def visit(name: str):
            state = seen.get(name)
            if state == 1:
                return
            if state == 0:
                raise ValidationError("network contains a cycle")
            seen[name] = 0
            for parent in self.cpts[name].parents:
                visit(parent)
            seen[name] = 1
            order.append(name)

        for name in self.nodes:
            visit(name)
        return order

    def node_order(self) -> tuple[str, ...]:
        return tuple(self.nodes)

    def to_json(self) -> str:
        doc = {
            "nodes": [
                {"name": name, "domain": list(domain)}
                for name, domain in self.nodes.items()
            ],
            "cpts": {
                name: {
                    "parents": list(cpt.parents),
                    "rows": {
                        json.dumps(list(assignment)): list(dist.probabilities)
                        for assignment, dist in sorted(cpt.table.items())
                    },
                }
                for name, cpt in self.cpts.items()
            },
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str | bytes) -> "BeliefNetwork":
        doc = json.loads(text)
        nodes = {entry["name"]: tuple(entry["domain"]) for entry in doc["nodes"]}
        cpts = {}
        for name, spec in doc["cpts"].items():
            table = {
                tuple(json.loads(key)): CategoricalDistribution(
                    labels=nodes[name], probabilities=tuple(probs)
                )
                for key, probs in spec["rows"].items()
            }
            cpts[name] = CPT(child=name, parents=tuple(spec["parents"]), table=table)
        return cls(nodes=nodes, cpts=cpts)


def estimate_prior(dataset: Dataset, attribute: str, alpha: float = 0.0) -> CategoricalDistribution:
    """Laplace-smoothed value frequencies over prediction records.

    Each record contributes its true subject's value once (image-level
    weighting): probability(v) = (count(v) + alpha) / (total + alpha * |domain|).
    """
    if not dataset.schema.has(attribute):
        raise ValidationError(f"unknown attribute {attribute!r}")
    if alpha < 0:
        raise ValidationError("alpha must be >= 0")
    domain = dataset.schema.domain(attribute)
    if not dataset.records and alpha == 0:
        raise ValidationError(
            "cannot estimate an empirical prior from an empty dataset with alpha=0"
        )
    counts = dict.fromkeys(domain, 0)
    for record in dataset.records:
        counts[dataset.subjects[record.true_label].values[attribute]] += 1
    total = len(dataset.records) + alpha * len(domain)
    return CategoricalDistribution(
        labels=domain,
        probabilities=tuple((counts[v] + alpha) / total for v in domain),
    )


def _outcome_distribution(counts: dict[str, int], alpha: float) -> tuple[float, ...]:
    total = sum(counts.values()) + alpha * len(OUTCOMES)
    return tuple((counts[o] + alpha) / total for o in OUTCOMES)


def build_network(dataset: Dataset, policy: DecisionPolicy | None = None,
                  alpha: float = 1.0, min_support: int = 5) -> BeliefNetwork:
    """Estimate the default network from a dataset.

    Attribute priors come from estimate_prior. The Outcome row for each full
    attribute combination is the Laplace-smoothed distribution of that
    combination's trial outcomes; rows whose trial support falls below
    min_support (or that have no trials at all when alpha is 0) fall back to
    the global outcome distribution. The Match table is deterministic:
    Match=true exactly when the outcome is TP or TN.
    """
    if policy is None:
        policy = DecisionPolicy()
    if not dataset.records:
        raise ValidationError("build_network requires a non-empty dataset")
    if alpha < 0:
        raise ValidationError("alpha must be >= 0")
    if min_support < 0:
        raise ValidationError("min_support must be >= 0")
    schema = dataset.schema
    names = schema.names
    gallery_size = len(dataset.gallery)

    combo_counts: dict[tuple[str, ...], dict[str, int]] = {}
    global_counts = dict.fromkeys(OUTCOMES, 0)
    for record in dataset.records:
        subject = dataset.subjects[record.true_label]
        combo = tuple(subject.values[n] for n in names)
        counts = record_outcome_counts(record, policy, gallery_size)
        bucket = combo_counts.setdefault(combo, dict.fromkeys(OUTCOMES, 0))
        for outcome, n in (("TP", counts.tp), ("TN", counts.tn),
                           ("FP", counts.fp), ("FN", counts.fn)):
            bucket[outcome] += n
            global_counts[outcome] += n

    global_row = _outcome_distribution(global_counts, alpha)
    outcome_table = {}
    for combo in itertools.product(*(schema.domain(n) for n in names)):
        counts = combo_counts.get(combo, dict.fromkeys(OUTCOMES, 0))
        support = sum(counts.values())
        if support < min_support or (support == 0 and alpha == 0):
            row = global_row
        else:
            row = _outcome_distribution(counts, alpha)
        outcome_table[combo] = CategoricalDistribution(labels=OUTCOMES, probabilities=row)

    nodes: dict[str, tuple[str, ...]] = {n: schema.domain(n) for n in names}
    nodes[OUTCOME_NODE] = OUTCOMES
    nodes[MATCH_NODE] = MATCH_STATES

    cpts: dict[str, CPT] = {}
    for name in names:
        prior = estimate_prior(dataset, name, alpha)
        cpts[name] = CPT(child=name, parents=(), table={(): prior})
    cpts[OUTCOME_NODE] = CPT(child=OUTCOME_NODE, parents=names, table=outcome_table)
    match_table = {
        (outcome,): CategoricalDistribution(
            labels=MATCH_STATES,
            probabilities=(1.0, 0.0) if outcome in ("TP", "TN") else (0.0, 1.0),
        )
        for outcome in OUTCOMES
    }
    cpts[MATCH_NODE] = CPT(child=MATCH_NODE, parents=(OUTCOME_NODE,), table=match_table)
    return BeliefNetwork(nodes=nodes, cpts=cpts)


def brute_force_joint(net: BeliefNetwork,
                      state_cap: int = 10**6) -> dict[tuple[str, ...], float]:
    """Full joint by enumeration: the test oracle for inference.

    Keys are assignments in net.node_order(). Refuses state spaces larger
    than the cap.
    """
    order = net.node_order()
    size = 1
    for name in order:
        size *= len(net.nodes[name])
        if size > state_cap:
            raise ValidationError(
                f"joint state space exceeds the cap of {state_cap} assignments"
            )
    index = {name: i for i, name in enumerate(order)}
    joint = {}
    for assignment in itertools.product(*(net.nodes[n] for n in order)):
        p = 1.0
        for name in order:
            cpt = net.cpts[name]
            parent_values = tuple(assignment[index[p_]] for p_ in cpt.parents)
            p *= cpt.table[parent_values].probability(assignment[index[name]])
            if p == 0.0:
                break
        joint[assignment] = p
    return joint


@dataclass
class _Factor:
    variables: tuple[str, ...]
    values: np.ndarray  # one axis per variable, in `variables` order


def _cpt_factor(net: BeliefNetwork, name: str) -> _Factor:
    cpt = net.cpts[name]
    variables = (*cpt.parents, name)
    shape = tuple(len(net.nodes[v]) for v in variables)
    values = np.empty(shape, dtype=float)
    parent_domains = [net.nodes[p] for p in cpt.parents]
    for idx, assignment in zip(
        itertools.product(*(range(len(d)) for d in parent_domains)),
        itertools.product(*parent_domains),
    ):
        values[idx] = cpt.table[assignment].probabilities
    return _Factor(variables=variables, values=values)


def _reduce(factor: _Factor, evidence_index: dict[str, int]) -> _Factor:
    variables = list(factor.variables)
    values = factor.values
    for var in factor.variables:
        if var in evidence_index:
            axis = variables.index(var)
            values = np.take(values, evidence_index[var], axis=axis)
            variables.pop(axis)
    return _Factor(variables=tuple(variables), values=values)


def _align(factor: _Factor, variables: tuple[str, ...]) -> np.ndarray:
    """View the factor's array with one axis per variable in the given order
    (singleton axes for variables the factor does not mention)."""
    missing = [v for v in variables if v not in factor.variables]
    values = factor.values.reshape(factor.values.shape + (1,) * len(missing))
    current = [*factor.variables, *missing]
    return values.transpose([current.index(v) for v in variables])


def _multiply(a: _Factor, b: _Factor) -> _Factor:
    variables = tuple(dict.fromkeys([*a.variables, *b.variables]))
    return _Factor(
        variables=variables, values=_align(a, variables) * _align(b, variables)
    )


def _sum_out(factor: _Factor, var: str) -> _Factor:
    axis = factor.variables.index(var)
    return _Factor(
        variables=tuple(v for v in factor.variables if v != var),
        values=factor.values.sum(axis=axis),
    )


def min_degree_order(net: BeliefNetwork, eliminate: set[str]) -> list[str]:
    """Greedy min-degree elimination order over the moralized interaction graph."""
    neighbors: dict[str, set[str]] = {v: set() for v in net.nodes}
    for name, cpt in net.cpts.items():
        scope = {*cpt.parents, name}
        for v in scope:
            neighbors[v] |= scope - {v}
    order = []
    remaining = set(eliminate)
    while remaining:
        var = min(remaining, key=lambda v: (len(neighbors[v] & remaining), v))
        order.append(var)
        around = neighbors[var]
        for u in around:
            neighbors[u] |= around - {u}
            neighbors[u].discard(var)
        remaining.discard(var)
    return order


def _validate_evidence(net: BeliefNetwork, evidence: Evidence) -> None:
    for node, label in evidence.items():
        if node not in net.nodes:
            raise ValidationError(f"unknown evidence node {node!r}")
        if label not in net.nodes[node]:
            raise ValidationError(
                f"label {label!r} is not in the domain of node {node!r}"
            )


def infer(net: BeliefNetwork, query: str, evidence: Evidence | None = None,
          elimination_order: list[str] | None = None) -> CategoricalDistribution:
    """Exact posterior P(query | evidence) by variable elimination.

    Raises InconsistentEvidenceError when the evidence has probability 0.
    """
    evidence = dict(evidence or {})
    if query not in net.nodes:
        raise ValidationError(f"unknown query node {query!r}")
    if query in evidence:
        raise ValidationError(f"query node {query!r} is also an evidence node")
    _validate_evidence(net, evidence)

    evidence_index = {
        node: net.nodes[node].index(label) for node, label in evidence.items()
    }
    factors = [
        _reduce(_cpt_factor(net, name), evidence_index) for name in net.nodes
    ]
    to_eliminate = set(net.nodes) - set(evidence) - {query}
    if elimination_order is None:
        order = min_degree_order(net, to_eliminate)
    else:
        if set(elimination_order) != to_eliminate:
            raise ValidationError(
                "elimination order must cover exactly the non-query, non-evidence nodes"
            )
        order = list(elimination_order)

    for var in order:
        related = [f for f in factors if var in f.variables]
        if not related:
            continue
        product = related[0]
        for f in related[1:]:
            product = _multiply(product, f)
        factors = [f for f in factors if var not in f.variables] + [_sum_out(product, var)]

    result = factors[0]
    for f in factors[1:]:
        result = _multiply(result, f)
    # all remaining axes belong to the query variable (evidence axes were reduced)
    if result.variables != (query,):
        axis = result.variables.index(query)
        keep = np.moveaxis(result.values, axis, 0)
        result = _Factor(variables=(query,), values=keep.reshape(len(net.nodes[query]), -1).sum(axis=1))

    z = float(result.values.sum())
    if z <= 0.0:
        raise InconsistentEvidenceError(
            f"evidence {evidence!r} has probability 0 under the network"
        )
    probs = result.values / z
    return CategoricalDistribution(
        labels=net.nodes[query], probabilities=tuple(float(p) for p in probs)
    )


def conditional_rates(net: BeliefNetwork, evidence: Evidence | None = None
                      ) -> tuple[float | None, float | None]:
    """(FNMR, FMR) implied by the Outcome posterior under the evidence.

    fnmr = p(FN) / (p(FN) + p(TP)); fmr = p(FP) / (p(FP) + p(TN)). A rate is
    None when its denominator is 0. Evidence must name attribute nodes only.
    """
    evidence = dict(evidence or {})
    for node in evidence:
        if node in (OUTCOME_NODE, MATCH_NODE):
            raise ValidationError(
                f"conditional_rates evidence must be over attribute nodes, got {node!r}"
            )
    posterior = infer(net, OUTCOME_NODE, evidence).as_dict()
    genuine = posterior["FN"] + posterior["TP"]
    imposter = posterior["FP"] + posterior["TN"]
    fnmr = posterior["FN"] / genuine if genuine > 0 else None
    fmr = posterior["FP"] / imposter if imposter > 0 else None
    return fnmr, fmr
