"""Shared test utilities: random network generation, the brute-force
inference oracle, and synthetic dataset builders."""

from __future__ import annotations

import itertools
import random

from biaslens.beliefnet import (
    BeliefNetwork,
    CPT,
    CategoricalDistribution,
    brute_force_joint,
)
from biaslens.dataset import (
    AttributeSchema,
    Dataset,
    PredictionRecord,
    SubjectAttributes,
    candidate_sort_key,
)
from biaslens.metrics import DecisionPolicy

# Policy under which the pattern-based synthetic records below realize their
# intended confusion outcomes (see make_record).
PATTERN_POLICY = DecisionPolicy(kind="score_threshold", theta=0.5, top_k="all")

FILLERS = [f"fill-{i:02d}" for i in range(6)]


def make_record(probe_id: str, true_label: str, kind: str, fillers=FILLERS,
                offset: int = 0) -> PredictionRecord:
    """A record whose outcome under PATTERN_POLICY is fixed by `kind`.

    hit: true label matched, nothing else (softmax top ~1.0).
    miss: nothing matched, true label unlisted -> one false non-match.
    extra: true label and one filler tie at probability 0.5 -> a true match
    plus one false match.
    """
    f = [fillers[(offset + i) % len(fillers)] for i in range(3)]
    if kind == "hit":
        candidates = [(true_label, 12.0), (f[0], 0.0), (f[1], 0.0)]
    elif kind == "miss":
        candidates = [(f[0], 5.0), (f[1], 4.9), (f[2], 4.8)]
    elif kind == "extra":
        candidates = [(true_label, 8.0), (f[0], 8.0)]
    else:
        raise ValueError(kind)
    return PredictionRecord(
        probe_id=probe_id,
        true_label=true_label,
        candidates=tuple(sorted(candidates, key=candidate_sort_key)),
    )


def product_form_dataset(rng: random.Random, max_attributes: int = 3) -> Dataset:
    """Synthetic dataset whose attribute joint factorizes exactly.

    Per-value integer weights give each full attribute combination
    weight-product many records, so the empirical joint equals the product
    of the empirical marginals. Outcomes per record are random patterns.
    """
    n_attrs = rng.randint(2, max_attributes)
    attrs = []
    for i in range(n_attrs):
        n_vals = rng.randint(2, 3)
        attrs.append((f"a{i}", tuple(f"v{j}" for j in range(n_vals))))
    schema = AttributeSchema(attributes=tuple(attrs))
    weights = {
        name: {v: rng.randint(1, 2) for v in domain} for name, domain in attrs
    }
    subjects = {}
    records = []
    for combo in itertools.product(*(domain for _, domain in attrs)):
        sid = "subj-" + "-".join(combo)
        subjects[sid] = SubjectAttributes(
            subject_id=sid,
            values={name: v for (name, _), v in zip(attrs, combo)},
        )
        count = 1
        for (name, _), v in zip(attrs, combo):
            count *= weights[name][v]
        for i in range(count):
            kind = rng.choice(["hit", "hit", "miss", "extra"])
            records.append(
                make_record(f"{sid}-{i}", sid, kind, offset=rng.randint(0, 5))
            )
    gallery = frozenset(subjects) | frozenset(FILLERS)
    return Dataset(schema=schema, subjects=subjects, records=tuple(records),
                   gallery=gallery)


def random_network(rng: random.Random, max_nodes: int = 8,
                   max_states: int = 7, state_cap: int = 20000) -> BeliefNetwork:
    """Random DAG with random strictly-positive CPTs, capped in joint size."""
    n = rng.randint(2, max_nodes)
    while True:
        sizes = [rng.randint(2, max_states) for _ in range(n)]
        product = 1
        for s in sizes:
            product *= s
        if product <= state_cap:
            break
    names = [f"n{i}" for i in range(n)]
    nodes = {names[i]: tuple(f"v{j}" for j in range(sizes[i])) for i in range(n)}
    cpts = {}
    for i, name in enumerate(names):
        parents = tuple(names[j] for j in range(i) if rng.random() < 0.4)
        table = {}
        for assignment in itertools.product(*(nodes[p] for p in parents)):
            raw = [rng.random() + 1e-6 for _ in nodes[name]]
            z = sum(raw)
            table[assignment] = CategoricalDistribution(
                labels=nodes[name], probabilities=tuple(x / z for x in raw)
            )
        cpts[name] = CPT(child=name, parents=parents, table=table)
    return BeliefNetwork(nodes=nodes, cpts=cpts)


def oracle_posterior(net: BeliefNetwork, query: str,
                     evidence: dict[str, str]) -> dict[str, float]:
    """Posterior by full enumeration of the joint; independent of infer()."""
    order = net.node_order()
    index = {name: i for i, name in enumerate(order)}
    joint = brute_force_joint(net)
    marginal = dict.fromkeys(net.nodes[query], 0.0)
    for assignment, p in joint.items():
        if all(assignment[index[n]] == v for n, v in evidence.items()):
            marginal[assignment[index[query]]] += p
    z = sum(marginal.values())
    if z == 0:
        raise ZeroDivisionError("evidence has probability 0")
    return {v: marginal[v] / z for v in marginal}


def random_query_evidence(rng: random.Random, net: BeliefNetwork):
    names = list(net.nodes)
    query = rng.choice(names)
    others = [n for n in names if n != query]
    k = rng.randint(0, min(2, len(others)))
    evidence = {n: rng.choice(net.nodes[n]) for n in rng.sample(others, k)}
    return query, evidence
