"""Prediction-log and subject-attribute ingestion.

The dataset is the single source of truth for the rest of the package: a
validated, immutable bundle of ranked identification records, per-subject
bias attributes, and the gallery of known identities.

File formats:

* predictions: UTF-8 CSV with header ``probe_id,true_label,rank,candidate_label,score``,
  long format, one row per (probe, candidate). ``rank`` is 1-based and must
  agree with the score ordering after the deterministic tie-break.
* attributes: UTF-8 CSV with header ``subject_id,<attr>,...`` where the
  attribute columns follow the schema order. Booleans are spelled
  ``True`` / ``False``.
* schema: JSON object ``{"attributes": [{"name": ..., "domain": [...]}]}``.

Score ties within a record are broken by ascending candidate label, so the
candidate order (and therefore every rank) is total and deterministic.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

from .errors import ParseError, ValidationError

YOB_DECADES = ("1920s", "1930s", "1940s", "1950s", "1960s", "1970s", "1980s")
GENDERS = ("Male", "Female")
ETHNICITIES = (
    "Asian",
    "Black-or-African-American",
    "Hispanic",
    "Native-American",
    "Other",
    "Pacific-Islander",
    "White",
)
BOOL_LABELS = ("True", "False")

PREDICTIONS_HEADER = ["probe_id", "true_label", "rank", "candidate_label", "score"]


@dataclass(frozen=True)
class AttributeSchema:
    """Ordered list of bias attributes, each with a closed label domain."""

    attributes: tuple[tuple[str, tuple[str, ...]], ...]

    def __post_init__(self):
        names = [name for name, _ in self.attributes]
        if len(set(names)) != len(names):
            raise ValidationError("attribute names must be unique")
        for name, domain in self.attributes:
            if len(set(domain)) < 2:
                raise ValidationError(
                    f"attribute {name!r} needs at least 2 distinct labels"
                )
            if len(set(domain)) != len(domain):
                raise ValidationError(f"attribute {name!r} has duplicate labels")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.attributes)

    def domain(self, attribute: str) -> tuple[str, ...]:
        for name, domain in self.attributes:
            if name == attribute:
                return domain
        raise ValidationError(f"unknown attribute {attribute!r}")

    def has(self, attribute: str) -> bool:
        return attribute in self.names

    def to_json(self) -> str:
        doc = {
            "attributes": [
                {"name": name, "domain": list(domain)} for name, domain in self.attributes
            ]
        }
        return json.dumps(doc, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str | bytes) -> "AttributeSchema":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid schema JSON: {exc}", source="schema") from exc
        if not isinstance(doc, dict) or "attributes" not in doc:
            raise ParseError('schema JSON must be an object with an "attributes" list',
                             source="schema")
        attrs = []
        for entry in doc["attributes"]:
            try:
                attrs.append((str(entry["name"]), tuple(str(v) for v in entry["domain"])))
            except (TypeError, KeyError) as exc:
                raise ParseError(f"malformed schema attribute entry: {entry!r}",
                                 source="schema") from exc
        return cls(attributes=tuple(attrs))


def default_schema() -> AttributeSchema:
    """The six-attribute schema used throughout: birth decade, gender,
    ethnicity, and the three binary facial features."""
    return AttributeSchema(
        attributes=(
            ("yob_decade", YOB_DECADES),
            ("gender", GENDERS),
            ("ethnicity", ETHNICITIES),
            ("glasses", BOOL_LABELS),
            ("beard", BOOL_LABELS),
            ("mustache", BOOL_LABELS),
        )
    )


@dataclass(frozen=True)
class SubjectAttributes:
    """Attribute values for one enrolled subject."""

    subject_id: str
    values: dict[str, str]

    def validate(self, schema: AttributeSchema) -> None:
        for name in schema.names:
            if name not in self.values:
                raise ValidationError(
                    f"subject {self.subject_id!r} is missing attribute {name!r}"
                )
            value = self.values[name]
            if value not in schema.domain(name):
                raise ValidationError(
                    f"subject {self.subject_id!r}: label {value!r} is not in the "
                    f"domain of attribute {name!r}"
                )
        extra = set(self.values) - set(schema.names)
        if extra:
            raise ValidationError(
                f"subject {self.subject_id!r} has values for unknown attributes {sorted(extra)}"
            )


def candidate_sort_key(candidate: tuple[str, float]):
    label, score = candidate
    return (-score, label)


@dataclass(frozen=True)
class PredictionRecord:
    """One probe image's ranked candidate identities with raw scores."""

    probe_id: str
    true_label: str
    candidates: tuple[tuple[str, float], ...]

    def __post_init__(self):
        if not self.candidates:
            raise ValidationError(f"probe {self.probe_id!r} has no candidates")
        labels = [label for label, _ in self.candidates]
        if len(set(labels)) != len(labels):
            raise ValidationError(f"probe {self.probe_id!r} lists a candidate twice")
        for label, score in self.candidates:
            if not math.isfinite(score):
                raise ValidationError(
                    f"probe {self.probe_id!r}: non-finite score for {label!r}"
                )
        ordered = tuple(sorted(self.candidates, key=candidate_sort_key))
        if ordered != self.candidates:
            raise ValidationError(
                f"probe {self.probe_id!r}: candidates are not in rank order"
            )

    @property
    def rank1(self) -> str:
        return self.candidates[0][0]

    def rank_of(self, label: str) -> int | None:
        """1-based rank of a label in the candidate list, None if absent."""
        for i, (cand, _) in enumerate(self.candidates):
            if cand == label:
                return i + 1
        return None


@dataclass(frozen=True)
class Dataset:
    """Immutable bundle of schema, subjects, prediction records, and gallery."""

    schema: AttributeSchema
    subjects: dict[str, SubjectAttributes]
    records: tuple[PredictionRecord, ...]
    gallery: frozenset[str]

    def __post_init__(self):
        if len(self.gallery) < 2:
            raise ValidationError("gallery must contain at least 2 identities")
        for key, subject in self.subjects.items():
            if key != subject.subject_id:
                raise ValidationError(
                    f"subject map key {key!r} does not match id {subject.subject_id!r}"
                )
            subject.validate(self.schema)
        for record in self.records:
            if record.true_label not in self.gallery:
                raise ValidationError(
                    f"probe {record.probe_id!r}: true label {record.true_label!r} "
                    "is not in the gallery"
                )
            if record.true_label not in self.subjects:
                raise ValidationError(
                    f"probe {record.probe_id!r}: no attribute entry for subject "
                    f"{record.true_label!r}"
                )
            for label, _ in record.candidates:
                if label not in self.gallery:
                    raise ValidationError(
                        f"probe {record.probe_id!r}: candidate {label!r} is not in "
                        "the gallery"
                    )

    def subject_of(self, record: PredictionRecord) -> SubjectAttributes:
        return self.subjects[record.true_label]


def _text_lines(source) -> list[str]:
    """Coerce bytes / str / file-like input to a list of text lines."""
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str):
        text = source
    elif hasattr(source, "read"):
        raw = source.read()
        text = raw.decode("utf-8") if isinstance(raw, bytes) else raw
    else:
        raise TypeError(f"unsupported source type {type(source)!r}")
    return text.splitlines()


def _parse_attributes(source, schema: AttributeSchema) -> dict[str, SubjectAttributes]:
    lines = _text_lines(source)
    reader = csv.reader(lines)
    expected = ["subject_id", *schema.names]
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty attributes file", source="attributes") from None
    if header != expected:
        raise ParseError(
            f"bad header {header!r}, expected {expected!r}", line=1, source="attributes"
        )
    subjects: dict[str, SubjectAttributes] = {}
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(expected):
            raise ParseError(
                f"expected {len(expected)} fields, got {len(row)}",
                line=lineno,
                source="attributes",
            )
        subject_id, *values = row
        if subject_id in subjects:
            raise ParseError(
                f"duplicate subject {subject_id!r}", line=lineno, source="attributes"
            )
        mapping = {}
        for name, value in zip(schema.names, values):
            if value not in schema.domain(name):
                raise ParseError(
                    f"label {value!r} is not in the domain of attribute {name!r}",
                    line=lineno,
                    source="attributes",
                )
            mapping[name] = value
        subjects[subject_id] = SubjectAttributes(subject_id=subject_id, values=mapping)
    return subjects


def _parse_predictions(source) -> list[PredictionRecord]:
    lines = _text_lines(source)
    reader = csv.reader(lines)
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty predictions file", source="predictions") from None
    if header != PREDICTIONS_HEADER:
        raise ParseError(
            f"bad header {header!r}, expected {PREDICTIONS_HEADER!r}",
            line=1,
            source="predictions",
        )
    # probe_id -> (true_label, [(rank, label, score)], first line)
    probes: dict[str, tuple[str, list[tuple[int, str, float]], int]] = {}
    order: list[str] = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 5:
            raise ParseError(
                f"expected 5 fields, got {len(row)}", line=lineno, source="predictions"
            )
        probe_id, true_label, rank_text, candidate, score_text = row
        try:
            rank = int(rank_text)
        except ValueError:
            raise ParseError(
                f"rank {rank_text!r} is not an integer", line=lineno, source="predictions"
            ) from None
        try:
            score = float(score_text)
        except ValueError:
            raise ParseError(
                f"score {score_text!r} is not a number", line=lineno, source="predictions"
            ) from None
        if not math.isfinite(score):
            raise ParseError(
                f"score {score_text!r} is not finite", line=lineno, source="predictions"
            )
        if rank < 1:
            raise ParseError(f"rank must be >= 1, got {rank}", line=lineno,
                             source="predictions")
        if probe_id not in probes:
            probes[probe_id] = (true_label, [], lineno)
            order.append(probe_id)
        stored_true, rows, _ = probes[probe_id]
        if stored_true != true_label:
            raise ParseError(
                f"probe {probe_id!r} has conflicting true labels "
                f"{stored_true!r} and {true_label!r}",
                line=lineno,
                source="predictions",
            )
        if any(label == candidate for _, label, _ in rows):
            raise ParseError(
                f"duplicate (probe, candidate) pair ({probe_id!r}, {candidate!r})",
                line=lineno,
                source="predictions",
            )
        rows.append((rank, candidate, score))

    records = []
    for probe_id in order:
        true_label, rows, first_line = probes[probe_id]
        ordered = sorted(((label, score) for _, label, score in rows),
                         key=candidate_sort_key)
        stated = {rank: label for rank, label, _ in rows}
        if sorted(stated) != list(range(1, len(rows) + 1)):
            raise ParseError(
                f"probe {probe_id!r}: ranks are not 1..{len(rows)}",
                line=first_line,
                source="predictions",
            )
        for position, (label, _) in enumerate(ordered, start=1):
            if stated[position] != label:
                raise ParseError(
                    f"probe {probe_id!r}: rank {position} is {stated[position]!r} "
                    f"but score order (after tie-break) puts {label!r} there",
                    line=first_line,
                    source="predictions",
                )
        records.append(
            PredictionRecord(probe_id=probe_id, true_label=true_label,
                             candidates=tuple(ordered))
        )
    return records


def parse_dataset(predictions_source, attributes_source, schema: AttributeSchema) -> Dataset:
    """Parse and cross-validate the two CSV sources into a Dataset.

    The gallery is the union of the attribute file's subject ids and every
    identity named in the predictions file. Parsing is deterministic and the
    prediction row order is preserved.
    """
    subjects = _parse_attributes(attributes_source, schema)
    records = _parse_predictions(predictions_source)
    gallery = set(subjects)
    for record in records:
        gallery.add(record.true_label)
        gallery.update(label for label, _ in record.candidates)
    return Dataset(
        schema=schema,
        subjects=subjects,
        records=tuple(records),
        gallery=frozenset(gallery),
    )


def serialize_dataset(dataset: Dataset) -> tuple[str, str, str]:
    """Render a dataset back to canonical (predictions, attributes, schema) text.

    Predictions keep record order with candidates in rank order; attribute
    rows are sorted by subject id. parse(serialize(d)) == d up to gallery
    members that appear in no file (there are none for parsed datasets).
    """
    pred = io.StringIO()
    writer = csv.writer(pred, lineterminator="\n")
    writer.writerow(PREDICTIONS_HEADER)
    for record in dataset.records:
        for rank, (label, score) in enumerate(record.candidates, start=1):
            writer.writerow([record.probe_id, record.true_label, rank, label, repr(score)])

    attr = io.StringIO()
    writer = csv.writer(attr, lineterminator="\n")
    writer.writerow(["subject_id", *dataset.schema.names])
    for subject_id in sorted(dataset.subjects):
        subject = dataset.subjects[subject_id]
        writer.writerow([subject_id, *(subject.values[n] for n in dataset.schema.names)])

    return pred.getvalue(), attr.getvalue(), dataset.schema.to_json()


def attribute_slice(dataset: Dataset, attribute: str, value: str) -> Dataset:
    """Restrict records to probes whose true subject has the given value.

    Schema, subjects, and gallery are unchanged, so trial universes (and
    therefore imposter denominators) stay comparable across slices.
    """
    if not dataset.schema.has(attribute):
        raise ValidationError(f"unknown attribute {attribute!r}")
    if value not in dataset.schema.domain(attribute):
        raise ValidationError(
            f"label {value!r} is not in the domain of attribute {attribute!r}"
        )
    kept = tuple(
        record
        for record in dataset.records
        if dataset.subjects[record.true_label].values[attribute] == value
    )
    return Dataset(
        schema=dataset.schema,
        subjects=dataset.subjects,
        records=kept,
        gallery=dataset.gallery,
    )
