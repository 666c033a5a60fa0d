"""Bundled demo data.

Three small datasets used by the test suite, the README walkthrough, and
the operator console demo:

* demo_identification_log: 11 probes with their top-3 scored candidates,
  8 of them correct at rank 1.
* prior_demo_dataset: 10,000 single-candidate records whose gender and
  glasses frequencies are exactly 0.6383/0.3617 and 0.1425/0.8575.
* benchmark_session_dataset: an engineered log whose gender-group error
  rates under a score threshold of 0.5 reproduce the published benchmark
  gender rows to 4 decimals (Female FNMR 0.1233 / FMR 0.0003, Male 0.0749
  / 0.0001, baseline risk 0.0942 at unit impacts).

BENCHMARK_GROUP_RATES carries the published per-group accuracy/FNMR/FMR
table that the golden risk tests check against.
"""

from __future__ import annotations

import csv
import io

from .dataset import (
    AttributeSchema,
    Dataset,
    PredictionRecord,
    SubjectAttributes,
    candidate_sort_key,
    default_schema,
    parse_dataset,
)

# (attribute, value) -> (accuracy, fnmr, fmr); "baseline" keys the overall row.
BENCHMARK_GROUP_RATES: dict[tuple[str, str], tuple[float, float, float]] = {
    ("baseline", "all"): (0.9163, 0.0941, 0.0001),
    ("gender", "Female"): (0.8908, 0.1233, 0.0003),
    ("gender", "Male"): (0.9308, 0.0749, 0.0001),
    ("yob_decade", "1920s"): (1.0000, 0.0000, 0.0000),
    ("yob_decade", "1930s"): (0.9697, 0.0208, 0.0012),
    ("yob_decade", "1940s"): (0.9667, 0.0443, 0.0004),
    ("yob_decade", "1950s"): (0.9513, 0.0625, 0.0003),
    ("yob_decade", "1960s"): (0.9122, 0.1020, 0.0004),
    ("yob_decade", "1970s"): (0.8873, 0.1124, 0.0003),
    ("yob_decade", "1980s"): (0.8235, 0.1875, 0.0105),
    ("ethnicity", "Asian"): (0.9424, 0.0664, 0.0003),
    ("ethnicity", "Black-or-African-American"): (0.9195, 0.0984, 0.0014),
    ("ethnicity", "Hispanic"): (0.8254, 0.1981, 0.0033),
    ("ethnicity", "Native-American"): (1.0000, 0.0000, 0.0000),
    ("ethnicity", "Other"): (1.0000, 0.0000, 0.0000),
    ("ethnicity", "Pacific-Islander"): (1.0000, 0.0000, 0.0000),
    ("ethnicity", "White"): (0.9119, 0.0965, 0.0002),
    ("glasses", "False"): (0.9214, 0.0923, 0.0001),
    ("glasses", "True"): (0.8859, 0.1028, 0.0009),
    ("beard", "False"): (0.9134, 0.0976, 0.0001),
    ("beard", "True"): (0.9615, 0.0357, 0.0007),
    ("mustache", "False"): (0.9144, 0.0947, 0.0001),
    ("mustache", "True"): (0.9328, 0.0891, 0.0008),
}

# subject -> (yob_decade, gender, ethnicity, glasses, beard, mustache,
#             [(candidate, score) x 3])
DEMO_LOG_ROWS = [
    ("15", "1970s", "Male", "Asian", "False", "False", "False",
     [("15", 11.8175), ("913", 7.9727), ("612", 7.5015)]),
    ("189", "1970s", "Female", "Asian", "False", "False", "False",
     [("189", 15.7484), ("434", 8.5322), ("566", 6.9052)]),
    ("143", "1970s", "Female", "Hispanic", "False", "False", "False",
     [("143", 12.1884), ("402", 6.6154), ("763", 5.4235)]),
    ("295", "1980s", "Female", "Black-or-African-American", "False", "False", "False",
     [("295", 14.4057), ("364", 6.6878), ("808", 6.2970)]),
    ("561", "1940s", "Male", "Asian", "False", "False", "False",
     [("561", 10.4680), ("187", 6.6516), ("695", 6.0315)]),
    ("917", "1940s", "Female", "Hispanic", "False", "False", "False",
     [("917", 10.5805), ("251", 6.8186), ("972", 6.5261)]),
    ("948", "1950s", "Male", "White", "False", "False", "True",
     [("948", 10.7142), ("330", 5.4853), ("962", 5.1746)]),
    ("684", "1930s", "Male", "Asian", "False", "False", "False",
     [("684", 7.7132), ("501", 6.3049), ("775", 5.7674)]),
    ("0", "1940s", "Male", "White", "True", "False", "False",
     [("457", 8.0854), ("0", 6.7735), ("348", 6.3287)]),
    ("774", "1950s", "Female", "White", "False", "False", "False",
     [("704", 9.4579), ("801", 7.3339), ("942", 7.0282)]),
    ("255", "1960s", "Female", "White", "False", "False", "False",
     [("924", 8.8947), ("255", 7.0531), ("270", 6.9886)]),
]


def demo_log_files() -> tuple[str, str, str]:
    """(predictions_csv, attributes_csv, schema_json) for the 11-probe demo."""
    schema = default_schema()
    pred = io.StringIO()
    writer = csv.writer(pred, lineterminator="\n")
    writer.writerow(["probe_id", "true_label", "rank", "candidate_label", "score"])
    for subject, *_rest, candidates in DEMO_LOG_ROWS:
        for rank, (label, score) in enumerate(candidates, start=1):
            writer.writerow([f"probe-{subject}", subject, rank, label, f"{score:.4f}"])

    attr = io.StringIO()
    writer = csv.writer(attr, lineterminator="\n")
    writer.writerow(["subject_id", *schema.names])
    for subject, yob, gender, ethnicity, glasses, beard, mustache, _ in DEMO_LOG_ROWS:
        writer.writerow([subject, yob, gender, ethnicity, glasses, beard, mustache])

    return pred.getvalue(), attr.getvalue(), schema.to_json()


def demo_identification_log() -> Dataset:
    predictions, attributes, schema_json = demo_log_files()
    return parse_dataset(predictions, attributes, AttributeSchema.from_json(schema_json))


def _constant_attrs(gender: str, glasses: str = "False") -> dict[str, str]:
    return {
        "yob_decade": "1970s",
        "gender": gender,
        "ethnicity": "Asian",
        "glasses": glasses,
        "beard": "False",
        "mustache": "False",
    }


def prior_demo_dataset() -> Dataset:
    """10,000 records hitting gender 6383/3617 and glasses 1425/8575 exactly.

    Joint split: male+glasses 910, male 5473, female+glasses 515, female 3102.
    Each record is a trivially-correct single-candidate prediction; only the
    attribute frequencies matter.
    """
    cells = [
        ("pm-g", "Male", "True", 910),
        ("pm-n", "Male", "False", 5473),
        ("pf-g", "Female", "True", 515),
        ("pf-n", "Female", "False", 3102),
    ]
    subjects = {
        sid: SubjectAttributes(subject_id=sid, values=_constant_attrs(gender, glasses))
        for sid, gender, glasses, _ in cells
    }
    records = []
    for sid, _, _, count in cells:
        for i in range(count):
            records.append(PredictionRecord(
                probe_id=f"{sid}-{i:04d}", true_label=sid,
                candidates=((sid, 10.0),),
            ))
    return Dataset(
        schema=default_schema(),
        subjects=subjects,
        records=tuple(records),
        gallery=frozenset(subjects),
    )


# Record mix for the engineered benchmark dataset. With 40 imposters per
# record (gallery 41) and a 0.5 score threshold:
#   Female: 900 records, 111 misses, 10 extra matches
#       -> FNMR 111/900 = 0.1233..., FMR 10/36000 = 0.0002777...
#   Male: 1375 records, 103 misses, 3 extra matches
#       -> FNMR 103/1375 = 0.07490..., FMR 3/55000 = 0.0000545...
#   Baseline: FNMR 214/2275 = 0.09406..., FMR 13/91000 = 0.0001428...
# All six rates plus the three unit-impact risks (0.1236, 0.0750, 0.0942)
# round to the published 4-decimal values.
BENCHMARK_MIX = {
    "Female": {"subject": "fem-01", "total": 900, "miss": 111, "extra": 10},
    "Male": {"subject": "mal-01", "total": 1375, "miss": 103, "extra": 3},
}
BENCHMARK_FILLERS = [f"id-{i:02d}" for i in range(3, 42)]  # 39 fillers, gallery 41
BENCHMARK_THETA = 0.5


def benchmark_session_dataset() -> Dataset:
    """Engineered dataset reproducing the benchmark gender rows at 4 decimals.

    Evaluate with DecisionPolicy("score_threshold", theta=0.5, top_k="all").
    Record shapes (softmax probabilities vs the 0.5 threshold):

    * hit: [true 12.0, filler 0.0, filler 0.0] -> only the true label clears.
    * miss: [filler 5.0, filler 4.9, filler 4.8] -> nothing clears, true
      label unlisted (probability 0) -> one false non-match.
    * hit+extra: [true 8.0, filler 8.0] -> both at exactly 0.5, so the true
      label matches and the filler is one false match.
    """
    subjects = {
        spec["subject"]: SubjectAttributes(
            subject_id=spec["subject"], values=_constant_attrs(gender)
        )
        for gender, spec in BENCHMARK_MIX.items()
    }
    fillers = BENCHMARK_FILLERS
    records = []
    for gender, spec in BENCHMARK_MIX.items():
        sid = spec["subject"]
        hits = spec["total"] - spec["miss"] - spec["extra"]
        n = 0
        for i in range(hits):
            f1 = fillers[(2 * i) % len(fillers)]
            f2 = fillers[(2 * i + 1) % len(fillers)]
            candidates = sorted([(sid, 12.0), (f1, 0.0), (f2, 0.0)],
                                key=candidate_sort_key)
            records.append(PredictionRecord(
                probe_id=f"{sid}-{n:05d}", true_label=sid,
                candidates=tuple(candidates)))
            n += 1
        for i in range(spec["miss"]):
            f1, f2, f3 = (fillers[(3 * i + j) % len(fillers)] for j in range(3))
            candidates = sorted([(f1, 5.0), (f2, 4.9), (f3, 4.8)],
                                key=candidate_sort_key)
            records.append(PredictionRecord(
                probe_id=f"{sid}-{n:05d}", true_label=sid,
                candidates=tuple(candidates)))
            n += 1
        for i in range(spec["extra"]):
            f1 = fillers[i % len(fillers)]
            candidates = sorted([(sid, 8.0), (f1, 8.0)], key=candidate_sort_key)
            records.append(PredictionRecord(
                probe_id=f"{sid}-{n:05d}", true_label=sid,
                candidates=tuple(candidates)))
            n += 1
    gallery = frozenset(subjects) | frozenset(fillers)
    return Dataset(
        schema=default_schema(),
        subjects=subjects,
        records=tuple(records),
        gallery=gallery,
    )


def benchmark_session_files() -> tuple[str, str, str]:
    """Canonical file renderings of benchmark_session_dataset."""
    from .dataset import serialize_dataset

    return serialize_dataset(benchmark_session_dataset())
