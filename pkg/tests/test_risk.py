import pytest

from biaslens.dataset import SubjectAttributes
from biaslens.errors import DegenerateRateError, ValidationError
from biaslens.fixtures import BENCHMARK_GROUP_RATES
from biaslens.metrics import DecisionPolicy
from biaslens.reports import risk_document, to_json
from biaslens.risk import (
    ImpactProfile,
    RiskEntry,
    ensemble_risk,
    risk_of_bias,
    risk_report,
    whatif_sweep,
)

UNIT = ImpactProfile(1.0, 1.0)


def benchmark_entries(profile: ImpactProfile) -> list[RiskEntry]:
    entries = []
    for (attribute, value), (_, fnmr, fmr) in BENCHMARK_GROUP_RATES.items():
        if attribute == "baseline":
            continue
        entries.append(RiskEntry(attribute=attribute, value=value,
                                 risk=risk_of_bias(fnmr, fmr, profile),
                                 fnmr=fnmr, fmr=fmr))
    return entries


class TestRiskOfBias:
    def test_baseline_golden(self):
        assert risk_of_bias(0.0941, 0.0001, UNIT) == pytest.approx(0.0942, abs=1e-12)

    def test_gender_goldens(self):
        assert risk_of_bias(0.1233, 0.0003, UNIT) == pytest.approx(0.1236, abs=1e-12)
        assert risk_of_bias(0.0749, 0.0001, UNIT) == pytest.approx(0.0750, abs=1e-12)

    def test_1930s_at_ten_to_one(self):
        # the FMR impact multiplies the FMR as the formula states:
        # 10 * 0.0012 + 1 * 0.0208 = 0.0328
        profile = ImpactProfile(impact_fmr=10.0, impact_fnmr=1.0)
        assert risk_of_bias(0.0208, 0.0012, profile) == pytest.approx(0.0328, abs=1e-12)

    def test_absent_rate_rejected(self):
        with pytest.raises(DegenerateRateError):
            risk_of_bias(None, 0.1, UNIT)
        with pytest.raises(DegenerateRateError):
            risk_of_bias(0.1, None, UNIT)

    def test_rates_out_of_range_rejected(self):
        with pytest.raises(ValidationError):
            risk_of_bias(1.5, 0.0, UNIT)
        with pytest.raises(ValidationError):
            risk_of_bias(0.0, -0.1, UNIT)

    def test_profile_validation(self):
        with pytest.raises(ValidationError):
            ImpactProfile(-1.0, 1.0)
        with pytest.raises(ValidationError):
            ImpactProfile(float("inf"), 1.0)


class TestEnsembleRisk:
    def test_single_attribute_schema(self):
        subject = SubjectAttributes("s", {"grp": "A"})
        entries = [RiskEntry("grp", "A", risk=0.25, fnmr=0.2, fmr=0.05)]
        assert ensemble_risk(subject, entries) == 0.25

    def test_subject_15_profile(self):
        # hand sum over the published rows at unit impacts:
        #   Male            0.0749 + 0.0001 = 0.0750
        #   1970s           0.1124 + 0.0003 = 0.1127
        #   Asian           0.0664 + 0.0003 = 0.0667
        #   glasses False   0.0923 + 0.0001 = 0.0924
        #   beard False     0.0976 + 0.0001 = 0.0977
        #   mustache False  0.0947 + 0.0001 = 0.0948
        #   total                           = 0.5393
        subject = SubjectAttributes("15", {
            "yob_decade": "1970s", "gender": "Male", "ethnicity": "Asian",
            "glasses": "False", "beard": "False", "mustache": "False",
        })
        total = ensemble_risk(subject, benchmark_entries(UNIT))
        assert total == pytest.approx(0.5393, abs=1e-12)

    def test_zero_error_groups_contribute_zero(self):
        subject = SubjectAttributes("s", {"x": "a", "y": "b"})
        entries = [
            RiskEntry("x", "a", risk=0.0, fnmr=0.0, fmr=0.0),
            RiskEntry("y", "b", risk=0.0, fnmr=0.0, fmr=0.0),
        ]
        assert ensemble_risk(subject, entries) == 0.0

    def test_permutation_invariance(self):
        subject = SubjectAttributes("15", {
            "yob_decade": "1970s", "gender": "Male", "ethnicity": "Asian",
            "glasses": "False", "beard": "False", "mustache": "False",
        })
        entries = benchmark_entries(UNIT)
        assert ensemble_risk(subject, list(reversed(entries))) == ensemble_risk(
            subject, entries
        )

    def test_missing_and_duplicate_entries(self):
        subject = SubjectAttributes("s", {"grp": "A"})
        with pytest.raises(ValidationError):
            ensemble_risk(subject, [])
        dup = [RiskEntry("grp", "A", 0.1, 0.1, 0.0),
               RiskEntry("grp", "A", 0.2, 0.2, 0.0)]
        with pytest.raises(ValidationError):
            ensemble_risk(subject, dup)


class TestRiskReport:
    def test_benchmark_gender_risks(self, benchmark_dataset, benchmark_policy):
        report = risk_report(benchmark_dataset, benchmark_policy, UNIT)
        assert report.entry_for("gender", "Female").risk == pytest.approx(
            0.1236, abs=1e-4
        )
        assert report.entry_for("gender", "Male").risk == pytest.approx(
            0.0750, abs=1e-4
        )
        assert report.baseline_risk == pytest.approx(0.0942, abs=1e-4)

    def test_single_group_collapse(self, benchmark_dataset, benchmark_policy):
        # every non-gender attribute has a single populated value, so those
        # entries all equal the baseline risk
        report = risk_report(benchmark_dataset, benchmark_policy, UNIT)
        for attribute in ("yob_decade", "ethnicity", "glasses", "beard", "mustache"):
            entries = [e for e in report.entries if e.attribute == attribute]
            assert len(entries) == 1
            assert entries[0].risk == pytest.approx(report.baseline_risk, abs=1e-15)
        # ensemble = gender risk + 5 * baseline risk for each subject
        female = report.entry_for("gender", "Female").risk
        assert report.ensemble["fem-01"] == pytest.approx(
            female + 5 * report.baseline_risk, abs=1e-12
        )

    def test_doubling_impacts_doubles_everything(self, benchmark_dataset,
                                                 benchmark_policy):
        one = risk_report(benchmark_dataset, benchmark_policy, UNIT)
        two = risk_report(benchmark_dataset, benchmark_policy, ImpactProfile(2.0, 2.0))
        assert two.baseline_risk == pytest.approx(2 * one.baseline_risk, rel=1e-12)
        for a, b in zip(one.entries, two.entries):
            assert b.risk == pytest.approx(2 * a.risk, rel=1e-12)
        for sid in one.ensemble:
            assert two.ensemble[sid] == pytest.approx(2 * one.ensemble[sid], rel=1e-12)

    def test_exclusions_for_empty_groups(self, benchmark_dataset, benchmark_policy):
        report = risk_report(benchmark_dataset, benchmark_policy, UNIT)
        empty = [x for x in report.exclusions if x.kind == "group"]
        assert all("no records" in x.reason for x in empty)
        # every female/male value is populated, so no gender exclusions
        assert not any(x.attribute == "gender" for x in empty)

    def test_degenerate_group_excludes_subject(self):
        # single-candidate records with top_k=1 leave no imposter trials
        from biaslens.dataset import AttributeSchema, Dataset, PredictionRecord

        schema = AttributeSchema(attributes=(("grp", ("A", "B")),))
        subjects = {"a": SubjectAttributes("a", {"grp": "A"}),
                    "b": SubjectAttributes("b", {"grp": "B"})}
        records = (PredictionRecord("p1", "a", (("a", 3.0),)),)
        ds = Dataset(schema=schema, subjects=subjects, records=records,
                     gallery=frozenset({"a", "b"}))
        report = risk_report(ds, DecisionPolicy(top_k=1), UNIT)
        assert report.entries == ()
        assert report.ensemble == {}
        reasons = {x.kind for x in report.exclusions}
        assert "group" in reasons and "subject" in reasons

    def test_report_determinism(self, benchmark_dataset, benchmark_policy):
        a = risk_report(benchmark_dataset, benchmark_policy, UNIT)
        b = risk_report(benchmark_dataset, benchmark_policy, UNIT)
        assert to_json(risk_document(a)) == to_json(risk_document(b))

    def test_footnote_names_the_impact_convention(self, benchmark_dataset,
                                                  benchmark_policy):
        report = risk_report(benchmark_dataset, benchmark_policy, UNIT)
        assert any("impact_fmr" in note for note in report.footnotes)


class TestWhatifSweep:
    def test_single_point_equals_risk_report(self, benchmark_dataset,
                                             benchmark_policy):
        points = whatif_sweep(benchmark_dataset, [UNIT],
                              [benchmark_policy.theta], policy=benchmark_policy)
        assert len(points) == 1
        direct = risk_report(benchmark_dataset, benchmark_policy, UNIT)
        assert risk_document(points[0].report) == risk_document(direct)

    def test_theta_grid_monotone_fnmr(self, benchmark_dataset):
        policy = DecisionPolicy(kind="score_threshold", theta=0.0)
        points = whatif_sweep(benchmark_dataset, [UNIT], [0.0, 0.5, 0.9],
                              policy=policy)
        for key in [("gender", "Female"), ("gender", "Male")]:
            fnmrs = [p.report.entry_for(*key).fnmr for p in points]
            assert fnmrs == sorted(fnmrs)

    def test_impact_grid_difference_is_nine_fmr(self, benchmark_dataset,
                                                benchmark_policy):
        points = whatif_sweep(
            benchmark_dataset,
            [ImpactProfile(1.0, 1.0), ImpactProfile(10.0, 1.0)],
            [benchmark_policy.theta],
            policy=benchmark_policy,
        )
        base, ten = points[0].report, points[1].report
        for entry in base.entries:
            other = ten.entry_for(entry.attribute, entry.value)
            assert other.risk - entry.risk == pytest.approx(9 * entry.fmr, rel=1e-9,
                                                            abs=1e-15)

    def test_empty_grid_rejected(self, benchmark_dataset):
        with pytest.raises(ValidationError):
            whatif_sweep(benchmark_dataset, [], [0.0])
        with pytest.raises(ValidationError):
            whatif_sweep(benchmark_dataset, [UNIT], [])

    def test_order_preserved(self, benchmark_dataset, benchmark_policy):
        profiles = [ImpactProfile(1.0, 1.0), ImpactProfile(10.0, 1.0)]
        thetas = [0.5, 0.9]
        points = whatif_sweep(benchmark_dataset, profiles, thetas,
                              policy=benchmark_policy)
        assert [(p.profile.impact_fmr, p.theta) for p in points] == [
            (1.0, 0.5), (1.0, 0.9), (10.0, 0.5), (10.0, 0.9),
        ]


def test_linearity_in_profile_scaling():
    for fnmr, fmr in [(0.1, 0.01), (0.0941, 0.0001), (0.0, 0.0)]:
        base = risk_of_bias(fnmr, fmr, ImpactProfile(2.0, 3.0))
        scaled = risk_of_bias(fnmr, fmr, ImpactProfile(2.0, 3.0).scaled(4.0))
        assert scaled == pytest.approx(4.0 * base, rel=1e-12, abs=1e-15)
