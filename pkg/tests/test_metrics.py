"""Soft accuracy, grounding hits and the CGR/CGW/CGD counts."""

import math

import numpy as np
import pandas as pd
import pytest

from ggebench.core.errors import EvaluationError, ParseError
from ggebench.metrics.grounding import (
    PAIRED_CAPS,
    MetricsReport,
    cap_for_threshold,
    cgr_cgw_cgd,
    grounding_hit,
    sensitive_set,
    soft_accuracy,
    sweep_table,
    sweep_thresholds,
)
from ggebench.metrics.records import PredictionRecord, dump_predictions, load_predictions
from ggebench.report.sink import CSVSink

pytestmark = pytest.mark.unit

ATTENTION = np.array([0.5, 0.3, 0.1, 0.05, 0.05])


def record(score=1.0, attention=ATTENTION, mask_on=(0,), type_id=0) -> PredictionRecord:
    attention = np.asarray(attention, dtype=float)
    mask = np.zeros_like(attention)
    mask[list(mask_on)] = 1.0
    return PredictionRecord(
        pred_index=0, score=score, attention=attention, mask=mask, type_id=type_id
    )


def random_records(seed: int, n: int, n_v: int = 8) -> list[PredictionRecord]:
    rng = np.random.default_rng(seed)
    records = []
    for _ in range(n):
        attention = rng.dirichlet(np.full(n_v, 0.5))
        attention /= attention.sum()
        mask = np.zeros(n_v)
        regions = rng.choice(n_v, size=int(rng.integers(0, 3)), replace=False)
        mask[regions] = 1.0
        records.append(
            PredictionRecord(
                pred_index=int(rng.integers(0, 10)),
                score=float(rng.choice([0.0, 0.3, 0.6, 1.0])),
                attention=attention,
                mask=mask,
                type_id=int(rng.integers(0, 3)),
            )
        )
    return records


def brute_force_hit(attention, mask, t, cap, strict=False) -> bool:
    ranked = sorted(range(len(attention)), key=lambda i: (-attention[i], i))
    chosen = [i for i in ranked if attention[i] >= t][:cap]
    truth = [i for i in range(len(mask)) if mask[i] >= 0.5]
    if not truth:
        return False
    if strict:
        return all(i in chosen for i in truth)
    return any(i in chosen for i in truth)


def brute_force_counts(records, t, cap, strict=False):
    counts = {"n_rp": 0, "n_wp": 0, "n_rg_rp": 0, "n_rg_wp": 0}
    for r in records:
        if not any(m >= 0.5 for m in r.mask):
            continue
        hit = brute_force_hit(list(r.attention), list(r.mask), t, cap, strict)
        if r.score > 0:
            counts["n_rp"] += 1
            counts["n_rg_rp"] += int(hit)
        else:
            counts["n_wp"] += 1
            counts["n_rg_wp"] += int(hit)
    return counts


class TestSoftAccuracy:
    def test_all_right(self):
        overall, _ = soft_accuracy([record(1.0), record(1.0)])
        assert overall == 1.0

    def test_single_partial_credit(self):
        assert soft_accuracy([record(0.6)])[0] == pytest.approx(0.6)

    def test_mean_and_per_type(self):
        records = [
            record(1.0, type_id=0),
            record(0.6, type_id=1),
            record(0.0, type_id=0),
            record(0.3, type_id=1),
        ]
        overall, per_type = soft_accuracy(records)
        assert overall == pytest.approx(0.475)
        assert per_type == pytest.approx({0: 0.5, 1: 0.45})

    def test_empty(self):
        with pytest.raises(EvaluationError):
            soft_accuracy([])


class TestGroundingHit:
    def test_region_above_threshold(self):
        assert grounding_hit(ATTENTION, np.eye(5)[1], 0.2, 4)

    def test_region_below_threshold(self):
        assert not grounding_hit(ATTENTION, np.eye(5)[4], 0.2, 4)

    def test_cap_truncates_sensitive_set(self):
        attention = np.array([0.25, 0.2, 0.15, 0.12, 0.11, 0.1, 0.04, 0.03])
        mask = np.eye(8)[4]
        assert not grounding_hit(attention, mask, 0.1, 4)
        assert grounding_hit(attention, mask, 0.1, 9)

    def test_default_cap_is_paired(self):
        attention = np.array([0.22, 0.21, 0.2, 0.2, 0.17])
        # four regions reach 0.2; the fourth ranked is index 3
        assert grounding_hit(attention, np.eye(5)[3], 0.2)
        assert not grounding_hit(attention, np.eye(5)[4], 0.2)

    def test_empty_mask_never_hits(self):
        assert not grounding_hit(ATTENTION, np.zeros(5), 0.1, 9)

    def test_soft_mask_uses_half_cutoff(self):
        assert grounding_hit(ATTENTION, np.array([0.5, 0, 0, 0, 0]), 0.2, 4)
        assert not grounding_hit(ATTENTION, np.array([0.49, 0, 0, 0, 0]), 0.2, 4)

    def test_any_versus_strict(self):
        mask = np.array([1.0, 0.0, 0.0, 0.0, 1.0])
        assert grounding_hit(ATTENTION, mask, 0.2, 4)
        assert not grounding_hit(ATTENTION, mask, 0.2, 4, strict=True)
        assert grounding_hit(ATTENTION, np.array([1.0, 1.0, 0, 0, 0]), 0.2, 4, strict=True)

    def test_sensitive_set_order(self):
        np.testing.assert_array_equal(sensitive_set(ATTENTION, 0.05, 3), [0, 1, 2])

    @pytest.mark.parametrize("t", [0.0, 1.0, -0.1])
    def test_threshold_range(self, t):
        with pytest.raises(EvaluationError):
            grounding_hit(ATTENTION, np.eye(5)[0], t, 4)

    def test_cap_range(self):
        with pytest.raises(EvaluationError):
            grounding_hit(ATTENTION, np.eye(5)[0], 0.2, 0)

    def test_matches_brute_force(self):
        for r in random_records(0, 200):
            for t in (0.05, 0.1, 0.2, 0.3, 0.4):
                for cap in (1, 2, 4, 9):
                    for strict in (False, True):
                        expected = brute_force_hit(list(r.attention), list(r.mask), t, cap, strict)
                        assert grounding_hit(r.attention, r.mask, t, cap, strict) == expected

    def test_shrinking_sets(self):
        settings = [(t, cap) for t in (0.05, 0.1, 0.2, 0.3, 0.4) for cap in (1, 2, 3, 4, 9)]
        for r in random_records(1, 100):
            for t1, cap1 in settings:
                for t2, cap2 in settings:
                    if t2 >= t1 and cap2 <= cap1 and grounding_hit(r.attention, r.mask, t2, cap2):
                        assert grounding_hit(r.attention, r.mask, t1, cap1)

    def test_inverted_mask_hits_outside_ground_truth(self):
        for r in random_records(2, 100):
            truth = set(np.flatnonzero(r.mask >= 0.5).tolist())
            if len(truth) != 1:
                continue
            chosen = set(sensitive_set(r.attention, 0.2, 4).tolist())
            assert grounding_hit(r.attention, 1.0 - r.mask, 0.2, 4) == bool(chosen - truth)


class TestCaps:
    def test_paired_caps(self):
        assert {t: cap_for_threshold(t) for t in PAIRED_CAPS} == {0.1: 9, 0.2: 4, 0.3: 3, 0.4: 2}

    def test_computed_thresholds_match_paired_within_float_noise(self):
        assert cap_for_threshold(0.1 + 1e-15) == 9
        assert cap_for_threshold(0.30000000000000004) == 3

    @pytest.mark.parametrize("t,cap", [(0.25, 3), (0.5, 1), (0.95, 1), (0.05, 18), (0.15, 6)])
    def test_unlisted_thresholds(self, t, cap):
        assert cap_for_threshold(t) == cap == max(1, math.floor(0.9 / t + 1e-9))


class TestCGD:
    def test_four_way_split(self):
        records = [
            record(1.0, mask_on=(0,)),
            record(1.0, mask_on=(4,)),
            record(0.0, mask_on=(1,)),
            record(0.0, mask_on=(3,)),
        ]
        report = cgr_cgw_cgd(records, 0.2, 4)
        assert (report.cgr, report.cgw, report.cgd) == (50.0, 50.0, 0.0)
        assert (report.n_rp, report.n_wp, report.n_rg_rp, report.n_rg_wp) == (2, 2, 1, 1)
        assert report.n_gradable == 4

    def test_all_right_and_grounded(self):
        report = cgr_cgw_cgd([record(1.0), record(0.6, mask_on=(1,))], 0.2, 4)
        assert (report.cgr, report.cgw, report.cgd) == (100.0, 0.0, 100.0)
        assert report.cgw_undefined and not report.cgr_undefined

    def test_all_wrong(self):
        report = cgr_cgw_cgd([record(0.0)], 0.2, 4)
        assert report.cgr == 0.0 and report.cgr_undefined
        assert report.cgd == -100.0

    def test_partial_credit_is_right(self):
        report = cgr_cgw_cgd([record(0.3)], 0.2, 4)
        assert report.n_rp == 1 and report.n_wp == 0

    def test_ungradable_records_only_count_for_accuracy(self):
        report = cgr_cgw_cgd([record(1.0), record(0.0, mask_on=())], 0.2, 4)
        assert report.n_records == 2
        assert report.n_gradable == 1
        assert report.accuracy == 0.5

    def test_default_cap_follows_threshold(self):
        assert cgr_cgw_cgd([record()], 0.3).cap == 3

    def test_matches_brute_force(self):
        for seed in range(50):
            records = random_records(seed, int(np.random.default_rng(seed).integers(1, 65)))
            for t in (0.1, 0.2, 0.3, 0.4):
                cap = cap_for_threshold(t)
                for strict in (False, True):
                    report = cgr_cgw_cgd(records, t, cap, strict)
                    counts = brute_force_counts(records, t, cap, strict)
                    assert {k: getattr(report, k) for k in counts} == counts
                    assert report.cgd == report.cgr - report.cgw
                    if counts["n_rp"]:
                        expected = 100.0 * counts["n_rg_rp"] / counts["n_rp"]
                        assert report.cgr == pytest.approx(expected)

    def test_permutation_invariant(self):
        records = random_records(3, 40)
        shuffled = [records[i] for i in np.random.default_rng(4).permutation(40)]
        first, second = cgr_cgw_cgd(records), cgr_cgw_cgd(shuffled)
        assert (first.cgr, first.cgw, first.cgd) == (second.cgr, second.cgw, second.cgd)
        assert first.n_rg_rp == second.n_rg_rp and first.n_rg_wp == second.n_rg_wp
        assert first.accuracy == pytest.approx(second.accuracy)

    def test_empty(self):
        with pytest.raises(EvaluationError):
            cgr_cgw_cgd([])


class TestSweep:
    def test_grounded_only_at_low_threshold(self):
        attention = np.array([0.45, 0.4, 0.15])
        reports = sweep_thresholds([record(1.0, attention, mask_on=(2,))])
        assert [r.threshold for r in reports] == [0.1, 0.2, 0.3, 0.4]
        assert [r.cap for r in reports] == [9, 4, 3, 2]
        assert reports[0].cgd == 100.0
        assert reports[-1].cgd < reports[0].cgd

    def test_empty_threshold_list(self):
        assert sweep_thresholds([record()], []) == []
        assert sweep_table([]).empty

    def test_matches_single_threshold_reports(self):
        records = random_records(5, 10)
        for report in sweep_thresholds(records):
            counts = brute_force_counts(records, report.threshold, report.cap)
            assert {k: getattr(report, k) for k in counts} == counts

    def test_table_columns(self):
        table = sweep_table(sweep_thresholds(random_records(6, 10), [0.1, 0.3]))
        assert list(table.columns) == ["threshold", "cap", "cgr", "cgw", "cgd"]
        assert list(table["cap"]) == [9, 3]

    def test_invalid_threshold(self):
        with pytest.raises(EvaluationError):
            sweep_thresholds([record()], [0.2, 1.5])


class TestRecords:
    def test_score_range(self):
        with pytest.raises(EvaluationError):
            record(1.5)

    def test_attention_must_sum_to_one(self):
        with pytest.raises(EvaluationError):
            record(attention=[0.5, 0.3, 0.1])

    def test_length_mismatch(self):
        with pytest.raises(EvaluationError):
            PredictionRecord(0, 1.0, np.array([0.5, 0.5]), np.array([1.0, 0.0, 0.0]))

    def test_attention_sum_tolerance(self):
        assert record(attention=[0.5, 0.5 + 5e-7]).gradable

    def test_dump_and_load(self, tmp_path):
        records = random_records(7, 12)
        dump_predictions(records, tmp_path / "predictions.jsonl")
        loaded = load_predictions(tmp_path / "predictions.jsonl")
        assert [r.to_dict() for r in loaded] == [r.to_dict() for r in records]

    def test_blank_lines_skipped(self, tmp_path):
        path = tmp_path / "predictions.jsonl"
        dump_predictions(random_records(8, 2), path)
        path.write_text(path.read_text().replace("\n", "\n\n"))
        assert len(load_predictions(path)) == 2

    def test_bad_line_reports_number(self, tmp_path):
        path = tmp_path / "predictions.jsonl"
        dump_predictions(random_records(9, 3), path)
        lines = path.read_text().splitlines()
        lines[1] = '{"pred_index": 1, "score": 0.5}'
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(ParseError) as excinfo:
            load_predictions(path)
        assert excinfo.value.line == 2

    def test_invalid_attention_reports_number(self, tmp_path):
        path = tmp_path / "predictions.jsonl"
        path.write_text(
            '{"pred_index": 0, "score": 1.0, "attention": [0.5, 0.5], "mask": [1, 0]}\n'
            '{"pred_index": 0, "score": 1.0, "attention": [0.9, 0.5], "mask": [1, 0]}\n'
        )
        with pytest.raises(ParseError) as excinfo:
            load_predictions(path)
        assert excinfo.value.line == 2

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_predictions(tmp_path / "absent.jsonl")


class TestReportRows:
    def test_row_flattens_per_type(self):
        report = cgr_cgw_cgd(random_records(10, 20))
        row = report.to_row()
        assert "per_type_accuracy" not in row
        assert {f"acc_type_{t}" for t in report.per_type_accuracy} <= set(row)

    def test_csv_round_trip(self, tmp_path):
        report = cgr_cgw_cgd(random_records(11, 30), 0.3)
        CSVSink().write([report.to_row()], tmp_path / "metrics.csv")
        frame = pd.read_csv(tmp_path / "metrics.csv", float_precision="round_trip")
        restored = MetricsReport.from_row(frame.to_dict(orient="records")[0])
        assert restored == report
