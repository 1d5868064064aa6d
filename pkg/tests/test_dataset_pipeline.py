# -*- coding: utf-8 -*-
"""Тесты загрузки наборов данных и предобработки"""

import json

import pytest

from dataset_pipeline import (
    LabeledSample, PreprocessConfig, RawRow, balance_classes, merge_datasets, parse_column_mapping,
    preprocess, preprocess_with_counts, read_dataset, summarize, write_samples_csv, write_stage_report,
)
from metric_errors import (
    CellTypeError, EmptyDatasetError, IdentityViolationError, MissingColumnError, SourceEncodingError,
)
from synthetic_data import dataset_with_counts, preprocessing_fixture, write_dataset_csv


def write_csv(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def test_missing_hcc_is_derived(tmp_path):
    path = write_csv(tmp_path, "name,wmc,dit,lcom,iwmc,bug\nReplace,19,4,0.7777,21,1\n")
    (row,) = read_dataset(path)
    assert row.hcc == 40
    assert row.iwmc == 21
    assert row.lcom == pytest.approx(0.7777)


def test_missing_iwmc_is_derived(tmp_path):
    path = write_csv(tmp_path, "name,wmc,dit,lcom,hcc,bug\nFlat,5,1,0.5,5,0\n")
    (row,) = read_dataset(path)
    assert row.iwmc == 0


def test_empty_bug_cell_means_unlabeled(tmp_path):
    path = write_csv(tmp_path, "name,wmc,dit,lcom,iwmc,hcc,bug\nA,1,2,0.1,2,3,\n")
    (row,) = read_dataset(path)
    assert row.bug is None


def test_integral_floats_and_quoted_fields(tmp_path):
    path = write_csv(tmp_path, 'name,wmc,dit,lcom,iwmc,hcc,bug\n"org.a.B, inner",3.0,2,0.25,4,7,2\n')
    (row,) = read_dataset(path)
    assert row.name == "org.a.B, inner"
    assert row.wmc == 3
    assert row.bug == 2


def test_identity_violations_are_listed(tmp_path):
    path = write_csv(
        tmp_path,
        "name,wmc,dit,lcom,iwmc,hcc,bug\nOk,1,2,0.1,2,3,0\nBad,2,2,0.1,2,9,0\nWorse,4,2,0.1,1,1,1\n",
    )
    with pytest.raises(IdentityViolationError) as excinfo:
        read_dataset(path)
    assert [(r[0], r[1]) for r in excinfo.value.rows] == [(2, "Bad"), (3, "Worse")]


def test_bad_cell_reports_row_and_column(tmp_path):
    path = write_csv(tmp_path, "name,wmc,dit,lcom,iwmc,bug\nA,1,2,0.1,2,0\nB,x,2,0.1,2,0\n")
    with pytest.raises(CellTypeError) as excinfo:
        read_dataset(path)
    assert excinfo.value.row_index == 2
    assert excinfo.value.column == "wmc"


@pytest.mark.parametrize("row, column", [
    ("A,1,0,0.1,2,0", "dit"),
    ("A,1,-2,0.1,2,0", "dit"),
    ("A,1,2,-0.5,2,0", "lcom"),
])
def test_out_of_range_metrics_are_rejected(tmp_path, row, column):
    path = write_csv(tmp_path, f"name,wmc,dit,lcom,iwmc,bug\nOk,1,1,0.0,0,0\n{row}\n")
    with pytest.raises(CellTypeError) as excinfo:
        read_dataset(path)
    assert excinfo.value.row_index == 2
    assert excinfo.value.column == column


def test_non_utf8_dataset_is_input_error(tmp_path):
    path = tmp_path / "latin.csv"
    path.write_bytes("name,wmc,dit,lcom,iwmc,bug\nCafé,1,2,0.1,2,0\n".encode("latin-1"))
    with pytest.raises(SourceEncodingError) as excinfo:
        read_dataset(path)
    assert excinfo.value.exit_code == 2


def test_missing_columns(tmp_path):
    path = write_csv(tmp_path, "name,wmc,lcom,bug\nA,1,0.1,0\n")
    with pytest.raises(MissingColumnError) as excinfo:
        read_dataset(path)
    assert "dit" in excinfo.value.columns
    assert "iwmc|hcc" in excinfo.value.columns


def test_column_mapping_and_aliases(tmp_path):
    path = write_csv(tmp_path, "class,WMC,DIT,LCOM,IWMC,defects\nA,2,2,0.3,1,4\n")
    (row,) = read_dataset(path)
    assert (row.name, row.wmc, row.iwmc, row.hcc, row.bug) == ("A", 2, 1, 3, 4)

    mapped = write_csv(tmp_path, "cls,w,d,l,i,faults\nB,1,3,0.2,5,0\n", "mapped.csv")
    mapping = parse_column_mapping("name=cls,wmc=w,dit=d,lcom=l,iwmc=i,bug=faults")
    (row,) = read_dataset(mapped, mapping)
    assert (row.name, row.hcc, row.bug) == ("B", 6, 0)


def test_bad_mapping_text():
    with pytest.raises(ValueError):
        parse_column_mapping("bug")


@pytest.mark.parametrize("bug, label", [(0, 0), (1, 1), (5, 1)])
def test_binarization(bug, label):
    (sample,) = preprocess([RawRow(name="A", wmc=1, dit=2, lcom=0.1, iwmc=2, hcc=3, bug=bug)])
    assert sample.label == label


def test_preprocessing_fixture_stage_counts(tmp_path):
    samples, counts = preprocess_with_counts(preprocessing_fixture())
    assert len(samples) == 5
    assert (counts.removed_no_inheritance, counts.removed_unlabeled, counts.remaining) == (3, 2, 5)

    path = write_stage_report(counts, tmp_path / "stage_counts.json")
    assert json.loads(path.read_text(encoding="utf-8")) == {
        "removed_no_inheritance": 3, "removed_unlabeled": 2, "remaining": 5,
    }


def test_preprocess_is_idempotent():
    once = preprocess(preprocessing_fixture())
    assert preprocess(once) == once


def test_preprocess_commutes_with_merge():
    a = preprocessing_fixture()
    b = dataset_with_counts(8, 3, seed=2)
    assert preprocess(merge_datasets(a, b)) == preprocess(a) + preprocess(b)


def test_keep_rows_without_inheritance():
    samples = preprocess(preprocessing_fixture(), PreprocessConfig(drop_no_inheritance=False))
    assert len(samples) == 8


def test_nothing_survives():
    rows = [RawRow(name="Flat", wmc=3, dit=1, lcom=0.0, iwmc=0, hcc=3, bug=1)]
    with pytest.raises(EmptyDatasetError):
        preprocess(rows)


def test_merge_keeps_provenance():
    a = dataset_with_counts(3, 1, source="tiny")
    b = dataset_with_counts(5, 2, source="promise")
    merged = merge_datasets(a, b)
    assert len(merged) == 8
    assert [r.source for r in merged] == ["tiny"] * 3 + ["promise"] * 5
    assert merge_datasets(a, []) == a


@pytest.mark.parametrize("total, faulty, faulty_pct, non_faulty_pct", [
    (1151, 211, 18.33, 81.67),
    (3473, 1440, 41.46, 58.54),
    (4624, 1651, 35.71, 64.29),
])
def test_dataset_proportions(total, faulty, faulty_pct, non_faulty_pct):
    summary = summarize(preprocess(dataset_with_counts(total, faulty)))
    assert (summary.total, summary.faulty, summary.non_faulty) == (total, faulty, total - faulty)
    assert summary.faulty_pct == pytest.approx(faulty_pct, abs=0.01)
    assert summary.non_faulty_pct == pytest.approx(non_faulty_pct, abs=0.01)
    assert summary.faulty_pct + summary.non_faulty_pct == pytest.approx(100.0, abs=0.01)
    assert abs(summary.faulty_pct - 100.0 * faulty / total) <= 0.005


def test_summary_all_faulty_and_empty():
    samples = [LabeledSample(name="A", features={}, label=1)]
    summary = summarize(samples)
    assert (summary.faulty_pct, summary.non_faulty_pct) == (100.0, 0.0)
    with pytest.raises(EmptyDatasetError):
        summarize([])


def test_balance_classes_downsamples_majority():
    samples = preprocess(dataset_with_counts(50, 10))
    balanced = balance_classes(samples, seed=1)
    assert sum(s.label for s in balanced) == 10
    assert len(balanced) == 20
    assert balance_classes(samples, seed=1) == balanced
    positions = [samples.index(s) for s in balanced]
    assert positions == sorted(positions)


def test_samples_csv_layout(tmp_path):
    path = write_samples_csv(preprocess(preprocessing_fixture()), tmp_path / "samples.csv")
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "name,wmc,iwmc,hcc,lcom,dit,bug"
    assert lines[1] == "fixture.B,5,4,9,0.5000,2,0"


def test_dataset_csv_without_hcc_reads_back(tmp_path):
    rows = dataset_with_counts(20, 5)
    path = write_dataset_csv(rows, tmp_path / "no_hcc.csv", include_hcc=False)
    assert [(r.name, r.hcc, r.bug) for r in read_dataset(path)] == [(r.name, r.hcc, r.bug) for r in rows]
