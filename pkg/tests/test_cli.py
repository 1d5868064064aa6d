# -*- coding: utf-8 -*-
"""Тесты командной строки: analyze, ingest, study, predict"""

import hashlib
import json
import time

import pandas as pd
import pytest

from cli import main
from synthetic_data import (
    dataset_with_counts, lcom_control_dataset, opposite_sign_dataset, preprocessing_fixture, write_dataset_csv,
)

EXPECTED_METRICS_CSV = (
    "name,wmc,dit,lcom,iwmc,hcc\n"
    "AddressTransformer,1,1,1.0000,0,1\n"
    "CustomerTransformer,1,2,1.0000,1,2\n"
    "OrderDetailsTransformer,1,4,1.0000,3,4\n"
    "OrderTransformer,1,3,1.0000,2,3\n"
)


def bundle_digests(root):
    return {
        str(path.relative_to(root)): hashlib.sha256(path.read_bytes()).hexdigest()
        for path in sorted(root.rglob("*")) if path.is_file()
    }


@pytest.fixture
def two_datasets(tmp_path):
    return [
        write_dataset_csv(opposite_sign_dataset(300, seed=1, source="tiny"), tmp_path / "data" / "tiny.csv"),
        write_dataset_csv(dataset_with_counts(200, 60, seed=2, source="promise"), tmp_path / "data" / "promise.csv"),
    ]


# ANALYZE

def test_analyze_transformer_fixtures(tmp_path, transformers_dir):
    out = tmp_path / "out"
    started = time.perf_counter()
    assert main(["analyze", str(transformers_dir), "--out", str(out)]) == 0
    assert time.perf_counter() - started < 1.0
    assert (out / "metrics.csv").read_text(encoding="utf-8") == EXPECTED_METRICS_CSV
    corpus = json.loads((out / "corpus.json").read_text(encoding="utf-8"))
    assert [c["qualified_name"] for c in corpus] == [
        "AddressTransformer", "CustomerTransformer", "OrderDetailsTransformer", "OrderTransformer",
    ]


def test_analyze_empty_directory(tmp_path, capsys):
    source = tmp_path / "empty"
    source.mkdir()
    assert main(["analyze", str(source), "--out", str(tmp_path / "out")]) == 0
    assert (tmp_path / "out" / "metrics.csv").read_text(encoding="utf-8") == "name,wmc,dit,lcom,iwmc,hcc\n"
    assert "⚠️" in capsys.readouterr().out


def test_analyze_malformed_file(tmp_path, capsys, write_java):
    write_java("Good.java", "class Good { }")
    bad = write_java("Bad.java", "class Bad {\n    void f() {\n        int x = ;\n    }\n}\n")
    assert main(["analyze", str(bad.parent), "--out", str(tmp_path / "out")]) == 2
    output = capsys.readouterr().out
    assert f"{bad}:3" in output
    assert not (tmp_path / "out" / "metrics.csv").exists()


def test_analyze_missing_directory(tmp_path):
    assert main(["analyze", str(tmp_path / "nope"), "--out", str(tmp_path / "out")]) == 2


# INGEST

def test_ingest_writes_samples_and_counts(tmp_path):
    dataset = write_dataset_csv(preprocessing_fixture(), tmp_path / "fixture.csv")
    out = tmp_path / "out"
    assert main(["ingest", str(dataset), "--out", str(out)]) == 0
    counts = json.loads((out / "stage_counts.json").read_text(encoding="utf-8"))
    assert counts == {"removed_no_inheritance": 3, "removed_unlabeled": 2, "remaining": 5}
    summary = json.loads((out / "summary.json").read_text(encoding="utf-8"))
    assert (summary["total"], summary["faulty"]) == (5, 3)
    assert len(pd.read_csv(out / "samples.csv")) == 5


def test_ingest_with_column_map(tmp_path):
    dataset = tmp_path / "renamed.csv"
    dataset.write_text("cls,w,d,l,i,faults\nA,1,2,0.5,3,1\nB,2,2,0.1,1,0\n", encoding="utf-8")
    args = ["ingest", str(dataset), "--out", str(tmp_path / "out"), "--map", "name=cls,wmc=w,dit=d,lcom=l,iwmc=i,bug=faults"]
    assert main(args) == 0
    assert main(["ingest", str(dataset), "--out", str(tmp_path / "out2")]) == 2


def test_ingest_everything_filtered_is_data_error(tmp_path):
    dataset = tmp_path / "flat.csv"
    dataset.write_text("name,wmc,dit,lcom,iwmc,bug\nA,1,1,0.5,0,1\n", encoding="utf-8")
    assert main(["ingest", str(dataset), "--out", str(tmp_path / "out")]) == 1


# STUDY

def test_study_two_datasets_adds_unified(tmp_path, two_datasets):
    out = tmp_path / "study"
    assert main(["study", *map(str, two_datasets), "--out", str(out), "--max-iterations", "300"]) == 0

    report = json.loads((out / "study_report.json").read_text(encoding="utf-8"))
    assert [s["dataset"] for s in report["studies"]] == ["tiny", "promise", "unified"]
    assert report["studies"][2]["summary"]["total"] == 500
    for name in ("tiny", "promise", "unified"):
        for artifact in ("samples.csv", "stage_counts.json", "correlation.csv", "model_R1.json", "model_R2.json",
                         "density_hcc.csv", "study.json"):
            assert (out / name / artifact).exists()
    markdown = (out / "study_report.md").read_text(encoding="utf-8")
    assert "unified faulty" in markdown
    assert report["config"]["seed"] == 1
    assert report["config"]["train_fraction"] == 0.7
    assert report["config"]["c_parameter"] == 1.0
    assert report["config"]["loss"] == "mean_hinge"
    assert "(mean_hinge)" in markdown


def test_study_single_dataset_has_no_unified(tmp_path, two_datasets):
    out = tmp_path / "study"
    assert main(["study", str(two_datasets[0]), "--out", str(out), "--max-iterations", "200"]) == 0
    report = json.loads((out / "study_report.json").read_text(encoding="utf-8"))
    assert [s["dataset"] for s in report["studies"]] == ["tiny"]
    assert not (out / "unified").exists()


def test_study_bundle_is_hash_stable(tmp_path, two_datasets):
    runs = []
    for name in ("first", "second"):
        out = tmp_path / name
        assert main(["study", *map(str, two_datasets), "--out", str(out), "--seed", "3", "--max-iterations", "200"]) == 0
        runs.append(bundle_digests(out))
    assert runs[0] == runs[1]
    assert "study_report.json" in runs[0]


def test_study_opposite_sign_generator(tmp_path):
    dataset = write_dataset_csv(opposite_sign_dataset(2000, seed=1), tmp_path / "opposite.csv")
    control = write_dataset_csv(lcom_control_dataset(2000, seed=1), tmp_path / "control.csv")
    out = tmp_path / "study"

    started = time.perf_counter()
    assert main(["study", str(dataset), "--out", str(out)]) == 0
    assert time.perf_counter() - started < 30.0
    runs = json.loads((out / "study_report.json").read_text(encoding="utf-8"))["studies"][0]
    accuracy = runs["classification"]["representations"]
    assert accuracy["R2"]["accuracy"] > accuracy["R1"]["accuracy"]

    assert main(["study", str(control), "--out", str(tmp_path / "control")]) == 0
    runs = json.loads((tmp_path / "control" / "study_report.json").read_text(encoding="utf-8"))["studies"][0]
    accuracy = runs["classification"]["representations"]
    assert abs(accuracy["R2"]["accuracy"] - accuracy["R1"]["accuracy"]) <= 0.03


def test_study_rejects_bad_parameters(tmp_path, two_datasets):
    assert main(["study", str(two_datasets[0]), "--out", str(tmp_path), "--train-fraction", "1.5"]) == 2
    assert main(["study", str(two_datasets[0]), "--out", str(tmp_path), "--c", "0"]) == 2


def test_study_missing_columns(tmp_path):
    dataset = tmp_path / "broken.csv"
    dataset.write_text("name,wmc\nA,1\n", encoding="utf-8")
    assert main(["study", str(dataset), "--out", str(tmp_path / "out")]) == 2


# PREDICT

def test_predict_with_demo_model(tmp_path, transformers_dir, demo_model_path):
    analyzed = tmp_path / "analyzed"
    assert main(["analyze", str(transformers_dir), "--out", str(analyzed)]) == 0
    out = tmp_path / "predicted"
    assert main(["predict", str(demo_model_path), str(analyzed / "metrics.csv"), "--out", str(out)]) == 0

    predictions = pd.read_csv(out / "predictions.csv")
    assert list(predictions.columns) == ["name", "prediction", "decision_value"]
    row = predictions.set_index("name").loc["OrderDetailsTransformer"]
    assert row["prediction"] == "non-faulty"
    assert row["decision_value"] == pytest.approx(-0.0283, abs=1e-4)


def test_predict_empty_csv(tmp_path, demo_model_path):
    metrics = tmp_path / "metrics.csv"
    metrics.write_text("name,wmc,dit,lcom,iwmc,hcc\n", encoding="utf-8")
    assert main(["predict", str(demo_model_path), str(metrics), "--out", str(tmp_path / "out")]) == 0
    assert (tmp_path / "out" / "predictions.csv").read_text(encoding="utf-8") == "name,prediction,decision_value\n"


def test_predict_missing_feature_column(tmp_path, demo_model_path, capsys):
    metrics = tmp_path / "metrics.csv"
    metrics.write_text("name,wmc,lcom,iwmc,hcc\nA,1,1.0,0,1\n", encoding="utf-8")
    assert main(["predict", str(demo_model_path), str(metrics), "--out", str(tmp_path / "out")]) == 2
    assert "dit" in capsys.readouterr().out


def test_ingest_non_utf8_dataset(tmp_path):
    dataset = tmp_path / "latin.csv"
    dataset.write_bytes("name,wmc,dit,lcom,iwmc,bug\nCafé,1,2,0.1,2,1\n".encode("latin-1"))
    assert main(["ingest", str(dataset), "--out", str(tmp_path / "out")]) == 2
