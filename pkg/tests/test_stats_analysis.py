# -*- coding: utf-8 -*-
"""Тесты корреляций Пирсона и оценок плотности"""

import numpy as np
import pytest

from dataset_pipeline import LabeledSample, RawRow
from metric_errors import DegenerateColumnError, EmptyDatasetError, EmptyGroupError, LengthMismatchError
from report_charts import render_correlation_heatmap, render_density_chart
from stats_analysis import (
    bug_count_statistics, correlation_matrix, density_by_label, kde, pearson, write_correlation_csv,
    write_density_csv,
)


def make_samples(columns, labels):
    names = list(columns)
    return [
        LabeledSample(name=f"S{i}", features={n: float(columns[n][i]) for n in names}, label=int(label))
        for i, label in enumerate(labels)
    ]


def local_maxima(values):
    return int(np.sum((values[1:-1] > values[:-2]) & (values[1:-1] > values[2:])))


def test_pearson_self_and_anti_correlation():
    x = np.random.RandomState(1).normal(size=50)
    assert pearson(x, x) == 1.0
    assert pearson(x, -x) == -1.0


def test_pearson_closed_form_value():
    assert pearson([1, 2, 3, 4], [2, 1, 4, 3]) == pytest.approx(0.6, abs=1e-12)


def test_pearson_affine_invariance():
    rng = np.random.RandomState(3)
    x, y = rng.normal(size=40), rng.normal(size=40)
    assert pearson(3.5 * x + 7.0, y) == pytest.approx(pearson(x, y), abs=1e-9)


def test_pearson_errors():
    with pytest.raises(LengthMismatchError):
        pearson([1, 2, 3], [1, 2])
    with pytest.raises(DegenerateColumnError):
        pearson([1, 1, 1], [1, 2, 3])
    with pytest.raises(DegenerateColumnError):
        pearson([1], [2])


def test_correlation_matrix_affine_dependence():
    iwmc = np.arange(10)
    samples = make_samples({"hcc": iwmc + 4, "iwmc": iwmc}, [0, 1] * 5)
    matrix = correlation_matrix(samples, ["hcc", "iwmc"])
    assert matrix.value("hcc", "iwmc") == pytest.approx(1.0)


def test_correlation_matrix_independent_columns():
    rng = np.random.RandomState(1)
    wmc = rng.randint(1, 40, size=500)
    iwmc = rng.permutation(rng.randint(1, 40, size=500))
    matrix = correlation_matrix(make_samples({"wmc": wmc, "iwmc": iwmc}, [0] * 500), ["wmc", "iwmc"])
    assert abs(matrix.value("wmc", "iwmc")) < 0.3


def test_correlation_matrix_structure_and_degenerate_column(tmp_path):
    rng = np.random.RandomState(7)
    columns = {"a": rng.normal(size=30), "b": rng.normal(size=30), "c": rng.normal(size=30), "flat": np.ones(30)}
    matrix = correlation_matrix(make_samples(columns, [0] * 30), list(columns))

    values = matrix.values
    for i in range(4):
        for j in range(4):
            assert values[i][j] == values[j][i]
    assert [values[i][i] for i in range(3)] == [1.0, 1.0, 1.0]
    assert matrix.degenerate == ("flat",)
    assert all(v is None for v in values[3])

    path = write_correlation_csv(matrix, tmp_path / "correlation.csv")
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "feature,a,b,c,flat"
    assert lines[1].startswith("a,1.00,")
    assert lines[4] == "flat,NA,NA,NA,NA"

    png = render_correlation_heatmap(matrix, tmp_path / "correlation.png")
    assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_kde_standard_normal():
    values = np.random.RandomState(1).normal(size=1000)
    curve = kde(values, grid_size=512)
    assert curve.integral() == pytest.approx(1.0, abs=0.02)
    assert abs(curve.grid[np.argmax(curve.density)]) < 0.2
    assert np.all(curve.density >= 0)
    assert curve.bandwidth == pytest.approx(np.std(values, ddof=1) * 1000 ** (-0.2))


def test_kde_grid_spans_four_bandwidths():
    curve = kde([1.0, 2.0, 4.0, 7.0], grid_size=64)
    assert curve.grid[0] == pytest.approx(1.0 - 4 * curve.bandwidth)
    assert curve.grid[-1] == pytest.approx(7.0 + 4 * curve.bandwidth)
    assert len(curve.grid) == 64


def test_kde_translation_equivariance():
    values = np.random.RandomState(2).normal(size=100)
    base = kde(values)
    shifted = kde(values + 5.0)
    np.testing.assert_allclose(shifted.grid, base.grid + 5.0, atol=1e-9)
    np.testing.assert_allclose(shifted.density, base.density, atol=1e-9)


def test_kde_two_clusters_have_two_maxima():
    rng = np.random.RandomState(4)
    values = np.concatenate([rng.normal(-10, 1, 200), rng.normal(10, 1, 200)])
    assert local_maxima(kde(values).density) == 2


def test_kde_constant_input():
    with pytest.raises(DegenerateColumnError):
        kde([3.0, 3.0, 3.0])


def test_density_by_label_scaled_peaks(tmp_path):
    rng = np.random.RandomState(1)
    hcc = np.concatenate([rng.normal(20, 5, 211), rng.normal(20, 5, 940)])
    labels = [1] * 211 + [0] * 940
    faulty, non_faulty = density_by_label(make_samples({"hcc": hcc}, labels), "hcc")

    np.testing.assert_array_equal(faulty.grid, non_faulty.grid)
    assert faulty.share == pytest.approx(0.1833, abs=1e-4)
    assert non_faulty.scaled().peak() > faulty.scaled().peak()
    assert faulty.integral() == pytest.approx(1.0, abs=0.02)
    assert non_faulty.scaled().group_label == "non-faulty_scaled"

    curves = [faulty, non_faulty, faulty.scaled(), non_faulty.scaled()]
    path = write_density_csv(curves, tmp_path / "density.csv")
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "grid,density,label"
    assert len(lines) == 1 + 4 * len(faulty.grid)
    grid_cell, density_cell, _ = lines[1].split(",")
    assert len(grid_cell.split(".")[1]) == 4
    assert len(density_cell.split(".")[1]) == 4
    assert render_density_chart(curves[2:], tmp_path / "density.png").exists()


def test_density_identical_groups():
    values = [1.0, 2.0, 2.5, 4.0, 6.0]
    samples = make_samples({"wmc": values * 2}, [1] * 5 + [0] * 5)
    faulty, non_faulty = density_by_label(samples, "wmc")
    np.testing.assert_array_equal(faulty.density, non_faulty.density)


def test_density_missing_group():
    samples = make_samples({"wmc": [1, 2, 3]}, [0, 0, 0])
    with pytest.raises(EmptyGroupError) as excinfo:
        density_by_label(samples, "wmc")
    assert excinfo.value.group == "faulty"


def test_bug_count_statistics():
    rows = [RawRow(name=str(i), wmc=1, dit=1, lcom=0.0, iwmc=1, hcc=2, bug=b) for i, b in enumerate([0, 2, 4, None])]
    stats = bug_count_statistics(rows)
    assert (stats.labeled, stats.mean, stats.maximum) == (3, 2.0, 4)
    assert stats.std == pytest.approx(np.std([0, 2, 4]))
    with pytest.raises(EmptyDatasetError):
        bug_count_statistics(rows[3:])
