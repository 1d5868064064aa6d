#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Разведочный анализ: корреляции Пирсона между признаками,
оценки плотности (KDE) для дефектных и бездефектных классов
"""

import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.integrate import trapezoid
from scipy.stats import gaussian_kde

from metric_errors import DegenerateColumnError, EmptyDatasetError, EmptyGroupError, LengthMismatchError
from study_config import CORRELATION_DECIMALS, KDE_GRID_BANDWIDTHS, KDE_GRID_SIZE, REPORT_DECIMALS

logger = logging.getLogger(__name__)

FAULTY = "faulty"
NON_FAULTY = "non-faulty"


@dataclass(frozen=True)
class CorrelationMatrix:
    feature_names: Tuple[str, ...]
    # None - ячейка недоступна (вырожденная колонка)
    values: Tuple[Tuple[Optional[float], ...], ...]
    degenerate: Tuple[str, ...] = ()

    def value(self, a: str, b: str) -> Optional[float]:
        return self.values[self.feature_names.index(a)][self.feature_names.index(b)]

    def to_json(self, decimals=CORRELATION_DECIMALS) -> dict:
        return {
            "features": list(self.feature_names),
            "values": [[None if v is None else round(v, decimals) for v in row] for row in self.values],
            "degenerate": list(self.degenerate),
        }


@dataclass(frozen=True)
class DensityCurve:
    grid: np.ndarray
    density: np.ndarray
    bandwidth: float
    group_label: str
    # доля группы в выборке (для наложения кривых с учетом пропорций)
    share: float = 1.0

    def integral(self) -> float:
        return float(trapezoid(self.density, self.grid))

    def peak(self) -> float:
        return float(np.max(self.density))

    def scaled(self) -> "DensityCurve":
        """Кривая, умноженная на долю группы"""
        return replace(self, density=self.density * self.share, group_label=f"{self.group_label}_scaled")


@dataclass(frozen=True)
class BugCountStatistics:
    labeled: int
    mean: float
    std: float
    maximum: int

    def to_json(self) -> dict:
        return {"labeled": self.labeled, "mean": self.mean, "std": self.std, "max": self.maximum}


def _as_vector(values, name="") -> np.ndarray:
    vector = np.asarray(values, dtype=float)
    if vector.ndim != 1:
        raise DegenerateColumnError(name, "ожидается одномерный вектор")
    return vector


def pearson(x, y, x_name="x", y_name="y") -> float:
    """
    Коэффициент корреляции Пирсона

    Raises:
        LengthMismatchError: векторы разной длины
        DegenerateColumnError: меньше двух значений или нулевая дисперсия
    """
    x = _as_vector(x, x_name)
    y = _as_vector(y, y_name)
    if len(x) != len(y):
        raise LengthMismatchError(len(x), len(y))
    if len(x) < 2:
        raise DegenerateColumnError(x_name, "нужно хотя бы два значения")

    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(np.sum(dx * dx))
    syy = float(np.sum(dy * dy))
    if sxx == 0.0:
        raise DegenerateColumnError(x_name)
    if syy == 0.0:
        raise DegenerateColumnError(y_name)

    r = float(np.sum(dx * dy)) / np.sqrt(sxx * syy)
    return float(np.clip(r, -1.0, 1.0))


def _feature_column(samples, feature) -> np.ndarray:
    return np.array([s.features[feature] for s in samples], dtype=float)


def correlation_matrix(samples, feature_names: Sequence[str]) -> CorrelationMatrix:
    """
    Попарные корреляции Пирсона

    Вырожденные колонки не прерывают расчет: их ячейки помечаются None.
    """
    names = tuple(feature_names)
    if len(samples) < 2:
        raise DegenerateColumnError(", ".join(names), "нужно хотя бы два образца")

    columns = {name: _feature_column(samples, name) for name in names}
    degenerate = tuple(name for name in names if np.ptp(columns[name]) == 0)
    for name in degenerate:
        logger.warning(f"Колонка {name} вырождена (нулевая дисперсия), корреляции недоступны")

    size = len(names)
    values: List[List[Optional[float]]] = [[None] * size for _ in range(size)]
    for i in range(size):
        if names[i] in degenerate:
            continue
        values[i][i] = 1.0
        for j in range(i + 1, size):
            if names[j] in degenerate:
                continue
            r = pearson(columns[names[i]], columns[names[j]], names[i], names[j])
            values[i][j] = r
            values[j][i] = r

    return CorrelationMatrix(
        feature_names=names,
        values=tuple(tuple(row) for row in values),
        degenerate=degenerate,
    )


def write_correlation_csv(matrix: CorrelationMatrix, path, decimals=CORRELATION_DECIMALS) -> Path:
    """Матрица с именами признаков в заголовке и первой колонке; недоступные ячейки - NA"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(
        [["NA" if v is None else f"{v:.{decimals}f}" for v in row] for row in matrix.values],
        index=list(matrix.feature_names),
        columns=list(matrix.feature_names),
    )
    frame.to_csv(path, index_label="feature", lineterminator="\n")
    return path


def _bandwidth(estimator: gaussian_kde) -> float:
    return float(np.sqrt(estimator.covariance[0, 0]))


def _estimator(values: np.ndarray, name: str) -> gaussian_kde:
    if len(values) < 2:
        raise DegenerateColumnError(name, "нужно хотя бы два значения")
    if np.ptp(values) == 0:
        raise DegenerateColumnError(name)
    return gaussian_kde(values, bw_method="scott")


def kde(values, grid_size: int = KDE_GRID_SIZE, group_label: str = "", name: str = "") -> DensityCurve:
    """
    Гауссова KDE с шириной окна по правилу Скотта (n^(-1/5) * sigma)

    Сетка равномерная, [min - 4h, max + 4h].
    """
    values = _as_vector(values, name)
    estimator = _estimator(values, name)
    h = _bandwidth(estimator)
    grid = np.linspace(values.min() - KDE_GRID_BANDWIDTHS * h, values.max() + KDE_GRID_BANDWIDTHS * h, grid_size)
    return DensityCurve(grid=grid, density=estimator(grid), bandwidth=h, group_label=group_label)


def density_by_label(samples, feature: str, grid_size: int = KDE_GRID_SIZE) -> Tuple[DensityCurve, DensityCurve]:
    """
    Кривые плотности признака для дефектных и бездефектных классов на общей сетке

    Returns:
        (faulty, non_faulty); share каждой кривой - доля группы в выборке

    Raises:
        EmptyGroupError: одна из групп пуста
    """
    faulty = np.array([s.features[feature] for s in samples if s.label == 1], dtype=float)
    non_faulty = np.array([s.features[feature] for s in samples if s.label == 0], dtype=float)
    if len(faulty) == 0:
        raise EmptyGroupError(FAULTY)
    if len(non_faulty) == 0:
        raise EmptyGroupError(NON_FAULTY)

    estimators = (_estimator(faulty, f"{feature}/{FAULTY}"), _estimator(non_faulty, f"{feature}/{NON_FAULTY}"))
    h = max(_bandwidth(e) for e in estimators)
    low = min(faulty.min(), non_faulty.min()) - KDE_GRID_BANDWIDTHS * h
    high = max(faulty.max(), non_faulty.max()) + KDE_GRID_BANDWIDTHS * h
    grid = np.linspace(low, high, grid_size)

    total = len(faulty) + len(non_faulty)
    curves = []
    for estimator, label, count in zip(estimators, (FAULTY, NON_FAULTY), (len(faulty), len(non_faulty))):
        curves.append(DensityCurve(
            grid=grid,
            density=estimator(grid),
            bandwidth=_bandwidth(estimator),
            group_label=label,
            share=count / total,
        ))
    return curves[0], curves[1]


def write_density_csv(curves: Sequence[DensityCurve], path, decimals=REPORT_DECIMALS) -> Path:
    """CSV grid,density,label - по строке на точку сетки каждой кривой"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frames = [
        pd.DataFrame({"grid": curve.grid, "density": curve.density, "label": curve.group_label})
        for curve in curves
    ]
    frame = pd.concat(frames, ignore_index=True) if frames else pd.DataFrame(columns=["grid", "density", "label"])
    frame.to_csv(path, index=False, float_format=f"%.{decimals}f", lineterminator="\n")
    return path


def bug_count_statistics(rows) -> BugCountStatistics:
    """Среднее и стандартное отклонение исходного числа багов (до бинаризации)"""
    bugs = np.array([r.bug for r in rows if r.bug is not None], dtype=float)
    if len(bugs) == 0:
        raise EmptyDatasetError("Нет строк с информацией о багах")
    return BugCountStatistics(
        labeled=len(bugs),
        mean=float(bugs.mean()),
        std=float(bugs.std()),
        maximum=int(bugs.max()),
    )
