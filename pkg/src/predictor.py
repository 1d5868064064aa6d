#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Линейный SVM с мягким зазором для предсказания дефектных классов

Сравниваются два представления признаков:
R1 = [hcc, lcom, dit] и R2 = [wmc, iwmc, lcom, dit].

Обучение - детерминированный полный субградиентный спуск с проекцией по
целевой функции 1/2 ||w||^2 + C * mean(hinge). Метки: +1 дефектный, -1 нет.
"""

import json
import logging
import warnings
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from dataset_pipeline import LabeledSample, balance_classes
from metric_errors import (
    DimensionMismatchError, InputError, InsufficientDataError, NonFiniteError,
    RepresentationMismatchError, SingleClassError, ZeroVarianceWarning,
)
from study_config import (
    DEFAULT_C, DEFAULT_LEARNING_RATE, DEFAULT_MAX_ITERATIONS, DEFAULT_SEED, DEFAULT_TRAIN_FRACTION,
    REPORT_DECIMALS,
)
from utils import format_cell, format_number, write_json

logger = logging.getLogger(__name__)

FAULTY_LABEL = "faulty"
NON_FAULTY_LABEL = "non-faulty"

# Форма целевой функции: C умножает среднее hinge-потерь, а не сумму
# (C = 1.0 здесь соответствует C = 1/n у SVC с суммой потерь)
LOSS_FORM = "mean_hinge"


@dataclass(frozen=True)
class Representation:
    name: str
    feature_names: Tuple[str, ...]


R1 = Representation("R1", ("hcc", "lcom", "dit"))
R2 = Representation("R2", ("wmc", "iwmc", "lcom", "dit"))
REPRESENTATIONS = {r.name: r for r in (R1, R2)}


@dataclass(frozen=True)
class ScalerParams:
    feature_names: Tuple[str, ...]
    means: Tuple[float, ...]
    stds: Tuple[float, ...]


@dataclass(frozen=True)
class ScaledSamples:
    """Нормализованная матрица признаков с метками (0/1)"""
    names: Tuple[str, ...]
    matrix: np.ndarray
    labels: np.ndarray
    representation: Representation

    def __len__(self):
        return len(self.names)


@dataclass(frozen=True)
class LinearSvmModel:
    representation: Representation
    weights: Tuple[float, ...]
    bias: float
    c_parameter: float = DEFAULT_C
    seed: int = DEFAULT_SEED
    iterations: int = 0
    objective: float = float("nan")


@dataclass(frozen=True)
class EvaluationReport:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    @staticmethod
    def _ratio(numerator, denominator) -> Optional[float]:
        # нулевой знаменатель - значение отсутствует (не 0)
        return None if denominator == 0 else numerator / denominator

    @property
    def accuracy(self) -> Optional[float]:
        return self._ratio(self.tp + self.tn, self.total)

    @property
    def precision_faulty(self) -> Optional[float]:
        return self._ratio(self.tp, self.tp + self.fp)

    @property
    def recall_faulty(self) -> Optional[float]:
        return self._ratio(self.tp, self.tp + self.fn)

    @property
    def precision_non_faulty(self) -> Optional[float]:
        return self._ratio(self.tn, self.tn + self.fn)

    @property
    def recall_non_faulty(self) -> Optional[float]:
        return self._ratio(self.tn, self.tn + self.fp)

    def to_json(self, decimals=REPORT_DECIMALS) -> dict:
        return {
            "confusion": {"tp": self.tp, "fp": self.fp, "fn": self.fn, "tn": self.tn},
            "accuracy": format_number(self.accuracy, decimals),
            "precision": {
                FAULTY_LABEL: format_number(self.precision_faulty, decimals),
                NON_FAULTY_LABEL: format_number(self.precision_non_faulty, decimals),
            },
            "recall": {
                FAULTY_LABEL: format_number(self.recall_faulty, decimals),
                NON_FAULTY_LABEL: format_number(self.recall_non_faulty, decimals),
            },
        }


@dataclass(frozen=True)
class RepresentationRun:
    representation: Representation
    scaler: ScalerParams
    model: LinearSvmModel
    report: EvaluationReport


@dataclass(frozen=True)
class RepresentationComparison:
    r1: RepresentationRun
    r2: RepresentationRun
    train_size: int
    test_size: int

    @staticmethod
    def _delta(a, b) -> Optional[float]:
        return None if a is None or b is None else b - a

    def to_json(self, decimals=REPORT_DECIMALS) -> dict:
        runs = {}
        for run in (self.r1, self.r2):
            runs[run.representation.name] = {
                "features": list(run.representation.feature_names),
                "objective": format_number(run.model.objective, decimals),
                "iterations": run.model.iterations,
                **run.report.to_json(decimals),
            }
        a, b = self.r1.report, self.r2.report
        deltas = {
            "accuracy": self._delta(a.accuracy, b.accuracy),
            f"precision_{FAULTY_LABEL}": self._delta(a.precision_faulty, b.precision_faulty),
            f"recall_{FAULTY_LABEL}": self._delta(a.recall_faulty, b.recall_faulty),
            f"precision_{NON_FAULTY_LABEL}": self._delta(a.precision_non_faulty, b.precision_non_faulty),
            f"recall_{NON_FAULTY_LABEL}": self._delta(a.recall_non_faulty, b.recall_non_faulty),
        }
        return {
            "train_size": self.train_size,
            "test_size": self.test_size,
            "representations": runs,
            "delta_r2_minus_r1": {k: format_number(v, decimals) for k, v in deltas.items()},
        }


def _round_half_up(value: Decimal) -> int:
    return int(value.quantize(Decimal(1), rounding=ROUND_HALF_UP))


def split(samples: Sequence[LabeledSample], train_fraction: float = DEFAULT_TRAIN_FRACTION,
          seed: int = DEFAULT_SEED) -> Tuple[List[LabeledSample], List[LabeledSample]]:
    """
    Стратифицированное разбиение на обучающую и тестовую выборки

    Размер обучения round_half_up(N * f); дефектных в обучении
    round_half_up(N_faulty * f), остальное - бездефектные.
    Внутри каждой стороны сохраняется исходный порядок.

    Raises:
        InsufficientDataError: одна из сторон у какой-то группы пуста
    """
    if not 0 < train_fraction < 1:
        raise ValueError(f"train_fraction должен быть в интервале (0, 1): {train_fraction}")

    fraction = Decimal(repr(float(train_fraction)))
    faulty = [i for i, s in enumerate(samples) if s.label == 1]
    clean = [i for i, s in enumerate(samples) if s.label == 0]

    total_train = _round_half_up(len(samples) * fraction)
    faulty_train = _round_half_up(len(faulty) * fraction)
    clean_train = total_train - faulty_train

    for group, size, taken in ((FAULTY_LABEL, len(faulty), faulty_train), (NON_FAULTY_LABEL, len(clean), clean_train)):
        if taken < 1 or taken > size - 1:
            raise InsufficientDataError(
                f"Группа '{group}' ({size} образцов) не делится в пропорции {train_fraction}: "
                f"в обучение попало бы {taken}"
            )

    rng = np.random.RandomState(seed)
    chosen = set(rng.permutation(faulty)[:faulty_train].tolist())
    chosen |= set(rng.permutation(clean)[:clean_train].tolist())

    train = [s for i, s in enumerate(samples) if i in chosen]
    test = [s for i, s in enumerate(samples) if i not in chosen]
    logger.debug(f"Разбиение: обучение {len(train)} ({faulty_train} дефектных), тест {len(test)}")
    return train, test


def feature_matrix(samples: Sequence[LabeledSample], representation: Representation) -> np.ndarray:
    if not samples:
        return np.empty((0, len(representation.feature_names)))
    missing = [f for f in representation.feature_names if f not in samples[0].features]
    if missing:
        raise RepresentationMismatchError(representation.name, missing)
    return np.array([[s.features[f] for f in representation.feature_names] for s in samples], dtype=float)


def labels_vector(samples: Sequence[LabeledSample]) -> np.ndarray:
    return np.array([s.label for s in samples], dtype=int)


def fit_scaler(train: Sequence[LabeledSample], representation: Representation) -> ScalerParams:
    """Среднее и стандартное отклонение (генеральное, ddof=0) по обучающей выборке"""
    if not train:
        raise InsufficientDataError("Обучающая выборка пуста")
    matrix = feature_matrix(train, representation)
    means = matrix.mean(axis=0)
    stds = matrix.std(axis=0)
    for name, std in zip(representation.feature_names, stds):
        if std == 0:
            message = f"Признак {name} имеет нулевую дисперсию, после нормализации он будет равен 0"
            logger.warning(message)
            warnings.warn(message, ZeroVarianceWarning, stacklevel=2)
    return ScalerParams(
        feature_names=representation.feature_names,
        means=tuple(float(v) for v in means),
        stds=tuple(float(v) for v in stds),
    )


def scale_matrix(params: ScalerParams, matrix: np.ndarray) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[1] != len(params.feature_names):
        raise DimensionMismatchError(len(params.feature_names), matrix.shape[-1] if matrix.ndim else 0)
    means = np.array(params.means)
    stds = np.array(params.stds)
    safe = np.where(stds == 0, 1.0, stds)
    scaled = (matrix - means) / safe
    scaled[:, stds == 0] = 0.0
    return scaled


def apply_scaler(params: ScalerParams, samples: Sequence[LabeledSample],
                 representation: Optional[Representation] = None) -> ScaledSamples:
    """Z-нормализация параметрами, найденными на обучающей выборке"""
    representation = representation or Representation("custom", params.feature_names)
    if tuple(representation.feature_names) != tuple(params.feature_names):
        raise DimensionMismatchError(len(params.feature_names), len(representation.feature_names))
    return ScaledSamples(
        names=tuple(s.name for s in samples),
        matrix=scale_matrix(params, feature_matrix(samples, representation)),
        labels=labels_vector(samples),
        representation=representation,
    )


def _signed(labels: np.ndarray) -> np.ndarray:
    return np.where(np.asarray(labels) == 1, 1.0, -1.0)


def objective(weights, bias, matrix, signed_labels, c=DEFAULT_C) -> float:
    """1/2 ||w||^2 + C * среднее hinge-потерь; метки в {-1, +1}"""
    weights = np.asarray(weights, dtype=float)
    margins = signed_labels * (matrix @ weights + bias)
    return float(0.5 * weights @ weights + c * np.mean(np.maximum(0.0, 1.0 - margins)))


def objective_subgradient(weights, bias, matrix, signed_labels, c=DEFAULT_C) -> Tuple[np.ndarray, float]:
    """Субградиент целевой функции по (w, b); в изломе (margin == 1) hinge считается неактивным"""
    weights = np.asarray(weights, dtype=float)
    margins = signed_labels * (matrix @ weights + bias)
    active = (margins < 1.0).astype(float)
    coefficients = active * signed_labels
    n = len(signed_labels)
    grad_w = weights - c * (matrix.T @ coefficients) / n
    grad_b = -c * float(np.sum(coefficients)) / n
    return grad_w, grad_b


def train_svm(train_scaled: ScaledSamples, representation: Optional[Representation] = None,
              c: float = DEFAULT_C, seed: int = DEFAULT_SEED,
              max_iterations: int = DEFAULT_MAX_ITERATIONS,
              learning_rate: float = DEFAULT_LEARNING_RATE) -> LinearSvmModel:
    """
    Обучение линейного SVM субградиентным спуском с проекцией

    Шаг learning_rate / sqrt(t + 1); w проецируется на шар радиуса sqrt(2C),
    в котором лежит оптимум. Возвращается лучшая по целевой функции итерация.

    Raises:
        SingleClassError: в выборке один класс
        NonFiniteError: целевая функция стала бесконечной / NaN
    """
    representation = representation or train_scaled.representation
    matrix = np.asarray(train_scaled.matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[1] != len(representation.feature_names):
        raise DimensionMismatchError(len(representation.feature_names), matrix.shape[-1])
    labels = np.asarray(train_scaled.labels)
    present = set(labels.tolist())
    if len(present) < 2:
        only = FAULTY_LABEL if present == {1} else NON_FAULTY_LABEL
        raise SingleClassError(only)
    if c <= 0:
        raise ValueError(f"C должен быть положительным: {c}")

    y = _signed(labels)
    rng = np.random.RandomState(seed)
    weights = rng.normal(0.0, 0.01, size=matrix.shape[1])
    bias = 0.0
    radius = np.sqrt(2.0 * c)

    best_value = objective(weights, bias, matrix, y, c)
    best_weights, best_bias = weights.copy(), bias
    for t in range(max_iterations):
        grad_w, grad_b = objective_subgradient(weights, bias, matrix, y, c)
        step = learning_rate / np.sqrt(t + 1.0)
        weights = weights - step * grad_w
        bias = bias - step * grad_b
        norm = np.linalg.norm(weights)
        if norm > radius:
            weights = weights * (radius / norm)

        value = objective(weights, bias, matrix, y, c)
        if not np.isfinite(value):
            raise NonFiniteError(f"Целевая функция расходится на итерации {t + 1}")
        if value < best_value:
            best_value = value
            best_weights, best_bias = weights.copy(), bias

    logger.info(f"SVM {representation.name}: C={c}, итераций {max_iterations}, целевая функция {best_value:.6f}")
    return LinearSvmModel(
        representation=representation,
        weights=tuple(float(v) for v in best_weights),
        bias=float(best_bias),
        c_parameter=float(c),
        seed=seed,
        iterations=max_iterations,
        objective=float(best_value),
    )


def decision_function(model: LinearSvmModel, matrix) -> np.ndarray:
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    if matrix.shape[1] != len(model.weights):
        raise DimensionMismatchError(len(model.weights), matrix.shape[1])
    return matrix @ np.array(model.weights) + model.bias


def predict(model: LinearSvmModel, sample_scaled) -> int:
    """1 (дефектный) только при w.x + b > 0; ноль - бездефектный"""
    return int(decision_function(model, sample_scaled)[0] > 0)


def predict_labels(model: LinearSvmModel, matrix) -> np.ndarray:
    return (decision_function(model, matrix) > 0).astype(int)


def evaluate(model: LinearSvmModel, test_scaled: ScaledSamples) -> EvaluationReport:
    if len(test_scaled) == 0:
        raise InsufficientDataError("Тестовая выборка пуста")
    predicted = predict_labels(model, test_scaled.matrix)
    actual = np.asarray(test_scaled.labels)
    return EvaluationReport(
        tp=int(np.sum((predicted == 1) & (actual == 1))),
        fp=int(np.sum((predicted == 1) & (actual == 0))),
        fn=int(np.sum((predicted == 0) & (actual == 1))),
        tn=int(np.sum((predicted == 0) & (actual == 0))),
    )


def run_representation(train, test, representation: Representation, c=DEFAULT_C, seed=DEFAULT_SEED,
                       max_iterations=DEFAULT_MAX_ITERATIONS,
                       learning_rate=DEFAULT_LEARNING_RATE) -> RepresentationRun:
    """Нормализация -> обучение -> оценка для одного представления"""
    scaler = fit_scaler(train, representation)
    model = train_svm(apply_scaler(scaler, train, representation), representation, c=c, seed=seed,
                      max_iterations=max_iterations, learning_rate=learning_rate)
    report = evaluate(model, apply_scaler(scaler, test, representation))
    return RepresentationRun(representation, scaler, model, report)


def compare_representations(samples: Sequence[LabeledSample], seed: int = DEFAULT_SEED,
                            train_fraction: float = DEFAULT_TRAIN_FRACTION, c: float = DEFAULT_C,
                            balance: bool = False, max_iterations: int = DEFAULT_MAX_ITERATIONS,
                            learning_rate: float = DEFAULT_LEARNING_RATE) -> RepresentationComparison:
    """Одно и то же разбиение и seed для R1 и R2"""
    if balance:
        samples = balance_classes(list(samples), seed)
    train, test = split(samples, train_fraction, seed)
    runs = [
        run_representation(train, test, rep, c=c, seed=seed, max_iterations=max_iterations,
                           learning_rate=learning_rate)
        for rep in (R1, R2)
    ]
    return RepresentationComparison(r1=runs[0], r2=runs[1], train_size=len(train), test_size=len(test))


def model_to_json(model: LinearSvmModel, scaler: ScalerParams) -> dict:
    return {
        "representation": model.representation.name,
        "features": list(model.representation.feature_names),
        "weights": list(model.weights),
        "bias": model.bias,
        "c": model.c_parameter,
        "seed": model.seed,
        "iterations": model.iterations,
        "objective": model.objective,
        "loss": LOSS_FORM,
        "scaler": {"means": list(scaler.means), "stds": list(scaler.stds)},
    }


def save_model(model: LinearSvmModel, scaler: ScalerParams, path) -> Path:
    return write_json(path, model_to_json(model, scaler))


def load_model(path) -> Tuple[LinearSvmModel, ScalerParams]:
    """
    Загружает модель и параметры нормализации

    Raises:
        InputError: файл не читается или структура неверна
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"Не удалось прочитать модель {path}: {e}") from e

    loss = data.get("loss", LOSS_FORM) if isinstance(data, dict) else LOSS_FORM
    if loss != LOSS_FORM:
        raise InputError(f"Модель {path} обучена с функцией потерь {loss!r}, поддерживается только {LOSS_FORM!r}")

    try:
        name = data["representation"]
        if name in REPRESENTATIONS:
            representation = REPRESENTATIONS[name]
        else:
            representation = Representation(name, tuple(data["features"]))
        weights = tuple(float(v) for v in data["weights"])
        scaler = ScalerParams(
            feature_names=representation.feature_names,
            means=tuple(float(v) for v in data["scaler"]["means"]),
            stds=tuple(float(v) for v in data["scaler"]["stds"]),
        )
        model = LinearSvmModel(
            representation=representation,
            weights=weights,
            bias=float(data["bias"]),
            c_parameter=float(data.get("c", DEFAULT_C)),
            seed=int(data.get("seed", DEFAULT_SEED)),
            iterations=int(data.get("iterations", 0)),
            objective=float(data.get("objective", float("nan"))),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"Неверная структура модели {path}: {e}") from e

    dimension = len(representation.feature_names)
    for size in (len(model.weights), len(scaler.means), len(scaler.stds)):
        if size != dimension:
            raise DimensionMismatchError(dimension, size)
    return model, scaler


def predict_rows(model: LinearSvmModel, scaler: ScalerParams, frame: pd.DataFrame,
                 decimals=REPORT_DECIMALS) -> pd.DataFrame:
    """
    Предсказания для таблицы метрик: name,prediction,decision_value

    Raises:
        RepresentationMismatchError: нет колонок признаков модели
    """
    features = list(model.representation.feature_names)
    missing = [f for f in features if f not in frame.columns]
    if missing:
        raise RepresentationMismatchError(model.representation.name, missing)
    if frame.empty:
        return pd.DataFrame(columns=["name", "prediction", "decision_value"])

    matrix = frame[features].to_numpy(dtype=float)
    values = decision_function(model, scale_matrix(scaler, matrix))
    return pd.DataFrame({
        "name": frame["name"].astype(str).tolist() if "name" in frame.columns else [""] * len(frame),
        "prediction": [FAULTY_LABEL if v > 0 else NON_FAULTY_LABEL for v in values],
        "decision_value": [format_cell(v, decimals) for v in values],
    })


def render_comparison_markdown(studies: Sequence[Tuple[str, RepresentationComparison]],
                               decimals=REPORT_DECIMALS) -> str:
    """
    Таблицы результатов по представлениям

    Строки: precision, recall, accuracy; колонки: faulty / non-faulty для каждого набора.
    """
    lines = []
    for key, title in (("r1", "HCC-LCOM-DIT (R1)"), ("r2", "WMC-IWMC-LCOM-DIT (R2)")):
        lines.append(f"### {title}")
        lines.append("")
        header = ["metric"]
        for dataset, _ in studies:
            header += [f"{dataset} {FAULTY_LABEL}", f"{dataset} {NON_FAULTY_LABEL}"]
        lines.append("| " + " | ".join(header) + " |")
        lines.append("|" + "---|" * len(header))

        rows: Dict[str, List[str]] = {"precision": [], "recall": [], "accuracy": []}
        for _, comparison in studies:
            report = getattr(comparison, key).report
            rows["precision"] += [format_cell(report.precision_faulty, decimals),
                                  format_cell(report.precision_non_faulty, decimals)]
            rows["recall"] += [format_cell(report.recall_faulty, decimals),
                               format_cell(report.recall_non_faulty, decimals)]
            accuracy = format_cell(report.accuracy, decimals)
            rows["accuracy"] += [accuracy, accuracy]
        for metric, cells in rows.items():
            lines.append("| " + " | ".join([metric] + cells) + " |")
        lines.append("")
    return "\n".join(lines)
