#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Загрузка наборов данных с метриками (формат Promise) и предобработка

Шаги предобработки:
1. удаляются классы с HCC == WMC (нет унаследованной сложности)
2. удаляются классы без информации о багах
3. метка бинаризуется: 0 -> 0, >= 1 -> 1
"""

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from metric_errors import (
    CellTypeError, EmptyDatasetError, IdentityViolationError, InsufficientDataError, MissingColumnError,
    SourceEncodingError,
)
from utils import load_json_config, write_json

logger = logging.getLogger(__name__)

FEATURE_NAMES = ("wmc", "iwmc", "hcc", "lcom", "dit")
SAMPLES_CSV_HEADER = ("name", "wmc", "iwmc", "hcc", "lcom", "dit", "bug")
REQUIRED_COLUMNS = ("name", "wmc", "dit", "lcom")

# Используется, если config/column_mapping.json недоступен
_FALLBACK_MAPPING = {
    "default": {name: name for name in ("name", "wmc", "dit", "lcom", "bug", "iwmc", "hcc")},
    "aliases": {},
}


@dataclass(frozen=True)
class RawRow:
    name: str
    wmc: int
    dit: int
    lcom: float
    iwmc: Optional[int] = None
    hcc: Optional[int] = None
    bug: Optional[int] = None
    source: str = ""


@dataclass(frozen=True)
class LabeledSample:
    name: str
    features: Dict[str, float]
    label: int
    source: str = ""

    @property
    def wmc(self):
        return self.features["wmc"]

    @property
    def hcc(self):
        return self.features["hcc"]

    @property
    def bug(self):
        return self.label


@dataclass(frozen=True)
class DatasetSummary:
    total: int
    faulty: int
    non_faulty: int
    faulty_pct: float
    non_faulty_pct: float

    def to_json(self) -> dict:
        return {
            "total": self.total,
            "faulty": self.faulty,
            "non_faulty": self.non_faulty,
            "faulty_pct": self.faulty_pct,
            "non_faulty_pct": self.non_faulty_pct,
        }


@dataclass(frozen=True)
class StageCounts:
    removed_no_inheritance: int
    removed_unlabeled: int
    remaining: int

    def to_json(self) -> dict:
        return {
            "removed_no_inheritance": self.removed_no_inheritance,
            "removed_unlabeled": self.removed_unlabeled,
            "remaining": self.remaining,
        }


@dataclass(frozen=True)
class PreprocessConfig:
    # False - оставить классы без наследуемой сложности (для разведочного анализа)
    drop_no_inheritance: bool = True


def parse_column_mapping(text: Optional[str]) -> Dict[str, str]:
    """Разбирает '--map bug=bugs,name=class' в словарь {логическое имя: колонка CSV}"""
    mapping = {}
    if not text:
        return mapping
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise ValueError(f"Неверный элемент сопоставления колонок: {part!r} (нужно col=name)")
        logical, column = (s.strip() for s in part.split("=", 1))
        mapping[logical] = column
    return mapping


def resolve_columns(header: Iterable[str], column_mapping: Optional[Dict[str, str]] = None, path="") -> Dict[str, str]:
    """
    Сопоставляет логические колонки с колонками CSV

    Порядок: явное сопоставление -> сопоставление по умолчанию -> псевдонимы.
    """
    header = list(header)
    config = load_json_config("column_mapping.json", default=_FALLBACK_MAPPING)
    defaults = config.get("default", {})
    aliases = config.get("aliases", {})
    explicit = dict(column_mapping or {})

    resolved = {}
    missing_explicit = []
    for logical in SAMPLES_CSV_HEADER:
        if logical in explicit:
            if explicit[logical] in header:
                resolved[logical] = explicit[logical]
            else:
                missing_explicit.append(explicit[logical])
            continue
        candidates = [defaults.get(logical, logical)] + list(aliases.get(logical, []))
        for candidate in candidates:
            if candidate in header:
                resolved[logical] = candidate
                break

    missing = missing_explicit + [c for c in REQUIRED_COLUMNS if c not in resolved and c not in explicit]
    if "iwmc" not in resolved and "hcc" not in resolved:
        missing.append("iwmc|hcc")
    if missing:
        raise MissingColumnError(missing, path)
    return resolved


def _parse_int(value: str, row_index, column, allow_empty=False) -> Optional[int]:
    text = value.strip()
    if not text:
        if allow_empty:
            return None
        raise CellTypeError(row_index, column, value, "целое число")
    try:
        number = float(text)
    except ValueError:
        raise CellTypeError(row_index, column, value, "целое число") from None
    if not math.isfinite(number) or number != int(number):
        raise CellTypeError(row_index, column, value, "целое число")
    return int(number)


def _parse_float(value: str, row_index, column) -> float:
    try:
        number = float(value.strip())
    except ValueError:
        raise CellTypeError(row_index, column, value, "число") from None
    if not math.isfinite(number):
        raise CellTypeError(row_index, column, value, "конечное число")
    return number


def read_dataset(path, column_mapping: Optional[Dict[str, str]] = None, source: Optional[str] = None) -> List[RawRow]:
    """
    Читает CSV с метриками в типизированные строки

    Недостающее из {iwmc, hcc} выводится из тождества hcc = wmc + iwmc.

    Raises:
        MissingColumnError: нет обязательных колонок
        CellTypeError: ячейка не приводится к типу (с номером строки)
        IdentityViolationError: строки, нарушающие тождество (все сразу)
        SourceEncodingError: файл не в кодировке UTF-8
    """
    path = Path(path)
    source = source or path.stem
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True, encoding="utf-8")
    except pd.errors.EmptyDataError:
        raise MissingColumnError(REQUIRED_COLUMNS, path) from None
    except UnicodeDecodeError as e:
        raise SourceEncodingError(path, f"(позиция {e.start})") from None

    columns = resolve_columns(frame.columns, column_mapping, path)
    rows = []
    violations = []

    for position, record in enumerate(frame.to_dict("records"), start=1):
        def cell(logical):
            column = columns.get(logical)
            return record[column] if column is not None else ""

        name = cell("name").strip()
        wmc = _parse_int(cell("wmc"), position, columns["wmc"])
        dit = _parse_int(cell("dit"), position, columns["dit"])
        lcom = _parse_float(cell("lcom"), position, columns["lcom"])
        iwmc = _parse_int(cell("iwmc"), position, columns.get("iwmc", "iwmc"), allow_empty=True)
        hcc = _parse_int(cell("hcc"), position, columns.get("hcc", "hcc"), allow_empty=True)
        bug = _parse_int(cell("bug"), position, columns.get("bug", "bug"), allow_empty=True)

        if wmc < 0:
            raise CellTypeError(position, columns["wmc"], cell("wmc"), "неотрицательное целое")
        if dit < 1:
            raise CellTypeError(position, columns["dit"], cell("dit"), "целое >= 1")
        if lcom < 0:
            raise CellTypeError(position, columns["lcom"], cell("lcom"), "неотрицательное число")
        if bug is not None and bug < 0:
            raise CellTypeError(position, columns["bug"], cell("bug"), "неотрицательное целое")

        if iwmc is None and hcc is None:
            raise CellTypeError(position, "iwmc|hcc", "", "значение iwmc или hcc")
        if hcc is None:
            hcc = wmc + iwmc
        elif iwmc is None:
            iwmc = hcc - wmc

        if iwmc < 0 or hcc != wmc + iwmc:
            violations.append((position, name, wmc, iwmc, hcc))
            continue

        rows.append(RawRow(name=name, wmc=wmc, dit=dit, lcom=lcom, iwmc=iwmc, hcc=hcc, bug=bug, source=source))

    if violations:
        raise IdentityViolationError(violations)

    logger.info(f"Загружено {len(rows)} строк из {path}")
    return rows


def merge_datasets(a: List[RawRow], b: List[RawRow]) -> List[RawRow]:
    """Объединение двух наборов без удаления дубликатов; источник строки сохраняется"""
    return list(a) + list(b)


def _features_of(row: Union[RawRow, LabeledSample]) -> Dict[str, float]:
    if isinstance(row, LabeledSample):
        return dict(row.features)
    return {
        "wmc": float(row.wmc),
        "iwmc": float(row.iwmc),
        "hcc": float(row.hcc),
        "lcom": float(row.lcom),
        "dit": float(row.dit),
    }


def preprocess_with_counts(rows, config: Optional[PreprocessConfig] = None) -> Tuple[List[LabeledSample], StageCounts]:
    """
    Предобработка с подсчетом удаленных строк на каждом шаге

    Raises:
        EmptyDatasetError: после фильтров ничего не осталось
    """
    config = config or PreprocessConfig()
    removed_no_inheritance = 0
    removed_unlabeled = 0
    samples = []

    for row in rows:
        if config.drop_no_inheritance and row.hcc == row.wmc:
            removed_no_inheritance += 1
            continue
        if row.bug is None:
            removed_unlabeled += 1
            continue
        samples.append(LabeledSample(
            name=row.name,
            features=_features_of(row),
            label=min(int(row.bug), 1),
            source=row.source,
        ))

    counts = StageCounts(removed_no_inheritance, removed_unlabeled, len(samples))
    logger.info(
        f"Предобработка: удалено без наследования {removed_no_inheritance}, "
        f"без меток {removed_unlabeled}, осталось {len(samples)}"
    )
    if not samples:
        raise EmptyDatasetError("После предобработки не осталось ни одной строки")
    return samples, counts


def preprocess(rows, config: Optional[PreprocessConfig] = None) -> List[LabeledSample]:
    samples, _ = preprocess_with_counts(rows, config)
    return samples


def summarize(samples: List[LabeledSample]) -> DatasetSummary:
    """Количество и доли (в процентах, 2 знака) дефектных и бездефектных классов"""
    total = len(samples)
    if total == 0:
        raise EmptyDatasetError("Нечего суммировать: пустой набор")
    faulty = sum(1 for s in samples if s.label == 1)
    non_faulty = total - faulty
    return DatasetSummary(
        total=total,
        faulty=faulty,
        non_faulty=non_faulty,
        faulty_pct=round(100.0 * faulty / total, 2),
        non_faulty_pct=round(100.0 * non_faulty / total, 2),
    )


def balance_classes(samples: List[LabeledSample], seed: int) -> List[LabeledSample]:
    """Уменьшает больший класс до размера меньшего (50/50), порядок строк сохраняется"""
    faulty = [i for i, s in enumerate(samples) if s.label == 1]
    clean = [i for i, s in enumerate(samples) if s.label == 0]
    if not faulty or not clean:
        raise InsufficientDataError("Для балансировки нужны оба класса")
    minority, majority = sorted((faulty, clean), key=len)
    rng = np.random.RandomState(seed)
    kept = rng.choice(len(majority), size=len(minority), replace=False)
    keep = set(minority) | {majority[i] for i in kept}
    return [s for i, s in enumerate(samples) if i in keep]


def samples_to_frame(samples: List[LabeledSample]) -> pd.DataFrame:
    return pd.DataFrame(
        [{"name": s.name, **{f: s.features[f] for f in FEATURE_NAMES}, "bug": s.label} for s in samples],
        columns=list(SAMPLES_CSV_HEADER),
    )


def write_samples_csv(samples: List[LabeledSample], path, decimals=4) -> Path:
    """CSV name,wmc,iwmc,hcc,lcom,dit,bug"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = samples_to_frame(samples)
    for column in ("wmc", "iwmc", "hcc", "dit", "bug"):
        frame[column] = frame[column].astype(int)
    frame["lcom"] = frame["lcom"].map(lambda v: f"{v:.{decimals}f}")
    frame.to_csv(path, index=False, lineterminator="\n")
    return path


def write_stage_report(counts: StageCounts, path) -> Path:
    return write_json(path, counts.to_json())
