#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Генераторы синтетических наборов данных в формате Promise

Исходные наборы TinyBug/Promise не поставляются, поэтому исследование
проверяется на данных с известной зависимостью метки от метрик.
"""

import logging
from pathlib import Path
from typing import List, Optional

import numpy as np
import pandas as pd

from dataset_pipeline import RawRow
from study_config import DEFAULT_SEED

logger = logging.getLogger(__name__)

DATASET_CSV_HEADER = ("name", "wmc", "dit", "lcom", "iwmc", "hcc", "bug")

# Одинаковый диапазон для wmc и iwmc: равные дисперсии
COMPLEXITY_RANGE = (1, 41)
DIT_RANGE = (2, 7)


def _bug_counts(labels: np.ndarray, rng: np.random.RandomState) -> np.ndarray:
    return np.where(labels == 1, rng.randint(1, 6, size=len(labels)), 0)


def _rows(prefix, wmc, iwmc, lcom, dit, bugs, source) -> List[RawRow]:
    rows = []
    for i in range(len(wmc)):
        rows.append(RawRow(
            name=f"{prefix}.Class{i:05d}",
            wmc=int(wmc[i]),
            dit=int(dit[i]),
            lcom=round(float(lcom[i]), 4),
            iwmc=int(iwmc[i]),
            hcc=int(wmc[i] + iwmc[i]),
            bug=None if bugs[i] is None else int(bugs[i]),
            source=source,
        ))
    return rows


def _base_metrics(n, rng):
    wmc = rng.randint(*COMPLEXITY_RANGE, size=n)
    iwmc = rng.randint(*COMPLEXITY_RANGE, size=n)
    lcom = rng.uniform(0.0, 1.0, size=n)
    dit = rng.randint(*DIT_RANGE, size=n)
    return wmc, iwmc, lcom, dit


def _zscore(values: np.ndarray) -> np.ndarray:
    return (values - values.mean()) / values.std()


def opposite_sign_dataset(n: int = 2000, seed: int = DEFAULT_SEED, noise: float = 0.3,
                          source: str = "opposite_sign") -> List[RawRow]:
    """
    Метка зависит от iwmc и wmc с противоположными знаками

    score = z(iwmc) - z(wmc) + шум; дефектные - верхняя половина по score.
    Сумма hcc = wmc + iwmc почти не несет информации о метке.
    """
    rng = np.random.RandomState(seed)
    wmc, iwmc, lcom, dit = _base_metrics(n, rng)
    score = _zscore(iwmc.astype(float)) - _zscore(wmc.astype(float)) + rng.normal(0.0, noise, size=n)
    labels = (score > np.median(score)).astype(int)
    return _rows("synthetic.opposite", wmc, iwmc, lcom, dit, _bug_counts(labels, rng), source)


def lcom_control_dataset(n: int = 2000, seed: int = DEFAULT_SEED, noise: float = 0.05,
                         source: str = "lcom_control") -> List[RawRow]:
    """Метка зависит только от lcom (общий признак R1 и R2)"""
    rng = np.random.RandomState(seed)
    wmc, iwmc, lcom, dit = _base_metrics(n, rng)
    labels = (lcom + rng.normal(0.0, noise, size=n) > 0.5).astype(int)
    return _rows("synthetic.control", wmc, iwmc, lcom, dit, _bug_counts(labels, rng), source)


def dataset_with_counts(total: int, faulty: int, seed: int = DEFAULT_SEED,
                        source: str = "counts") -> List[RawRow]:
    """Набор с заданным числом дефектных классов (все строки проходят предобработку)"""
    if not 0 <= faulty <= total:
        raise ValueError(f"Неверные размеры: {faulty} дефектных из {total}")
    rng = np.random.RandomState(seed)
    wmc, iwmc, lcom, dit = _base_metrics(total, rng)
    labels = np.zeros(total, dtype=int)
    labels[rng.permutation(total)[:faulty]] = 1
    return _rows("synthetic.counts", wmc, iwmc, lcom, dit, _bug_counts(labels, rng), source)


def preprocessing_fixture() -> List[RawRow]:
    """
    10 строк: 3 без наследуемой сложности (hcc == wmc),
    2 без информации о багах, 5 размеченных (bug в {0, 1, 2})
    """
    table = [
        ("fixture.A", 3, 0, 1),
        ("fixture.B", 5, 4, 0),
        ("fixture.C", 2, 0, 0),
        ("fixture.D", 7, 2, None),
        ("fixture.E", 4, 6, 2),
        ("fixture.F", 1, 3, 1),
        ("fixture.G", 6, 0, 2),
        ("fixture.H", 2, 5, None),
        ("fixture.I", 8, 1, 0),
        ("fixture.J", 3, 9, 1),
    ]
    return [
        RawRow(name=name, wmc=wmc, dit=2 if iwmc else 1, lcom=0.5, iwmc=iwmc, hcc=wmc + iwmc, bug=bug,
               source="fixture")
        for name, wmc, iwmc, bug in table
    ]


def write_dataset_csv(rows: List[RawRow], path, include_iwmc: bool = True, include_hcc: bool = True) -> Path:
    """Пишет строки в CSV формата Promise; пустая ячейка bug - нет информации о багах"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    columns = [c for c in DATASET_CSV_HEADER
               if (c != "iwmc" or include_iwmc) and (c != "hcc" or include_hcc)]
    frame = pd.DataFrame(
        [{
            "name": r.name,
            "wmc": r.wmc,
            "dit": r.dit,
            "lcom": f"{r.lcom:.4f}",
            "iwmc": r.iwmc,
            "hcc": r.hcc,
            "bug": "" if r.bug is None else str(r.bug),
        } for r in rows],
        columns=list(DATASET_CSV_HEADER),
    )[columns]
    frame.to_csv(path, index=False, lineterminator="\n")
    logger.info(f"Записано {len(rows)} строк в {path}")
    return path


def generate_study_datasets(out_dir, seed: Optional[int] = None, n: int = 2000) -> List[Path]:
    """Набор для исследования и контрольный набор"""
    seed = DEFAULT_SEED if seed is None else seed
    out_dir = Path(out_dir)
    return [
        write_dataset_csv(opposite_sign_dataset(n, seed), out_dir / "opposite_sign.csv"),
        write_dataset_csv(lcom_control_dataset(n, seed), out_dir / "lcom_control.csv"),
    ]
