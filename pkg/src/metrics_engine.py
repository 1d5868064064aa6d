#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Вычисление объектно-ориентированных метрик по корпусу классов

CC   - 1 + число точек ветвления метода
WMC  - сумма CC собственных методов класса
IWMC - сумма WMC всех предков класса, найденных в корпусе
HCC  - WMC + IWMC
DIT  - 1 + число предков в корпусе
LCOM - вариант Хендерсон-Селлерса (вещественный)
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, FrozenSet, List, Mapping, Optional

import pandas as pd

from metric_errors import CycleError, UnknownClassError
from source_parser import ClassDecl, MethodDecl

logger = logging.getLogger(__name__)

METRICS_CSV_HEADER = ("name", "wmc", "dit", "lcom", "iwmc", "hcc")


@dataclass(frozen=True)
class InheritanceGraph:
    nodes: FrozenSet[str]
    parent_of: Mapping[str, str]
    # объявленные родители, которых нет в корпусе (библиотечные классы)
    external_parents: FrozenSet[str]


@dataclass(frozen=True)
class MetricsRecord:
    name: str
    wmc: int
    iwmc: int
    hcc: int
    dit: int
    lcom: float
    method_count: int
    source_path: str = ""

    def as_row(self, decimals=4) -> dict:
        return {
            "name": self.name,
            "wmc": self.wmc,
            "dit": self.dit,
            "lcom": f"{self.lcom:.{decimals}f}",
            "iwmc": self.iwmc,
            "hcc": self.hcc,
        }


def _resolve_parent(class_decl: ClassDecl, by_qualified: Dict[str, ClassDecl],
                    by_simple: Dict[str, List[str]]) -> Optional[str]:
    """
    Находит родителя в корпусе

    Порядок: полное имя -> явный import -> тот же пакет -> единственный класс
    с таким простым именем. Иначе родитель внешний.
    """
    declared = class_decl.parent_name
    if declared in by_qualified:
        return declared

    simple = declared.rsplit(".", 1)[-1]
    for imported in class_decl.imports:
        if imported.rsplit(".", 1)[-1] == simple and imported in by_qualified:
            return imported

    if class_decl.package:
        same_package = f"{class_decl.package}.{declared}"
        if same_package in by_qualified:
            return same_package

    if "." not in declared:
        candidates = by_simple.get(simple, [])
        if len(candidates) == 1:
            return candidates[0]
        if len(candidates) > 1:
            logger.warning(f"Родитель {declared} класса {class_decl.qualified_name} неоднозначен: {candidates}")
    return None


def build_inheritance_graph(corpus: List[ClassDecl]) -> InheritanceGraph:
    """Строит граф наследования; циклы проверяются при обходе (CycleError)"""
    by_qualified = {c.qualified_name: c for c in corpus}
    by_simple: Dict[str, List[str]] = {}
    for c in corpus:
        by_simple.setdefault(c.name, []).append(c.qualified_name)

    parent_of = {}
    external = set()
    for c in corpus:
        if not c.parent_name:
            continue
        resolved = _resolve_parent(c, by_qualified, by_simple)
        if resolved is None:
            external.add(c.parent_name)
        else:
            parent_of[c.qualified_name] = resolved

    return InheritanceGraph(
        nodes=frozenset(by_qualified),
        parent_of=dict(sorted(parent_of.items())),
        external_parents=frozenset(external),
    )


def ancestors(name: str, graph: InheritanceGraph) -> List[str]:
    """Цепочка предков в корпусе от родителя к корню"""
    if name not in graph.nodes:
        raise UnknownClassError(name)
    chain = [name]
    seen = {name}
    current = graph.parent_of.get(name)
    while current is not None:
        if current in seen:
            raise CycleError(chain + [current])
        chain.append(current)
        seen.add(current)
        current = graph.parent_of.get(current)
    return chain[1:]


def cyclomatic_complexity(method: MethodDecl) -> int:
    return 1 + sum(method.decision_points.values())


def wmc(class_decl: ClassDecl) -> int:
    """Сумма CC собственных методов (унаследованные не входят)"""
    return sum(cyclomatic_complexity(m) for m in class_decl.methods)


def dit(name: str, graph: InheritanceGraph) -> int:
    return 1 + len(ancestors(name, graph))


def _corpus_index(corpus) -> Dict[str, ClassDecl]:
    if isinstance(corpus, Mapping):
        return dict(corpus)
    return {c.qualified_name: c for c in corpus}


def iwmc(name: str, graph: InheritanceGraph, corpus) -> int:
    """Сумма WMC по всем транзитивным предкам из корпуса"""
    index = _corpus_index(corpus)
    return sum(wmc(index[a]) for a in ancestors(name, graph))


def hcc(name: str, graph: InheritanceGraph, corpus) -> int:
    index = _corpus_index(corpus)
    if name not in index:
        raise UnknownClassError(name)
    return wmc(index[name]) + iwmc(name, graph, index)


def lcom(class_decl: ClassDecl) -> float:
    """
    LCOM по Хендерсон-Селлерсу

    lcom = (mean_j mu(A_j) - m) / (1 - m), где m - число методов,
    mu(A_j) - число методов, обращающихся к полю j.
    Вырожденный случай (m <= 1 или нет полей) - 1.0.
    """
    m = len(class_decl.methods)
    a = len(class_decl.fields)
    if m <= 1 or a == 0:
        return 1.0
    own = set(class_decl.fields)
    mu_total = sum(
        sum(1 for method in class_decl.methods if field_name in method.accessed_fields)
        for field_name in own
    )
    mean_mu = mu_total / len(own)
    return (mean_mu - m) / (1 - m)


def compute_all(corpus: List[ClassDecl], graph: Optional[InheritanceGraph] = None) -> List[MetricsRecord]:
    """
    Считает все метрики для каждого класса корпуса

    Returns:
        записи, отсортированные по qualified_name; hcc == wmc + iwmc для каждой
    """
    index = _corpus_index(corpus)
    graph = graph or build_inheritance_graph(list(index.values()))

    own_wmc = {name: wmc(c) for name, c in index.items()}
    records = []
    for name in sorted(index):
        chain = ancestors(name, graph)
        inherited = sum(own_wmc[a] for a in chain)
        class_decl = index[name]
        records.append(MetricsRecord(
            name=name,
            wmc=own_wmc[name],
            iwmc=inherited,
            hcc=own_wmc[name] + inherited,
            dit=1 + len(chain),
            lcom=lcom(class_decl),
            method_count=len(class_decl.methods),
            source_path=class_decl.source_path,
        ))

    if graph.external_parents:
        logger.info(f"Внешние родители (вне корпуса): {', '.join(sorted(graph.external_parents))}")
    return records


def write_metrics_csv(records: List[MetricsRecord], path, decimals=4) -> Path:
    """CSV с заголовком name,wmc,dit,lcom,iwmc,hcc; lcom с фиксированной точностью"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame([r.as_row(decimals) for r in records], columns=list(METRICS_CSV_HEADER))
    frame.to_csv(path, index=False, lineterminator="\n")
    return path


def read_metrics_csv(path) -> pd.DataFrame:
    """Читает CSV метрик (пустой файл - пустая таблица с нужными колонками)"""
    try:
        return pd.read_csv(path, dtype={"name": str})
    except pd.errors.EmptyDataError:
        return pd.DataFrame(columns=list(METRICS_CSV_HEADER))
