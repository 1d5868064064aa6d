# -*- coding: utf-8 -*-
"""Общие настройки тестов: пути к модулям как в run.py и фикстуры проекта"""

import sys
from pathlib import Path

import pytest

project_root = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(project_root / "src"))
sys.path.insert(0, str(project_root / "config"))
sys.path.insert(0, str(Path(__file__).resolve().parent))


@pytest.fixture
def transformers_dir():
    return project_root / "fixtures" / "transformers"


@pytest.fixture
def demo_model_path():
    return project_root / "fixtures" / "demo_model.json"


@pytest.fixture
def write_java(tmp_path):
    """Записывает .java файл во временный каталог и возвращает путь"""
    def _write(name, text, subdir="src"):
        path = tmp_path / subdir / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        return path
    return _write
