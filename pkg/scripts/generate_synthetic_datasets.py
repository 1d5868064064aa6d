#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Скрипт для генерации синтетических наборов данных для исследования

Использование:
    python scripts/generate_synthetic_datasets.py [папка] [seed]
"""

import sys
from pathlib import Path

project_root = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(project_root / "src"))
sys.path.insert(0, str(project_root / "config"))

from synthetic_data import generate_study_datasets  # noqa: E402
from study_config import DEFAULT_SEED  # noqa: E402


def main():
    """Основная функция"""
    out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else project_root / "datasets"
    seed = int(sys.argv[2]) if len(sys.argv) > 2 else DEFAULT_SEED

    print(f"🎲 Генерация синтетических наборов (seed = {seed})...")
    paths = generate_study_datasets(out_dir, seed=seed)
    for path in paths:
        print(f"✅ Создан: {path}")

    print("\n🎉 Готово! Запуск исследования:")
    print(f"   python run.py study {' '.join(str(p) for p in paths)} --out study_out")


if __name__ == "__main__":
    main()
