#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Конфигурация исследования по умолчанию для OO-HCC-METRICS

Значения по умолчанию воспроизводят протокол эксперимента:
выборка 70/30 со случайным состоянием 1, линейный SVM с C = 1.0.
"""

# Текущая версия приложения
PROJECT_VERSION = "1.0.0"

# Протокол обучения
DEFAULT_SEED = 1
DEFAULT_TRAIN_FRACTION = 0.7
DEFAULT_C = 1.0
DEFAULT_MAX_ITERATIONS = 5000
DEFAULT_LEARNING_RATE = 0.5

# Оценка плотности (KDE)
KDE_GRID_SIZE = 512
KDE_GRID_BANDWIDTHS = 4  # сетка [min - 4h, max + 4h]

# Точность чисел в отчетах
REPORT_DECIMALS = 4
CORRELATION_DECIMALS = 2

# Признаки
STUDY_FEATURES = ("wmc", "iwmc", "hcc", "lcom", "dit")
DENSITY_FEATURES = ("hcc", "wmc", "iwmc", "lcom", "dit")

# Потоки для разбора исходников (None = по числу ядер)
PARSE_WORKERS = None

STUDY_SETTINGS = {
    "seed": DEFAULT_SEED,
    "train_fraction": DEFAULT_TRAIN_FRACTION,
    "c_parameter": DEFAULT_C,
    "max_iterations": DEFAULT_MAX_ITERATIONS,
    "learning_rate": DEFAULT_LEARNING_RATE,
    "balance_mode": False,
    "kde_grid_size": KDE_GRID_SIZE,
}


def validate_config(settings=None):
    """Проверяет корректность настроек; возвращает список ошибок (пустой = все хорошо)"""
    settings = dict(STUDY_SETTINGS if settings is None else settings)
    errors = []

    fraction = settings.get("train_fraction")
    if not isinstance(fraction, (int, float)) or not 0 < fraction < 1:
        errors.append(f"train_fraction должен быть в интервале (0, 1), получено {fraction!r}")

    c = settings.get("c_parameter")
    if not isinstance(c, (int, float)) or c <= 0:
        errors.append(f"C должен быть положительным, получено {c!r}")

    seed = settings.get("seed")
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        errors.append(f"seed должен быть неотрицательным целым, получено {seed!r}")

    iterations = settings.get("max_iterations")
    if not isinstance(iterations, int) or iterations < 1:
        errors.append(f"max_iterations должен быть >= 1, получено {iterations!r}")

    rate = settings.get("learning_rate")
    if not isinstance(rate, (int, float)) or rate <= 0:
        errors.append(f"learning_rate должен быть положительным, получено {rate!r}")

    grid = settings.get("kde_grid_size")
    if not isinstance(grid, int) or grid < 16:
        errors.append(f"kde_grid_size слишком мал: {grid!r}")

    return errors


if __name__ == "__main__":
    print("🔧 Проверка конфигурации исследования...")
    errors = validate_config()

    if errors:
        print("❌ Найдены ошибки в конфигурации:")
        for error in errors:
            print(f"  • {error}")
        print("\n📝 Отредактируйте файл study_config.py")
    else:
        print("✅ Конфигурация корректна")
        print(f"🏷️ Версия: {PROJECT_VERSION}")
        print(f"🎲 Seed: {DEFAULT_SEED}, доля обучения: {DEFAULT_TRAIN_FRACTION}, C: {DEFAULT_C}")
