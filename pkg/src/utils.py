#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Утилиты для работы с ресурсами проекта и стабильной записи отчетов
"""

import json
import logging
from pathlib import Path

logger = logging.getLogger(__name__)


def get_project_root() -> Path:
    """Поднимается от текущего файла до корня проекта (где есть папки src и config)"""
    project_root = Path(__file__).resolve().parent
    while project_root.parent != project_root:
        if (project_root / "src").exists() and (project_root / "config").exists():
            return project_root
        project_root = project_root.parent
    return Path(__file__).resolve().parent.parent


def get_resource_path(filename, resource_type):
    """
    Получает путь к ресурсу проекта

    Args:
        filename: имя файла ресурса (может содержать подпапки)
        resource_type: папка ресурса в корне проекта (например, config)
    """
    base_path = get_project_root()
    resource_path = base_path / resource_type / filename
    if resource_path.exists():
        return resource_path

    # Если не найден, пробуем в корне
    fallback_path = base_path / filename
    if fallback_path.exists():
        return fallback_path

    return resource_path


def get_config_path(filename):
    """Получает путь к конфигурационному файлу"""
    return get_resource_path(filename, "config")


def load_json_config(filename, default=None):
    """Загружает JSON из config/; при ошибке возвращает default"""
    path = get_config_path(filename)
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        logger.warning(f"Не удалось загрузить конфигурацию {path}: {e}")
        return default if default is not None else {}


def format_number(value, decimals=4):
    """Фиксированная точность для отчетов; None остается None"""
    if value is None:
        return None
    return float(f"{float(value):.{decimals}f}")


def format_cell(value, decimals=4, missing="NA"):
    """Строковое представление числа для CSV/markdown"""
    if value is None:
        return missing
    return f"{float(value):.{decimals}f}"


def dump_json(data) -> str:
    """Детерминированная сериализация: отсортированные ключи, отступ 2, перевод строки в конце"""
    return json.dumps(data, ensure_ascii=False, indent=2, sort_keys=True) + "\n"


def write_json(path, data):
    """Записывает JSON так, чтобы повторный запуск давал побайтно тот же файл"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_json(data), encoding="utf-8", newline="\n")
    return path


def write_text(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8", newline="\n")
    return path
