#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Исключения анализатора метрик и исследования дефектов

Все ошибки наследуются от MetricsError и знают свой код выхода для CLI:
2 - ошибка входных данных / использования, 1 - ошибка выполнения / данных.
"""


class MetricsError(Exception):
    """Базовая ошибка проекта"""
    exit_code = 1


class InputError(MetricsError):
    """Ошибка входных данных (код выхода 2)"""
    exit_code = 2


# ОШИБКИ РАЗБОРА ИСХОДНИКОВ

class SourceSyntaxError(InputError):
    """Текст вне поддерживаемого подмножества Java"""

    def __init__(self, path, line, column, message):
        self.path = str(path)
        self.line = line
        self.column = column
        self.message = message
        location = f"{self.path}:{line}:{column}" if line is not None else self.path
        super().__init__(f"{location}: {message}")


class SourceEncodingError(InputError):
    """Файл не в кодировке UTF-8"""

    def __init__(self, path, reason=""):
        self.path = str(path)
        super().__init__(f"{self.path}: файл не в кодировке UTF-8 {reason}".rstrip())


class DuplicateClassError(InputError):
    """Два объявления класса с одинаковым полным именем"""

    def __init__(self, qualified_name, first_path, second_path):
        self.qualified_name = qualified_name
        self.first_path = str(first_path)
        self.second_path = str(second_path)
        super().__init__(
            f"Класс {qualified_name} объявлен дважды: {self.first_path} и {self.second_path}"
        )


# ОШИБКИ МЕТРИК

class CycleError(MetricsError):
    """Цикл в цепочке наследования"""

    def __init__(self, chain):
        self.chain = list(chain)
        super().__init__("Цикл наследования: " + " -> ".join(self.chain))


class UnknownClassError(MetricsError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"Класс не найден в корпусе: {name}")


# ОШИБКИ НАБОРОВ ДАННЫХ

class DatasetError(MetricsError):
    """Базовая ошибка набора данных"""


class MissingColumnError(InputError):
    def __init__(self, columns, path=""):
        self.columns = list(columns)
        self.path = str(path)
        where = f" в {self.path}" if self.path else ""
        super().__init__(f"Нет обязательных колонок{where}: {', '.join(self.columns)}")


class CellTypeError(InputError):
    """Значение ячейки не приводится к нужному типу"""

    def __init__(self, row_index, column, value, expected):
        self.row_index = row_index
        self.column = column
        self.value = value
        self.expected = expected
        super().__init__(
            f"Строка {row_index}, колонка '{column}': ожидалось {expected}, получено {value!r}"
        )


class IdentityViolationError(DatasetError):
    """Строки, где hcc != wmc + iwmc"""

    def __init__(self, rows):
        # rows: список (row_index, name, wmc, iwmc, hcc)
        self.rows = list(rows)
        preview = "; ".join(
            f"#{idx} {name}: {wmc} + {iwmc} != {hcc}" for idx, name, wmc, iwmc, hcc in self.rows[:10]
        )
        more = f" (и еще {len(self.rows) - 10})" if len(self.rows) > 10 else ""
        super().__init__(f"Нарушено тождество HCC = WMC + IWMC в {len(self.rows)} строках: {preview}{more}")


class EmptyDatasetError(DatasetError):
    pass


# ОШИБКИ СТАТИСТИКИ

class DegenerateColumnError(DatasetError):
    """Нулевая дисперсия или слишком мало значений"""

    def __init__(self, column="", reason="нулевая дисперсия"):
        self.column = column
        super().__init__(f"Вырожденная колонка {column or '<без имени>'}: {reason}")


class LengthMismatchError(DatasetError):
    def __init__(self, left, right):
        self.left = left
        self.right = right
        super().__init__(f"Длины векторов не совпадают: {left} != {right}")


class EmptyGroupError(DatasetError):
    def __init__(self, group):
        self.group = group
        super().__init__(f"Группа '{group}' пуста")


# ОШИБКИ МОДЕЛИ

class InsufficientDataError(DatasetError):
    pass


class SingleClassError(DatasetError):
    def __init__(self, label):
        self.label = label
        super().__init__(f"В обучающей выборке только один класс: {label}")


class NonFiniteError(MetricsError):
    pass


class DimensionMismatchError(InputError):
    def __init__(self, expected, actual):
        self.expected = expected
        self.actual = actual
        super().__init__(f"Размерность признаков {actual}, модель ожидает {expected}")


class RepresentationMismatchError(InputError):
    def __init__(self, representation, missing):
        self.representation = representation
        self.missing = list(missing)
        super().__init__(
            f"Данные не подходят представлению {representation}: нет колонок {', '.join(self.missing)}"
        )


class ZeroVarianceWarning(UserWarning):
    """Признак с нулевой дисперсией в обучающей выборке"""
