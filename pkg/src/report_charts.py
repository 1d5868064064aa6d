#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
PNG-графики для отчета исследования (Pillow):
наложение кривых плотности и тепловая карта корреляций
"""

import logging
from pathlib import Path
from typing import Sequence

from PIL import Image, ImageDraw, ImageFont

from stats_analysis import CorrelationMatrix, DensityCurve

logger = logging.getLogger(__name__)

CHART_SIZE = (640, 400)
MARGIN = 50
BACKGROUND = (255, 255, 255)
AXIS_COLOR = (60, 60, 60)
NA_COLOR = (200, 200, 200)

# Цвета кривых по метке группы
CURVE_COLORS = {
    "faulty": (200, 40, 40),
    "non-faulty": (40, 90, 200),
    "faulty_scaled": (240, 130, 130),
    "non-faulty_scaled": (120, 160, 240),
}


def _font():
    return ImageFont.load_default()


def _save(image: Image.Image, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    image.save(path, format="PNG")
    logger.debug(f"График сохранен: {path}")
    return path


def render_density_chart(curves: Sequence[DensityCurve], path, title="", x_label="") -> Path:
    """Линии плотности (по одной на кривую) с осями и легендой"""
    width, height = CHART_SIZE
    image = Image.new("RGB", CHART_SIZE, BACKGROUND)
    draw = ImageDraw.Draw(image)
    font = _font()

    plot_left, plot_right = MARGIN, width - MARGIN
    plot_top, plot_bottom = MARGIN, height - MARGIN
    draw.line([(plot_left, plot_bottom), (plot_right, plot_bottom)], fill=AXIS_COLOR, width=1)
    draw.line([(plot_left, plot_top), (plot_left, plot_bottom)], fill=AXIS_COLOR, width=1)

    if curves:
        x_min = min(float(c.grid.min()) for c in curves)
        x_max = max(float(c.grid.max()) for c in curves)
        y_max = max(float(c.density.max()) for c in curves) or 1.0
        x_span = (x_max - x_min) or 1.0

        for index, curve in enumerate(curves):
            points = [
                (plot_left + (x - x_min) / x_span * (plot_right - plot_left),
                 plot_bottom - y / y_max * (plot_bottom - plot_top))
                for x, y in zip(curve.grid, curve.density)
            ]
            color = CURVE_COLORS.get(curve.group_label, AXIS_COLOR)
            draw.line(points, fill=color, width=2)
            legend_y = plot_top + 14 * index
            draw.line([(plot_right - 110, legend_y + 5), (plot_right - 90, legend_y + 5)], fill=color, width=2)
            draw.text((plot_right - 85, legend_y), curve.group_label, fill=AXIS_COLOR, font=font)

        draw.text((plot_left, plot_bottom + 5), f"{x_min:.2f}", fill=AXIS_COLOR, font=font)
        draw.text((plot_right - 40, plot_bottom + 5), f"{x_max:.2f}", fill=AXIS_COLOR, font=font)
        draw.text((5, plot_top - 15), f"{y_max:.4f}", fill=AXIS_COLOR, font=font)

    draw.text((plot_left, 15), title, fill=AXIS_COLOR, font=font)
    draw.text(((plot_left + plot_right) // 2 - 20, height - 20), x_label, fill=AXIS_COLOR, font=font)
    draw.text((5, plot_bottom - 10), "density", fill=AXIS_COLOR, font=font)
    return _save(image, path)


def _heat_color(value):
    """-1 синий, 0 белый, +1 красный"""
    if value is None:
        return NA_COLOR
    v = max(-1.0, min(1.0, value))
    if v >= 0:
        return (255, int(255 * (1 - v)), int(255 * (1 - v)))
    return (int(255 * (1 + v)), int(255 * (1 + v)), 255)


def render_correlation_heatmap(matrix: CorrelationMatrix, path, cell_size=70) -> Path:
    """Тепловая карта матрицы корреляций с подписями значений (2 знака)"""
    size = len(matrix.feature_names)
    offset = 60
    image = Image.new("RGB", (offset + cell_size * size + 10, offset + cell_size * size + 10), BACKGROUND)
    draw = ImageDraw.Draw(image)
    font = _font()

    for i, name in enumerate(matrix.feature_names):
        draw.text((offset + i * cell_size + 5, offset - 20), name, fill=AXIS_COLOR, font=font)
        draw.text((5, offset + i * cell_size + cell_size // 2 - 5), name, fill=AXIS_COLOR, font=font)

    for i, row in enumerate(matrix.values):
        for j, value in enumerate(row):
            x0 = offset + j * cell_size
            y0 = offset + i * cell_size
            draw.rectangle([x0, y0, x0 + cell_size - 1, y0 + cell_size - 1], fill=_heat_color(value), outline=AXIS_COLOR)
            label = "NA" if value is None else f"{value:.2f}"
            draw.text((x0 + cell_size // 2 - 12, y0 + cell_size // 2 - 5), label, fill=(0, 0, 0), font=font)

    return _save(image, path)
