#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Командная строка OO-HCC-METRICS

Подкоманды:
    analyze  - метрики по каталогу с исходниками (.java)
    ingest   - загрузка и предобработка набора данных
    study    - полное исследование (EDA + SVM на R1 и R2) по наборам данных
    predict  - предсказания сохраненной моделью по CSV метрик

Коды выхода: 0 - успех, 1 - ошибка выполнения/данных, 2 - ошибка входных данных.
"""

import argparse
import logging
import sys
from dataclasses import dataclass, field
from enum import Enum
from functools import reduce
from pathlib import Path
from typing import Dict, List, Optional

from dataset_pipeline import (
    merge_datasets, parse_column_mapping, preprocess_with_counts, read_dataset, summarize,
    write_samples_csv, write_stage_report,
)
from metric_errors import DegenerateColumnError, EmptyGroupError, InputError, MetricsError
from metrics_engine import compute_all, read_metrics_csv, write_metrics_csv
from predictor import (
    LOSS_FORM, compare_representations, load_model, predict_rows, render_comparison_markdown, save_model,
)
from report_charts import render_correlation_heatmap, render_density_chart
from source_parser import analyze_directory, save_corpus
from stats_analysis import (
    bug_count_statistics, correlation_matrix, density_by_label, write_correlation_csv, write_density_csv,
)
from study_config import (
    CORRELATION_DECIMALS, DEFAULT_C, DEFAULT_LEARNING_RATE, DEFAULT_MAX_ITERATIONS, DEFAULT_SEED,
    DEFAULT_TRAIN_FRACTION, DENSITY_FEATURES, KDE_GRID_SIZE, PARSE_WORKERS, PROJECT_VERSION,
    REPORT_DECIMALS, STUDY_FEATURES, validate_config,
)
from utils import format_cell, format_number, write_json, write_text

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
UNIFIED_STUDY = "unified"


class Command(str, Enum):
    ANALYZE = "analyze"
    INGEST = "ingest"
    STUDY = "study"
    PREDICT = "predict"


@dataclass
class RunConfig:
    command: Command
    inputs: List[Path]
    out: Path
    seed: int = DEFAULT_SEED
    train_fraction: float = DEFAULT_TRAIN_FRACTION
    c_parameter: float = DEFAULT_C
    balance_mode: bool = False
    column_mapping: Dict[str, str] = field(default_factory=dict)
    max_iterations: int = DEFAULT_MAX_ITERATIONS
    learning_rate: float = DEFAULT_LEARNING_RATE
    workers: Optional[int] = PARSE_WORKERS
    model_path: Optional[Path] = None

    def settings(self) -> dict:
        return {
            "seed": self.seed,
            "train_fraction": self.train_fraction,
            "c_parameter": self.c_parameter,
            "max_iterations": self.max_iterations,
            "learning_rate": self.learning_rate,
            "loss": LOSS_FORM,
            "balance_mode": self.balance_mode,
            "kde_grid_size": KDE_GRID_SIZE,
        }

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        command = Command(args.command)
        if command is Command.PREDICT:
            inputs = [Path(args.metrics_csv)]
        elif command is Command.STUDY:
            inputs = [Path(p) for p in args.datasets]
        else:
            inputs = [Path(args.source)]
        return cls(
            command=command,
            inputs=inputs,
            out=Path(args.out),
            seed=getattr(args, "seed", DEFAULT_SEED),
            train_fraction=getattr(args, "train_fraction", DEFAULT_TRAIN_FRACTION),
            c_parameter=getattr(args, "c", DEFAULT_C),
            balance_mode=getattr(args, "balance", False),
            column_mapping=parse_column_mapping(getattr(args, "map", None)),
            max_iterations=getattr(args, "max_iterations", DEFAULT_MAX_ITERATIONS),
            workers=getattr(args, "workers", PARSE_WORKERS),
            model_path=Path(args.model) if getattr(args, "model", None) else None,
        )


def setup_logging(verbose=False, log_file=None):
    """Логи в stderr и, если указан, в файл"""
    handlers = [logging.StreamHandler()]
    if log_file:
        handlers.append(logging.FileHandler(log_file, encoding="utf-8"))
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format=LOG_FORMAT,
        handlers=handlers,
        force=True,
    )


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--verbose", action="store_true", help="подробные логи")
    common.add_argument("--log-file", help="дополнительно писать логи в файл")
    common.add_argument("--out", default="out", help="каталог для результатов")

    parser = argparse.ArgumentParser(
        prog="oo-hcc-metrics",
        description="Метрики сложности ООП-классов (HCC) и предсказание дефектов",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {PROJECT_VERSION}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    analyze = subparsers.add_parser("analyze", parents=[common], help="метрики по исходникам")
    analyze.add_argument("source", help="каталог с .java файлами")
    analyze.add_argument("--workers", type=int, default=PARSE_WORKERS, help="число потоков разбора")

    ingest = subparsers.add_parser("ingest", parents=[common], help="загрузка и предобработка набора")
    ingest.add_argument("source", help="CSV с метриками и числом багов")
    ingest.add_argument("--map", help="сопоставление колонок: col=name,...")

    study = subparsers.add_parser("study", parents=[common], help="полное исследование")
    study.add_argument("datasets", nargs="+", help="CSV наборов данных")
    study.add_argument("--seed", type=int, default=DEFAULT_SEED)
    study.add_argument("--train-fraction", type=float, default=DEFAULT_TRAIN_FRACTION)
    study.add_argument("--c", type=float, default=DEFAULT_C, help="параметр C линейного SVM")
    study.add_argument("--balance", action="store_true", help="уменьшить больший класс до 50/50")
    study.add_argument("--map", help="сопоставление колонок: col=name,...")
    study.add_argument("--max-iterations", type=int, default=DEFAULT_MAX_ITERATIONS)

    predict = subparsers.add_parser("predict", parents=[common], help="предсказания сохраненной моделью")
    predict.add_argument("model", help="JSON модели")
    predict.add_argument("metrics_csv", help="CSV метрик (например, результат analyze)")

    return parser


# ANALYZE

def cmd_analyze(config: RunConfig) -> int:
    source_dir = config.inputs[0]
    if not source_dir.is_dir():
        raise InputError(f"Каталог не найден: {source_dir}")

    print(f"🔍 Разбор исходников: {source_dir}")
    result = analyze_directory(
        source_dir,
        workers=config.workers,
        progress_callback=lambda progress, message: logger.debug(f"{progress:.0f}% {message}"),
    )

    if result.errors:
        print(f"❌ Ошибки разбора в {len(result.errors)} файлах:")
        for _, error in result.errors:
            print(f"  • {error}")
        return 2

    metrics_path = config.out / "metrics.csv"
    corpus_path = config.out / "corpus.json"
    if not result.files:
        logger.warning(f"В каталоге {source_dir} нет .java файлов")
        print("⚠️ Исходники не найдены, записан пустой CSV")

    records = compute_all(result.corpus)
    write_metrics_csv(records, metrics_path, REPORT_DECIMALS)
    save_corpus(result.corpus, corpus_path)

    print(f"✅ Классов: {len(records)}, файлов: {len(result.files)}")
    print(f"📊 Метрики: {metrics_path}")
    return 0


# INGEST

def cmd_ingest(config: RunConfig) -> int:
    dataset = config.inputs[0]
    rows = read_dataset(dataset, config.column_mapping)
    samples, counts = preprocess_with_counts(rows)
    summary = summarize(samples)

    write_samples_csv(samples, config.out / "samples.csv", REPORT_DECIMALS)
    write_stage_report(counts, config.out / "stage_counts.json")
    write_json(config.out / "summary.json", summary.to_json())

    print(f"✅ {dataset.name}: строк {len(rows)}, после предобработки {counts.remaining}")
    print(f"📊 Дефектных: {summary.faulty} ({summary.faulty_pct:.2f}%), "
          f"без дефектов: {summary.non_faulty} ({summary.non_faulty_pct:.2f}%)")
    return 0


# STUDY

def _density_outputs(samples, feature, study_dir: Path) -> Optional[dict]:
    try:
        faulty, non_faulty = density_by_label(samples, feature, KDE_GRID_SIZE)
    except (DegenerateColumnError, EmptyGroupError) as e:
        logger.warning(f"Плотность для {feature} пропущена: {e}")
        return None

    curves = [faulty, non_faulty, faulty.scaled(), non_faulty.scaled()]
    write_density_csv(curves, study_dir / f"density_{feature}.csv")
    render_density_chart(curves[2:], study_dir / f"density_{feature}.png", title=f"KDE {feature}", x_label=feature)
    return {
        "bandwidth": {
            faulty.group_label: format_number(faulty.bandwidth, REPORT_DECIMALS),
            non_faulty.group_label: format_number(non_faulty.bandwidth, REPORT_DECIMALS),
        },
        "peak_scaled": {
            faulty.group_label: format_number(faulty.scaled().peak(), REPORT_DECIMALS),
            non_faulty.group_label: format_number(non_faulty.scaled().peak(), REPORT_DECIMALS),
        },
    }


def run_study(name: str, rows, config: RunConfig):
    """Один набор: предобработка -> EDA -> сравнение представлений; пишет файлы в out/<name>"""
    study_dir = config.out / name
    samples, counts = preprocess_with_counts(rows)
    summary = summarize(samples)
    write_samples_csv(samples, study_dir / "samples.csv", REPORT_DECIMALS)
    write_stage_report(counts, study_dir / "stage_counts.json")

    matrix = correlation_matrix(samples, STUDY_FEATURES)
    write_correlation_csv(matrix, study_dir / "correlation.csv", CORRELATION_DECIMALS)
    render_correlation_heatmap(matrix, study_dir / "correlation.png")

    densities = {}
    for feature in DENSITY_FEATURES:
        outputs = _density_outputs(samples, feature, study_dir)
        if outputs is not None:
            densities[feature] = outputs

    comparison = compare_representations(
        samples,
        seed=config.seed,
        train_fraction=config.train_fraction,
        c=config.c_parameter,
        balance=config.balance_mode,
        max_iterations=config.max_iterations,
        learning_rate=config.learning_rate,
    )
    for run in (comparison.r1, comparison.r2):
        save_model(run.model, run.scaler, study_dir / f"model_{run.representation.name}.json")

    bugs = bug_count_statistics(rows)
    report = {
        "dataset": name,
        "stage_counts": counts.to_json(),
        "summary": summary.to_json(),
        "bug_counts": {k: format_number(v, REPORT_DECIMALS) if isinstance(v, float) else v
                       for k, v in bugs.to_json().items()},
        "correlation": matrix.to_json(CORRELATION_DECIMALS),
        "density": densities,
        "classification": comparison.to_json(REPORT_DECIMALS),
    }
    write_json(study_dir / "study.json", report)
    return report, comparison


def _study_names(paths: List[Path]) -> List[str]:
    names = []
    for path in paths:
        name = path.stem
        if name in names or name == UNIFIED_STUDY:
            name = f"{name}_{len(names) + 1}"
        names.append(name)
    return names


def render_study_markdown(reports: List[dict], comparisons, config: RunConfig) -> str:
    lines = [
        "# Отчет исследования",
        "",
        f"seed = {config.seed}, train_fraction = {config.train_fraction}, C = {config.c_parameter} ({LOSS_FORM}), "
        f"balance = {config.balance_mode}",
        "",
        "## Наборы данных",
        "",
        "| dataset | total | faulty | non-faulty | faulty % | non-faulty % |",
        "|---|---|---|---|---|---|",
    ]
    for report in reports:
        s = report["summary"]
        lines.append(
            f"| {report['dataset']} | {s['total']} | {s['faulty']} | {s['non_faulty']} | "
            f"{s['faulty_pct']:.2f} | {s['non_faulty_pct']:.2f} |"
        )
    lines += ["", "## Корреляции Пирсона", ""]
    for report in reports:
        corr = report["correlation"]
        lines.append(f"### {report['dataset']}")
        lines.append("")
        lines.append("| | " + " | ".join(corr["features"]) + " |")
        lines.append("|---|" + "---|" * len(corr["features"]))
        for feature, row in zip(corr["features"], corr["values"]):
            lines.append(f"| {feature} | " + " | ".join(format_cell(v, CORRELATION_DECIMALS) for v in row) + " |")
        lines.append("")
    lines += ["## Классификация", ""]
    lines.append(render_comparison_markdown(comparisons, REPORT_DECIMALS))
    return "\n".join(lines)


def cmd_study(config: RunConfig) -> int:
    names = _study_names(config.inputs)
    datasets = []
    for name, path in zip(names, config.inputs):
        try:
            datasets.append((name, read_dataset(path, config.column_mapping, source=name)))
        except MetricsError as e:
            logger.error(f"Набор {name} ({path}): {e}")
            raise
        print(f"📥 {name}: {len(datasets[-1][1])} строк")

    if len(datasets) >= 2:
        datasets.append((UNIFIED_STUDY, reduce(merge_datasets, (rows for _, rows in datasets))))

    reports = []
    comparisons = []
    for name, rows in datasets:
        print(f"🔬 Исследование: {name}")
        try:
            report, comparison = run_study(name, rows, config)
        except MetricsError as e:
            logger.error(f"Набор {name}: {e}")
            raise
        reports.append(report)
        comparisons.append((name, comparison))
        accuracy = report["classification"]["representations"]
        print(f"  📊 accuracy R1 = {format_cell(accuracy['R1']['accuracy'])}, "
              f"R2 = {format_cell(accuracy['R2']['accuracy'])}")

    bundle = {
        "version": PROJECT_VERSION,
        "config": config.settings(),
        "studies": reports,
    }
    write_json(config.out / "study_report.json", bundle)
    write_text(config.out / "study_report.md", render_study_markdown(reports, comparisons, config))

    print(f"🎉 Готово: {len(reports)} исследований, отчет в {config.out}")
    return 0


# PREDICT

def cmd_predict(config: RunConfig) -> int:
    model, scaler = load_model(config.model_path)
    metrics_csv = config.inputs[0]
    if not metrics_csv.is_file():
        raise InputError(f"Файл не найден: {metrics_csv}")

    predictions = predict_rows(model, scaler, read_metrics_csv(metrics_csv), REPORT_DECIMALS)
    out_path = config.out / "predictions.csv"
    out_path.parent.mkdir(parents=True, exist_ok=True)
    predictions.to_csv(out_path, index=False, lineterminator="\n")

    print(f"✅ Предсказаний: {len(predictions)} (модель {model.representation.name})")
    print(f"📊 Результат: {out_path}")
    return 0


COMMANDS = {
    Command.ANALYZE: cmd_analyze,
    Command.INGEST: cmd_ingest,
    Command.STUDY: cmd_study,
    Command.PREDICT: cmd_predict,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.verbose, args.log_file)

    try:
        config = RunConfig.from_args(args)
    except ValueError as e:
        print(f"❌ {e}")
        return 2

    errors = validate_config(config.settings())
    if errors:
        print("❌ Найдены ошибки в параметрах:")
        for error in errors:
            print(f"  • {error}")
        return 2

    try:
        return COMMANDS[config.command](config)
    except MetricsError as e:
        print(f"❌ {e}")
        return e.exit_code
    except FileNotFoundError as e:
        print(f"❌ Файл не найден: {e.filename}")
        return 2
    except Exception as e:
        logger.debug("Необработанная ошибка", exc_info=True)
        print(f"❌ Ошибка: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
