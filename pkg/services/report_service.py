from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union
import csv
import io
import json
import logging

import jsonschema

from morph_eval.metrics import AGGREGATES
from morph_eval.models import REPORT_CSV_COLUMNS, CoveragePoint, MetricsReport, SweepRow
from morph_eval.schemas import METRICS_REPORT_SCHEMA
from morph_eval.tokenizers.vocabulary import write_text_atomic

logger = logging.getLogger(__name__)

SWEEP_CSV_HEADER = ["vocab_size", "split", "metric", "value", "ci_low", "ci_high", "status"]
SWEEP_METRICS = [
    "subwords_per_word", "fertility", "continuation_rate",
    "micro_p", "micro_r", "micro_f1", "macro_p", "macro_r", "macro_f1",
    "lemma_single_rate", "lemma_hit_rate", "lemma_span_rate", "exact_match_rate",
    "overseg", "underseg", "cer", "wer", "mer", "wil", "wip",
    "affix_coverage", "affix_atomicity", "unk_word_rate",
    "item_count", "skipped_nonconcatenative", "skipped_unknown", "missing_count",
]
GRANULARITY_METRICS = ["fertility", "fertility_sd", "continuation_rate", "continuation_sd", "mean_token_length", "unk_word_rate"]
SUMMARY_COLUMNS = [("Sw/W", "subwords_per_word"), ("F1mu", "micro_f1"), ("F1M", "macro_f1"), ("LBoun", "lemma_hit_rate"), ("ExMatch", "exact_match_rate"), ("OverSeg", "overseg"), ("CER", "cer")]


def validate_report(data: Dict[str, Any]) -> Dict[str, Union[bool, str]]:
    """
    Validate a serialized report against the MetricsReport schema

    Args:
        data: The JSON data to validate

    Returns:
        Dictionary with validation result and error message if any
    """
    try:
        jsonschema.validate(instance=data, schema=METRICS_REPORT_SCHEMA)
        return {"valid": True, "message": ""}
    except jsonschema.exceptions.ValidationError as e:
        return {"valid": False, "message": str(e)}
    except Exception as e:
        return {"valid": False, "message": f"Unexpected validation error: {str(e)}"}


def _format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def _csv_text(rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    for row in rows:
        writer.writerow(row)
    return buffer.getvalue()


class ReportService:
    """
    Service for serializing metric reports, sweep tables and coverage curves
    """

    @staticmethod
    def report_filename(report: MetricsReport) -> str:
        size = f"-{report.vocab_size}" if report.vocab_size is not None else ""
        return f"{report.tokenizer}{size}-{report.split}"

    @staticmethod
    def report_json(report: MetricsReport) -> str:
        data = report.model_dump(mode="json")
        validation = validate_report(data)
        if not validation["valid"]:
            logger.warning(f"Report {report.tokenizer}/{report.split} does not match the schema: {validation['message']}")
        return json.dumps(data, indent=2, ensure_ascii=False, sort_keys=False) + "\n"

    @staticmethod
    def report_csv(reports: Sequence[MetricsReport]) -> str:
        """CSV table, one row per report, columns in the reference diagnostic order."""
        header = [name for name, _ in REPORT_CSV_COLUMNS]
        rows = [[_format_value(getattr(report, field)) for _, field in REPORT_CSV_COLUMNS] for report in reports]
        return _csv_text([header] + rows)

    @staticmethod
    def report_markdown(reports: Sequence[MetricsReport]) -> str:
        header = [name for name, _ in REPORT_CSV_COLUMNS]
        lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
        for report in reports:
            cells = []
            for _, field in REPORT_CSV_COLUMNS:
                value = getattr(report, field)
                cells.append(f"{value:.2f}" if isinstance(value, float) else _format_value(value))
            lines.append("| " + " | ".join(cells) + " |")
        return "\n".join(lines) + "\n"

    @staticmethod
    def write_reports(reports: Sequence[MetricsReport], out_dir: Path, formats: Sequence[str]) -> List[Path]:
        """
        Write one JSON file per report plus a combined CSV and markdown table

        Args:
            reports: Reports to write
            out_dir: Output directory (created if needed)
            formats: Any of json, csv, md

        Returns:
            Paths of the written files
        """
        out_dir.mkdir(parents=True, exist_ok=True)
        written: List[Path] = []
        if "json" in formats:
            for report in reports:
                path = out_dir / f"{ReportService.report_filename(report)}.json"
                write_text_atomic(path, ReportService.report_json(report))
                written.append(path)
        if "csv" in formats:
            path = out_dir / "reports.csv"
            write_text_atomic(path, ReportService.report_csv(reports))
            written.append(path)
        if "md" in formats:
            path = out_dir / "reports.md"
            write_text_atomic(path, ReportService.report_markdown(reports))
            written.append(path)
        for path in written:
            logger.info(f"Wrote {path}")
        return written

    @staticmethod
    def console_summary(reports: Sequence[MetricsReport]) -> str:
        """Fixed-width summary table for the terminal"""
        header = ["Tokenizer", "Vocab", "Split"] + [name for name, _ in SUMMARY_COLUMNS] + ["Items", "Skipped"]
        rows = [header]
        for report in reports:
            row = [report.tokenizer, _format_value(report.vocab_size), report.split]
            row += [f"{getattr(report, field):.3f}" for _, field in SUMMARY_COLUMNS]
            row += [str(report.item_count), str(report.skipped_nonconcatenative + report.skipped_unknown + report.missing_count)]
            rows.append(row)
        widths = [max(len(row[index]) for row in rows) for index in range(len(header))]
        return "\n".join("  ".join(cell.ljust(width) for cell, width in zip(row, widths)) for row in rows)

    @staticmethod
    def sweep_long_csv(rows: Sequence[SweepRow]) -> str:
        """Long-format sweep table: one line per (vocab size, split, metric)"""
        lines: List[List[str]] = [SWEEP_CSV_HEADER]
        for row in rows:
            if row.status != "ok":
                lines.append([str(row.vocab_size), row.split, "error", "", "", "", row.status])
                continue
            status = "degenerate" if row.degenerate else "exhausted" if row.exhausted else "ok"
            if row.vocab_entries is not None:
                lines.append([str(row.vocab_size), row.split, "vocab_entries", str(row.vocab_entries), "", "", status])
            if row.report is not None:
                for metric in SWEEP_METRICS:
                    interval = row.report.cis.get(metric) if metric in AGGREGATES else None
                    lines.append([
                        str(row.vocab_size), row.split, metric, _format_value(getattr(row.report, metric)),
                        _format_value(interval.low if interval else None),
                        _format_value(interval.high if interval else None),
                        status,
                    ])
            if row.granularity is not None:
                for metric in GRANULARITY_METRICS:
                    lines.append([
                        str(row.vocab_size), row.split, metric,
                        _format_value(getattr(row.granularity, metric)), "", "", status,
                    ])
        return _csv_text(lines)

    @staticmethod
    def sweep_markdown(rows: Sequence[SweepRow]) -> str:
        """
        Compact sweep tables: one row per (vocab size, split) and per-size averages

        Degenerate and failed rows are listed below the tables, not averaged in.
        Exhausted sizes stay in the tables and are listed with their real entry count.
        """
        evaluated = [row for row in rows if row.status == "ok" and row.report is not None]
        kept = [row for row in evaluated if not row.degenerate]
        columns = [("Sw/W", "subwords_per_word"), ("Pmu", "micro_p"), ("Rmu", "micro_r"), ("F1mu", "micro_f1"),
                   ("PM", "macro_p"), ("RM", "macro_r"), ("F1M", "macro_f1"), ("LSingle", "lemma_single_rate"),
                   ("LBoun", "lemma_hit_rate"), ("ExMatch", "exact_match_rate"), ("OverSeg", "overseg"), ("UnderSeg", "underseg")]

        lines = ["## Per split", "", "| Vocab | Split | " + " | ".join(name for name, _ in columns) + " |",
                 "|" + "---|" * (len(columns) + 2)]
        for row in kept:
            cells = [f"{getattr(row.report, field):.2f}" for _, field in columns]
            lines.append(f"| {row.vocab_size} | {row.split} | " + " | ".join(cells) + " |")

        lines += ["", "## Average over splits", "", "| Vocab | " + " | ".join(name for name, _ in columns) + " |",
                  "|" + "---|" * (len(columns) + 1)]
        for size in sorted({row.vocab_size for row in kept}):
            group = [row.report for row in kept if row.vocab_size == size]
            cells = [f"{sum(getattr(report, field) for report in group) / len(group):.2f}" for _, field in columns]
            lines.append(f"| {size} | " + " | ".join(cells) + " |")

        granular = [row for row in rows if row.status == "ok" and row.granularity is not None]
        if granular:
            lines += ["", "## Corpus granularity", "", "| Vocab | Fertility | Continuation | Band |", "|---|---|---|---|"]
            for row in granular:
                stats = row.granularity
                lines.append(
                    f"| {row.vocab_size} | {stats.fertility:.2f} ± {stats.fertility_sd:.2f} | "
                    f"{stats.continuation_rate:.2f} ± {stats.continuation_sd:.2f} | {stats.band} |"
                )

        exhausted = sorted({(row.vocab_size, row.vocab_entries) for row in rows if row.exhausted})
        if exhausted:
            lines += ["", "Sizes beyond the point where training ran out of merges:", ""]
            for size, entries in exhausted:
                lines.append(f"- {size}: {entries} entries")

        excluded = [row for row in rows if row.degenerate or row.status != "ok"]
        if excluded:
            lines += ["", "Excluded rows:", ""]
            for row in excluded:
                reason = row.error if row.status != "ok" else "near-character granularity"
                lines.append(f"- {row.vocab_size} / {row.split}: {reason}")
        return "\n".join(lines) + "\n"

    @staticmethod
    def coverage_csv(points: Sequence[CoveragePoint]) -> str:
        header = ["k", "vocab_fraction", "train_coverage", "test_coverage", "test_type_coverage"]
        rows = [[str(p.k), _format_value(p.vocab_fraction), _format_value(p.train_coverage),
                 _format_value(p.test_coverage), _format_value(p.test_type_coverage)] for p in points]
        return _csv_text([header] + rows)

    @staticmethod
    def write_text(path: Path, text: str) -> Path:
        path.parent.mkdir(parents=True, exist_ok=True)
        write_text_atomic(path, text)
        logger.info(f"Wrote {path}")
        return path

    @staticmethod
    def load_report(path: Path) -> Optional[MetricsReport]:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
        validation = validate_report(data)
        if not validation["valid"]:
            logger.warning(f"{path} is not a valid report: {validation['message']}")
            return None
        return MetricsReport.model_validate(data)
