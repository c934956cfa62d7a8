import csv
import io
import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, Optional

from app.config import get_settings
from app.schemas.report import ResultTable, ValidationReport

logger = logging.getLogger(__name__)
settings = get_settings()


def format_number(value: Any) -> str:
    """Integers verbatim, floats at CSV_SIGNIFICANT_DIGITS significant digits."""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return f"{value:.{settings.CSV_SIGNIFICANT_DIGITS}g}"
    return str(value)


def _json_value(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, complex):
        return [value.real, value.imag]
    return value


class ExportService:
    @staticmethod
    def to_csv(table: ResultTable) -> str:
        buffer = io.StringIO()
        buffer.write(f"# schema_version={settings.SCHEMA_VERSION}\n")
        buffer.write(f"# command={table.command}\n")
        for key, value in {**table.params, **table.meta}.items():
            buffer.write(f"# {key}={format_number(value)}\n")
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(table.columns)
        for row in table.rows:
            writer.writerow([format_number(value) for value in row])
        return buffer.getvalue()

    @staticmethod
    def to_json(table: ResultTable) -> str:
        payload = {
            "schema_version": settings.SCHEMA_VERSION,
            "command": table.command,
            "params": {k: _json_value(v) for k, v in {**table.params, **table.meta}.items()},
            "rows": [
                {column: _json_value(value) for column, value in zip(table.columns, row)}
                for row in table.rows
            ],
        }
        return json.dumps(payload, indent=2) + "\n"

    @staticmethod
    def report_to_json(report: ValidationReport) -> str:
        return report.model_dump_json(indent=2) + "\n"

    @staticmethod
    def write(text: str, out: Optional[str]) -> None:
        """Write to ``out`` or stdout when ``out`` is None or '-'."""
        if out is None or out == "-":
            sys.stdout.write(text)
            return
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        logger.info(f"wrote {path}")

    @staticmethod
    def render(table: ResultTable, output_format: str) -> str:
        if output_format == "json":
            return ExportService.to_json(table)
        return ExportService.to_csv(table)
