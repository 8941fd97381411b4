"""
Report rendering: pretty tables, JSON and CSV on stdout
"""
import csv
import io
from typing import Callable, List, Sequence

from pydantic import BaseModel


def render_json(report: BaseModel) -> str:
    return report.model_dump_json(indent=2, exclude_none=True)


def render_csv(header: Sequence[str], rows: Sequence[Sequence[object]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(["" if v is None else v for v in row])
    return buffer.getvalue().rstrip("\n")


def render_table(header: Sequence[str], rows: Sequence[Sequence[object]]) -> str:
    """Left-aligned columns separated by two spaces"""
    cells: List[List[str]] = [[str(h) for h in header]] + [
        ["-" if v is None else str(v) for v in row] for row in rows
    ]
    widths = [max(len(row[i]) for row in cells) for i in range(len(header))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def emit(
    report: BaseModel,
    fmt: str,
    header: Sequence[str],
    rows: Sequence[Sequence[object]],
    pretty: Callable[[], str],
) -> None:
    """Print one report in the requested format"""
    if fmt == "json":
        print(render_json(report))
    elif fmt == "csv":
        print(render_csv(header, rows))
    else:
        print(pretty())


def join(values: Sequence[object]) -> str:
    return " ".join(str(v) for v in values)
