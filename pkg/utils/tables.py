# utils/tables.py
"""
Текстовые таблицы для --format table: пары ключ/значение и простые сетки.
"""
import json
from typing import Iterable, List, Sequence


def _cell(value) -> str:
    if isinstance(value, (dict, list)):
        return json.dumps(value, ensure_ascii=False, sort_keys=True)
    if value is None:
        return "-"
    return str(value)


def key_value_table(rows: Iterable[Sequence[object]]) -> str:
    rows = [(_cell(k), _cell(v)) for k, v in rows]
    if not rows:
        return ""
    width = max(len(k) for k, _ in rows)
    return "\n".join(f"{k.ljust(width)}  {v}" for k, v in rows)


def grid(headers: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    body: List[List[str]] = [[_cell(c) for c in row] for row in rows]
    widths = [len(h) for h in headers]
    for row in body:
        for i, c in enumerate(row):
            widths[i] = max(widths[i], len(c))
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths)),
             "  ".join("-" * w for w in widths)]
    lines += ["  ".join(c.ljust(w) for c, w in zip(row, widths)) for row in body]
    return "\n".join(line.rstrip() for line in lines)


def render_report(report: dict) -> str:
    """
    Плоские поля идут парами ключ/значение, списки словарей сетками,
    вложенные словари отдельными секциями.
    """
    scalars, sections = [], []
    for key in sorted(report):
        value = report[key]
        if isinstance(value, list) and value and all(isinstance(v, dict) for v in value):
            headers = sorted({h for v in value for h in v})
            sections.append(f"[{key}]\n" + grid(headers, ([v.get(h) for h in headers] for v in value)))
        elif isinstance(value, dict) and value:
            sections.append(f"[{key}]\n" + render_report(value))
        else:
            scalars.append((key, value))
    parts = [key_value_table(scalars)] if scalars else []
    return "\n\n".join(parts + sections)
