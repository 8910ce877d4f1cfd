"""CSV writing with fixed 12-significant-digit formatting."""
from __future__ import annotations

import csv
import io
import sys
from pathlib import Path
from typing import Iterable, Sequence


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool,)):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    x = float(value)
    if x == 0.0:
        x = 0.0  # drop the sign of -0.0
    return format(x, ".12g")


def occupation_label(occupation: Sequence[int]) -> str:
    sep = "" if max(occupation, default=0) < 10 else "."
    return sep.join(str(int(m)) for m in occupation)


def render_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write_csv(header: Sequence[str], rows: Iterable[Sequence], path: str | Path | None = None) -> None:
    text = render_csv(header, rows)
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text)
