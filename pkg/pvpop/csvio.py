"""CSV and text output helpers: full-precision floats and atomic writes."""

from __future__ import annotations

import csv
import io
import math
import os
import tempfile
from collections.abc import Iterable, Sequence

from pvpop.errors import ConfigError


def format_value(value) -> str:
    """Render a cell: floats at 17 significant digits, None as empty, bools as 0/1."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return format(value, ".17g")
    return str(value)


def to_csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO(newline="")
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def atomic_write_text(path: str | os.PathLike, content: str) -> None:
    """Write to a temp file next to ``path`` then replace it."""
    path = os.fspath(path)
    dir_name = os.path.dirname(os.path.abspath(path))
    fd, tmp_path = tempfile.mkstemp(dir=dir_name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(content)
        os.replace(tmp_path, path)
    except BaseException:
        try:
            os.unlink(tmp_path)
        except OSError:
            pass
        raise


def write_csv(path: str | os.PathLike, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    atomic_write_text(path, to_csv_text(header, rows))


def read_csv(path: str | os.PathLike, required: Sequence[str]) -> list[tuple[int, dict[str, str]]]:
    """Read a CSV with a header row; returns ``(line_number, row)`` pairs.

    Raises ConfigError naming the line when a row is ragged or a required
    column is missing.
    """
    try:
        with open(path, encoding="utf-8", newline="") as f:
            reader = csv.reader(f)
            try:
                header = next(reader)
            except StopIteration:
                raise ConfigError(f"{path}: line 1: missing header row") from None
            except csv.Error as exc:
                raise ConfigError(f"{path}: line 1: {exc}") from exc
            missing = [name for name in required if name not in header]
            if missing:
                raise ConfigError(f"{path}: line 1: missing column(s) {', '.join(missing)}")
            out = []
            try:
                for fields in reader:
                    line = reader.line_num
                    if not fields:
                        continue
                    if len(fields) != len(header):
                        raise ConfigError(
                            f"{path}: line {line}: expected {len(header)} fields, got {len(fields)}"
                        )
                    out.append((line, dict(zip(header, fields))))
            except csv.Error as exc:
                raise ConfigError(f"{path}: line {reader.line_num}: {exc}") from exc
            return out
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc


def parse_float(text: str, *, line: int, column: str, path) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(
            f"{path}: line {line}: column {column!r} is not a number: {text!r}"
        ) from None
