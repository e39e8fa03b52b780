"""Durable on-disk record logs: CSV with a schema-specific header, one line
per record, strictly timestamp-ordered. One writer per log; concurrent
readers see a consistent prefix."""

from __future__ import annotations

import csv
import io
from pathlib import Path

from .sources import SCHEMAS, record_timestamp, record_to_row, row_to_record


class OutOfOrderError(ValueError):
    """Record timestamp does not advance the log; the record is dropped."""


class RecordLog:
    def __init__(self, path: str | Path, schema: str):
        if schema not in SCHEMAS:
            raise ValueError(f"unknown schema {schema!r}")
        self.path = Path(path)
        self.schema = schema
        self.columns = SCHEMAS[schema].log_columns
        self._last_timestamp: int | None = None
        if self.path.exists() and self.path.stat().st_size > 0:
            existing = self.read()
            if existing:
                self._last_timestamp = record_timestamp(existing[-1])
            self._handle = open(self.path, "a", encoding="utf-8", newline="")
        else:
            self._handle = open(self.path, "w", encoding="utf-8", newline="")
            self._write_row(list(self.columns))

    def _write_row(self, row: list[str]) -> None:
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerow(row)
        self._handle.write(buf.getvalue())
        self._handle.flush()

    def append(self, record) -> None:
        """Append one record; rejects timestamps that do not strictly advance."""
        ts = record_timestamp(record)
        if self._last_timestamp is not None and ts <= self._last_timestamp:
            raise OutOfOrderError(
                f"timestamp {ts} does not advance log (last {self._last_timestamp})"
            )
        self._write_row(record_to_row(self.schema, record))
        self._last_timestamp = ts

    def read(self) -> list:
        """Re-read every record currently in the log, in order."""
        records = []
        with open(self.path, newline="", encoding="utf-8") as f:
            reader = csv.DictReader(f)
            if reader.fieldnames is not None and tuple(reader.fieldnames) != self.columns:
                raise ValueError(
                    f"log header {reader.fieldnames} does not match schema {self.schema}"
                )
            for row in reader:
                records.append(row_to_record(self.schema, row))
        return records

    def close(self) -> None:
        self._handle.close()

    def __enter__(self) -> "RecordLog":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def __len__(self) -> int:
        return len(self.read())
