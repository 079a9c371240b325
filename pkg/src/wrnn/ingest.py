"""Loading hourly request-count series.

Two sources are supported: a plain ``timestamp,count`` CSV file and a
directory of uncompressed Wikimedia ``pagecounts-raw`` hourly dumps, where
each file contributes one hourly total (the sum of the ``views`` column).
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone

import numpy as np

HOUR = timedelta(hours=1)

PAGECOUNTS_NAME = re.compile(r"^pagecounts-(\d{8})-(\d{2})0000$")


class ParseError(ValueError):
    """Malformed pagecounts record."""

    def __init__(self, message, lineno=None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno


class LoadError(ValueError):
    """A series file violates the uniform hourly sampling contract."""


@dataclass(frozen=True)
class PageRecord:
    project: str
    title: str
    views: int
    bytes: int

    def __post_init__(self):
        if not self.project or not self.title:
            raise ParseError("project and title must be non-empty")
        if self.views < 0 or self.bytes < 0:
            raise ParseError("counts must be non-negative")


@dataclass(frozen=True)
class NormStats:
    mean: float
    std: float

    def __post_init__(self):
        if not self.std > 0:
            raise ValueError(f"std must be positive, got {self.std}")


@dataclass(frozen=True)
class TimeSeries:
    """Uniformly sampled scalar series.

    ``values[i]`` is the count observed at ``start_time + i * step``.
    """

    start_time: datetime
    values: np.ndarray
    step: timedelta = HOUR

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size == 0:
            raise ValueError("a series needs a non-empty 1-D array of values")
        if self.step <= timedelta(0):
            raise ValueError("step must be positive")
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.values.size

    def timestamps(self):
        return [self.start_time + i * self.step for i in range(len(self))]

    def slice(self, start, stop=None):
        """Contiguous sub-series ``values[start:stop]`` with its own start time."""
        n = len(self)
        start, stop, _ = slice(start, stop).indices(n)
        return TimeSeries(self.start_time + start * self.step, self.values[start:stop], self.step)

    def with_values(self, values):
        return TimeSeries(self.start_time, values, self.step)


def parse_pagecounts_line(line, lineno=None):
    """Parse one ``<project> <title> <views> <bytes>`` record."""
    fields = line.rstrip("\r\n").split(" ")
    if len(fields) != 4:
        raise ParseError(f"expected 4 space-separated fields, got {len(fields)}", lineno)
    project, title, views, nbytes = fields
    try:
        views_i = int(views, 10)
        bytes_i = int(nbytes, 10)
    except ValueError:
        raise ParseError(f"non-numeric count in {line.strip()!r}", lineno) from None
    try:
        return PageRecord(project, title, views_i, bytes_i)
    except ParseError as exc:
        raise ParseError(str(exc), lineno) from None


def aggregate_hour(records):
    """Total views over the records of one hourly file."""
    return float(sum(r.views for r in records))


def iter_pagecounts(path):
    """Yield the records of one uncompressed pagecounts file."""
    with open(path, "rb") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.decode("utf-8", errors="replace")
            if not line.strip():
                continue
            yield parse_pagecounts_line(line, lineno)


def pagecounts_timestamp(filename):
    """UTC hour encoded in a ``pagecounts-YYYYMMDD-HH0000`` file name."""
    m = PAGECOUNTS_NAME.match(os.path.basename(filename))
    if m is None:
        raise LoadError(f"not a pagecounts file name: {filename!r}")
    day, hour = m.groups()
    return datetime.strptime(day + hour, "%Y%m%d%H").replace(tzinfo=timezone.utc)


def _check_hourly(stamps):
    for prev, cur in zip(stamps, stamps[1:]):
        if cur == prev:
            raise LoadError(f"duplicate timestamp {_fmt(cur)}")
        if cur < prev:
            raise LoadError(f"timestamps not increasing at {_fmt(cur)}")
        if cur - prev != HOUR:
            raise LoadError(f"gap in hourly series: {_fmt(prev)} -> {_fmt(cur)}")


def load_pagecounts_dir(directory):
    """Build an hourly total series from a directory of pagecounts dumps.

    Files are ordered by the timestamp in their names; a missing hour is an
    error rather than something to interpolate over.
    """
    files = []
    for name in os.listdir(directory):
        if PAGECOUNTS_NAME.match(name):
            files.append((pagecounts_timestamp(name), os.path.join(directory, name)))
    if not files:
        raise LoadError(f"no pagecounts-YYYYMMDD-HH0000 files in {directory}")
    files.sort()
    stamps = [t for t, _ in files]
    _check_hourly(stamps)
    totals = []
    for _, path in files:
        try:
            totals.append(aggregate_hour(iter_pagecounts(path)))
        except ParseError as exc:
            raise ParseError(f"{os.path.basename(path)}: {exc}") from None
    return TimeSeries(stamps[0], np.array(totals))


def _parse_time(text):
    text = text.strip()
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    t = datetime.fromisoformat(text)
    if t.tzinfo is None:
        t = t.replace(tzinfo=timezone.utc)
    return t.astimezone(timezone.utc)


def _fmt(t):
    return t.strftime("%Y-%m-%dT%H:%M:%SZ")


def load_csv(path):
    """Read a ``timestamp,count`` file into an hourly :class:`TimeSeries`.

    A header line is recognised by a non-numeric second field. Timestamps
    must be ISO-8601 (UTC), strictly increasing and exactly one hour apart.
    """
    stamps, values = [], []
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise LoadError(f"{path}:{lineno}: expected 'timestamp,count'")
            try:
                value = float(parts[1])
            except ValueError:
                if not stamps:  # header
                    continue
                raise LoadError(f"{path}:{lineno}: non-numeric count {parts[1]!r}") from None
            try:
                stamps.append(_parse_time(parts[0]))
            except ValueError:
                raise LoadError(f"{path}:{lineno}: bad timestamp {parts[0]!r}") from None
            values.append(value)
    if not values:
        raise LoadError(f"{path}: no data rows")
    _check_hourly(stamps)
    return TimeSeries(stamps[0], np.array(values))


def write_csv(series, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("timestamp,count\n")
        for t, v in zip(series.timestamps(), series.values):
            fh.write(f"{_fmt(t)},{float(v)!r}\n")


def standardize(series, stats=None):
    """Z-score a series.

    With ``stats=None`` the statistics are estimated from ``series`` itself
    (sample std, ``ddof=1``); pass training statistics to reuse them frozen on
    held-out data.

    Returns
    -------
    (TimeSeries, NormStats)
    """
    x = series.values
    if stats is None:
        if x.size < 2:
            raise ValueError("standardize needs at least 2 samples")
        std = float(np.std(x, ddof=1))
        if std == 0.0:
            raise ValueError("cannot standardize a constant series (std = 0)")
        stats = NormStats(float(np.mean(x)), std)
    return series.with_values((x - stats.mean) / stats.std), stats


def destandardize(value, stats):
    return value * stats.std + stats.mean
