"""Sample containers, empirical PIT and x-ordering with concomitants."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


class DataError(ValueError):
    """Input data violates a sample contract (too short, non-finite, unparseable)."""


def _as_vector(values: Iterable[float]) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class PairedSample:
    """n raw (x, y) observations, kept in input order."""

    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self):
        xs = _as_vector(self.xs)
        ys = _as_vector(self.ys)
        if xs.ndim != 1 or ys.ndim != 1 or len(xs) != len(ys):
            raise DataError("xs and ys must be 1-D sequences of equal length")
        if len(xs) < 2:
            raise DataError("insufficient data")
        for name, arr in (("x", xs), ("y", ys)):
            bad = np.flatnonzero(~np.isfinite(arr))
            if bad.size:
                raise DataError(f"non-finite value at row {bad[0]} ({name})")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    @property
    def n(self) -> int:
        return len(self.xs)

    def swapped(self) -> "PairedSample":
        return PairedSample(self.ys, self.xs)


@dataclass(frozen=True, eq=False)
class UnitSquareSample:
    """(u, v) pairs with every coordinate in (0, 1]."""

    us: np.ndarray
    vs: np.ndarray

    def __post_init__(self):
        us = _as_vector(self.us)
        vs = _as_vector(self.vs)
        if us.ndim != 1 or vs.ndim != 1 or len(us) != len(vs):
            raise DataError("us and vs must be 1-D sequences of equal length")
        if len(us) < 2:
            raise DataError("insufficient data")
        for name, arr in (("u", us), ("v", vs)):
            bad = np.flatnonzero(~((arr > 0.0) & (arr <= 1.0)))
            if bad.size:
                raise DataError(f"{name} value outside (0, 1] at row {bad[0]}")
        object.__setattr__(self, "us", us)
        object.__setattr__(self, "vs", vs)

    @property
    def n(self) -> int:
        return len(self.us)

    def to_paired(self) -> PairedSample:
        return PairedSample(self.us, self.vs)


@dataclass(frozen=True, eq=False)
class OrderedSample:
    """Permutation sorting a sample by x, plus the y concomitants in that order."""

    permutation: np.ndarray
    y_ordered: np.ndarray
    tie_seed: int | None = field(default=None)


def load_sample(rows: Sequence[Sequence[float]]) -> PairedSample:
    """Build a PairedSample from ``(x, y)`` rows, preserving row order."""
    rows = list(rows)
    if len(rows) < 2:
        raise DataError("insufficient data")
    xs = np.empty(len(rows))
    ys = np.empty(len(rows))
    for i, row in enumerate(rows):
        if len(row) != 2:
            raise DataError(f"row {i} does not have exactly two values")
        x, y = float(row[0]), float(row[1])
        if not (math.isfinite(x) and math.isfinite(y)):
            raise DataError(f"non-finite value at row {i}")
        xs[i], ys[i] = x, y
    return PairedSample(xs, ys)


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def read_csv(source: str | Path | io.TextIOBase) -> PairedSample:
    """Read a two-column numeric CSV.

    A single header line is allowed and detected by its first field not
    parsing as a number. Any later row that fails to parse is an error
    quoting its 1-based line number.
    """
    if isinstance(source, (str, Path)):
        with open(source, newline="", encoding="utf-8") as fh:
            return read_csv(fh)

    rows = []
    for lineno, fields in enumerate(csv.reader(source), start=1):
        if not fields or all(not f.strip() for f in fields):
            continue
        if lineno == 1 and not _is_number(fields[0].strip()):
            continue
        if len(fields) != 2:
            raise DataError(f"line {lineno}: expected 2 columns, got {len(fields)}")
        try:
            x, y = float(fields[0]), float(fields[1])
        except ValueError:
            raise DataError(f"line {lineno}: cannot parse {fields!r} as numbers") from None
        if not (math.isfinite(x) and math.isfinite(y)):
            raise DataError(f"line {lineno}: non-finite value")
        rows.append((x, y))
    return load_sample(rows)


def max_ranks(values: np.ndarray) -> np.ndarray:
    """``#{j : values[j] <= values[i]}`` for every i (ties share the largest rank)."""
    values = np.asarray(values)
    return np.searchsorted(np.sort(values), values, side="right").astype(np.int64)


def empirical_pit(s: PairedSample) -> UnitSquareSample:
    """Right-continuous ECDF of each coordinate evaluated at the observations."""
    n = s.n
    return UnitSquareSample(max_ranks(s.xs) / n, max_ranks(s.ys) / n)


def order_by_x(s: PairedSample, tie_seed: int | None = 0) -> OrderedSample:
    """Sort by x; equal x values are put in a uniformly random order drawn from ``tie_seed``.

    The shuffle is applied before a stable sort, so distinct x values give
    the same permutation for every seed.
    """
    shuffle = np.random.default_rng(tie_seed).permutation(s.n)
    perm = shuffle[np.argsort(s.xs[shuffle], kind="stable")]
    return OrderedSample(perm, s.ys[perm], tie_seed)
