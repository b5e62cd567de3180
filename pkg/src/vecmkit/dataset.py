"""
Annual time-series containers, CSV ingestion, transforms and summary statistics.

Input files are wide format: a header row, an integer year in the first
column and one decimal column per series. Missing cells abort ingestion;
nothing is imputed.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .errors import (
    DomainError,
    IngestionError,
    InsufficientDataError,
    SchemaError,
)


def _frozen(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Series:
    """
    One named annual series.

    Parameters
    ----------
    name : str
        Identifier used throughout reports.
    values : array_like
        Observations, one per year.
    time_index : array_like of int
        Strictly increasing years without gaps.
    unit : str
        Free-text unit label.
    lineage : tuple of str
        Transforms applied since ingestion, oldest first.
    """

    name: str
    values: np.ndarray
    time_index: np.ndarray
    unit: str = ""
    lineage: tuple = ()

    def __post_init__(self):
        values = _frozen(self.values, float)
        index = _frozen(self.time_index, np.int64)
        if values.ndim != 1 or index.ndim != 1:
            raise ValueError("values and time_index must be one-dimensional")
        if len(values) == 0:
            raise InsufficientDataError(f"series {self.name!r} is empty")
        if len(values) != len(index):
            raise ValueError(
                f"series {self.name!r}: {len(values)} values but {len(index)} years"
            )
        if len(index) > 1 and np.any(np.diff(index) != 1):
            raise IngestionError(
                f"series {self.name!r}: years must be consecutive and increasing"
            )
        if not np.all(np.isfinite(values)):
            raise IngestionError(f"series {self.name!r} contains non-finite values")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "time_index", index)
        object.__setattr__(self, "lineage", tuple(self.lineage))

    def __len__(self):
        return len(self.values)

    def renamed(self, name: str) -> "Series":
        return Series(name, self.values, self.time_index, self.unit, self.lineage)


@dataclass(frozen=True)
class DescriptiveStats:
    mean: float
    median: float
    max: float
    min: float
    sd: float
    n_obs: int


class Dataset:
    """
    Ordered collection of series sharing one annual time index.

    Series are addressed by name (``d["FDI"]``) and the whole panel is
    available as a ``T x k`` array through :attr:`matrix`.
    """

    def __init__(self, series: Iterable[Series]):
        series = tuple(series)
        if not series:
            raise InsufficientDataError("a dataset needs at least one series")
        names = [s.name for s in series]
        if len(set(names)) != len(names):
            raise ValueError(f"series names must be unique, got {names}")
        index = series[0].time_index
        for s in series[1:]:
            if not np.array_equal(s.time_index, index):
                raise ValueError(
                    f"series {s.name!r} does not share the time index of {series[0].name!r}"
                )
        self._series = series
        self._by_name = {s.name: s for s in series}
        matrix = np.column_stack([s.values for s in series])
        matrix.setflags(write=False)
        self._matrix = matrix

    @classmethod
    def from_matrix(cls, names: Sequence[str], time_index, matrix, units=None) -> "Dataset":
        matrix = np.asarray(matrix, dtype=float)
        if matrix.ndim == 1:
            matrix = matrix[:, None]
        units = units or [""] * len(names)
        return cls(
            Series(n, matrix[:, j], time_index, units[j]) for j, n in enumerate(names)
        )

    @property
    def series(self) -> tuple:
        return self._series

    @property
    def names(self) -> list:
        return [s.name for s in self._series]

    @property
    def time_index(self) -> np.ndarray:
        return self._series[0].time_index

    @property
    def T(self) -> int:
        return len(self.time_index)

    @property
    def k(self) -> int:
        return len(self._series)

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    def __getitem__(self, name: str) -> Series:
        try:
            return self._by_name[name]
        except KeyError:
            raise KeyError(f"no series named {name!r}; have {self.names}") from None

    def __contains__(self, name) -> bool:
        return name in self._by_name

    def __len__(self):
        return self.T

    def __repr__(self):
        return f"Dataset(T={self.T}, k={self.k}, names={self.names})"

    def select(self, names: Sequence[str]) -> "Dataset":
        return Dataset(self[n] for n in names)

    def replace(self, series: Series) -> "Dataset":
        """Swap in a transformed series at the position of ``series.name``."""
        return Dataset(series if s.name == series.name else s for s in self._series)

    def map(self, func, names: Optional[Sequence[str]] = None) -> "Dataset":
        """Apply a Series -> Series transform to the named (default: all) series."""
        targets = set(self.names if names is None else names)
        return Dataset(func(s) if s.name in targets else s for s in self._series)

    def difference(self) -> "Dataset":
        return Dataset(first_difference(s).renamed(s.name) for s in self._series)


def load_csv(path, column_spec: Optional[Mapping[str, str]] = None, units=None) -> Dataset:
    """
    Read a wide-format annual CSV.

    Parameters
    ----------
    path : path-like
        UTF-8 file whose first column holds integer years.
    column_spec : mapping, optional
        ``{series name: column header}``. Output order follows the mapping.
        Defaults to every non-year column under its own header.
    units : mapping, optional
        ``{series name: unit label}``.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if any(cell.strip() for cell in r)]
    if not rows:
        raise IngestionError(f"{path}: file is empty")
    header = [h.strip() for h in rows[0]]
    body = rows[1:]
    if len(header) < 2:
        raise SchemaError(f"{path}: need a year column and at least one series column")
    if not body:
        raise IngestionError(f"{path}: header present but no data rows")

    if column_spec is None:
        column_spec = {h: h for h in header[1:]}
    missing = [col for col in column_spec.values() if col not in header]
    if missing:
        raise SchemaError(f"{path}: missing column(s) {missing}; header is {header}")
    positions = {name: header.index(col) for name, col in column_spec.items()}

    years = []
    data = {name: [] for name in column_spec}
    for lineno, row in enumerate(body, start=2):
        if len(row) < len(header):
            row = row + [""] * (len(header) - len(row))
        raw_year = row[0].strip()
        try:
            year = int(raw_year)
        except ValueError:
            raise IngestionError(
                f"{path}: row {lineno}, column {header[0]!r}: cannot parse year {raw_year!r}"
            ) from None
        if year in years:
            raise IngestionError(f"{path}: row {lineno}: duplicate year {year}")
        years.append(year)
        for name, pos in positions.items():
            cell = row[pos].strip()
            if cell == "":
                raise IngestionError(
                    f"{path}: row {lineno} (year {year}), column {header[pos]!r}: missing value"
                )
            try:
                value = float(cell)
            except ValueError:
                raise IngestionError(
                    f"{path}: row {lineno} (year {year}), column {header[pos]!r}: "
                    f"cannot parse {cell!r}"
                ) from None
            if not math.isfinite(value):
                raise IngestionError(
                    f"{path}: row {lineno} (year {year}), column {header[pos]!r}: "
                    f"non-finite value {cell!r}"
                )
            data[name].append(value)

    years_arr = np.array(years, dtype=np.int64)
    if np.any(np.diff(years_arr) != 1):
        raise IngestionError(f"{path}: years must be consecutive and increasing")
    units = units or {}
    return Dataset(
        Series(name, data[name], years_arr, units.get(name, ""), ("csv",))
        for name in column_spec
    )


def to_csv(dataset: Dataset, path, year_header: str = "year") -> None:
    """
    Write ``dataset`` in the format :func:`load_csv` reads (lossless floats).

    ``path`` may also be an open text stream.
    """
    if hasattr(path, "write"):
        _write_rows(dataset, path, year_header)
        return
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        _write_rows(dataset, fh, year_header)


def _write_rows(dataset: Dataset, fh, year_header: str) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow([year_header] + dataset.names)
    for i, year in enumerate(dataset.time_index):
        writer.writerow([int(year)] + [repr(float(v)) for v in dataset.matrix[i]])


def log_transform(s: Series, name: Optional[str] = None) -> Series:
    """Natural logarithm; the default name is ``<name>_log``."""
    bad = np.flatnonzero(s.values <= 0)
    if bad.size:
        year = int(s.time_index[bad[0]])
        raise DomainError(
            f"log of series {s.name!r}: non-positive value {s.values[bad[0]]!r} in {year}"
        )
    return Series(
        name or f"{s.name}_log",
        np.log(s.values),
        s.time_index,
        f"log({s.unit})" if s.unit else "",
        s.lineage + ("log",),
    )


def first_difference(s: Series, name: Optional[str] = None) -> Series:
    if len(s) < 2:
        raise InsufficientDataError(
            f"first difference of {s.name!r} needs at least 2 observations, got {len(s)}"
        )
    return Series(
        name or f"{s.name}_d1",
        np.diff(s.values),
        s.time_index[1:],
        s.unit,
        s.lineage + ("diff",),
    )


def describe(s) -> DescriptiveStats:
    """Mean, median, extrema, sample standard deviation (ddof=1) and count."""
    values = np.asarray(getattr(s, "values", s), dtype=float)
    if values.size == 0:
        raise InsufficientDataError("cannot describe an empty series")
    sd = float(np.std(values, ddof=1)) if values.size > 1 else 0.0
    return DescriptiveStats(
        mean=float(np.mean(values)),
        median=float(np.median(values)),
        max=float(np.max(values)),
        min=float(np.min(values)),
        sd=sd,
        n_obs=int(values.size),
    )
