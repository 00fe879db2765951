"""Shared data model: datasets, standardization and seeded random streams."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import IO

import numpy as np

from .errors import DegenerateColumnError, InputError, ParseError, TooFewRowsError

__all__ = [
    "Dataset",
    "RngSpec",
    "load_dataset",
    "standardize_columns",
    "unstandardize",
]

_STD_TOL = 1e-10


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Dataset:
    """Covariates ``xs`` (n x p) and response ``ys`` (n,).

    ``center`` and ``scale`` hold p + 1 entries (covariates first, response
    last) describing the standardization that produced the stored values;
    for raw data they are zeros and ones.
    """

    xs: np.ndarray
    ys: np.ndarray
    names: tuple = ()
    standardized: bool = False
    center: np.ndarray = None
    scale: np.ndarray = None

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        if xs.ndim == 1:
            xs = xs[:, None]
        ys = np.asarray(self.ys, dtype=float).ravel()
        if xs.ndim != 2 or xs.shape[1] < 1:
            raise InputError("xs must be an n x p matrix with p >= 1")
        if xs.shape[0] != ys.shape[0]:
            raise InputError(f"xs has {xs.shape[0]} rows but ys has {ys.shape[0]}")
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
            raise InputError("dataset contains non-finite entries")
        p = xs.shape[1]
        names = tuple(self.names) if self.names else tuple(
            [f"x{j + 1}" for j in range(p)] + ["y"]
        )
        if len(names) != p + 1:
            raise InputError(f"expected {p + 1} column names, got {len(names)}")
        center = np.zeros(p + 1) if self.center is None else self.center
        scale = np.ones(p + 1) if self.scale is None else self.scale
        object.__setattr__(self, "xs", _frozen(xs))
        object.__setattr__(self, "ys", _frozen(ys))
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "center", _frozen(center))
        object.__setattr__(self, "scale", _frozen(scale))

    @property
    def n(self) -> int:
        return self.xs.shape[0]

    @property
    def p(self) -> int:
        return self.xs.shape[1]

    def check_size(self) -> None:
        """Raise :class:`TooFewRowsError` unless n >= p + 5."""
        if self.n < self.p + 5:
            raise TooFewRowsError(
                f"need at least p + 5 = {self.p + 5} rows, got {self.n}"
            )

    def metadata(self) -> dict:
        return {
            "n": self.n,
            "p": self.p,
            "names": list(self.names),
            "standardized": self.standardized,
            "center": self.center.tolist(),
            "scale": self.scale.tolist(),
        }


@dataclass(frozen=True)
class RngSpec:
    """Seed plus stream index.

    Streams are derived with :class:`numpy.random.SeedSequence` spawn keys,
    so distinct ``(seed, stream)`` pairs give independent generators and the
    same pair always reproduces the same draws.
    """

    seed: int = 0
    stream: int = 0

    def generator(self, *subkeys: int) -> np.random.Generator:
        ss = np.random.SeedSequence(
            entropy=int(self.seed) & 0xFFFFFFFFFFFFFFFF,
            spawn_key=(int(self.stream), *map(int, subkeys)),
        )
        return np.random.Generator(np.random.PCG64(ss))

    def child(self, stream: int) -> "RngSpec":
        return RngSpec(self.seed, stream)


def _detect_delimiter(header: str) -> str | None:
    if "\t" in header:
        return "\t"
    if "," in header:
        return ","
    return None


def _parse_cell(text: str, row: int, col: int, name: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ParseError(
            f"non-numeric cell {text!r} at row {row}, column {col} ({name})",
            row=row,
            column=col,
        ) from None
    if not math.isfinite(value):
        raise ParseError(
            f"non-finite cell {text!r} at row {row}, column {col} ({name})",
            row=row,
            column=col,
        )
    return value


def load_dataset(
    source: str | IO[str],
    response_column: str | int = -1,
    standardize: bool = False,
    header: bool = True,
) -> Dataset:
    """Read a delimited numeric table.

    Parameters
    ----------
    source : str or file-like
        Table text (if it contains a newline) or an open text stream. Paths
        are not accepted here; open the file first.
    response_column : str or int
        Column label, or position (negative counts from the end). Defaults
        to the last column.
    standardize : bool
        Center every column and scale it by its n - 1 sample standard
        deviation. Standardized datasets must also satisfy n >= p + 5.
    header : bool
        Whether the first line holds column labels. Headerless tables get
        labels ``x1, ..., y``.

    Row numbers in :class:`ParseError` count data rows from 1.
    """
    if isinstance(source, str):
        source = io.StringIO(source)
    lines = [ln for ln in source.read().splitlines() if ln.strip()]
    if not lines:
        raise ParseError("empty table")
    delim = _detect_delimiter(lines[0])

    def split(line):
        if delim is None:
            return line.split()
        return [c.strip() for c in next(csv.reader([line], delimiter=delim))]

    if header:
        names = split(lines[0])
        body = lines[1:]
    else:
        k = len(split(lines[0]))
        names = [f"x{j + 1}" for j in range(k - 1)] + ["y"]
        body = lines
    k = len(names)
    if k < 2:
        raise ParseError("table needs at least two columns")

    if isinstance(response_column, str):
        if response_column in names:
            ridx = names.index(response_column)
        else:
            try:
                ridx = int(response_column)
            except ValueError:
                raise InputError(f"response column {response_column!r} not found") from None
    else:
        ridx = int(response_column)
    if not -k <= ridx < k:
        raise InputError(f"response column index {ridx} out of range for {k} columns")
    ridx %= k

    data = np.empty((len(body), k))
    for i, line in enumerate(body, start=1):
        cells = split(line)
        if len(cells) != k:
            raise ParseError(f"row {i} has {len(cells)} cells, expected {k}", row=i)
        for j, cell in enumerate(cells):
            data[i - 1, j] = _parse_cell(cell, i, j + 1, names[j])

    order = [j for j in range(k) if j != ridx]
    ds = Dataset(
        xs=data[:, order],
        ys=data[:, ridx],
        names=tuple([names[j] for j in order] + [names[ridx]]),
    )
    if standardize:
        ds = standardize_columns(ds)
        ds.check_size()
    return ds


def standardize_columns(d: Dataset) -> Dataset:
    """Return a copy with every column centered and scaled to unit sd.

    Standardization composes with any earlier one: the recorded center and
    scale always map the returned values back to the original raw data.
    """
    full = np.column_stack([d.xs, d.ys])
    mean = full.mean(axis=0)
    sd = full.std(axis=0, ddof=1) if d.n > 1 else np.zeros(full.shape[1])
    bad = [d.names[j] for j in range(full.shape[1]) if not sd[j] > 0]
    if bad:
        raise DegenerateColumnError(f"constant column(s): {', '.join(bad)}")
    z = (full - mean) / sd
    center = d.center + d.scale * mean
    scale = d.scale * sd
    return Dataset(
        xs=z[:, :-1],
        ys=z[:, -1],
        names=d.names,
        standardized=True,
        center=center,
        scale=scale,
    )


def unstandardize(d: Dataset) -> Dataset:
    """Invert the recorded standardization."""
    full = np.column_stack([d.xs, d.ys]) * d.scale + d.center
    return Dataset(xs=full[:, :-1], ys=full[:, -1], names=d.names)


def column_stats(d: Dataset) -> tuple[np.ndarray, np.ndarray]:
    full = np.column_stack([d.xs, d.ys])
    return full.mean(axis=0), full.std(axis=0, ddof=1)


def is_standardized(d: Dataset, tol: float = _STD_TOL) -> bool:
    mean, sd = column_stats(d)
    return bool(np.all(np.abs(mean) <= tol) and np.all(np.abs(sd - 1) <= tol))
