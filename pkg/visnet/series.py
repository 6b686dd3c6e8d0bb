"""
Time series input/output
Load, validate, slice and synthesize the series every other stage consumes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date
from enum import Enum
from pathlib import Path
from typing import IO, Any

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .exceptions import IngestError, SeriesError
from .logger import get_logger
from .utils.files import atomic_text_writer, format_number, is_gzip

logger = get_logger(__name__)

MAX_EMBEDDING_DOUBLINGS = 8


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """
    Ordered real values indexed by row position (trading days).

    `start` is the offset of index 0 inside the source the series came
    from; `origin_date` is the date of the source's first row, if known.
    """

    values: np.ndarray
    label: str = "series"
    origin_date: date | None = None
    start: int = 0

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=np.float64, copy=True)
        if arr.ndim != 1:
            raise SeriesError(f"series '{self.label}' must be one-dimensional")
        if arr.size < 2:
            raise SeriesError(
                f"series '{self.label}' needs at least 2 points, got {arr.size}"
            )
        bad = np.flatnonzero(~np.isfinite(arr))
        if bad.size:
            raise SeriesError(
                f"series '{self.label}' has a non-finite value at index {int(bad[0])}"
            )
        if self.start < 0:
            raise SeriesError("series start offset must be non-negative")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return int(self.values.size)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return (
            self.label == other.label
            and self.origin_date == other.origin_date
            and self.start == other.start
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None  # type: ignore[assignment]


class SyntheticKind(str, Enum):
    FGN = "fgn"
    WHITE_NOISE = "white_noise"
    LINEAR_RAMP = "linear_ramp"
    CONSTANT = "constant"


class SyntheticSpec(BaseModel):
    """Recipe for a reproducible synthetic series"""

    model_config = ConfigDict(frozen=True)

    kind: SyntheticKind
    length: int = Field(ge=2)
    hurst: float | None = None
    seed: int = Field(default=0, ge=0, lt=2**64)

    @model_validator(mode="after")
    def _check_hurst(self) -> "SyntheticSpec":
        if self.kind is SyntheticKind.FGN:
            if self.hurst is None or not 0.0 < self.hurst < 1.0:
                raise ValueError("fgn needs a Hurst exponent strictly between 0 and 1")
        return self


# ---------------------------------------------------------------------------
# CSV ingestion
# ---------------------------------------------------------------------------

_NON_FINITE_WORDS = {"nan", "+nan", "-nan", "inf", "+inf", "-inf", "infinity", "+infinity", "-infinity"}


def _read_frame(path: str | Path, has_header: bool) -> tuple[pd.DataFrame, int]:
    source = Path(path)
    if not source.exists():
        raise IngestError(f"input file not found: {source}")
    try:
        frame = pd.read_csv(
            source,
            sep=",",
            header=0 if has_header else None,
            dtype=str,
            keep_default_na=False,
            skip_blank_lines=False,
            encoding="utf-8",
            compression="gzip" if is_gzip(source) else None,
        )
    except pd.errors.EmptyDataError as e:
        raise IngestError(f"{source}: file is empty") from e
    except (pd.errors.ParserError, UnicodeDecodeError, OSError) as e:
        raise IngestError(f"{source}: {e}") from e

    frame = frame.fillna("").apply(lambda col: col.str.strip())
    # file line of data row 0 (1-based)
    first_line = 2 if has_header else 1
    return frame, first_line


def _select_column(frame: pd.DataFrame, column: str | int, source: Path) -> Any:
    if isinstance(column, int) or (isinstance(column, str) and column not in frame.columns and column.isdigit()):
        position = int(column)
        if not 0 <= position < frame.shape[1]:
            raise IngestError(
                f"{source}: column position {position} out of range (file has {frame.shape[1]} columns)"
            )
        return frame.columns[position]
    if column not in frame.columns:
        raise IngestError(f"{source}: no column named '{column}'")
    return column


def _parse_cells(cells: pd.Series, lines: np.ndarray, name: str, source: Path) -> np.ndarray:
    numeric = pd.to_numeric(cells, errors="coerce").to_numpy(dtype=np.float64)
    bad = np.flatnonzero(~np.isfinite(numeric))
    if bad.size:
        pos = int(bad[0])
        cell = cells.iloc[pos]
        if cell.lower() in _NON_FINITE_WORDS or (pd.notna(numeric[pos]) and math.isinf(numeric[pos])):
            raise IngestError(
                f"{source}: row {int(lines[pos])}: non-finite value {cell!r} in column '{name}'"
            )
        raise IngestError(
            f"{source}: row {int(lines[pos])}: cannot parse {cell!r} as a number in column '{name}'"
        )
    return numeric


def _kept_rows(frame: pd.DataFrame, first_line: int) -> tuple[pd.DataFrame, np.ndarray]:
    lines = np.arange(first_line, first_line + len(frame))
    occupied = (frame != "").any(axis=1).to_numpy()
    return frame.loc[occupied], lines[occupied]


def load_csv(path: str | Path, column: str | int = 0, has_header: bool = True) -> TimeSeries:
    """
    Load one numeric column of a comma-separated export.

    Args:
        path: CSV file (UTF-8, '.' decimal mark, optionally gzip-compressed)
        column: Column name or 0-based position
        has_header: Whether the first line names the columns

    Returns:
        TimeSeries in file order; rows whose cells are all empty are skipped

    Raises:
        IngestError: missing file, unparseable or non-finite cell (with its
            row number), fewer than 2 data rows
    """
    source = Path(path)
    frame, first_line = _read_frame(source, has_header)
    name = _select_column(frame, column, source)
    frame, lines = _kept_rows(frame, first_line)
    if len(frame) < 2:
        raise IngestError(f"{source}: need at least 2 data rows, found {len(frame)}")

    values = _parse_cells(frame[name], lines, str(name), source)
    label = str(name) if has_header else source.name.split(".")[0]
    logger.info("loaded %d points of '%s' from %s", values.size, label, source)
    return TimeSeries(values=values, label=label)


def load_columns(path: str | Path, has_header: bool = True) -> list[TimeSeries]:
    """
    Load every numeric column of a multi-index export.

    A column whose header contains "date" is not analysed; its first value
    becomes the `origin_date` of the returned series. A column where no cell
    parses as a number is skipped; one where only some cells parse raises
    IngestError naming the first bad row.
    """
    source = Path(path)
    frame, first_line = _read_frame(source, has_header)
    frame, lines = _kept_rows(frame, first_line)
    if len(frame) < 2:
        raise IngestError(f"{source}: need at least 2 data rows, found {len(frame)}")

    origin: date | None = None
    series: list[TimeSeries] = []
    for position, name in enumerate(frame.columns):
        header = str(name) if has_header else f"{source.name.split('.')[0]}_{position}"
        if has_header and "date" in header.lower():
            try:
                origin = pd.to_datetime(frame[name].iloc[0]).date()
            except (ValueError, TypeError):
                logger.warning("%s: cannot read a date from column '%s'", source, header)
            continue
        if pd.to_numeric(frame[name], errors="coerce").isna().all():
            logger.warning("%s: skipping non-numeric column '%s'", source, header)
            continue
        values = _parse_cells(frame[name], lines, header, source)
        series.append(TimeSeries(values=values, label=header))

    if not series:
        raise IngestError(f"{source}: no numeric columns")
    if origin is not None:
        series = [TimeSeries(s.values, s.label, origin, s.start) for s in series]
    return series


def export_csv(series: TimeSeries, sink: IO[str]) -> int:
    """Write `index,value` rows with up to 15 significant digits; returns the row count."""
    sink.write("index,value\n")
    for i, v in enumerate(series.values.tolist()):
        sink.write(f"{i},{format_number(v)}\n")
    return len(series)


def write_csv(series: TimeSeries, path: str | Path) -> Path:
    with atomic_text_writer(path) as sink:
        export_csv(series, sink)
    return Path(path)


# ---------------------------------------------------------------------------
# Windows
# ---------------------------------------------------------------------------

def slice_series(series: TimeSeries, start: int, length: int) -> TimeSeries:
    """Return values[start:start+length] with the source offset carried along."""
    if length < 2:
        raise SeriesError(f"window length must be at least 2, got {length}")
    if start < 0 or start + length > len(series):
        raise SeriesError(
            f"window [{start}, {start + length}) outside series '{series.label}' of length {len(series)}"
        )
    return TimeSeries(
        values=series.values[start : start + length],
        label=series.label,
        origin_date=series.origin_date,
        start=series.start + start,
    )


# ---------------------------------------------------------------------------
# Synthetic series
# ---------------------------------------------------------------------------

def fgn_autocovariance(hurst: float, lags: np.ndarray) -> np.ndarray:
    """Autocovariance of unit-variance fractional Gaussian noise."""
    k = np.abs(np.asarray(lags, dtype=np.float64))
    two_h = 2.0 * hurst
    return 0.5 * ((k + 1.0) ** two_h - 2.0 * k**two_h + np.abs(k - 1.0) ** two_h)


def _fgn_circulant(length: int, hurst: float, rng: np.random.Generator) -> np.ndarray:
    size = 1 << max(1, (length - 1).bit_length())
    for _ in range(MAX_EMBEDDING_DOUBLINGS + 1):
        gamma = fgn_autocovariance(hurst, np.arange(size + 1))
        row = np.concatenate([gamma, gamma[-2:0:-1]])
        eigenvalues = np.fft.fft(row).real
        if eigenvalues.min() < -1e-10 * eigenvalues.max():
            logger.warning(
                "circulant embedding of size %d not non-negative for H=%g, doubling",
                2 * size,
                hurst,
            )
            size *= 2
            continue
        eigenvalues = np.clip(eigenvalues, 0.0, None)
        m = row.size
        noise = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        field_ = np.fft.fft(np.sqrt(eigenvalues / m) * noise)
        return field_.real[:length].copy()
    raise SeriesError(
        f"circulant embedding infeasible for length {length} and H={hurst}"
    )


def generate(spec: SyntheticSpec) -> TimeSeries:
    """
    Synthesize a series from `spec`; equal specs give bit-identical output.

    fgn uses exact circulant embedding of the fGn covariance, padded to the
    next power of two and doubled until the embedding is non-negative.
    """
    n = spec.length
    if spec.kind is SyntheticKind.CONSTANT:
        values = np.zeros(n)
    elif spec.kind is SyntheticKind.LINEAR_RAMP:
        values = np.arange(n, dtype=np.float64)
    else:
        rng = np.random.default_rng(spec.seed)
        if spec.kind is SyntheticKind.WHITE_NOISE:
            values = rng.standard_normal(n)
        else:
            assert spec.hurst is not None
            values = _fgn_circulant(n, spec.hurst, rng)

    label = spec.kind.value if spec.hurst is None else f"{spec.kind.value}_H{spec.hurst:g}"
    return TimeSeries(values=values, label=label)
