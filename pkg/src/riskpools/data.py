"""Country loss data: annual loss matrices, event catalogues, country metadata.

The annual loss CSV format has a leading ``year`` column followed by one
column per ISO 3166-1 alpha-3 country code; one row per year, decimal point,
no thousands separators. Event catalogues are long-form CSV with columns
``event_id,year,iso3,loss`` (one row per affected country). Country metadata
is a JSON array of ``{iso3, region, pinned_pool?, allowed_pools?}`` records.

All types are immutable after construction and safe to share across threads.
A missing country cell in a CSV row is an error, never an implicit zero:
silent zeros corrupt tail statistics. Currency and scale are opaque, every
reported ratio is invariant under uniform rescaling of the inputs.
"""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from ._validation import as_loss_array, check_iso3
from .errors import DataValidationError

DEFAULT_WINDOW = (1979, 2019)


@dataclass(frozen=True)
class CountryMeta:
    """Region label and pool membership constraints for one country.

    ``pinned_pool`` fixes the assignment outright (0 pins the country out of
    every pool). ``allowed_pools`` limits which pools may be joined; pool 0,
    meaning "no pool", is always permitted unless the country is pinned.
    ``allowed_pools=None`` leaves the country free to join any pool.
    """

    iso3: str
    region: str
    pinned_pool: int | None = None
    allowed_pools: frozenset[int] | None = None

    def __post_init__(self) -> None:
        check_iso3(self.iso3, context="country metadata")
        if not self.region or not isinstance(self.region, str):
            raise DataValidationError(f"country {self.iso3}: region label must be a nonempty string")
        if self.allowed_pools is not None:
            object.__setattr__(self, "allowed_pools", frozenset(int(p) for p in self.allowed_pools))
            if any(p < 0 for p in self.allowed_pools):
                raise DataValidationError(f"country {self.iso3}: allowed pool indices must be >= 0")
        if self.pinned_pool is not None:
            object.__setattr__(self, "pinned_pool", int(self.pinned_pool))
            if self.pinned_pool < 0:
                raise DataValidationError(f"country {self.iso3}: pinned pool index must be >= 0")
            if self.allowed_pools is not None and self.pinned_pool not in self.allowed_pools:
                raise DataValidationError(
                    f"country {self.iso3}: pinned pool {self.pinned_pool} is not in its allowed set"
                )


@dataclass(frozen=True, eq=False)
class AnnualLossMatrix:
    """N years by n countries of nonnegative annual aggregate losses.

    Row and column order are meaningful and preserved. Zero-loss years must
    appear as zero rows rather than being dropped, because empirical tail
    quantiles depend on the series length N.
    """

    years: tuple[int, ...]
    countries: tuple[str, ...]
    losses: np.ndarray

    def __post_init__(self) -> None:
        years = tuple(int(y) for y in self.years)
        countries = tuple(str(c) for c in self.countries)
        values = as_loss_array(self.losses)
        if values.shape != (len(years), len(countries)):
            raise DataValidationError(
                f"loss array shape {values.shape} does not match {len(years)} years x {len(countries)} countries"
            )
        if len(years) < 1:
            raise DataValidationError("annual loss matrix needs at least one year")
        if len(set(years)) != len(years):
            raise DataValidationError("duplicate year identifiers in annual loss matrix")
        seen: set[str] = set()
        for c in countries:
            check_iso3(c, context="annual loss matrix")
            if c in seen:
                raise DataValidationError(f"duplicate country column '{c}'")
            seen.add(c)
        values = np.ascontiguousarray(values)
        values.setflags(write=False)
        object.__setattr__(self, "years", years)
        object.__setattr__(self, "countries", countries)
        object.__setattr__(self, "losses", values)
        object.__setattr__(self, "_column_index", {c: i for i, c in enumerate(countries)})

    @property
    def n_years(self) -> int:
        return len(self.years)

    @property
    def n_countries(self) -> int:
        return len(self.countries)

    def column(self, iso3: str) -> np.ndarray:
        return self.losses[:, self.index_of(iso3)]

    def index_of(self, iso3: str) -> int:
        try:
            return self._column_index[iso3]  # type: ignore[attr-defined]
        except KeyError:
            raise DataValidationError(f"unknown country code '{iso3}'") from None

    def indices_for(self, members: Iterable[str]) -> np.ndarray:
        """Column indices for a set of member codes, in matrix column order."""
        wanted = set(members)
        for m in wanted:
            self.index_of(m)
        return np.flatnonzero([c in wanted for c in self.countries])


@dataclass(frozen=True)
class LossEvent:
    """One storm event: per-country losses tagged with a historical year."""

    event_id: str
    year: int
    losses: Mapping[str, float]


@dataclass(frozen=True)
class EventCatalogue:
    """Event set feeding the stochastic sampler.

    Every event year must lie inside the configured historical window; the
    sampler resamples those years, so out-of-window events would silently
    never be drawn.
    """

    events: tuple[LossEvent, ...]
    window: tuple[int, int] = DEFAULT_WINDOW

    def __post_init__(self) -> None:
        lo, hi = (int(self.window[0]), int(self.window[1]))
        if lo > hi:
            raise DataValidationError(f"historical window {lo}-{hi} is empty")
        object.__setattr__(self, "window", (lo, hi))
        object.__setattr__(self, "events", tuple(self.events))
        seen: set[str] = set()
        for ev in self.events:
            if ev.event_id in seen:
                raise DataValidationError(f"duplicate event id '{ev.event_id}'")
            seen.add(ev.event_id)
            if not lo <= ev.year <= hi:
                raise DataValidationError(
                    f"event '{ev.event_id}' year {ev.year} outside historical window {lo}-{hi}"
                )
            for iso3, loss in ev.losses.items():
                check_iso3(iso3, context=f"event '{ev.event_id}'")
                if not np.isfinite(loss):
                    raise DataValidationError(f"non-finite loss for event '{ev.event_id}' country '{iso3}'")
                if loss < 0:
                    raise DataValidationError(f"negative loss for event '{ev.event_id}' country '{iso3}'")

    @property
    def countries(self) -> tuple[str, ...]:
        return tuple(sorted({iso3 for ev in self.events for iso3 in ev.losses}))

    def by_year(self) -> dict[int, tuple[LossEvent, ...]]:
        grouped: dict[int, list[LossEvent]] = {}
        for ev in self.events:
            grouped.setdefault(ev.year, []).append(ev)
        return {y: tuple(evs) for y, evs in grouped.items()}

    def total_loss(self) -> float:
        return float(sum(sum(ev.losses.values()) for ev in self.events))


def _read_rows(path) -> list[list[str]]:
    with open(path, newline="", encoding="utf-8") as handle:
        return [row for row in csv.reader(handle)]


def load_annual_losses(path, *, year_column: str = "year") -> AnnualLossMatrix:
    """Load and validate an annual loss matrix CSV.

    Raises :class:`DataValidationError` with a diagnostic naming the
    offending row and column for malformed numbers, negative losses,
    duplicate columns, missing cells, and empty files.
    """
    rows = _read_rows(path)
    if not rows:
        raise DataValidationError(f"empty file: {path}")
    header, *data = rows
    if not header or header[0] != year_column:
        raise DataValidationError(f"{path}: first column must be '{year_column}', got {header[:1]!r}")
    countries = [c.strip() for c in header[1:]]
    if not countries:
        raise DataValidationError(f"{path}: no country columns")
    seen: set[str] = set()
    for c in countries:
        check_iso3(c, context=str(path))
        if c in seen:
            raise DataValidationError(f"duplicate country column '{c}'")
        seen.add(c)
    if not data:
        raise DataValidationError(f"{path}: no data rows")

    years: list[int] = []
    values = np.zeros((len(data), len(countries)), dtype=np.float64)
    seen_years: set[int] = set()
    for r, row in enumerate(data):
        if not row:
            raise DataValidationError(f"{path}: blank row at line {r + 2}")
        try:
            year = int(row[0])
        except ValueError:
            raise DataValidationError(f"{path}: malformed year '{row[0]}' at line {r + 2}") from None
        if year in seen_years:
            raise DataValidationError(f"duplicate year {year}")
        seen_years.add(year)
        if len(row) != len(countries) + 1:
            raise DataValidationError(
                f"row for year {year}: expected {len(countries)} loss values, found {len(row) - 1}"
            )
        for c, token in enumerate(row[1:]):
            try:
                value = float(token)
            except ValueError:
                raise DataValidationError(
                    f"malformed number '{token}' at (year {year}, {countries[c]})"
                ) from None
            if not np.isfinite(value):
                raise DataValidationError(f"non-finite loss at (year {year}, {countries[c]})")
            if value < 0:
                raise DataValidationError(f"negative loss at (year {year}, {countries[c]})")
            values[r, c] = value
        years.append(year)
    return AnnualLossMatrix(years=tuple(years), countries=tuple(countries), losses=values)


def _format_value(value: float) -> str:
    # repr is the shortest decimal string that round-trips the float exactly
    return repr(float(value))


def write_annual_losses(matrix: AnnualLossMatrix, path, *, year_column: str = "year") -> None:
    """Write a matrix in the annual loss CSV format; round-trips bit-exactly."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow([year_column, *matrix.countries])
        for year, row in zip(matrix.years, matrix.losses):
            writer.writerow([str(year), *(_format_value(v) for v in row)])


def load_event_catalogue(path, *, window: tuple[int, int] = DEFAULT_WINDOW) -> EventCatalogue:
    """Load a long-form event catalogue CSV, grouping rows by event id."""
    rows = _read_rows(path)
    if not rows:
        warnings.warn(f"event catalogue {path} is empty", stacklevel=2)
        return EventCatalogue(events=(), window=window)
    header, *data = rows
    expected = ["event_id", "year", "iso3", "loss"]
    if [h.strip() for h in header] != expected:
        raise DataValidationError(f"{path}: expected header {','.join(expected)}, got {','.join(header)}")
    if not data:
        warnings.warn(f"event catalogue {path} has no events", stacklevel=2)
        return EventCatalogue(events=(), window=window)

    order: list[str] = []
    years: dict[str, int] = {}
    losses: dict[str, dict[str, float]] = {}
    for r, row in enumerate(data):
        if len(row) != 4:
            raise DataValidationError(f"{path}: expected 4 columns at line {r + 2}, found {len(row)}")
        event_id, year_token, iso3, loss_token = (t.strip() for t in row)
        try:
            year = int(year_token)
        except ValueError:
            raise DataValidationError(f"{path}: malformed year '{year_token}' at line {r + 2}") from None
        try:
            loss = float(loss_token)
        except ValueError:
            raise DataValidationError(
                f"malformed loss '{loss_token}' for event '{event_id}' country '{iso3}'"
            ) from None
        if event_id not in years:
            order.append(event_id)
            years[event_id] = year
            losses[event_id] = {}
        elif years[event_id] != year:
            raise DataValidationError(
                f"event '{event_id}' has conflicting years {years[event_id]} and {year}"
            )
        if iso3 in losses[event_id]:
            raise DataValidationError(f"conflicting duplicate rows for event '{event_id}' country '{iso3}'")
        losses[event_id][iso3] = loss
    events = tuple(LossEvent(event_id=e, year=years[e], losses=losses[e]) for e in order)
    return EventCatalogue(events=events, window=window)


def aggregate_to_annual(cat: EventCatalogue, window: tuple[int, int] | None = None) -> AnnualLossMatrix:
    """Sum event losses into a per-year matrix over the historical window.

    Years with no events appear as zero rows; the output total equals the
    catalogue's total loss (conservation).
    """
    lo, hi = window if window is not None else cat.window
    lo, hi = int(lo), int(hi)
    if lo > hi:
        raise DataValidationError(f"aggregation window {lo}-{hi} is empty")
    years = tuple(range(lo, hi + 1))
    countries = cat.countries
    index = {c: i for i, c in enumerate(countries)}
    values = np.zeros((len(years), len(countries)), dtype=np.float64)
    for ev in cat.events:
        if not lo <= ev.year <= hi:
            raise DataValidationError(
                f"event '{ev.event_id}' year {ev.year} outside aggregation window {lo}-{hi}"
            )
        row = ev.year - lo
        for iso3, loss in ev.losses.items():
            values[row, index[iso3]] += loss
    return AnnualLossMatrix(years=years, countries=countries, losses=values)


def load_country_meta(path) -> dict[str, CountryMeta]:
    """Load the country metadata JSON array, keyed by ISO3 code."""
    with open(path, encoding="utf-8") as handle:
        try:
            records = json.load(handle)
        except json.JSONDecodeError as exc:
            raise DataValidationError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(records, list):
        raise DataValidationError(f"{path}: expected a JSON array of country records")
    meta: dict[str, CountryMeta] = {}
    for rec in records:
        if not isinstance(rec, dict) or "iso3" not in rec or "region" not in rec:
            raise DataValidationError(f"{path}: each record needs at least 'iso3' and 'region' fields")
        allowed = rec.get("allowed_pools")
        cm = CountryMeta(
            iso3=rec["iso3"],
            region=rec["region"],
            pinned_pool=rec.get("pinned_pool"),
            allowed_pools=frozenset(allowed) if allowed is not None else None,
        )
        if cm.iso3 in meta:
            raise DataValidationError(f"{path}: duplicate metadata for country '{cm.iso3}'")
        meta[cm.iso3] = cm
    return meta
