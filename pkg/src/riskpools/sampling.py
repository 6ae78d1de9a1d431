"""Synthetic annual loss series built by resampling an event catalogue.

The historical record is too short to estimate a 200-year loss directly, so
a long synthetic series is constructed: historical years are classified
into persistent-warm, persistent-cold, and neutral year types from
user-supplied season labels; a year type is drawn per synthetic year with
the types' empirical frequencies, then a historical year of that type is
drawn uniformly; a storm count is drawn from a Poisson distribution and
that many events are resampled (with replacement, since a count may exceed
any year's historical event count) from the catalogue.

Two readings of the Poisson rate are supported. ``per-year`` (default)
conditions on the sampled historical year: the rate is that year's event
count and events are drawn from that year's events, which preserves the
climate signal the year-type machinery exists to capture. ``global-mean``
uses the catalogue-wide mean annual event count and draws from the whole
catalogue. Both rates scale by ``frequency_calibration``.

The random stream is partitioned per synthetic year (one spawned child
sequence each), so years can be generated concurrently, and reordering or
parallelizing year generation cannot change any year's content.
"""

from __future__ import annotations

import csv
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from sklearn.base import BaseEstimator

from .data import DEFAULT_WINDOW, AnnualLossMatrix, EventCatalogue
from .errors import DataValidationError

SEASON_LABELS = ("warm", "cold", "neutral")
YEAR_TYPES = ("persistent-warm", "persistent-cold", "neutral")
LAMBDA_MODES = ("per-year", "global-mean")

#: a year is "persistent" warm or cold when more than this many of its
#: season labels agree
PERSISTENCE_THRESHOLD = 5


@dataclass(frozen=True, eq=False)
class YearTypeModel:
    """Year-type labels and empirical frequencies over a historical window."""

    year_labels: Mapping[int, str]
    frequencies: Mapping[str, float]

    def __post_init__(self) -> None:
        for year, label in self.year_labels.items():
            if label not in YEAR_TYPES:
                raise DataValidationError(f"year {year}: unknown year type '{label}'")
        total = float(sum(self.frequencies.values()))
        if abs(total - 1.0) > 1e-12:
            raise DataValidationError(f"year-type frequencies sum to {total!r}, expected 1")
        for t, freq in self.frequencies.items():
            if t not in YEAR_TYPES:
                raise DataValidationError(f"unknown year type '{t}' in frequencies")
            if freq < 0:
                raise DataValidationError(f"negative frequency for year type '{t}'")
            if freq > 0 and not any(label == t for label in self.year_labels.values()):
                raise DataValidationError(f"year type '{t}' has positive frequency but no member years")

    def years_of(self, year_type: str) -> tuple[int, ...]:
        return tuple(sorted(y for y, t in self.year_labels.items() if t == year_type))

    @property
    def years(self) -> tuple[int, ...]:
        return tuple(sorted(self.year_labels))


def classify_year_types(seasonal_index: Mapping[int, Sequence[str]]) -> YearTypeModel:
    """Label each historical year by the persistence of its season labels.

    A year is persistent-warm (persistent-cold) when more than
    ``PERSISTENCE_THRESHOLD`` of its season labels are warm (cold); if both
    counts clear the threshold the larger wins and an exact tie is neutral.
    """
    if not seasonal_index:
        raise DataValidationError("seasonal index is empty")
    labels: dict[int, str] = {}
    for year in sorted(seasonal_index):
        seasons = list(seasonal_index[year])
        if not seasons:
            raise DataValidationError(f"year {year} has no season labels")
        for s in seasons:
            if s not in SEASON_LABELS:
                raise DataValidationError(f"year {year}: unknown season label '{s}'")
        warm = sum(1 for s in seasons if s == "warm")
        cold = sum(1 for s in seasons if s == "cold")
        if warm > PERSISTENCE_THRESHOLD and warm > cold:
            labels[year] = "persistent-warm"
        elif cold > PERSISTENCE_THRESHOLD and cold > warm:
            labels[year] = "persistent-cold"
        else:
            labels[year] = "neutral"
    n = len(labels)
    frequencies = {
        t: sum(1 for label in labels.values() if label == t) / n for t in YEAR_TYPES
    }
    return YearTypeModel(year_labels=labels, frequencies=frequencies)


def load_seasonal_labels(path) -> dict[int, list[str]]:
    """Load the ``year,season_index,label`` CSV into per-year label lists."""
    with open(path, newline="", encoding="utf-8") as handle:
        rows = list(csv.reader(handle))
    if not rows:
        raise DataValidationError(f"empty seasonal label file: {path}")
    header, *data = rows
    if [h.strip() for h in header] != ["year", "season_index", "label"]:
        raise DataValidationError(f"{path}: expected header year,season_index,label")
    seen: set[tuple[int, int]] = set()
    collected: dict[int, list[tuple[int, str]]] = {}
    for r, row in enumerate(data):
        if len(row) != 3:
            raise DataValidationError(f"{path}: expected 3 columns at line {r + 2}")
        try:
            year = int(row[0])
            season = int(row[1])
        except ValueError:
            raise DataValidationError(f"{path}: malformed year or season index at line {r + 2}") from None
        label = row[2].strip()
        if label not in SEASON_LABELS:
            raise DataValidationError(f"{path}: unknown season label '{label}' at line {r + 2}")
        if (year, season) in seen:
            raise DataValidationError(f"duplicate season row for year {year} season {season}")
        seen.add((year, season))
        collected.setdefault(year, []).append((season, label))
    return {year: [label for _, label in sorted(entries)] for year, entries in sorted(collected.items())}


@dataclass(frozen=True)
class SamplerConfig:
    """Settings for the synthetic series builder."""

    n_years: int = 10_000
    window: tuple[int, int] = DEFAULT_WINDOW
    lambda_mode: str = "per-year"
    rng_seed: int = 0
    frequency_calibration: float = 1.0

    def __post_init__(self) -> None:
        if self.n_years < 1:
            raise DataValidationError(f"n_years must be >= 1, got {self.n_years}")
        lo, hi = (int(self.window[0]), int(self.window[1]))
        if lo > hi:
            raise DataValidationError(f"historical window {lo}-{hi} is empty")
        object.__setattr__(self, "window", (lo, hi))
        if self.lambda_mode not in LAMBDA_MODES:
            raise DataValidationError(
                f"unknown lambda mode '{self.lambda_mode}', expected one of {LAMBDA_MODES}"
            )
        if not self.frequency_calibration > 0:
            raise DataValidationError("frequency calibration must be positive")


@dataclass(frozen=True, eq=False)
class ScenarioResult:
    """Synthetic matrix plus the per-year draws that produced it."""

    matrix: AnnualLossMatrix
    sampled_years: tuple[int, ...]
    year_types: tuple[str, ...]
    event_counts: np.ndarray


def _check_model_window(model: YearTypeModel, config: SamplerConfig) -> None:
    lo, hi = config.window
    missing = [y for y in range(lo, hi + 1) if y not in model.year_labels]
    if missing:
        raise DataValidationError(
            f"year-type model does not label historical years {missing[:5]}"
            f"{'...' if len(missing) > 5 else ''} inside window {lo}-{hi}"
        )


def _year_streams(config: SamplerConfig) -> list[np.random.SeedSequence]:
    return np.random.SeedSequence(config.rng_seed).spawn(config.n_years)


def _draw_type_and_year(
    rng: np.random.Generator, cum_freq: np.ndarray, years_by_type: Sequence[tuple[int, ...]]
) -> tuple[int, int]:
    u = rng.random()
    t = int(np.searchsorted(cum_freq, u, side="right"))
    t = min(t, len(YEAR_TYPES) - 1)
    years = years_by_type[t]
    if not years:
        raise DataValidationError(f"drawn year type '{YEAR_TYPES[t]}' has no member years")
    return t, years[int(rng.integers(len(years)))]


def sample_year_sequence(model: YearTypeModel, config: SamplerConfig) -> list[int]:
    """Draw one historical year per synthetic year via the year-type mix."""
    _check_model_window(model, config)
    cum = np.cumsum([model.frequencies.get(t, 0.0) for t in YEAR_TYPES])
    years_by_type = [model.years_of(t) for t in YEAR_TYPES]
    out: list[int] = []
    for child in _year_streams(config):
        rng = np.random.default_rng(child)
        _, year = _draw_type_and_year(rng, cum, years_by_type)
        out.append(year)
    return out


def sample_annual_events(
    year: int, cat: EventCatalogue, config: SamplerConfig, rng: np.random.Generator
) -> list[str]:
    """Event ids drawn for one synthetic year mapped to a historical year.

    The storm count is Poisson with the mode's rate; a zero count is a valid
    zero-loss year. Draws are uniform with replacement.
    """
    by_year = cat.by_year()
    return _sample_events(year, cat.events, by_year, config, rng)


def _lambda_global(cat_size: int, config: SamplerConfig) -> float:
    lo, hi = config.window
    return cat_size / (hi - lo + 1) * config.frequency_calibration


def _sample_events(
    year: int,
    all_events: Sequence,
    by_year: Mapping[int, Sequence],
    config: SamplerConfig,
    rng: np.random.Generator,
) -> list[str]:
    if config.lambda_mode == "per-year":
        pool = by_year.get(year, ())
        lam = len(pool) * config.frequency_calibration
    else:
        pool = all_events
        lam = _lambda_global(len(all_events), config)
    count = int(rng.poisson(lam))
    if count == 0:
        return []
    if not pool:
        warnings.warn(
            f"storm count {count} drawn for year {year} with no events to sample; emitting a zero-loss year",
            stacklevel=2,
        )
        return []
    picks = rng.integers(0, len(pool), size=count)
    return [pool[int(i)].event_id for i in picks]


def build_scenarios(
    cat: EventCatalogue,
    model: YearTypeModel,
    config: SamplerConfig,
    n_jobs: int | None = None,
) -> ScenarioResult:
    """Build the synthetic matrix and keep the per-year draws.

    The output is a pure function of (catalogue, model, config); ``n_jobs``
    only parallelizes the per-year work across threads.
    """
    _check_model_window(model, config)
    countries = cat.countries
    if not countries:
        warnings.warn("event catalogue is empty; the synthetic series has no countries", stacklevel=2)
    col = {c: i for i, c in enumerate(countries)}
    events_by_id = {ev.event_id: ev for ev in cat.events}
    by_year = cat.by_year()
    cum = np.cumsum([model.frequencies.get(t, 0.0) for t in YEAR_TYPES])
    years_by_type = [model.years_of(t) for t in YEAR_TYPES]

    n = config.n_years
    losses = np.zeros((n, len(countries)), dtype=np.float64)
    sampled_years = np.zeros(n, dtype=np.int64)
    type_idx = np.zeros(n, dtype=np.int64)
    counts = np.zeros(n, dtype=np.int64)
    streams = _year_streams(config)

    def fill(start: int, stop: int) -> None:
        for i in range(start, stop):
            rng = np.random.default_rng(streams[i])
            t, year = _draw_type_and_year(rng, cum, years_by_type)
            type_idx[i] = t
            sampled_years[i] = year
            ids = _sample_events(year, cat.events, by_year, config, rng)
            counts[i] = len(ids)
            row = losses[i]
            for event_id in ids:
                for iso3, value in events_by_id[event_id].losses.items():
                    row[col[iso3]] += value

    if n_jobs and n_jobs > 1:
        chunk = -(-n // n_jobs)
        bounds = [(s, min(s + chunk, n)) for s in range(0, n, chunk)]
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            list(pool.map(lambda b: fill(*b), bounds))
    else:
        fill(0, n)

    matrix = AnnualLossMatrix(
        years=tuple(range(1, n + 1)), countries=countries, losses=losses
    )
    return ScenarioResult(
        matrix=matrix,
        sampled_years=tuple(int(y) for y in sampled_years),
        year_types=tuple(YEAR_TYPES[int(t)] for t in type_idx),
        event_counts=counts,
    )


def build_loss_series(
    cat: EventCatalogue,
    model: YearTypeModel,
    config: SamplerConfig,
    n_jobs: int | None = None,
) -> AnnualLossMatrix:
    """Synthetic annual loss matrix; see :func:`build_scenarios`."""
    return build_scenarios(cat, model, config, n_jobs=n_jobs).matrix


def expected_annual_count(cat: EventCatalogue, model: YearTypeModel, config: SamplerConfig) -> float:
    """Expected storm count per synthetic year under the configured mode."""
    if config.lambda_mode == "global-mean":
        return _lambda_global(len(cat.events), config)
    by_year = cat.by_year()
    expected = 0.0
    for t in YEAR_TYPES:
        years = model.years_of(t)
        freq = model.frequencies.get(t, 0.0)
        if not years or freq == 0.0:
            continue
        mean_count = sum(len(by_year.get(y, ())) for y in years) / len(years)
        expected += freq * mean_count * config.frequency_calibration
    return expected


class AnnualLossSampler(BaseEstimator):
    """Scikit-learn style wrapper around the scenario builder.

    ``fit`` classifies year types from a seasonal index and stores the
    catalogue; ``sample`` draws a synthetic annual loss matrix.
    """

    def __init__(
        self,
        n_years: int = 10_000,
        window: tuple[int, int] = DEFAULT_WINDOW,
        lambda_mode: str = "per-year",
        frequency_calibration: float = 1.0,
        random_state: int = 0,
        n_jobs: int | None = None,
    ):
        self.n_years = n_years
        self.window = window
        self.lambda_mode = lambda_mode
        self.frequency_calibration = frequency_calibration
        self.random_state = random_state
        self.n_jobs = n_jobs

    def fit(self, catalogue: EventCatalogue, seasonal_index: Mapping[int, Sequence[str]]):
        self.model_ = classify_year_types(seasonal_index)
        self._catalogue = catalogue
        return self

    def _config(self, n_years: int | None, random_state: int | None) -> SamplerConfig:
        return SamplerConfig(
            n_years=n_years if n_years is not None else self.n_years,
            window=self.window,
            lambda_mode=self.lambda_mode,
            rng_seed=random_state if random_state is not None else self.random_state,
            frequency_calibration=self.frequency_calibration,
        )

    def sample(self, n_years: int | None = None, random_state: int | None = None) -> AnnualLossMatrix:
        if not hasattr(self, "model_"):
            raise DataValidationError("sampler is not fitted")
        return build_loss_series(
            self._catalogue, self.model_, self._config(n_years, random_state), n_jobs=self.n_jobs
        )
