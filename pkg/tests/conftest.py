"""Shared fixtures: canonical small matrices and synthetic instances."""

from __future__ import annotations

import numpy as np
import pytest

from riskpools import AnnualLossMatrix, EventCatalogue, LossEvent, TailSpec


def make_matrix(values, countries=None, years=None) -> AnnualLossMatrix:
    arr = np.asarray(values, dtype=np.float64)
    n = arr.shape[1]
    if countries is None:
        abc = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
        countries = tuple(abc[i // 26 % 26] + abc[i % 26] + abc[i % 26] for i in range(n))
    if years is None:
        years = tuple(range(1, arr.shape[0] + 1))
    return AnnualLossMatrix(years=years, countries=tuple(countries), losses=arr)


def random_matrix(rng: np.random.Generator, n_years: int, n_countries: int) -> AnnualLossMatrix:
    """Sparse heavy-tailed losses, the texture the tail metrics care about."""
    values = rng.lognormal(1.0, 1.5, size=(n_years, n_countries))
    values *= rng.random((n_years, n_countries)) < 0.3
    return make_matrix(values)


@pytest.fixture
def disjoint_matrix() -> AnnualLossMatrix:
    """Two countries whose single loss years never coincide."""
    return make_matrix([[10.0, 0.0], [0.0, 10.0], [0.0, 0.0], [0.0, 0.0]], countries=("AAA", "BBB"))


@pytest.fixture
def spec_k1() -> TailSpec:
    return TailSpec(alpha=0.75, k=1)


@pytest.fixture
def comonotone_matrix() -> AnnualLossMatrix:
    """Second column is exactly twice the first; values are powers of two so
    every mean and ratio is exact in floating point."""
    base = np.array([1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0])
    return make_matrix(np.column_stack([base, 2.0 * base]), countries=("AAA", "BBB"))


@pytest.fixture
def toy_catalogue() -> EventCatalogue:
    events = (
        LossEvent(event_id="e1", year=1980, losses={"FJI": 5.0, "VUT": 2.0}),
        LossEvent(event_id="e2", year=1990, losses={"FJI": 1.0}),
        LossEvent(event_id="e3", year=1990, losses={"VUT": 7.0}),
    )
    return EventCatalogue(events=events, window=(1979, 2019))
