"""Loader diagnostics, round trips, and aggregation conservation."""

from __future__ import annotations

import tempfile
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from riskpools import (
    AnnualLossMatrix,
    CountryMeta,
    DataValidationError,
    EventCatalogue,
    LossEvent,
    aggregate_to_annual,
    load_annual_losses,
    load_country_meta,
    load_event_catalogue,
    write_annual_losses,
)

from conftest import make_matrix


def write_lines(path, lines):
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


class TestLoadAnnualLosses:
    def test_small_matrix_round_trip_of_input(self, tmp_path):
        path = tmp_path / "losses.csv"
        write_lines(path, ["year,AAA,BBB", "1,1,0", "2,0,2", "3,3,4"])
        matrix = load_annual_losses(path)
        assert matrix.n_years == 3
        assert matrix.n_countries == 2
        assert matrix.years == (1, 2, 3)
        assert matrix.countries == ("AAA", "BBB")
        np.testing.assert_array_equal(matrix.losses, [[1, 0], [0, 2], [3, 4]])

    def test_negative_loss_diagnostic_names_cell(self, tmp_path):
        path = tmp_path / "losses.csv"
        write_lines(path, ["year,JAM,BRB", "1,1,0", "2,0,-5"])
        with pytest.raises(DataValidationError, match=r"negative loss at \(year 2, BRB\)"):
            load_annual_losses(path)

    def test_duplicate_column(self, tmp_path):
        path = tmp_path / "losses.csv"
        write_lines(path, ["year,JAM,JAM", "1,1,0"])
        with pytest.raises(DataValidationError, match="duplicate country column 'JAM'"):
            load_annual_losses(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "losses.csv"
        path.write_text("", encoding="utf-8")
        with pytest.raises(DataValidationError, match="empty file"):
            load_annual_losses(path)

    def test_malformed_number_names_cell(self, tmp_path):
        path = tmp_path / "losses.csv"
        write_lines(path, ["year,JAM,BRB", "1,1,zzz"])
        with pytest.raises(DataValidationError, match=r"malformed number 'zzz' at \(year 1, BRB\)"):
            load_annual_losses(path)

    def test_missing_cell_is_an_error_not_a_zero(self, tmp_path):
        path = tmp_path / "losses.csv"
        write_lines(path, ["year,JAM,BRB", "1,1"])
        with pytest.raises(DataValidationError, match="expected 2 loss values, found 1"):
            load_annual_losses(path)

    def test_duplicate_year(self, tmp_path):
        path = tmp_path / "losses.csv"
        write_lines(path, ["year,JAM", "1,1", "1,2"])
        with pytest.raises(DataValidationError, match="duplicate year 1"):
            load_annual_losses(path)

    def test_requires_year_column(self, tmp_path):
        path = tmp_path / "losses.csv"
        write_lines(path, ["yr,JAM", "1,1"])
        with pytest.raises(DataValidationError, match="first column must be 'year'"):
            load_annual_losses(path)


class TestRoundTrip:
    def test_awkward_floats_round_trip_bit_exactly(self, tmp_path):
        values = np.array(
            [[0.1, 1e-17], [1e300, 2.0 / 3.0], [np.nextafter(1.0, 2.0), 12345.6789]]
        )
        matrix = make_matrix(values)
        path = tmp_path / "out.csv"
        write_annual_losses(matrix, path)
        loaded = load_annual_losses(path)
        assert loaded.years == matrix.years
        assert loaded.countries == matrix.countries
        assert np.array_equal(loaded.losses, matrix.losses)

    @settings(max_examples=40, deadline=None)
    @given(
        rows=st.lists(
            st.lists(
                st.floats(min_value=0.0, max_value=1e12, allow_nan=False),
                min_size=3,
                max_size=3,
            ),
            min_size=1,
            max_size=8,
        )
    )
    def test_round_trip_property(self, rows):
        matrix = make_matrix(np.asarray(rows))
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "m.csv"
            write_annual_losses(matrix, path)
            assert np.array_equal(load_annual_losses(path).losses, matrix.losses)


class TestMatrixValidation:
    def test_rejects_negative(self):
        with pytest.raises(DataValidationError, match="negative"):
            make_matrix([[1.0, -2.0]])

    def test_rejects_non_finite(self):
        with pytest.raises(DataValidationError, match="non-finite"):
            make_matrix([[1.0, np.inf]])

    def test_rejects_duplicate_countries(self):
        with pytest.raises(DataValidationError, match="duplicate country"):
            make_matrix([[1.0, 2.0]], countries=("AAA", "AAA"))

    def test_rejects_bad_iso3(self):
        with pytest.raises(DataValidationError, match="invalid country code"):
            make_matrix([[1.0]], countries=("aaa",))

    def test_losses_are_immutable(self, disjoint_matrix):
        with pytest.raises(ValueError):
            disjoint_matrix.losses[0, 0] = 99.0

    def test_unknown_country_lookup(self, disjoint_matrix):
        with pytest.raises(DataValidationError, match="unknown country code 'XXX'"):
            disjoint_matrix.index_of("XXX")


class TestEventCatalogue:
    def test_grouping(self, tmp_path):
        path = tmp_path / "cat.csv"
        write_lines(
            path,
            [
                "event_id,year,iso3,loss",
                "e1,1980,FJI,5",
                "e1,1980,VUT,2",
                "e2,1990,FJI,1",
            ],
        )
        cat = load_event_catalogue(path)
        assert len(cat.events) == 2
        assert cat.events[0].losses == {"FJI": 5.0, "VUT": 2.0}
        assert cat.events[1].losses == {"FJI": 1.0}
        assert cat.countries == ("FJI", "VUT")

    def test_out_of_window_year(self, tmp_path):
        path = tmp_path / "cat.csv"
        write_lines(path, ["event_id,year,iso3,loss", "e1,1950,FJI,5"])
        with pytest.raises(DataValidationError, match="year 1950 outside historical window 1979-2019"):
            load_event_catalogue(path)

    def test_empty_file_warns(self, tmp_path):
        path = tmp_path / "cat.csv"
        path.write_text("", encoding="utf-8")
        with pytest.warns(UserWarning, match="empty"):
            cat = load_event_catalogue(path)
        assert cat.events == ()

    def test_conflicting_duplicate_rows(self, tmp_path):
        path = tmp_path / "cat.csv"
        write_lines(
            path,
            ["event_id,year,iso3,loss", "e1,1980,FJI,5", "e1,1980,FJI,6"],
        )
        with pytest.raises(DataValidationError, match="conflicting duplicate rows"):
            load_event_catalogue(path)

    def test_conflicting_event_years(self, tmp_path):
        path = tmp_path / "cat.csv"
        write_lines(
            path,
            ["event_id,year,iso3,loss", "e1,1980,FJI,5", "e1,1981,VUT,6"],
        )
        with pytest.raises(DataValidationError, match="conflicting years"):
            load_event_catalogue(path)


class TestAggregateToAnnual:
    def test_fills_window_and_sums(self, toy_catalogue):
        matrix = aggregate_to_annual(toy_catalogue)
        assert matrix.years == tuple(range(1979, 2020))
        assert matrix.countries == ("FJI", "VUT")
        fji = matrix.column("FJI")
        vut = matrix.column("VUT")
        assert fji[1980 - 1979] == 5.0 and vut[1980 - 1979] == 2.0
        assert fji[1990 - 1979] == 1.0 and vut[1990 - 1979] == 7.0
        mask = np.ones(matrix.n_years, dtype=bool)
        mask[[1980 - 1979, 1990 - 1979]] = False
        assert not matrix.losses[mask].any()

    def test_same_year_events_sum(self):
        cat = EventCatalogue(
            events=(
                LossEvent("a", 1985, {"FJI": 5.0}),
                LossEvent("b", 1985, {"FJI": 7.0}),
            ),
            window=(1985, 1985),
        )
        matrix = aggregate_to_annual(cat)
        assert matrix.column("FJI")[0] == 12.0

    def test_empty_catalogue_gives_zero_matrix(self):
        cat = EventCatalogue(events=(), window=(1979, 2019))
        matrix = aggregate_to_annual(cat)
        assert matrix.n_years == 41
        assert matrix.n_countries == 0

    def test_conservation(self):
        rng = np.random.default_rng(3)
        events = tuple(
            LossEvent(
                f"e{i}",
                int(rng.integers(1979, 2020)),
                {code: float(rng.lognormal(2, 1)) for code in rng.choice(["FJI", "VUT", "TON"], size=2, replace=False)},
            )
            for i in range(200)
        )
        cat = EventCatalogue(events=events)
        matrix = aggregate_to_annual(cat)
        assert matrix.losses.sum() == pytest.approx(cat.total_loss(), rel=1e-9)


class TestCountryMeta:
    def test_load(self, tmp_path):
        path = tmp_path / "meta.json"
        path.write_text(
            '[{"iso3": "FJI", "region": "EAP", "pinned_pool": 1, "allowed_pools": [0, 1]},'
            ' {"iso3": "JAM", "region": "CAC"}]',
            encoding="utf-8",
        )
        meta = load_country_meta(path)
        assert meta["FJI"].pinned_pool == 1
        assert meta["FJI"].allowed_pools == frozenset({0, 1})
        assert meta["JAM"].allowed_pools is None

    def test_pin_must_be_allowed(self):
        with pytest.raises(DataValidationError, match="not in its allowed set"):
            CountryMeta(iso3="FJI", region="EAP", pinned_pool=2, allowed_pools=frozenset({0, 1}))

    def test_duplicate_rejected(self, tmp_path):
        path = tmp_path / "meta.json"
        path.write_text(
            '[{"iso3": "FJI", "region": "EAP"}, {"iso3": "FJI", "region": "EAP"}]',
            encoding="utf-8",
        )
        with pytest.raises(DataValidationError, match="duplicate metadata"):
            load_country_meta(path)
