import logging

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import C_NM_THZ, slot_count
from uwbenergy.spectrum import (
    Band, Channel, ChannelGrid, build_grid, default_bands, frequency_to_wavelength,
    slots_in_band, wavelength_to_frequency,
)


@pytest.mark.parametrize("lam, f", [(1550.0, 193.4145), (1310.0, 228.8492), (299792.458, 1.0)])
def test_wavelength_to_frequency_examples(lam, f):
    assert wavelength_to_frequency(lam) == pytest.approx(f, abs=5e-5)


@pytest.mark.parametrize("bad", [0.0, -1.0])
def test_non_positive_wavelength_rejected(bad):
    with pytest.raises(ValueError):
        wavelength_to_frequency(bad)
    with pytest.raises(ValueError):
        frequency_to_wavelength(bad)


@given(st.floats(min_value=100.0, max_value=1e5))
def test_round_trip(lam):
    assert frequency_to_wavelength(wavelength_to_frequency(lam)) == pytest.approx(lam, rel=1e-9)


def test_default_band_limits():
    b = default_bands()
    assert [(x.lambda_min, x.lambda_max) for x in b.values()] == [
        (1265, 1355), (1400, 1460), (1470, 1520), (1530, 1565), (1570, 1620)
    ]


def test_band_validation():
    with pytest.raises(ValueError):
        Band("C", 1565.0, 1530.0)
    with pytest.raises(ValueError):
        build_grid([Band("C", 1530, 1565), Band("L", 1560, 1620)])


def test_c_band_has_29_channels():
    grid = build_grid([default_bands()["C"]])
    assert len(grid) == 29


def test_default_total_near_277():
    grid = build_grid(default_bands().values())
    assert abs(len(grid) - 277) <= 3
    for b, band in default_bands().items():
        assert grid.counts[b] == slot_count(band.f_min, band.f_max, 0.15)


def test_single_slot_band():
    f0 = 190.0
    band = Band("C", C_NM_THZ / (f0 + 0.15), C_NM_THZ / f0)
    grid = build_grid([band])
    assert len(grid) == 1
    assert grid.frequencies[0] == pytest.approx(f0 + 0.075)


def test_narrow_band_warns_and_contributes_nothing(caplog):
    f0 = 190.0
    narrow = Band("S", C_NM_THZ / (f0 + 0.1), C_NM_THZ / f0)
    with caplog.at_level(logging.WARNING):
        grid = build_grid([narrow, default_bands()["C"]])
    assert grid.counts == {"C": 29}
    assert "narrower" in caplog.text


def test_slot_must_cover_symbol_rate():
    with pytest.raises(ValueError):
        build_grid([default_bands()["C"]], slot=100.0, symbol_rate=140.0)
    with pytest.raises(ValueError):
        Channel(193.0, "C", symbol_rate=160.0)


def test_trim_channels():
    full = build_grid([default_bands()["C"]])
    trimmed = build_grid([default_bands()["C"]], trim_channels={"C": 3})
    assert len(trimmed) == 26
    # two from the high edge, one from the low edge
    np.testing.assert_array_equal(trimmed.frequencies, full.frequencies[1:-2])


bands_strategy = st.lists(
    st.sampled_from(list(default_bands())), min_size=1, max_size=5, unique=True
)


@given(bands_strategy, st.floats(min_value=140.0, max_value=400.0))
def test_grid_invariants(names, slot):
    bands = [default_bands()[n] for n in names]
    grid = build_grid(bands, slot=slot)
    f = grid.frequencies
    assert np.all(np.diff(f) > 0)
    s = slot * 1e-3
    for name in names:
        band = default_bands()[name]
        fb = f[grid.band_mask(name)]
        assert fb.size == slots_in_band(band, slot)
        if fb.size:
            assert fb[0] - s / 2 >= band.f_min - 1e-9
            assert fb[-1] + s / 2 <= band.f_max + 1e-9
            np.testing.assert_allclose(np.diff(fb), s, rtol=1e-9)
    again = build_grid(bands, slot=slot)
    assert again == grid and np.array_equal(again.frequencies, f)


def test_grid_rejects_unsorted_channels():
    with pytest.raises(ValueError):
        ChannelGrid((Channel(193.0, "C"), Channel(192.0, "C")))
