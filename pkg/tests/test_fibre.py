import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import C_NM_THZ
from uwbenergy.fibre import (
    AttenuationProfile, DispersionModel, NonlinearCoefficient, RamanGainSpectrum, attenuation_at,
    beta2_beta3_at, coupling_matrix, fibre_a, fibre_b, raman_coupling,
)

lam_in_range = st.floats(min_value=1200.0, max_value=1700.0)


def test_attenuation_anchors():
    assert attenuation_at(fibre_a().attenuation, 1550.0) == pytest.approx(0.20, abs=1e-12)
    assert attenuation_at(fibre_b().attenuation, 1550.0) == pytest.approx(0.15, abs=1e-12)
    assert attenuation_at(fibre_a().attenuation, 1310.0) == pytest.approx(0.33, abs=1e-12)
    assert attenuation_at(fibre_b().attenuation, 1310.0) == pytest.approx(0.27, abs=1e-12)


def test_water_peak_only_on_fibre_a():
    a, b = fibre_a().attenuation, fibre_b().attenuation
    assert a.db_per_km(1383.0) > a.db_per_km(1360.0)
    assert b.db_per_km(1383.0) < b.db_per_km(1360.0)


def test_neper_variant():
    p = fibre_a().attenuation
    assert attenuation_at(p, 1550.0, "Np") == pytest.approx(0.2 * np.log(10) / 10)
    with pytest.raises(ValueError):
        attenuation_at(p, 1550.0, "furlong")


def test_table_single_entry_clamps():
    p = AttenuationProfile(table=((1550.0, 0.2),))
    assert attenuation_at(p, 1310.0) == 0.2


def test_table_interpolates_linearly():
    p = AttenuationProfile(table=((1300.0, 0.3), (1500.0, 0.2)))
    assert p.db_per_km(1400.0) == pytest.approx(0.25)


def test_out_of_range_query_rejected():
    with pytest.raises(ValueError):
        fibre_a().attenuation.db_per_km(1100.0)


def test_attenuation_file_override(tmp_path):
    path = tmp_path / "att.txt"
    path.write_text("1300 0.35\n1550 0.19\n")
    p = AttenuationProfile.from_file(path)
    assert p.mode == "table"
    assert p.db_per_km(1550.0) == pytest.approx(0.19)


@given(lam_in_range)
def test_attenuation_shape(lam):
    for fib in (fibre_a(), fibre_b()):
        a = fib.attenuation
        assert a.db_per_km(1310.0) > a.db_per_km(1550.0)
        # continuity: tiny step, tiny change
        assert abs(a.db_per_km(min(lam + 1e-6, 1700.0)) - a.db_per_km(lam)) < 1e-6


def test_attenuation_convex_near_1550():
    a = fibre_a().attenuation
    x = np.array([1530.0, 1550.0, 1570.0])
    y = a.db_per_km(x)
    assert y[0] + y[2] - 2 * y[1] > 0


def test_beta2_at_1550():
    b2, _ = beta2_beta3_at(DispersionModel(), C_NM_THZ / 1550.0)
    # c in nm*THz is c in nm/ps, so the expression is already in ps^2/km
    expected = -16.9 * 1550.0**2 / (2 * np.pi * C_NM_THZ)
    assert b2 == pytest.approx(expected, rel=1e-12)
    assert b2 == pytest.approx(-21.55, abs=0.01)


def test_beta2_zero_at_zero_dispersion():
    m = DispersionModel()
    lam0 = m.zero_dispersion_wavelength()
    assert 1260.0 < lam0 < 1360.0
    b2, _ = beta2_beta3_at(m, C_NM_THZ / lam0)
    assert b2 == pytest.approx(0.0, abs=1e-12)


def test_beta2_linear_in_d():
    base = DispersionModel()
    doubled = DispersionModel(tuple((lam, 2 * d) for lam, d in base.anchors))
    f = np.linspace(185.0, 235.0, 17)
    np.testing.assert_allclose(beta2_beta3_at(doubled, f)[0], 2 * beta2_beta3_at(base, f)[0], rtol=1e-12)


def test_beta3_matches_finite_difference():
    m = DispersionModel()
    f0, h = 200.0, 1e-4
    b2p, _ = beta2_beta3_at(m, f0 + h)
    b2m, _ = beta2_beta3_at(m, f0 - h)
    _, b3 = beta2_beta3_at(m, f0)
    # beta3 = d beta2 / d omega
    assert b3 == pytest.approx((b2p - b2m) / (2 * h) / (2 * np.pi), rel=1e-6)


def test_dispersion_extrapolates_last_segment():
    m = DispersionModel()
    slope = (16.9 - 4.5) / (1550.0 - 1360.0)
    assert m.d(1620.0) == pytest.approx(16.9 + 70.0 * slope)


def test_gamma_interpolation_and_clamp():
    g = NonlinearCoefficient()
    assert g(1310.0) == pytest.approx(1.97)
    assert g(1550.0) == pytest.approx(1.27)
    assert g(1430.0) == pytest.approx((1.97 + 1.27) / 2)
    assert g(1650.0) == pytest.approx(1.27)


def test_raman_coupling_examples():
    r = RamanGainSpectrum()
    assert raman_coupling(r, 200.0, 200.0) == 0.0
    assert raman_coupling(r, 213.2, 200.0) == pytest.approx(0.39 * 213.2 / 206.0)
    assert raman_coupling(r, 250.0, 200.0) == 0.0  # beyond the 40 THz table


@given(st.floats(min_value=185.0, max_value=235.0), st.floats(min_value=0.01, max_value=45.0))
def test_raman_photon_antisymmetry(fb, shift):
    r = RamanGainSpectrum()
    fa = fb + shift
    down = raman_coupling(r, fa, fb)
    up = raman_coupling(r, fb, fa)
    if down == 0.0:
        assert up == 0.0
    else:
        assert up / down == pytest.approx(-fa / fb, rel=1e-12)


def test_coupling_matrix_orientation():
    r = RamanGainSpectrum()
    f = np.array([190.0, 200.0])
    m = coupling_matrix(r, f)
    assert m[0, 1] > 0 > m[1, 0]
    assert m[0, 0] == m[1, 1] == 0


def test_raman_scaling_switch():
    r = RamanGainSpectrum(pump_frequency_scaling=False)
    assert raman_coupling(r, 213.2, 200.0) == pytest.approx(0.39)
