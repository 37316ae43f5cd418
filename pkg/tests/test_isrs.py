import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helpers import c_band_freqs, flat_fibre, grid_of
from oracles import two_channel_raman
from uwbenergy.errors import NumericalError
from uwbenergy.fibre import fibre_a, raman_coupling
from uwbenergy.isrs import PowerProfile, propagate_span, received_powers
from uwbenergy.spectrum import build_grid, default_bands


def photon_flux(profile):
    return (profile.powers / profile.frequencies).sum(axis=1)


def test_pure_loss_16_db():
    grid = grid_of(c_band_freqs(5))
    prof = propagate_span(grid, np.full(5, 2.0), flat_fibre(0.2, raman=False))
    np.testing.assert_allclose(10 * np.log10(prof.launch / prof.received), 16.0, rtol=1e-9)


def test_pure_loss_12_db_received_powers():
    grid = grid_of(c_band_freqs(3))
    launch = np.array([1.0, 2.0, 3.0])
    prof = propagate_span(grid, launch, flat_fibre(0.15, raman=False))
    np.testing.assert_allclose(received_powers(prof), launch * 10**-1.2, rtol=1e-9)
    assert received_powers(prof) is prof.received or np.array_equal(received_powers(prof), prof.powers[-1])


def test_received_powers_identity_on_one_step_profile():
    launch = np.array([1.0, 2.0])
    prof = PowerProfile(np.array([0.0]), launch[None, :], np.array([192.0, 193.0]))
    np.testing.assert_array_equal(received_powers(prof), launch)


def test_two_channel_analytic_solution():
    f = np.array([190.0, 203.0])
    grid = grid_of(f)
    fib = flat_fibre()
    launch = np.array([5.0, 40.0])
    prof = propagate_span(grid, launch, fib, alpha=0.0)
    g = raman_coupling(fib.raman, f[1], f[0])
    pump, sig = two_channel_raman(launch[1], launch[0], f[1], f[0], g, prof.z)
    np.testing.assert_allclose(prof.powers[:, 0], sig, rtol=1e-6)
    np.testing.assert_allclose(prof.powers[:, 1], pump, rtol=1e-6)
    assert prof.received[0] > launch[0] * 1.5  # the exchange is not trivial


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(0.1, 20.0), min_size=2, max_size=12), st.floats(185.0, 200.0))
def test_lossless_photon_flux_conserved(powers, f0):
    n = len(powers)
    grid = grid_of(f0 + 3.0 * np.arange(n))
    prof = propagate_span(grid, np.array(powers), flat_fibre(), alpha=0.0)
    flux = photon_flux(prof)
    np.testing.assert_allclose(flux, flux[0], rtol=1e-6)


def test_oescl_tilt_favours_low_frequencies(cfg):
    grid = build_grid(default_bands().values())
    fib = fibre_a()
    launch = np.ones(len(grid))
    with_raman = propagate_span(grid, launch, fib)
    no_raman = propagate_span(grid, launch, fib, raman=False)
    tilt = 10 * np.log10(with_raman.received / no_raman.received)
    assert tilt[grid.band_mask("L")].mean() > 0 > tilt[grid.band_mask("O")].mean()
    rx = with_raman.received
    assert rx[grid.band_mask("L")].mean() > rx[grid.band_mask("O")].mean()


def test_positive_powers_and_refinement():
    grid = build_grid(default_bands().values())
    fib = fibre_a()
    launch = np.full(len(grid), 2.0)
    coarse = propagate_span(grid, launch, fib, z_steps=200)
    fine = propagate_span(grid, launch, fib, z_steps=400)
    assert np.all(coarse.powers > 0)
    assert np.max(np.abs(fine.received / coarse.received - 1)) < 1e-4


def test_tilt_monotone_in_total_power():
    grid = build_grid([default_bands()[b] for b in "SCL"])
    fib = fibre_a()
    tilts = []
    for p in (0.1, 0.5, 1.0, 2.0, 4.0):
        launch = np.full(len(grid), p)
        rel = propagate_span(grid, launch, fib).received / propagate_span(grid, launch, fib, raman=False).received
        tilts.append(10 * np.log10(rel[0] / rel[-1]))
    assert np.all(np.diff(tilts) > 0)


def test_step_halving_keeps_powers_positive():
    # a huge pump makes a full RK4 step overshoot; halving must rescue positivity
    grid = grid_of([190.0, 203.2])
    prof = propagate_span(grid, np.array([1.0, 1e6]), flat_fibre(), z_steps=10, alpha=0.0)
    assert np.all(prof.powers > 0)


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_unrecoverable_blow_up_raises():
    grid = grid_of([190.0, 203.2])
    with pytest.raises(NumericalError):
        propagate_span(grid, np.array([1e300, 1e300]), flat_fibre(), z_steps=10, alpha=0.0)


@pytest.mark.parametrize("launch", [[1.0], [1.0, -1.0], [1.0, np.nan]])
def test_launch_validation(launch):
    grid = grid_of([192.0, 193.0])
    with pytest.raises(ValueError):
        propagate_span(grid, np.array(launch), flat_fibre())


def test_normalized_profile():
    grid = grid_of(c_band_freqs(2))
    prof = propagate_span(grid, np.array([1.0, 3.0]), flat_fibre(0.2, raman=False))
    np.testing.assert_allclose(prof.normalized()[-1], 10**-1.6, rtol=1e-7)
