"""Nonlinear interference (integral GN model over ISRS power profiles), SNR and capacity."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping

import numpy as np

from . import _kernels
from .amplifier import AmplifierModel, ase_power
from .errors import ConfigError
from .fibre import FibreProfile, beta2_beta3_at
from .isrs import PowerProfile, propagate_span
from .spectrum import ChannelGrid

MODES = ("full_integral", "xpm_plus_spm")


@dataclass(frozen=True)
class NliConfig:
    """Quadrature settings for the GN double integral.

    quad_points: midpoint nodes per channel and dimension.
    ridge_points: Gauss nodes per half channel across the f1 = f_i ridge (0 = plain midpoint).
    spm_points: graded nodes per side along f2 inside the SPM cell.
    z_segments: piecewise-exponential segments for the span integral.
    ridge_closed_ratio: use the closed-form ridge integral when the ridge
        half-width is this many times narrower than the integration line
        (0 = always integrate the ridge numerically).
    """

    mode: str = "full_integral"
    quad_points: int = 4
    ridge_points: int = 8
    spm_points: int = 12
    z_segments: int = 16
    ridge_closed_ratio: float = 20.0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"unknown NLI mode {self.mode!r}; expected one of {MODES}")
        if self.quad_points < 1:
            raise ConfigError("quad_points must be >= 1")
        if self.ridge_points < 0 or self.spm_points < 1:
            raise ConfigError("ridge_points must be >= 0 and spm_points >= 1")
        if self.z_segments < 1:
            raise ConfigError("z_segments must be >= 1")
        if self.ridge_closed_ratio < 0:
            raise ConfigError("ridge_closed_ratio must be >= 0")


@lru_cache(maxsize=None)
def _gauss_unit(n: int):
    if n == 0:
        return np.zeros(0), np.zeros(0)
    x, w = np.polynomial.legendre.leggauss(n)
    return (x + 1.0) / 2.0, w / 2.0


def _ln_rho_segments(profile: PowerProfile, n_seg: int):
    """ln(P/P0) resampled on a uniform grid of n_seg segments; returns (lnrho (N, n_seg+1), dz)."""
    z = profile.z
    ln_rho = np.log(profile.powers / profile.powers[0])
    zs = np.linspace(z[0], z[-1], n_seg + 1)
    idx = np.clip(np.searchsorted(z, zs, side="right") - 1, 0, z.size - 2)
    t = (zs - z[idx]) / (z[idx + 1] - z[idx])
    out = (1.0 - t)[:, None] * ln_rho[idx] + t[:, None] * ln_rho[idx + 1]
    return np.ascontiguousarray(out.T), float(zs[1] - zs[0])


def nli_powers(
    grid: ChannelGrid,
    profile: PowerProfile,
    fibre: FibreProfile,
    cfg: NliConfig = NliConfig(),
    targets=None,
) -> np.ndarray:
    """NLI power (mW) in each target channel's symbol-rate bandwidth after one span."""
    f = np.ascontiguousarray(grid.frequencies)
    if profile.powers.shape[1] != f.size:
        raise ValueError("power profile does not match the channel grid")
    if targets is None:
        targets = np.arange(f.size)
    targets = np.atleast_1d(np.asarray(targets, dtype=np.int64))
    bw = grid.symbol_rate_thz
    psd = profile.launch * 1e-3 / bw  # W/THz
    lnrho, dz = _ln_rho_segments(profile, cfg.z_segments)
    beta2, beta3 = beta2_beta3_at(fibre.dispersion, f)
    lam = grid.wavelengths
    alpha = fibre.attenuation.neper_per_km(lam)
    gamma = fibre.gamma(lam)
    rx, rw = _gauss_unit(cfg.ridge_points)
    sx, sw = _gauss_unit(cfg.spm_points)
    acc = _kernels.nli_psd(
        targets, f, psd, 0.5 * bw, lnrho, dz,
        np.atleast_1d(beta2).astype(float), np.atleast_1d(beta3).astype(float),
        np.atleast_1d(alpha).astype(float),
        cfg.quad_points, cfg.ridge_points, cfg.spm_points, cfg.mode == "full_integral",
        rx, rw, sx, sw, float(cfg.ridge_closed_ratio),
    )
    g_nli = 16.0 / 27.0 * np.atleast_1d(gamma)[targets] ** 2 * acc
    return g_nli * bw * 1e3


def nli_power(grid, profile, fibre, cfg: NliConfig, channel: int) -> float:
    return float(nli_powers(grid, profile, fibre, cfg, targets=[channel])[0])


@dataclass(frozen=True)
class ChannelSnr:
    index: int
    frequency: float  # THz
    p_signal: float  # mW
    p_received: float  # mW
    p_ase: float  # mW, accumulated over the link
    p_nli: float  # mW, accumulated over the link
    snr_link: float
    snr_total: float
    capacity: float  # Gb/s


@dataclass(frozen=True)
class LinkResult:
    """Array form of a link evaluation, one entry per channel."""

    launch: np.ndarray
    received: np.ndarray
    p_ase: np.ndarray  # per span, mW
    p_nli: np.ndarray  # per span, mW
    n_spans: int
    snr_link: np.ndarray
    snr_total: np.ndarray
    capacity: np.ndarray  # Gb/s
    profile: PowerProfile

    @property
    def throughput(self) -> float:
        return float(np.sum(self.capacity)) * 1e-3

    def channel_snrs(self, grid: ChannelGrid) -> list[ChannelSnr]:
        return [
            ChannelSnr(
                index=i,
                frequency=float(grid.frequencies[i]),
                p_signal=float(self.launch[i]),
                p_received=float(self.received[i]),
                p_ase=float(self.p_ase[i] * self.n_spans),
                p_nli=float(self.p_nli[i] * self.n_spans),
                snr_link=float(self.snr_link[i]),
                snr_total=float(self.snr_total[i]),
                capacity=float(self.capacity[i]),
            )
            for i in range(len(grid))
        ]


def combine_snr(*snrs):
    """Inverse-sum combination of independent noise contributions (linear SNRs)."""
    inv = sum(1.0 / np.asarray(s, dtype=float) for s in snrs)
    return 1.0 / inv


def shannon_capacity(snr, symbol_rate_gbd):
    """Dual-polarisation Shannon capacity in Gb/s."""
    return 2.0 * symbol_rate_gbd * np.log2(1.0 + np.asarray(snr, dtype=float))


def evaluate_link(
    grid: ChannelGrid,
    launch_mw,
    fibre: FibreProfile,
    amps: Mapping[str, AmplifierModel],
    n_spans: int,
    cfg: NliConfig = NliConfig(),
    snr_trx_db: float = 20.0,
    z_steps: int = 200,
    noise_free: bool = False,
    raman: bool = True,
) -> LinkResult:
    """Identical spans: amplifiers restore the launch profile at every span input."""
    if n_spans < 1:
        raise ConfigError("n_spans must be >= 1")
    missing = [b for b in grid.band_names if b not in amps]
    if missing:
        raise ConfigError(f"no amplifier for band(s) {', '.join(missing)}")
    launch = np.asarray(launch_mw, dtype=float)
    profile = propagate_span(grid, launch, fibre, z_steps=z_steps, raman=raman)
    received = profile.received
    gain = launch / received
    if np.any(gain < 1.0):
        bad = np.flatnonzero(gain < 1.0)
        raise ConfigError(
            f"ISRS net gain exceeds span loss for channel(s) {bad[:8].tolist()}; "
            "amplifier gain would be below 1"
        )
    nf = np.array([amps[b].noise_figure for b in grid.bands])
    p_ase = ase_power(nf, grid.frequencies, grid.symbol_rate, gain)
    p_nli = nli_powers(grid, profile, fibre, cfg)
    snr_trx = 10.0 ** (snr_trx_db / 10.0)
    if noise_free:
        snr_link = np.full(launch.shape, np.inf)
        snr_total = np.full(launch.shape, snr_trx)
    else:
        snr_link = launch / (n_spans * (p_ase + p_nli))
        snr_total = combine_snr(snr_link, snr_trx)
    capacity = shannon_capacity(snr_total, grid.symbol_rate)
    return LinkResult(launch, received, p_ase, p_nli, n_spans, snr_link, snr_total, capacity, profile)


def link_snr(grid, launch_mw, fibre, amps, n_spans, cfg=NliConfig(), **kwargs) -> list[ChannelSnr]:
    return evaluate_link(grid, launch_mw, fibre, amps, n_spans, cfg, **kwargs).channel_snrs(grid)


def throughput(snrs) -> float:
    """Total capacity in Tb/s."""
    return sum(s.capacity for s in snrs) * 1e-3
