"""Wavelength-dependent fibre parameters: loss, dispersion, nonlinearity, Raman gain."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .spectrum import C_NM_THZ

DB_TO_NEPER = math.log(10.0) / 10.0

# valid query range for attenuation models, nm
ATTENUATION_RANGE = (1200.0, 1700.0)

# normalized silica Raman gain: (frequency shift THz, relative gain)
DEFAULT_RAMAN_SHAPE = (
    (0.0, 0.0),
    (2.0, 0.13),
    (4.0, 0.29),
    (6.0, 0.44),
    (8.0, 0.58),
    (10.0, 0.72),
    (12.0, 0.90),
    (13.2, 1.0),
    (14.7, 0.93),
    (16.5, 0.40),
    (18.5, 0.28),
    (24.0, 0.20),
    (30.0, 0.08),
    (40.0, 0.0),
)


@dataclass(frozen=True)
class WaterPeak:
    center: float = 1383.0  # nm
    height: float = 0.0  # dB/km
    width: float = 15.0  # nm, gaussian standard deviation

    def __call__(self, lam):
        return self.height * np.exp(-0.5 * ((lam - self.center) / self.width) ** 2)


@dataclass(frozen=True)
class AttenuationProfile:
    """Fibre loss in dB/km, either tabulated or parametric.

    Parametric mode evaluates ``rayleigh / lambda_um**4 + floor + water_peak``.
    Table mode interpolates linearly and clamps outside the tabulated range.
    """

    rayleigh: float = 0.0  # dB*um^4/km
    floor: float = 0.0  # dB/km
    water_peak: WaterPeak = field(default_factory=WaterPeak)
    table: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self):
        if self.table is not None:
            lam = np.array([p[0] for p in self.table], dtype=float)
            if lam.size == 0:
                raise ValueError("attenuation table is empty")
            if np.any(np.diff(lam) <= 0):
                raise ValueError("attenuation table wavelengths must be strictly increasing")
            if any(p[1] <= 0 for p in self.table):
                raise ValueError("attenuation table values must be positive")

    @property
    def mode(self) -> str:
        return "parametric" if self.table is None else "table"

    @classmethod
    def calibrated(cls, at_1310: float, at_1550: float, water_peak: WaterPeak | None = None):
        """Solve for the Rayleigh coefficient and floor that hit both anchor values."""
        wp = water_peak or WaterPeak()
        r = ((at_1310 - wp(1310.0)) - (at_1550 - wp(1550.0))) / (1.31**-4 - 1.55**-4)
        floor = at_1550 - wp(1550.0) - r * 1.55**-4
        return cls(rayleigh=r, floor=floor, water_peak=wp)

    @classmethod
    def from_file(cls, path):
        data = np.loadtxt(Path(path), ndmin=2)
        return cls(table=tuple((float(a), float(b)) for a, b in data[:, :2]))

    def db_per_km(self, wavelength):
        lam = np.asarray(wavelength, dtype=float)
        lo, hi = ATTENUATION_RANGE
        if np.any((lam < lo) | (lam > hi)):
            raise ValueError(f"attenuation queried outside [{lo}, {hi}] nm")
        if self.table is None:
            a = self.rayleigh / (lam * 1e-3) ** 4 + self.floor + self.water_peak(lam)
        else:
            tab = np.asarray(self.table, dtype=float)
            a = np.interp(lam, tab[:, 0], tab[:, 1])
        return float(a) if a.ndim == 0 else a

    def neper_per_km(self, wavelength):
        """Power attenuation coefficient in 1/km."""
        return self.db_per_km(wavelength) * DB_TO_NEPER


def attenuation_at(profile: AttenuationProfile, wavelength, unit: str = "dB"):
    if unit == "dB":
        return profile.db_per_km(wavelength)
    if unit == "Np":
        return profile.neper_per_km(wavelength)
    raise ValueError(f"unknown attenuation unit {unit!r}")


@dataclass(frozen=True)
class DispersionModel:
    """Piecewise-linear D(lambda) in ps/(nm km), extrapolating the end segments."""

    anchors: tuple[tuple[float, float], ...] = ((1260.0, -2.4), (1360.0, 4.5), (1550.0, 16.9))

    def __post_init__(self):
        lam = [a[0] for a in self.anchors]
        if len(lam) < 2:
            raise ValueError("dispersion model needs at least two anchors")
        if any(b <= a for a, b in zip(lam, lam[1:])):
            raise ValueError("dispersion anchors must be strictly increasing in wavelength")

    def _segment(self, lam):
        lam_a = np.array([a[0] for a in self.anchors])
        d_a = np.array([a[1] for a in self.anchors])
        idx = np.clip(np.searchsorted(lam_a, lam, side="right") - 1, 0, len(lam_a) - 2)
        slope = (d_a[idx + 1] - d_a[idx]) / (lam_a[idx + 1] - lam_a[idx])
        return lam_a[idx], d_a[idx], slope

    def d(self, wavelength):
        lam = np.asarray(wavelength, dtype=float)
        l0, d0, slope = self._segment(lam)
        out = d0 + slope * (lam - l0)
        return float(out) if out.ndim == 0 else out

    def slope(self, wavelength):
        """dD/dlambda in ps/(nm^2 km)."""
        lam = np.asarray(wavelength, dtype=float)
        out = self._segment(lam)[2]
        return float(out) if np.ndim(out) == 0 else out

    def zero_dispersion_wavelength(self) -> float | None:
        for (l0, d0), (l1, d1) in zip(self.anchors, self.anchors[1:]):
            if d0 == 0:
                return l0
            if d0 * d1 < 0:
                return l0 - d0 * (l1 - l0) / (d1 - d0)
        return None


def beta2_beta3_at(model: DispersionModel, frequency):
    """Return (beta2 ps^2/km, beta3 ps^3/km) at the given frequency (THz)."""
    f = np.asarray(frequency, dtype=float)
    lam = C_NM_THZ / f
    d = np.asarray(model.d(lam))
    s = np.asarray(model.slope(lam))
    k = lam**2 / (2 * np.pi * C_NM_THZ)
    beta2 = -d * k
    beta3 = k**2 * s + lam**3 / (2 * np.pi**2 * C_NM_THZ**2) * d
    if beta2.ndim == 0:
        return float(beta2), float(beta3)
    return beta2, beta3


@dataclass(frozen=True)
class NonlinearCoefficient:
    """gamma(lambda) in 1/(W km), linear between anchors and clamped outside."""

    anchors: tuple[tuple[float, float], ...] = ((1310.0, 1.97), (1550.0, 1.27))

    def __post_init__(self):
        if any(g <= 0 for _, g in self.anchors):
            raise ValueError("nonlinear coefficient must be positive")

    def __call__(self, wavelength):
        lam = np.asarray(wavelength, dtype=float)
        a = np.asarray(self.anchors, dtype=float)
        out = np.interp(lam, a[:, 0], a[:, 1])
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class RamanGainSpectrum:
    shape: tuple[tuple[float, float], ...] = DEFAULT_RAMAN_SHAPE
    peak_efficiency: float = 0.39  # C_R, 1/(W km)
    reference_frequency: float = 206.0  # THz
    pump_frequency_scaling: bool = True

    def __post_init__(self):
        s = np.asarray(self.shape, dtype=float)
        if s.ndim != 2 or s.shape[0] < 2:
            raise ValueError("Raman shape needs at least two points")
        if s[0, 0] != 0.0 or s[0, 1] != 0.0:
            raise ValueError("Raman shape must start at (0, 0)")
        if np.any(np.diff(s[:, 0]) <= 0) or np.any(s[:, 1] < 0):
            raise ValueError("Raman shape must have increasing shifts and non-negative gain")

    @classmethod
    def from_file(cls, path, **kwargs):
        data = np.loadtxt(Path(path), ndmin=2)
        return cls(shape=tuple((float(a), float(b)) for a, b in data[:, :2]), **kwargs)

    def normalized_gain(self, shift):
        s = np.asarray(self.shape, dtype=float)
        return np.interp(np.abs(shift), s[:, 0], s[:, 1], right=0.0)


def raman_coupling(raman: RamanGainSpectrum, f_pump, f_signal):
    """Signed Raman coefficient (1/(W km)) of the wave at ``f_pump`` acting on ``f_signal``.

    Positive when the acting wave is higher in frequency. The higher-frequency wave
    is depleted by the same photon flux, so its coefficient carries the extra
    factor f_high/f_low.
    """
    fp = np.asarray(f_pump, dtype=float)
    fs = np.asarray(f_signal, dtype=float)
    f_high = np.maximum(fp, fs)
    f_low = np.minimum(fp, fs)
    g = raman.peak_efficiency * raman.normalized_gain(fp - fs)
    if raman.pump_frequency_scaling:
        g = g * f_high / raman.reference_frequency
    out = np.where(fp > fs, g, np.where(fp < fs, -g * f_high / f_low, 0.0))
    return float(out) if out.ndim == 0 else out


def coupling_matrix(raman: RamanGainSpectrum, frequencies) -> np.ndarray:
    """M[i, j] = raman_coupling(f_j -> f_i)."""
    f = np.asarray(frequencies, dtype=float)
    return raman_coupling(raman, f[None, :], f[:, None])


@dataclass(frozen=True)
class FibreProfile:
    name: str
    attenuation: AttenuationProfile
    dispersion: DispersionModel = field(default_factory=DispersionModel)
    gamma: NonlinearCoefficient = field(default_factory=NonlinearCoefficient)
    raman: RamanGainSpectrum = field(default_factory=RamanGainSpectrum)
    span_length: float = 80.0  # km

    def __post_init__(self):
        if self.span_length <= 0:
            raise ValueError(f"fibre {self.name}: span length must be positive")


FIBRE_A_WATER_PEAK = WaterPeak(center=1383.0, height=0.05, width=15.0)


def fibre_a() -> FibreProfile:
    """Standard-loss G.652.D-like fibre: 0.33 dB/km at 1310 nm, 0.20 at 1550 nm."""
    return FibreProfile("A", AttenuationProfile.calibrated(0.33, 0.20, FIBRE_A_WATER_PEAK))


def fibre_b() -> FibreProfile:
    """Low-loss fibre without water peak: 0.27 dB/km at 1310 nm, 0.15 at 1550 nm."""
    return FibreProfile("B", AttenuationProfile.calibrated(0.27, 0.15))
