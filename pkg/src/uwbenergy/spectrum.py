"""Wavelength/frequency conversions, transmission bands and the WDM channel grid.

Wavelengths are in nm and frequencies in THz everywhere in this package.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

logger = logging.getLogger(__name__)

# speed of light in nm*THz
C_NM_THZ = 299792.458

BAND_ORDER = ("O", "E", "S", "C", "L")

DEFAULT_BAND_LIMITS = {
    "O": (1265.0, 1355.0),
    "E": (1400.0, 1460.0),
    "S": (1470.0, 1520.0),
    "C": (1530.0, 1565.0),
    "L": (1570.0, 1620.0),
}


def wavelength_to_frequency(wavelength):
    """Convert wavelength (nm) to frequency (THz). Works on scalars and arrays."""
    lam = np.asarray(wavelength, dtype=float)
    if np.any(lam <= 0):
        raise ValueError(f"wavelength must be positive, got {wavelength!r}")
    f = C_NM_THZ / lam
    return float(f) if f.ndim == 0 else f


def frequency_to_wavelength(frequency):
    """Convert frequency (THz) to wavelength (nm)."""
    f = np.asarray(frequency, dtype=float)
    if np.any(f <= 0):
        raise ValueError(f"frequency must be positive, got {frequency!r}")
    lam = C_NM_THZ / f
    return float(lam) if lam.ndim == 0 else lam


def db_to_lin(x):
    return 10.0 ** (np.asarray(x, dtype=float) / 10.0)


def lin_to_db(x):
    return 10.0 * np.log10(x)


@dataclass(frozen=True)
class Band:
    name: str
    lambda_min: float
    lambda_max: float

    def __post_init__(self):
        if not self.lambda_min < self.lambda_max:
            raise ValueError(
                f"band {self.name}: lambda_min ({self.lambda_min}) must be below "
                f"lambda_max ({self.lambda_max})"
            )
        if self.lambda_min <= 0:
            raise ValueError(f"band {self.name}: wavelengths must be positive")

    @property
    def f_min(self) -> float:
        return C_NM_THZ / self.lambda_max

    @property
    def f_max(self) -> float:
        return C_NM_THZ / self.lambda_min

    @property
    def width(self) -> float:
        """Optical bandwidth in THz."""
        return self.f_max - self.f_min


def default_bands() -> dict[str, Band]:
    return {name: Band(name, *DEFAULT_BAND_LIMITS[name]) for name in BAND_ORDER}


def check_disjoint(bands: Iterable[Band]) -> None:
    ordered = sorted(bands, key=lambda b: b.lambda_min)
    for lo, hi in zip(ordered, ordered[1:]):
        if hi.lambda_min < lo.lambda_max:
            raise ValueError(f"bands {lo.name} and {hi.name} overlap")


@dataclass(frozen=True)
class Channel:
    center_frequency: float  # THz
    band: str
    symbol_rate: float = 140.0  # GBd
    slot_width: float = 150.0  # GHz

    def __post_init__(self):
        if self.symbol_rate > self.slot_width:
            raise ValueError("symbol rate exceeds slot width: adjacent channels would overlap")

    @property
    def wavelength(self) -> float:
        return C_NM_THZ / self.center_frequency


@dataclass(frozen=True)
class ChannelGrid:
    """Channels sorted by ascending centre frequency."""

    channels: tuple[Channel, ...]
    symbol_rate: float = 140.0
    slot_width: float = 150.0
    frequencies: np.ndarray = field(init=False, repr=False, compare=False)
    bands: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        f = np.array([ch.center_frequency for ch in self.channels], dtype=float)
        if f.size > 1 and np.any(np.diff(f) <= 0):
            raise ValueError("channel centre frequencies must be strictly increasing")
        f.setflags(write=False)
        names = np.array([ch.band for ch in self.channels], dtype=object)
        names.setflags(write=False)
        object.__setattr__(self, "frequencies", f)
        object.__setattr__(self, "bands", names)

    def __len__(self) -> int:
        return len(self.channels)

    @property
    def band_names(self) -> tuple[str, ...]:
        """Bands present in the grid, ascending in frequency."""
        seen = []
        for ch in self.channels:
            if ch.band not in seen:
                seen.append(ch.band)
        return tuple(seen)

    @property
    def counts(self) -> dict[str, int]:
        return {b: int(np.sum(self.bands == b)) for b in self.band_names}

    def band_mask(self, band: str) -> np.ndarray:
        return self.bands == band

    @property
    def wavelengths(self) -> np.ndarray:
        return C_NM_THZ / self.frequencies

    @property
    def symbol_rate_thz(self) -> float:
        return self.symbol_rate * 1e-3

    def subset(self, band_names: Iterable[str]) -> "ChannelGrid":
        keep = set(band_names)
        return ChannelGrid(
            tuple(ch for ch in self.channels if ch.band in keep),
            symbol_rate=self.symbol_rate,
            slot_width=self.slot_width,
        )


def slots_in_band(band: Band, slot_ghz: float) -> int:
    """Number of full slots that fit inside the band (never negative)."""
    slot = slot_ghz * 1e-3
    # tolerance absorbs rounding when a band is an exact multiple of the slot
    n = math.floor((band.width - slot) / slot + 1e-9) + 1
    return max(n, 0)


def build_grid(
    bands: Iterable[Band],
    slot: float = 150.0,
    symbol_rate: float = 140.0,
    trim_channels: Mapping[str, int] | None = None,
) -> ChannelGrid:
    """Pack channels into each band starting half a slot above its low-frequency edge.

    ``trim_channels`` maps band name to a number of channels to drop, taken
    alternately from the high- and low-frequency edges (high edge first).
    """
    bands = list(bands)
    if not bands:
        raise ValueError("at least one band is required")
    if slot < symbol_rate:
        raise ValueError(f"slot width {slot} GHz is narrower than symbol rate {symbol_rate} GBd")
    check_disjoint(bands)
    trim_channels = dict(trim_channels or {})

    channels = []
    for band in sorted(bands, key=lambda b: b.f_min):
        n = slots_in_band(band, slot)
        if n == 0:
            logger.warning("band %s is narrower than one %g GHz slot; no channels placed", band.name, slot)
            continue
        centres = band.f_min + slot * 1e-3 * (np.arange(n) + 0.5)
        trim = int(trim_channels.get(band.name, 0))
        if trim < 0:
            raise ValueError(f"trim for band {band.name} must be non-negative")
        if trim:
            top = (trim + 1) // 2
            bottom = trim // 2
            centres = centres[bottom : n - top]
        channels.extend(
            Channel(float(f), band.name, symbol_rate=symbol_rate, slot_width=slot) for f in centres
        )
    return ChannelGrid(tuple(channels), symbol_rate=symbol_rate, slot_width=slot)
