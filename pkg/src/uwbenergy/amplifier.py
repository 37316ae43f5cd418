"""Doped-fibre amplifier models: noise figure, wallplug PCE and electrical power."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

PLANCK = 6.62607015e-34  # J s

DEFAULT_NOISE_FIGURES = {"O": 5.0, "E": 6.5, "S": 7.0, "C": 5.0, "L": 6.0}

# (total input power dBm, wallplug PCE)
DEFAULT_PCE_POINTS = {
    "C": ((2.0, 0.05),),
    "L": ((2.0, 0.037),),
    "S": ((2.0, 0.012),),
    "E": ((0.0, 0.012), (4.0, 0.013)),
    "O": ((0.0, 0.004), (4.0, 0.007)),
}

AMPLIFIER_NAMES = {"C": "C-EDFA", "L": "L-EDFA", "S": "S-TDFA", "E": "E-BDFA", "O": "O-BDFA"}


@dataclass(frozen=True)
class PceCurve:
    """PCE versus total input power, linear in dBm and flat beyond the end points."""

    points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if not self.points:
            raise ConfigError("PCE curve has no points")
        p_in = [p[0] for p in self.points]
        if any(b <= a for a, b in zip(p_in, p_in[1:])):
            raise ConfigError("PCE points must be sorted by strictly increasing input power")
        for _, eta in self.points:
            if not 0.0 < eta < 1.0:
                raise ConfigError(f"PCE must be in (0,1), got {eta}")

    def __call__(self, input_dbm):
        pts = np.asarray(self.points, dtype=float)
        out = np.interp(input_dbm, pts[:, 0], pts[:, 1])
        return float(out) if np.ndim(out) == 0 else out


def pce_at(curve: PceCurve, input_dbm):
    return curve(input_dbm)


@dataclass(frozen=True)
class AmplifierModel:
    band: str
    noise_figure: float  # dB
    pce: PceCurve
    max_output_power: float | None = None  # dBm

    @property
    def name(self) -> str:
        return AMPLIFIER_NAMES.get(self.band, f"{self.band}-DFA")

    @property
    def noise_factor(self) -> float:
        return 10.0 ** (self.noise_figure / 10.0)


def default_amplifiers() -> dict[str, AmplifierModel]:
    return {
        b: AmplifierModel(b, DEFAULT_NOISE_FIGURES[b], PceCurve(DEFAULT_PCE_POINTS[b]))
        for b in DEFAULT_NOISE_FIGURES
    }


def electrical_power(model: AmplifierModel, p_in_total: float, p_out_total: float) -> float:
    """Electrical power in W drawn to lift total optical power p_in -> p_out (both mW).

    The PCE is looked up at the total input power.
    """
    if p_in_total < 0:
        raise ValueError("input power must be non-negative")
    if p_out_total < p_in_total:
        raise ValueError(
            f"{model.name}: output power {p_out_total:.6g} mW below input power {p_in_total:.6g} mW"
        )
    if p_out_total == p_in_total:
        return 0.0
    p_in_dbm = 10.0 * np.log10(p_in_total) if p_in_total > 0 else -np.inf
    eta = model.pce(p_in_dbm)
    return (p_out_total - p_in_total) * 1e-3 / eta


def ase_power(noise_figure_db, frequency_thz, symbol_rate_gbd, gain_linear):
    """Dual-polarisation ASE power (mW) in the signal bandwidth: h f (F G - 1) B.

    Vectorised over channels; ``noise_figure_db`` may be per channel.
    """
    g = np.asarray(gain_linear, dtype=float)
    if np.any(g < 1.0):
        raise ValueError("amplifier gain must be >= 1")
    nf = 10.0 ** (np.asarray(noise_figure_db, dtype=float) / 10.0)
    p = PLANCK * np.asarray(frequency_thz) * 1e12 * (nf * g - 1.0) * np.asarray(symbol_rate_gbd) * 1e9
    p = np.maximum(p, 0.0) * 1e3
    return float(p) if p.ndim == 0 else p


def channel_ase_power(model: AmplifierModel, channel, gain_linear: float) -> float:
    return ase_power(model.noise_figure, channel.center_frequency, channel.symbol_rate, gain_linear)
