"""Signal power evolution along one span under loss and inter-channel Raman transfer."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .fibre import FibreProfile, coupling_matrix
from .spectrum import ChannelGrid

logger = logging.getLogger(__name__)

MAX_HALVINGS = 12


@dataclass(frozen=True)
class PowerProfile:
    z: np.ndarray  # km, shape (n_z,)
    powers: np.ndarray  # mW, shape (n_z, n_channels)
    frequencies: np.ndarray  # THz

    @property
    def launch(self) -> np.ndarray:
        return self.powers[0]

    @property
    def received(self) -> np.ndarray:
        return self.powers[-1]

    def normalized(self) -> np.ndarray:
        """rho(z, f_i) = P_i(z) / P_i(0)."""
        return self.powers / self.powers[0]


def received_powers(profile: PowerProfile) -> np.ndarray:
    return profile.powers[-1]


def _rk4_step(p, h, rhs):
    k1 = rhs(p)
    k2 = rhs(p + 0.5 * h * k1)
    k3 = rhs(p + 0.5 * h * k2)
    k4 = rhs(p + h * k3)
    return p + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def _advance(p, h, rhs, depth=0):
    """One RK4 step of length h, halved recursively until powers stay positive."""
    nxt = _rk4_step(p, h, rhs)
    if np.all(nxt > 0) and np.all(np.isfinite(nxt)):
        return nxt, depth
    if depth >= MAX_HALVINGS:
        bad = np.flatnonzero(~(np.isfinite(nxt) & (nxt > 0)))
        raise NumericalError(
            f"ISRS integration failed after {depth} step halvings (h={h:.3g} km); "
            f"offending channels {bad[:8].tolist()}"
        )
    mid, d1 = _advance(p, 0.5 * h, rhs, depth + 1)
    out, d2 = _advance(mid, 0.5 * h, rhs, depth + 1)
    return out, max(d1, d2)


def propagate_span(
    grid: ChannelGrid,
    launch_mw,
    fibre: FibreProfile,
    z_steps: int = 200,
    raman: bool = True,
    alpha: np.ndarray | None = None,
) -> PowerProfile:
    """Integrate dP_i/dz = -alpha_i P_i + P_i sum_j C(f_j -> f_i) P_j over one span.

    Fixed-step classical RK4 on a uniform grid of ``z_steps`` steps. ``alpha``
    (1/km) overrides the fibre attenuation, mainly for lossless checks.
    """
    launch = np.asarray(launch_mw, dtype=float)
    f = grid.frequencies
    if launch.shape != f.shape:
        raise ValueError(f"expected {f.size} launch powers, got {launch.shape}")
    if np.any(launch <= 0) or not np.all(np.isfinite(launch)):
        raise ValueError("launch powers must be positive and finite")
    if z_steps < 10:
        raise ValueError("z_steps must be at least 10")

    if alpha is None:
        alpha = fibre.attenuation.neper_per_km(grid.wavelengths)
    alpha = np.broadcast_to(np.asarray(alpha, dtype=float), f.shape)
    # coupling in 1/(W km) applied to powers in mW
    m = coupling_matrix(fibre.raman, f) * 1e-3 if raman else None

    if m is None:
        def rhs(p):
            return -alpha * p
    else:
        def rhs(p):
            return p * (m @ p - alpha)

    z = np.linspace(0.0, fibre.span_length, z_steps + 1)
    h = fibre.span_length / z_steps
    out = np.empty((z_steps + 1, f.size))
    out[0] = launch
    p = launch
    deepest = 0
    for n in range(z_steps):
        p, depth = _advance(p, h, rhs)
        deepest = max(deepest, depth)
        out[n + 1] = p
    if deepest:
        logger.info("ISRS solver halved its step %d time(s) to keep powers positive", deepest)
    return PowerProfile(z=z, powers=out, frequencies=f.copy())
