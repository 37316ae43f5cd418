"""Segmented launch-power optimisation by deterministic coordinate pattern search."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .spectrum import ChannelGrid

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OptimizerConfig:
    segments: int = 4
    initial_dbm: float = 0.0
    step_init: float = 1.0  # dB
    step_min: float = 0.05  # dB
    max_sweeps: int = 200
    bounds: tuple[float, float] = (-10.0, 10.0)  # dBm per channel

    def __post_init__(self):
        if self.segments < 1:
            raise ValueError("segments must be >= 1")
        if not self.step_init > self.step_min > 0:
            raise ValueError("need step_init > step_min > 0")
        if self.bounds[0] >= self.bounds[1]:
            raise ValueError("launch bounds are empty")


@dataclass(frozen=True)
class LaunchParam:
    """Per-band segment node powers (dBm), interpolated linearly in frequency."""

    nodes: dict[str, tuple[float, ...]]
    bounds: tuple[float, float] = (-10.0, 10.0)

    @classmethod
    def flat(cls, bands, segments: int, dbm: float, bounds=(-10.0, 10.0)):
        return cls({b: (float(dbm),) * segments for b in bands}, bounds)

    def vector(self) -> np.ndarray:
        return np.array([v for b in self.nodes for v in self.nodes[b]], dtype=float)

    def with_vector(self, x) -> "LaunchParam":
        out, pos = {}, 0
        for b, vals in self.nodes.items():
            out[b] = tuple(float(v) for v in x[pos : pos + len(vals)])
            pos += len(vals)
        return LaunchParam(out, self.bounds)

    def channel_dbm(self, grid: ChannelGrid) -> np.ndarray:
        p = np.empty(len(grid))
        for b in grid.band_names:
            mask = grid.band_mask(b)
            f = grid.frequencies[mask]
            vals = np.asarray(self.nodes[b], dtype=float)
            if vals.size == 1 or f.size == 1:
                p[mask] = vals.mean() if f.size == 1 else vals[0]
            else:
                xs = np.linspace(f[0], f[-1], vals.size)
                p[mask] = np.interp(f, xs, vals)
        return np.clip(p, *self.bounds)

    def channel_mw(self, grid: ChannelGrid) -> np.ndarray:
        return 10.0 ** (self.channel_dbm(grid) / 10.0)

    def to_dict(self) -> dict:
        return {"nodes_dbm": {b: list(v) for b, v in self.nodes.items()}, "bounds_dbm": list(self.bounds)}


@dataclass
class OptimizerReport:
    iterations: int = 0
    evaluations: int = 0
    trace: list[float] = field(default_factory=list)  # objective after each accepted step
    final: LaunchParam | None = None
    converged: bool = False
    final_step: float = 0.0
    clipped: int = 0

    def to_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "evaluations": self.evaluations,
            "trace_tbps": list(self.trace),
            "final": self.final.to_dict() if self.final else None,
            "converged": self.converged,
            "final_step_db": self.final_step,
            "clipped_candidates": self.clipped,
        }


class ObjectiveError(RuntimeError):
    def __init__(self, message, params):
        super().__init__(f"{message} at parameters {np.round(params, 4).tolist()}")
        self.params = np.asarray(params)


def pattern_search(
    objective: Callable[[np.ndarray], float],
    x0,
    cfg: OptimizerConfig = OptimizerConfig(),
):
    """Maximise ``objective`` by cycling coordinates with +-step trials.

    A trial is accepted only if it strictly improves the best value; the better
    of the two trials wins, with + preferred on ties. The step halves after a
    sweep with no acceptance. An objective of -inf marks an infeasible point.
    Returns (x_best, f_best, report).
    """
    lo, hi = cfg.bounds
    x = np.clip(np.asarray(x0, dtype=float), lo, hi)
    report = OptimizerReport()

    def evaluate(v):
        report.evaluations += 1
        try:
            val = float(objective(v))
        except Exception as exc:  # noqa: BLE001 - re-raised with the parameter vector
            raise ObjectiveError(f"objective evaluation failed: {exc}", v) from exc
        if np.isnan(val) or val == np.inf:
            raise ObjectiveError("objective returned an invalid value", v)
        return val

    best = evaluate(x)
    report.trace.append(best)
    step = cfg.step_init
    while report.iterations < cfg.max_sweeps:
        report.iterations += 1
        accepted = False
        for k in range(x.size):
            trials = []
            for sign in (1.0, -1.0):
                cand = x.copy()
                cand[k] += sign * step
                if cand[k] < lo or cand[k] > hi:
                    report.clipped += 1
                    logger.debug("clipping node %d to bounds [%g, %g]", k, lo, hi)
                    cand[k] = min(max(cand[k], lo), hi)
                    if cand[k] == x[k]:
                        continue
                trials.append((evaluate(cand), cand))
            if not trials:
                continue
            val, cand = max(trials, key=lambda t: t[0])
            if val > best:
                x, best = cand, val
                report.trace.append(best)
                accepted = True
        if not accepted:
            step /= 2.0
            if step < cfg.step_min:
                report.converged = True
                break
    report.final_step = step
    return x, best, report


def optimize_launch(
    grid: ChannelGrid,
    objective_from_mw: Callable[[np.ndarray], float],
    cfg: OptimizerConfig = OptimizerConfig(),
    initial: LaunchParam | None = None,
):
    """Optimise segment powers per band; ``objective_from_mw`` maps channel powers (mW) to Tb/s.

    Returns (LaunchParam, OptimizerReport).
    """
    param = initial or LaunchParam.flat(grid.band_names, cfg.segments, cfg.initial_dbm, cfg.bounds)

    def objective(x):
        return objective_from_mw(param.with_vector(x).channel_mw(grid))

    x, _, report = pattern_search(objective, param.vector(), cfg)
    report.final = param.with_vector(x)
    return report.final, report
