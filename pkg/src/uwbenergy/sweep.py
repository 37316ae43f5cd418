"""Energy-per-bit accounting, band-combination sweeps and Pareto fronts."""
from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .amplifier import AmplifierModel, electrical_power
from .config import RunConfig
from .errors import ConfigError
from .gn import LinkResult, evaluate_link
from .optimizer import LaunchParam, optimize_launch
from .spectrum import ChannelGrid, build_grid

logger = logging.getLogger(__name__)

WORKERS_ENV = "UWBENERGY_WORKERS"

CSV_COLUMNS = (
    "label", "channels", "throughput_tbps", "amp_power_w", "trx_power_w",
    "pj_per_bit_amp", "pj_per_bit_total",
)


@dataclass(frozen=True)
class BandEnergy:
    band: str
    channels: int
    p_out_mw: float
    p_in_mw: float
    pce: float
    p_elec_w: float  # one amplifier


@dataclass
class ScenarioResult:
    label: str
    n_spans: int
    fibre: str
    channels: int = 0
    throughput_tbps: float = float("nan")
    amp_power_w: float = float("nan")
    trx_power_w: float = float("nan")
    pj_per_bit_amp: float = float("nan")
    pj_per_bit_total: float = float("nan")
    per_band: list[BandEnergy] = field(default_factory=list)
    launch: dict | None = None
    optimizer: dict | None = None
    inner_throughput_tbps: float | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None

    def row(self) -> list:
        return [getattr(self, c) for c in CSV_COLUMNS]

    def to_dict(self) -> dict:
        return asdict(self)


def label_for(bands: Sequence[str], order: Sequence[str]) -> str:
    return "".join(b for b in order if b in set(bands))


def scenario_energy(
    label: str,
    grid: ChannelGrid,
    launch_mw,
    received_mw,
    amps: Mapping[str, AmplifierModel],
    n_spans: int,
    throughput_tbps: float,
    fibre: str = "",
    trx_watts: float = 24.0,
    extra_amps_per_band: int = 0,
) -> ScenarioResult:
    """Electrical power and energy per bit for an evaluated scenario.

    Every band amplifier lifts the band's received power back to its launch
    power; there are ``n_spans + extra_amps_per_band`` amplifiers per band.
    W/(Tb/s) is numerically pJ/bit.
    """
    launch = np.asarray(launch_mw, dtype=float)
    received = np.asarray(received_mw, dtype=float)
    per_band = []
    for b in grid.band_names:
        mask = grid.band_mask(b)
        p_out = float(np.sum(launch[mask]))
        p_in = float(np.sum(received[mask]))
        if p_in >= p_out:
            raise ValueError(f"band {b}: received power {p_in:.4g} mW is not below launch power {p_out:.4g} mW")
        amp = amps[b]
        per_band.append(
            BandEnergy(b, int(mask.sum()), p_out, p_in, float(amp.pce(10 * np.log10(p_in))),
                       electrical_power(amp, p_in, p_out))
        )
    n_amps = n_spans + extra_amps_per_band
    amp_power = n_amps * sum(e.p_elec_w for e in per_band)
    trx_power = trx_watts * len(grid)
    return ScenarioResult(
        label=label,
        n_spans=n_spans,
        fibre=fibre,
        channels=len(grid),
        throughput_tbps=throughput_tbps,
        amp_power_w=amp_power,
        trx_power_w=trx_power,
        pj_per_bit_amp=amp_power / throughput_tbps,
        pj_per_bit_total=(amp_power + trx_power) / throughput_tbps,
        per_band=per_band,
    )


def scenario_grid(cfg: RunConfig, bands: Sequence[str]) -> ChannelGrid:
    unknown = [b for b in bands if b not in cfg.bands]
    if unknown:
        raise ConfigError(f"unknown band(s) {', '.join(unknown)}")
    return build_grid(
        [cfg.bands[b] for b in bands], slot=cfg.slot, symbol_rate=cfg.symbol_rate,
        trim_channels=cfg.trim_channels,
    )


@dataclass
class SolvedScenario:
    result: ScenarioResult
    grid: ChannelGrid
    link: LinkResult
    launch: LaunchParam


def solve_scenario(
    cfg: RunConfig,
    bands: Sequence[str],
    fibre: str,
    n_spans: int,
    launch: LaunchParam | None = None,
    optimize: bool = True,
) -> SolvedScenario:
    """Optimise launch powers (inner NLI settings), then evaluate with the reporting settings."""
    if fibre not in cfg.fibres:
        raise ConfigError(f"unknown fibre {fibre!r}")
    grid = scenario_grid(cfg, bands)
    if len(grid) == 0:
        raise ConfigError(f"no channels fit in bands {''.join(bands)}")
    fib = cfg.fibres[fibre]
    label = label_for(bands, cfg.band_order)
    common = dict(snr_trx_db=cfg.trx_snr_db, z_steps=cfg.z_steps)

    def objective(p_mw):
        try:
            return evaluate_link(grid, p_mw, fib, cfg.amplifiers, n_spans, cfg.nli_inner, **common).throughput
        except ConfigError:
            # infeasible candidate (Raman gain beyond span loss): never accepted
            return -np.inf

    report = None
    if optimize:
        launch, report = optimize_launch(grid, objective, cfg.optimizer, initial=launch)
    elif launch is None:
        o = cfg.optimizer
        launch = LaunchParam.flat(grid.band_names, o.segments, o.initial_dbm, o.bounds)
    p_mw = launch.channel_mw(grid)
    link = evaluate_link(grid, p_mw, fib, cfg.amplifiers, n_spans, cfg.nli, **common)
    result = scenario_energy(
        label, grid, link.launch, link.received, cfg.amplifiers, n_spans, link.throughput,
        fibre=fibre, trx_watts=cfg.trx_watts, extra_amps_per_band=cfg.extra_amps_per_band,
    )
    result.launch = launch.to_dict()
    if report is not None:
        result.optimizer = report.to_dict()
        result.inner_throughput_tbps = report.trace[-1]
    return SolvedScenario(result, grid, link, launch)


def subsets(order: Sequence[str]) -> list[tuple[int, tuple[str, ...]]]:
    """Non-empty band subsets keyed by bitmask (bit k = k-th band in ``order``)."""
    out = []
    for mask in range(1, 2 ** len(order)):
        out.append((mask, tuple(b for k, b in enumerate(order) if mask >> k & 1)))
    return out


@dataclass
class SweepResult:
    fibre: str
    n_spans: int
    results: list[ScenarioResult]
    config_hash: str
    version: str

    @property
    def ok(self) -> list[ScenarioResult]:
        return [r for r in self.results if r.ok]

    def by_label(self) -> dict[str, ScenarioResult]:
        return {r.label: r for r in self.results}

    def to_dict(self) -> dict:
        return {
            "fibre": self.fibre,
            "n_spans": self.n_spans,
            "config_hash": self.config_hash,
            "version": self.version,
            "scenarios": [r.to_dict() for r in self.results],
        }


def _solve_one(cfg: RunConfig, bands, fibre, n_spans) -> ScenarioResult:
    try:
        return solve_scenario(cfg, bands, fibre, n_spans).result
    except Exception as exc:  # noqa: BLE001 - recorded per scenario, sweep continues
        logger.warning("scenario %s failed: %s", "".join(bands), exc)
        return ScenarioResult(label=label_for(bands, cfg.band_order), n_spans=n_spans, fibre=fibre,
                              error=f"{type(exc).__name__}: {exc}")


def resolve_workers(requested: int | None, cfg: RunConfig) -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return max(1, requested or cfg.workers)


def run_sweep(cfg: RunConfig, fibre: str, n_spans: int, workers: int | None = None,
              bands: Sequence[str] | None = None) -> SweepResult:
    """Solve every non-empty subset of the configured bands; results ordered by bitmask."""
    from . import __version__

    order = tuple(bands) if bands else cfg.band_order
    jobs = subsets(order)
    workers = resolve_workers(workers, cfg)
    results: dict[int, ScenarioResult] = {}
    if workers == 1:
        for mask, sub in jobs:
            results[mask] = _solve_one(cfg, sub, fibre, n_spans)
            logger.info("solved %s", results[mask].label)
    else:
        # largest scenarios first for load balance; aggregation is by mask
        size = {mask: len(scenario_grid(cfg, sub)) for mask, sub in jobs}
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {
                mask: pool.submit(_solve_one, cfg, sub, fibre, n_spans)
                for mask, sub in sorted(jobs, key=lambda j: -size[j[0]])
            }
            for mask, fut in futures.items():
                results[mask] = fut.result()
    ordered = [results[mask] for mask, _ in jobs]
    return SweepResult(fibre, n_spans, ordered, cfg.hash, __version__)


def pareto_front(results: Sequence[ScenarioResult], energy: str = "amp") -> list[ScenarioResult]:
    """Scenarios not dominated in (max throughput, min energy per bit), by throughput."""
    key = {"amp": "pj_per_bit_amp", "total": "pj_per_bit_total"}[energy]
    pts = [r for r in results if r.ok]
    front = []
    for r in pts:
        t, e = r.throughput_tbps, getattr(r, key)
        dominated = any(
            o is not r
            and o.throughput_tbps >= t
            and getattr(o, key) <= e
            and (o.throughput_tbps > t or getattr(o, key) < e)
            for o in pts
        )
        if not dominated:
            front.append(r)
    return sorted(front, key=lambda r: r.throughput_tbps)
