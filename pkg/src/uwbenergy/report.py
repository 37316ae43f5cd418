"""CSV / JSON / gnuplot writers. Every file carries the tool version and config hash."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from . import __version__
from .gn import LinkResult
from .spectrum import ChannelGrid
from .sweep import CSV_COLUMNS, SweepResult, pareto_front

CHANNEL_COLUMNS = (
    "frequency_thz", "launch_dbm", "received_dbm", "gain_db", "p_ase_mw", "p_nli_mw",
    "snr_db", "capacity_gbps",
)


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.10g}"
    return str(x)


def header_line(config_hash: str) -> str:
    return f"# uwbenergy {__version__} config_hash={config_hash}\n"


def write_csv(path, columns, rows, config_hash: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        fh.write(header_line(config_hash))
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def write_json(path, payload: dict, config_hash: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    body = {"tool": "uwbenergy", "version": __version__, "config_hash": config_hash, **payload}
    path.write_text(json.dumps(_jsonable(body), indent=2, sort_keys=False) + "\n")
    return path


def channel_rows(grid: ChannelGrid, link: LinkResult):
    p_ase = link.p_ase * link.n_spans
    p_nli = link.p_nli * link.n_spans
    for i in range(len(grid)):
        yield [
            grid.frequencies[i],
            10 * np.log10(link.launch[i]),
            10 * np.log10(link.received[i]),
            10 * np.log10(link.launch[i] / link.received[i]),
            p_ase[i],
            p_nli[i],
            10 * np.log10(link.snr_total[i]),
            link.capacity[i],
        ]


def write_sweep(sweep: SweepResult, outdir, pareto: bool = True) -> list[Path]:
    outdir = Path(outdir)
    stem = f"{sweep.fibre}_{sweep.n_spans}"
    paths = [
        write_csv(outdir / f"sweep_{stem}.csv", CSV_COLUMNS, (r.row() for r in sweep.ok), sweep.config_hash),
        write_json(outdir / f"sweep_{stem}.json", sweep.to_dict(), sweep.config_hash),
    ]
    if pareto:
        paths.append(write_pareto(outdir / f"pareto_{stem}.dat", sweep))
    return paths


def write_pareto(path, sweep: SweepResult) -> Path:
    """Two gnuplot data blocks (``index 0``: amplifier only, ``index 1``: with transceivers)."""
    path = Path(path)
    lines = [header_line(sweep.config_hash).rstrip("\n")]
    for k, (energy, col) in enumerate((("amp", "pj_per_bit_amp"), ("total", "pj_per_bit_total"))):
        if k:
            lines += ["", ""]
        lines.append(f"# pareto front, energy={energy}: label throughput_tbps {col}")
        for r in pareto_front(sweep.results, energy):
            lines.append(f"{r.label} {fmt(r.throughput_tbps)} {fmt(getattr(r, col))}")
    path.write_text("\n".join(lines) + "\n")
    return path
