"""Command-line interface: ``uwbenergy {defaults,pce,span,solve,sweep}``.

Exit codes: 0 success, 1 invalid configuration or usage, 2 numerical failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .amplifier import electrical_power
from .config import builtin_text, parse_config, replace
from .errors import ConfigError, NumericalError
from .isrs import propagate_span
from .optimizer import LaunchParam
from .report import CHANNEL_COLUMNS, channel_rows, fmt, header_line, write_csv, write_json, write_sweep
from .sweep import run_sweep, scenario_grid, solve_scenario

logger = logging.getLogger("uwbenergy")

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _bands(text: str) -> list[str]:
    return list(text.upper())


def _add_config(p):
    p.add_argument("--config", default="paper_defaults",
                   help="TOML config file or built-in name (default: paper_defaults)")


def _add_optimizer(p):
    p.add_argument("--segments", type=int, help="power segments per band")
    p.add_argument("--max-sweeps", type=int, help="optimiser sweep limit")
    p.add_argument("--step-init", type=float, help="initial pattern step (dB)")
    p.add_argument("--step-min", type=float, help="stopping step (dB)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="uwbenergy", description="Energy-per-bit model for multi-band optical links.")
    parser.add_argument("--version", action="version", version=f"uwbenergy {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("defaults", help="print the shipped default configuration")
    p.add_argument("-o", "--output", help="write to file instead of stdout")

    p = sub.add_parser("pce", help="amplifier PCE lookup or PCE/electrical power tables")
    _add_config(p)
    p.add_argument("--amp", help="amplifier name (e.g. O-BDFA) or band letter")
    p.add_argument("--input-dbm", type=float, help="total amplifier input power")
    p.add_argument("--output-dbm", type=float, help="total output power; adds electrical power (W)")

    p = sub.add_parser("span", help="power evolution over one span (CSV, dBm)")
    _add_config(p)
    p.add_argument("--bands", default="OESCL")
    p.add_argument("--fibre", default="A")
    p.add_argument("--launch-dbm", type=float, default=0.0, help="flat launch power per channel")
    p.add_argument("--no-raman", action="store_true")
    p.add_argument("-o", "--output", help="CSV path (default: stdout)")

    p = sub.add_parser("solve", help="optimise and evaluate one band scenario")
    _add_config(p)
    p.add_argument("--bands", required=True, help="band letters, e.g. CL")
    p.add_argument("--fibre", default="A")
    p.add_argument("--spans", type=int, required=True)
    p.add_argument("--launch-dbm", type=float, help="skip optimisation; flat launch per channel")
    _add_optimizer(p)
    p.add_argument("--out", help="output directory (default: config sweep.output_dir)")

    p = sub.add_parser("sweep", help="all band combinations for a fibre and distance")
    _add_config(p)
    p.add_argument("--fibre", help="fibre name (default: every configured sweep fibre)")
    p.add_argument("--spans", type=int, help="span count (default: every configured distance)")
    p.add_argument("--bands", help="restrict the sweep to these bands")
    p.add_argument("--workers", type=int, help="process count (env UWBENERGY_WORKERS overrides)")
    _add_optimizer(p)
    p.add_argument("--out", help="output directory (default: config sweep.output_dir)")
    return parser


def _load(args):
    cfg = parse_config(args.config)
    overrides = {}
    for flag, key in (("segments", "optimizer.segments"), ("max_sweeps", "optimizer.max_sweeps"),
                      ("step_init", "optimizer.step_init_db"), ("step_min", "optimizer.step_min_db"),
                      ("workers", "sweep.workers")):
        val = getattr(args, flag, None)
        if val is not None:
            overrides[key] = val
    return replace(cfg, **overrides) if overrides else cfg


def _find_amp(cfg, name: str):
    for band, amp in cfg.amplifiers.items():
        if name.upper() in (band.upper(), amp.name.upper()):
            return band, amp
    raise ConfigError(f"unknown amplifier {name!r}; known: "
                      + ", ".join(f"{a.name} ({b})" for b, a in cfg.amplifiers.items()))


def cmd_defaults(args) -> int:
    text = builtin_text()
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_pce(args) -> int:
    cfg = _load(args)
    if args.amp and args.input_dbm is not None:
        _, amp = _find_amp(cfg, args.amp)
        pce = amp.pce(args.input_dbm)
        if args.output_dbm is None:
            print(fmt(pce))
        else:
            p_elec = electrical_power(amp, 10 ** (args.input_dbm / 10), 10 ** (args.output_dbm / 10))
            print(f"pce={fmt(pce)} p_elec_w={fmt(p_elec)}")
        return EXIT_OK
    amps = [_find_amp(cfg, args.amp)] if args.amp else list(cfg.amplifiers.items())
    inputs = [args.input_dbm] if args.input_dbm is not None else list(np.arange(-4.0, 8.01, 1.0))
    cols = ["amplifier", "band", "input_dbm", "pce"]
    if args.output_dbm is not None:
        cols.append("p_elec_w")
    sys.stdout.write(header_line(cfg.hash))
    print(",".join(cols))
    for band, amp in amps:
        for x in inputs:
            row = [amp.name, band, float(x), amp.pce(x)]
            if args.output_dbm is not None:
                p_out = 10 ** (args.output_dbm / 10)
                p_in = 10 ** (x / 10)
                row.append(electrical_power(amp, p_in, p_out) if p_out >= p_in else float("nan"))
            print(",".join(fmt(v) for v in row))
    return EXIT_OK


def cmd_span(args) -> int:
    cfg = _load(args)
    if args.fibre not in cfg.fibres:
        raise ConfigError(f"unknown fibre {args.fibre!r}")
    grid = scenario_grid(cfg, _bands(args.bands))
    launch = np.full(len(grid), 10 ** (args.launch_dbm / 10))
    prof = propagate_span(grid, launch, cfg.fibres[args.fibre], z_steps=cfg.z_steps, raman=not args.no_raman)
    cols = ["z_km"] + [f"{f:.4f}THz" for f in grid.frequencies]
    rows = ([z, *(10 * np.log10(p))] for z, p in zip(prof.z, prof.powers))
    if args.output:
        write_csv(args.output, cols, rows, cfg.hash)
    else:
        sys.stdout.write(header_line(cfg.hash))
        print(",".join(cols))
        for row in rows:
            print(",".join(fmt(v) for v in row))
    return EXIT_OK


def cmd_solve(args) -> int:
    cfg = _load(args)
    bands = _bands(args.bands)
    launch = None
    if args.launch_dbm is not None:
        o = cfg.optimizer
        launch = LaunchParam.flat(bands, o.segments, args.launch_dbm, o.bounds)
    solved = solve_scenario(cfg, bands, args.fibre, args.spans, launch=launch, optimize=launch is None)
    r = solved.result
    out = Path(args.out or cfg.output_dir)
    stem = f"solve_{r.label}_{args.fibre}_{args.spans}"
    write_csv(out / f"{stem}_channels.csv", CHANNEL_COLUMNS, channel_rows(solved.grid, solved.link), cfg.hash)
    write_json(out / f"{stem}.json", {"scenario": r.to_dict()}, cfg.hash)
    print(f"{r.label} fibre={args.fibre} spans={args.spans} channels={r.channels} "
          f"throughput_tbps={r.throughput_tbps:.3f} pj_per_bit_amp={r.pj_per_bit_amp:.4f} "
          f"pj_per_bit_total={r.pj_per_bit_total:.4f}")
    print(f"wrote {out / stem}.json and {stem}_channels.csv")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _load(args)
    fibres = [args.fibre] if args.fibre else list(cfg.sweep_fibres)
    distances = [args.spans] if args.spans else list(cfg.distances)
    for f in fibres:
        if f not in cfg.fibres:
            raise ConfigError(f"unknown fibre {f!r}")
    bands = _bands(args.bands) if args.bands else None
    out = Path(args.out or cfg.output_dir)
    status = EXIT_OK
    for f in fibres:
        for n in distances:
            res = run_sweep(cfg, f, n, bands=bands)
            paths = write_sweep(res, out)
            failed = [r for r in res.results if not r.ok]
            print(f"fibre={f} spans={n}: {len(res.ok)}/{len(res.results)} scenarios solved; "
                  f"wrote {', '.join(str(p) for p in paths)}")
            for r in failed:
                print(f"  failed {r.label}: {r.error}", file=sys.stderr)
            if not res.ok:
                status = EXIT_NUMERICAL
    return status


COMMANDS = {"defaults": cmd_defaults, "pce": cmd_pce, "span": cmd_span, "solve": cmd_solve, "sweep": cmd_sweep}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
