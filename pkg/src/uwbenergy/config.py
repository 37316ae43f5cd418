"""Run configuration: TOML ingestion, validation and hashing."""
from __future__ import annotations

import copy
import hashlib
import json
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .amplifier import AmplifierModel, PceCurve
from .errors import ConfigError
from .fibre import (
    AttenuationProfile,
    DispersionModel,
    FibreProfile,
    NonlinearCoefficient,
    RamanGainSpectrum,
    WaterPeak,
)
from .gn import NliConfig
from .optimizer import OptimizerConfig
from .spectrum import Band, check_disjoint

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

BUILTIN_CONFIGS = ("paper_defaults",)


def builtin_text(name: str = "paper_defaults") -> str:
    return resources.files("uwbenergy").joinpath(f"data/{name}.toml").read_text()


@dataclass(frozen=True)
class RunConfig:
    bands: dict[str, Band]
    trim_channels: dict[str, int]
    amplifiers: dict[str, AmplifierModel]
    fibres: dict[str, FibreProfile]
    symbol_rate: float = 140.0
    slot: float = 150.0
    trx_snr_db: float = 20.0
    z_steps: int = 200
    nli: NliConfig = field(default_factory=NliConfig)
    nli_inner: NliConfig = field(default_factory=lambda: NliConfig(mode="xpm_plus_spm"))
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    distances: tuple[int, ...] = (3, 13)
    sweep_fibres: tuple[str, ...] = ("A", "B")
    trx_watts: float = 24.0
    extra_amps_per_band: int = 0
    workers: int = 1
    output_dir: str = "results"
    data: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def band_order(self) -> tuple[str, ...]:
        """Configured bands by ascending wavelength."""
        return tuple(sorted(self.bands, key=lambda b: self.bands[b].lambda_min))

    @property
    def hash(self) -> str:
        return config_hash(self.data)


# execution settings that cannot change any computed number
UNHASHED = (("sweep", "workers"), ("sweep", "output_dir"))


def config_hash(data: dict) -> str:
    data = copy.deepcopy(data)
    for section, key in UNHASHED:
        data.get(section, {}).pop(key, None)
    canon = json.dumps(data, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def _num(errors, ctx, table, key, default=None, positive=False, nonneg=False):
    val = table.get(key, default)
    if val is None:
        errors.append(f"{ctx}: missing '{key}'")
        return None
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        errors.append(f"{ctx}: '{key}' must be a number")
        return None
    if positive and not val > 0:
        errors.append(f"{ctx}: '{key}' must be positive")
    if nonneg and val < 0:
        errors.append(f"{ctx}: '{key}' must not be negative")
    return val


def _pairs(errors, ctx, val):
    try:
        arr = np.asarray(val, dtype=float)
    except (TypeError, ValueError):
        errors.append(f"{ctx}: expected a list of [x, y] pairs")
        return None
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] == 0:
        errors.append(f"{ctx}: expected a list of [x, y] pairs")
        return None
    return [[float(a), float(b)] for a, b in arr]


def _load_table(errors, ctx, base: Path | None, name: str):
    path = Path(name)
    if not path.is_absolute() and base is not None:
        path = base / path
    try:
        arr = np.loadtxt(path, ndmin=2)
    except (OSError, ValueError) as exc:
        errors.append(f"{ctx}: cannot read table file {path}: {exc}")
        return None
    if arr.shape[1] < 2:
        errors.append(f"{ctx}: table file {path} needs two columns")
        return None
    return [[float(a), float(b)] for a, b in arr[:, :2]]


def _parse_fibre(errors, name, tab, base):
    ctx = f"fibres.{name}"
    out = {"span_length_km": _num(errors, ctx, tab, "span_length_km", 80.0, positive=True)}

    att = dict(tab.get("attenuation", {}))
    actx = f"{ctx}.attenuation"
    if "table_file" in att:
        att = {"table": _load_table(errors, actx, base, att["table_file"])}
    if "table" in att:
        table = _pairs(errors, actx, att["table"])
        if table is not None:
            lam = [p[0] for p in table]
            if any(b <= a for a, b in zip(lam, lam[1:])):
                errors.append(f"{actx}: table wavelengths must be strictly increasing")
            if any(p[1] <= 0 for p in table):
                errors.append(f"{actx}: attenuation must be positive")
        out["attenuation"] = {"table": table}
    else:
        wp = att.get("water_peak", {})
        out["attenuation"] = {
            "rayleigh_db_um4_per_km": _num(errors, actx, att, "rayleigh_db_um4_per_km", nonneg=True),
            "floor_db_per_km": _num(errors, actx, att, "floor_db_per_km"),
            "water_peak": {
                "center_nm": _num(errors, actx, wp, "center_nm", 1383.0, positive=True),
                "height_db_per_km": _num(errors, actx, wp, "height_db_per_km", 0.0, nonneg=True),
                "width_nm": _num(errors, actx, wp, "width_nm", 15.0, positive=True),
            },
        }

    disp = tab.get("dispersion", {})
    out["dispersion"] = {
        "anchors": _pairs(errors, f"{ctx}.dispersion", disp.get("anchors", DispersionModel().anchors))
    }
    gam = tab.get("gamma", {})
    anchors = _pairs(errors, f"{ctx}.gamma", gam.get("anchors", NonlinearCoefficient().anchors))
    if anchors and any(g <= 0 for _, g in anchors):
        errors.append(f"{ctx}.gamma: nonlinear coefficient must be positive")
    out["gamma"] = {"anchors": anchors}

    ram = dict(tab.get("raman", {}))
    rctx = f"{ctx}.raman"
    if "shape_file" in ram:
        ram["shape"] = _load_table(errors, rctx, base, ram.pop("shape_file"))
    out["raman"] = {
        "peak_efficiency": _num(errors, rctx, ram, "peak_efficiency", 0.39, nonneg=True),
        "reference_thz": _num(errors, rctx, ram, "reference_thz", 206.0, positive=True),
        "pump_frequency_scaling": bool(ram.get("pump_frequency_scaling", True)),
        "shape": _pairs(errors, rctx, ram.get("shape", RamanGainSpectrum().shape)),
    }
    return out


def _nli_dict(errors, ctx, tab, default: NliConfig):
    return {
        "mode": str(tab.get("mode", default.mode)),
        "quad_points": int(_num(errors, ctx, tab, "quad_points", default.quad_points) or 1),
        "ridge_points": int(_num(errors, ctx, tab, "ridge_points", default.ridge_points) or 0),
        "spm_points": int(_num(errors, ctx, tab, "spm_points", default.spm_points) or 1),
        "z_segments": int(_num(errors, ctx, tab, "z_segments", default.z_segments) or 1),
        "ridge_closed_ratio": float(_num(errors, ctx, tab, "ridge_closed_ratio", default.ridge_closed_ratio) or 0.0),
    }


def normalize(raw: dict, base: Path | None = None) -> dict:
    """Validate a raw TOML mapping and return the canonical dict.

    File references are inlined. Raises ConfigError listing every problem found.
    """
    errors: list[str] = []
    raw = copy.deepcopy(raw)
    model = raw.get("model", {})
    data = {
        "model": {
            "symbol_rate_gbd": _num(errors, "model", model, "symbol_rate_gbd", 140.0, positive=True),
            "slot_ghz": _num(errors, "model", model, "slot_ghz", 150.0, positive=True),
            "trx_snr_db": _num(errors, "model", model, "trx_snr_db", 20.0),
            "z_steps": int(_num(errors, "model", model, "z_steps", 200, positive=True) or 0),
        }
    }
    m = data["model"]
    if m["symbol_rate_gbd"] and m["slot_ghz"] and m["slot_ghz"] < m["symbol_rate_gbd"]:
        errors.append("model: slot_ghz must be >= symbol_rate_gbd")
    if m["z_steps"] and m["z_steps"] < 10:
        errors.append("model: z_steps must be >= 10")

    bands = {}
    for name, tab in raw.get("bands", {}).items():
        ctx = f"bands.{name}"
        lo = _num(errors, ctx, tab, "lambda_min_nm", positive=True)
        hi = _num(errors, ctx, tab, "lambda_max_nm", positive=True)
        if lo is not None and hi is not None and not lo < hi:
            errors.append(f"{ctx}: lambda_min_nm must be below lambda_max_nm")
        trim = _num(errors, ctx, tab, "trim_channels", 0, nonneg=True)
        bands[name] = {"lambda_min_nm": lo, "lambda_max_nm": hi, "trim_channels": int(trim or 0)}
    if not bands:
        errors.append("bands: at least one band is required")
    else:
        try:
            check_disjoint(
                [Band(n, b["lambda_min_nm"], b["lambda_max_nm"]) for n, b in bands.items()
                 if b["lambda_min_nm"] and b["lambda_max_nm"] and b["lambda_min_nm"] < b["lambda_max_nm"]]
            )
        except ValueError as exc:
            errors.append(f"bands: {exc}")
    data["bands"] = bands

    amps = {}
    for name, tab in raw.get("amplifiers", {}).items():
        ctx = f"amplifiers.{name}"
        if name not in bands:
            errors.append(f"{ctx}: no band named {name}")
        pts = _pairs(errors, ctx, tab.get("pce_points", []))
        if pts is not None:
            for _, eta in pts:
                if not 0.0 < eta < 1.0:
                    errors.append(f"{ctx}: PCE must be in (0,1), got {eta}")
            if any(b[0] <= a[0] for a, b in zip(pts, pts[1:])):
                errors.append(f"{ctx}: PCE points must be sorted by increasing input power")
        entry = {
            "name": str(tab.get("name", f"{name}-DFA")),
            "noise_figure_db": _num(errors, ctx, tab, "noise_figure_db", nonneg=True),
            "pce_points": pts,
        }
        if "max_output_dbm" in tab:
            entry["max_output_dbm"] = _num(errors, ctx, tab, "max_output_dbm")
        amps[name] = entry
    for name in bands:
        if name not in amps:
            errors.append(f"bands.{name}: no amplifier defined for band {name}")
    data["amplifiers"] = amps

    fibres = {name: _parse_fibre(errors, name, tab, base) for name, tab in raw.get("fibres", {}).items()}
    if not fibres:
        errors.append("fibres: at least one fibre is required")
    data["fibres"] = fibres

    data["nli"] = _nli_dict(errors, "nli", raw.get("nli", {}), NliConfig())
    data["nli_inner"] = _nli_dict(
        errors, "nli_inner", raw.get("nli_inner", {}),
        NliConfig(mode="xpm_plus_spm", quad_points=1, ridge_points=4, spm_points=6, z_segments=8),
    )
    for key in ("nli", "nli_inner"):
        try:
            NliConfig(**data[key])
        except ConfigError as exc:
            errors.append(f"{key}: {exc}")

    opt = raw.get("optimizer", {})
    d = OptimizerConfig()
    bounds = opt.get("bounds_dbm", list(d.bounds))
    data["optimizer"] = {
        "segments": int(_num(errors, "optimizer", opt, "segments", d.segments, positive=True) or 1),
        "initial_dbm": _num(errors, "optimizer", opt, "initial_dbm", d.initial_dbm),
        "step_init_db": _num(errors, "optimizer", opt, "step_init_db", d.step_init, positive=True),
        "step_min_db": _num(errors, "optimizer", opt, "step_min_db", d.step_min, positive=True),
        "max_sweeps": int(_num(errors, "optimizer", opt, "max_sweeps", d.max_sweeps, positive=True) or 1),
        "bounds_dbm": [float(b) for b in bounds],
    }
    o = data["optimizer"]
    if len(o["bounds_dbm"]) != 2 or o["bounds_dbm"][0] >= o["bounds_dbm"][1]:
        errors.append("optimizer: bounds_dbm must be [low, high] with low < high")
    if o["step_init_db"] and o["step_min_db"] and o["step_min_db"] >= o["step_init_db"]:
        errors.append("optimizer: step_min_db must be below step_init_db")

    sw = raw.get("sweep", {})
    dist = [int(x) for x in sw.get("distances_spans", [3, 13])]
    if any(x < 1 for x in dist):
        errors.append("sweep: distances_spans must be positive span counts")
    sweep_fibres = [str(x) for x in sw.get("fibres", list(fibres))]
    for fname in sweep_fibres:
        if fname not in fibres:
            errors.append(f"sweep: unknown fibre {fname}")
    data["sweep"] = {
        "distances_spans": dist,
        "fibres": sweep_fibres,
        "trx_watts_per_channel": _num(errors, "sweep", sw, "trx_watts_per_channel", 24.0, nonneg=True),
        "extra_amps_per_band": int(_num(errors, "sweep", sw, "extra_amps_per_band", 0, nonneg=True) or 0),
        "workers": int(_num(errors, "sweep", sw, "workers", 1, positive=True) or 1),
        "output_dir": str(sw.get("output_dir", "results")),
    }
    if errors:
        raise ConfigError(f"{len(errors)} configuration error(s): " + "; ".join(errors), errors)
    return data


def _fibre(name, d) -> FibreProfile:
    a = d["attenuation"]
    if "table" in a:
        att = AttenuationProfile(table=tuple(tuple(p) for p in a["table"]))
    else:
        wp = a["water_peak"]
        att = AttenuationProfile(
            rayleigh=a["rayleigh_db_um4_per_km"],
            floor=a["floor_db_per_km"],
            water_peak=WaterPeak(wp["center_nm"], wp["height_db_per_km"], wp["width_nm"]),
        )
    r = d["raman"]
    return FibreProfile(
        name=name,
        attenuation=att,
        dispersion=DispersionModel(tuple(tuple(p) for p in d["dispersion"]["anchors"])),
        gamma=NonlinearCoefficient(tuple(tuple(p) for p in d["gamma"]["anchors"])),
        raman=RamanGainSpectrum(
            shape=tuple(tuple(p) for p in r["shape"]),
            peak_efficiency=r["peak_efficiency"],
            reference_frequency=r["reference_thz"],
            pump_frequency_scaling=r["pump_frequency_scaling"],
        ),
        span_length=d["span_length_km"],
    )


def from_dict(data: dict) -> RunConfig:
    m, o, s = data["model"], data["optimizer"], data["sweep"]
    try:
        return RunConfig(
            bands={n: Band(n, b["lambda_min_nm"], b["lambda_max_nm"]) for n, b in data["bands"].items()},
            trim_channels={n: b["trim_channels"] for n, b in data["bands"].items()},
            amplifiers={
                n: AmplifierModel(n, a["noise_figure_db"], PceCurve(tuple(tuple(p) for p in a["pce_points"])),
                                  a.get("max_output_dbm"))
                for n, a in data["amplifiers"].items()
            },
            fibres={n: _fibre(n, f) for n, f in data["fibres"].items()},
            symbol_rate=m["symbol_rate_gbd"],
            slot=m["slot_ghz"],
            trx_snr_db=m["trx_snr_db"],
            z_steps=m["z_steps"],
            nli=NliConfig(**data["nli"]),
            nli_inner=NliConfig(**data["nli_inner"]),
            optimizer=OptimizerConfig(
                segments=o["segments"], initial_dbm=o["initial_dbm"], step_init=o["step_init_db"],
                step_min=o["step_min_db"], max_sweeps=o["max_sweeps"], bounds=tuple(o["bounds_dbm"]),
            ),
            distances=tuple(s["distances_spans"]),
            sweep_fibres=tuple(s["fibres"]),
            trx_watts=s["trx_watts_per_channel"],
            extra_amps_per_band=s["extra_amps_per_band"],
            workers=s["workers"],
            output_dir=s["output_dir"],
            data=data,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def parse_text(text: str, base: Path | None = None) -> RunConfig:
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML: {exc}") from exc
    return from_dict(normalize(raw, base))


def parse_config(path) -> RunConfig:
    """Load a config file, or a built-in config by name (e.g. ``paper_defaults``)."""
    if str(path) in BUILTIN_CONFIGS:
        return parse_text(builtin_text(str(path)))
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {p}")
    return parse_text(p.read_text(), base=p.parent)


def replace(cfg: RunConfig, **changes) -> RunConfig:
    """Apply dotted-key overrides (e.g. ``{"sweep.workers": 2}``) and revalidate."""
    data = copy.deepcopy(cfg.data)
    for key, val in changes.items():
        node = data
        parts = key.split(".")
        for part in parts[:-1]:
            node = node[part]
        node[parts[-1]] = val
    return from_dict(normalize(data))

