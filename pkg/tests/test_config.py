import re

import pytest

from uwbenergy.config import builtin_text, parse_config, parse_text, replace
from uwbenergy.errors import ConfigError
from uwbenergy.fibre import fibre_a, fibre_b

DEFAULTS = builtin_text()


def edited(pattern, repl, count=1):
    out, n = re.subn(pattern, repl, DEFAULTS, count=count, flags=re.M)
    assert n, pattern
    return out


def test_defaults_parse_and_hash_stable(cfg):
    again = parse_config("paper_defaults")
    assert again.hash == cfg.hash and len(cfg.hash) == 16
    assert cfg.band_order == ("O", "E", "S", "C", "L")
    assert set(cfg.amplifiers) == set(cfg.bands)


def test_defaults_reproduce_builtin_fibres(cfg):
    for lam in (1310.0, 1383.0, 1550.0, 1610.0):
        assert cfg.fibres["A"].attenuation.db_per_km(lam) == pytest.approx(fibre_a().attenuation.db_per_km(lam))
        assert cfg.fibres["B"].attenuation.db_per_km(lam) == pytest.approx(fibre_b().attenuation.db_per_km(lam))


def test_file_round_trip(tmp_path, cfg):
    path = tmp_path / "c.toml"
    path.write_text(DEFAULTS)
    assert parse_config(path).hash == cfg.hash


def test_missing_amplifier_names_band():
    text = edited(r'^\[amplifiers\.S\]\nname = "S-TDFA"\nnoise_figure_db = 7.0\npce_points = .*\n', "")
    with pytest.raises(ConfigError, match="band S"):
        parse_text(text)


def test_pce_out_of_range():
    with pytest.raises(ConfigError, match=re.escape("PCE must be in (0,1)")):
        parse_text(edited(r"pce_points = \[\[2\.0, 0\.05\]\]", "pce_points = [[2.0, 1.5]]"))


def test_all_errors_reported_together():
    text = edited(r"span_length_km = 80\.0", "span_length_km = -80.0")
    text = re.sub(r"pce_points = \[\[2\.0, 0\.05\]\]", "pce_points = [[2.0, 1.5]]", text)
    text = re.sub(r"lambda_min_nm = 1570\.0", "lambda_min_nm = 1560.0", text)
    with pytest.raises(ConfigError) as info:
        parse_text(text)
    msgs = " | ".join(info.value.errors)
    assert len(info.value.errors) >= 3
    assert "span_length_km" in msgs and "PCE" in msgs and "overlap" in msgs


def test_unknown_sweep_fibre_and_bad_toml():
    with pytest.raises(ConfigError, match="unknown fibre"):
        parse_text(edited(r'fibres = \["A", "B"\]', 'fibres = ["A", "Z"]'))
    with pytest.raises(ConfigError, match="invalid TOML"):
        parse_text("[model\n")
    with pytest.raises(ConfigError, match="not found"):
        parse_config("/nonexistent/config.toml")


def test_table_file_reference(tmp_path):
    (tmp_path / "att.txt").write_text("1250 0.40\n1650 0.18\n")
    text = edited(
        r"rayleigh_db_um4_per_km = 0\.78167682433398\nfloor_db_per_km = .*\nwater_peak = .*\n",
        'table_file = "att.txt"\n',
    )
    path = tmp_path / "c.toml"
    path.write_text(text)
    cfg = parse_config(path)
    att = cfg.fibres["A"].attenuation
    assert att.mode == "table" and att.db_per_km(1450.0) == pytest.approx(0.29)
    # inlined tables make the hash depend on file contents, not the path
    (tmp_path / "att.txt").write_text("1250 0.41\n1650 0.18\n")
    assert parse_config(path).hash != cfg.hash


def test_execution_settings_do_not_change_hash(cfg):
    assert replace(cfg, **{"sweep.workers": 4}).hash == cfg.hash
    assert replace(cfg, **{"sweep.output_dir": "elsewhere"}).hash == cfg.hash
    assert replace(cfg, **{"optimizer.segments": 2}).hash != cfg.hash


def test_replace_revalidates(cfg):
    with pytest.raises(ConfigError):
        replace(cfg, **{"optimizer.step_min_db": 5.0})
