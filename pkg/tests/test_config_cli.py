import os

import pytest

from urllcsim import cli
from urllcsim.config import (
    ConfigValidationError,
    config_to_yaml,
    load_preset,
    parse_config,
    preset_text,
)


def test_presets_parse_clean():
    for name in ("fig4a", "fig4b", "fig4c"):
        cfg = load_preset(name)
        assert cfg.scenario == name


def test_fig4a_preset_pins_reference_parameters():
    cfg = load_preset("fig4a")
    assert cfg.link.svc.n == 92
    assert cfg.link.svc.m == 42
    assert cfg.link.svc.k == 2
    assert cfg.link.max_trials == 200_000
    assert set(cfg.link.codecs) == {"svc", "cc", "polar"}


def test_fig4b_preset_runs_four_schemes():
    cfg = load_preset("fig4b")
    assert tuple(cfg.system.schemes) == (
        "baseline",
        "instant",
        "semi_static_reservation",
        "dynamic_reservation",
    )
    assert cfg.system.scheduler.reserved_symbols == 4
    assert cfg.system.scheduler.urllc_max_retx == 2
    assert cfg.system.scheduler.embb_max_retx == 4
    assert len(cfg.system.seeds) >= 20
    assert cfg.system.slots >= 10_000


def test_fig4c_preset_runs_three_policies():
    cfg = load_preset("fig4c")
    assert tuple(cfg.system.policies) == ("lte_retx", "codeblock_retx", "robustness")
    assert tuple(cfg.system.schemes) == ("instant",)


def test_config_roundtrip_through_yaml():
    for name in ("fig4a", "fig4b", "fig4c"):
        cfg = load_preset(name)
        again = parse_config(config_to_yaml(cfg))
        assert again == cfg


def test_unknown_keys_reported_with_paths():
    with pytest.raises(ConfigValidationError) as err:
        parse_config("scenario: custom\nbogus: 1\nlink: {codecs: [svc], snr_grid_db: [0, 1]}\n")
    paths = [p for p, _ in err.value.diagnostics]
    assert "<root>.bogus" in paths


def test_reserved_symbols_constraint_diagnostic():
    text = """
system:
  scheduler:
    reserved_symbols: 20
"""
    with pytest.raises(ConfigValidationError) as err:
        parse_config(text)
    assert any("reserved_symbols" in p for p, _ in err.value.diagnostics)


def test_svc_domain_error_diagnostic():
    text = """
link:
  svc:
    n: 4
    m: 8
    k: 2
"""
    with pytest.raises(ConfigValidationError) as err:
        parse_config(text)
    assert any(p == "link.svc" for p, _ in err.value.diagnostics)


def test_yaml_parse_error_has_location():
    with pytest.raises(ConfigValidationError) as err:
        parse_config("link: [unclosed\n")
    assert err.value.diagnostics


def test_validate_verb_exit_codes(tmp_path, capsys):
    good = tmp_path / "good.yaml"
    good.write_text(preset_text("fig4b"))
    assert cli.main(["validate", "--config", str(good)]) == 0
    bad = tmp_path / "bad.yaml"
    bad.write_text("system:\n  scheduler:\n    reserved_symbols: 20\n")
    assert cli.main(["validate", "--config", str(bad)]) == cli.EXIT_CONFIG
    missing = tmp_path / "missing.yaml"
    assert cli.main(["validate", "--config", str(missing)]) == cli.EXIT_CONFIG


def test_run_verb_rejects_bad_config(tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text("link:\n  codecs: [turbo]\n")
    assert cli.main(["run", "--config", str(bad)]) == cli.EXIT_CONFIG


def test_link_sim_cli_writes_csv(tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text(
        """
scenario: custom
seed: 5
link:
  codecs: [svc]
  snr_grid_db: [6.0, 10.0]
  max_trials: 2000
  target_errors: 20
  block_size: 1000
"""
    )
    out = tmp_path / "out.csv"
    assert cli.link_sim_main(["--config", str(cfg), "--out", str(out)]) == 0
    text = out.read_text()
    assert text.startswith("# schema: link-sim-v1")
    assert "svc," in text
    # same seed, byte-identical rerun
    out2 = tmp_path / "out2.csv"
    assert cli.link_sim_main(["--config", str(cfg), "--out", str(out2)]) == 0
    assert out2.read_text() == text
    # report verb consumes it
    assert cli.main(["report", str(out)]) == 0


def test_output_dir_env_default(tmp_path, monkeypatch):
    monkeypatch.setenv("URLLCSIM_OUT", str(tmp_path / "envout"))
    cfg = parse_config("scenario: custom\n")
    assert cfg.resolved_output_dir() == str(tmp_path / "envout")
    assert cfg.resolved_output_dir("explicit") == "explicit"
