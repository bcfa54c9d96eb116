import csv
import json

import pytest

from diffzoom.cli import (
    CliError,
    build_experiment_config,
    main,
    make_parser,
    parse_config_file,
)


def write_cfg(tmp_path, text, name="run.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_parse_config_file(tmp_path):
    cfg = write_cfg(tmp_path, """
        # comment line
        model = bm
        sigma0 = 2.0
        delta = 1e-3
        eps = 0.1, 0.2
        n_paths = 500
        seed = 0xD1FF
    """)
    d = parse_config_file(cfg)
    assert d["model"] == "bm"
    assert d["sigma0"] == 2.0
    assert d["eps"] == (0.1, 0.2)
    assert d["seed"] == 0xD1FF


def test_parse_config_unknown_key(tmp_path):
    cfg = write_cfg(tmp_path, "wibble = 3\n")
    with pytest.raises(CliError) as exc:
        parse_config_file(cfg)
    assert exc.value.code == "UNKNOWN_KEY"


def test_parse_config_bad_syntax(tmp_path):
    cfg = write_cfg(tmp_path, "model bm\n")
    with pytest.raises(CliError) as exc:
        parse_config_file(cfg)
    assert exc.value.code == "CONFIG_INVALID"


def test_parse_config_missing_file():
    with pytest.raises(CliError) as exc:
        parse_config_file("/no/such/file.cfg")
    assert exc.value.code == "CONFIG_NOT_FOUND"


def test_seed_precedence(tmp_path, monkeypatch):
    cfg = write_cfg(tmp_path, "seed = 1\n")
    parser = make_parser()

    args = parser.parse_args(["zoom-fixed", "--config", cfg])
    assert build_experiment_config(args).master_seed == 1

    monkeypatch.setenv("DIFFZOOM_SEED", "2")
    assert build_experiment_config(args).master_seed == 2

    args = parser.parse_args(["zoom-fixed", "--config", cfg,
                              "--override", "seed=3"])
    assert build_experiment_config(args).master_seed == 3

    args = parser.parse_args(["zoom-fixed", "--config", cfg,
                              "--override", "seed=3", "--seed", "4"])
    assert build_experiment_config(args).master_seed == 4


def test_override_model_params(tmp_path):
    parser = make_parser()
    args = parser.parse_args(["zoom-sup", "--override", "model=ou",
                              "--override", "theta=2.0",
                              "--override", "sigma0=1.0"])
    cfg = build_experiment_config(args)
    assert cfg.model == "ou"
    assert cfg.params == {"theta": 2.0, "sigma0": 1.0}


def test_main_config_errors_exit_2(tmp_path, capsys):
    assert main(["zoom-fixed", "--config", "/no/such.cfg"]) == 2
    assert "CONFIG_NOT_FOUND" in capsys.readouterr().err
    bad = write_cfg(tmp_path, "wibble = 3\n")
    assert main(["zoom-fixed", "--config", bad]) == 2
    assert "UNKNOWN_KEY" in capsys.readouterr().err
    # delta that does not divide epsilon is caught downstream
    ugly = write_cfg(tmp_path, "delta = 3e-4\n")
    assert main(["zoom-fixed", "--config", ugly]) == 2
    assert "CONFIG_INVALID" in capsys.readouterr().err


def test_main_zoom_fixed_end_to_end(tmp_path):
    cfg = write_cfg(tmp_path, """
        model = bm
        sigma0 = 1.0
        delta = 1e-3
        eps = 0.1
        n_paths = 2000
        seed = 7
    """)
    out = tmp_path / "out"
    code = main(["zoom-fixed", "--config", cfg, "--out", str(out)])
    assert code == 0
    report = json.loads((out / "zoom_fixed.json").read_text())
    assert report["experiment"] == "zoom_at_fixed_time"
    assert report["passed"] is True
    assert all("id" in c for c in report["checks"])
    with open(out / "zoom_fixed_samples.csv") as fh:
        header = next(csv.reader(fh))
    assert header[0] == "schema_v1"


def test_main_reference_csv(tmp_path):
    out = tmp_path / "ref"
    code = main(["reference", "--law", "bessel3", "--t", "1.0",
                 "--xmax", "4.0", "--points", "11", "--out", str(out)])
    assert code == 0
    with open(out / "reference_bessel3.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["schema_v1", "x", "cdf"]
    assert len(rows) == 12
    assert float(rows[-1][2]) > 0.99


def test_main_simulate_paths(tmp_path):
    out = tmp_path / "paths"
    code = main(["simulate", "--override", "n_paths=3",
                 "--override", "delta=1e-2", "--out", str(out)])
    assert code == 0
    files = sorted(out.glob("path_*.csv"))
    assert len(files) == 3
    with open(files[0]) as fh:
        rows = list(csv.reader(fh))
    assert len(rows) == 102  # header + 101 grid points
    assert float(rows[1][2]) == 0.0  # starts at x0


def test_cli_reference_law_choices():
    parser = make_parser()
    with pytest.raises(SystemExit):
        parser.parse_args(["reference", "--law", "gamma"])
