import numpy as np
import pytest

from pcwqed.cli import main
from pcwqed.config import load_config
from pcwqed.errors import ConfigError
from pcwqed.output import csv_body, read_csv

CONFIGS = "configs"


def write(tmp_path, text, name="exp.ini"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


MINIMAL_PUMP = """
[pump]
ncells = 4
cycles = 1
dt_over_period = 1e-3

[output]
csv = out.csv
"""


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "nope.ini")


def test_empty_config_names_missing_section(tmp_path, capsys):
    path = write(tmp_path, "")
    rc = main(["pump", "--config", path, "--out", str(tmp_path)])
    assert rc == 1
    assert "missing required section [pump]" in capsys.readouterr().err


def test_unknown_section_rejected(tmp_path):
    path = write(tmp_path, "[pumps]\nncells = 4\n")
    with pytest.raises(ConfigError, match="unknown section"):
        load_config(path)


def test_unknown_key_rejected(tmp_path):
    path = write(tmp_path, "[pump]\nncell = 4\n")
    with pytest.raises(ConfigError, match="unknown key"):
        load_config(path)


def test_bad_value_rejected(tmp_path):
    path = write(tmp_path, "[pump]\nncells = four\n")
    with pytest.raises(ConfigError, match="not a valid int"):
        load_config(path)


def test_defaults_applied_and_echoed(tmp_path):
    cfg = load_config(write(tmp_path, MINIMAL_PUMP))
    assert cfg.get("pump", "pump_delta") == 0.9
    lines = cfg.echo_lines()
    assert any(line == "pump.ncells = 4" for line in lines)
    assert any(line.startswith("numerics.dk_over_km") for line in lines)


def test_pump_command_runs(tmp_path, capsys):
    path = write(tmp_path, MINIMAL_PUMP)
    rc = main(["pump", "--config", path, "--out", str(tmp_path)])
    assert rc == 0
    meta, names, data = read_csv(tmp_path / "out.csv")
    assert names[0] == "time"
    assert data.shape[1] == 1 + 8
    # norm conservation row-wise in the emitted data
    assert np.max(np.abs(data[:, 1:].sum(axis=1) - 1)) < 1e-8


def test_determinism_excluding_timestamp(tmp_path):
    path = write(tmp_path, MINIMAL_PUMP)
    assert main(["pump", "--config", path, "--out", str(tmp_path / "a")]) == 0
    assert main(["pump", "--config", path, "--out", str(tmp_path / "b")]) == 0
    assert csv_body(tmp_path / "a" / "out.csv") == csv_body(tmp_path / "b" / "out.csv")


def test_csv_roundtrip_full_precision(tmp_path):
    path = write(tmp_path, MINIMAL_PUMP)
    main(["pump", "--config", path, "--out", str(tmp_path)])
    _, _, first = read_csv(tmp_path / "out.csv")
    from pcwqed.output import write_csv

    write_csv(
        tmp_path / "rt.csv",
        "pump",
        {f"c{i}": first[:, i] for i in range(first.shape[1])},
        "digest",
        [],
    )
    _, _, second = read_csv(tmp_path / "rt.csv")
    assert np.array_equal(first, second)


def test_bands_command_fast(tmp_path, capsys):
    text = """
[circuit]
preset = calibrated

[numerics]
dk_over_km = 2e-3
harmonics = 8

[output]
csv = bands.csv
"""
    path = write(tmp_path, text)
    rc = main(["bands", "--config", path, "--out", str(tmp_path)])
    assert rc == 0
    meta, names, data = read_csv(tmp_path / "bands.csv")
    assert names == ["k_over_km", "omega1_ghz", "omega2_ghz"]
    assert data.shape == (500, 3)
    gap_line = [m for m in meta if "gap (GHz)" in m][0]
    assert float(gap_line.split(":")[1]) == pytest.approx(0.801, abs=0.003)


def test_dk_override_changes_grid(tmp_path):
    text = "[circuit]\npreset = calibrated\n\n[output]\ncsv = b.csv\n"
    path = write(tmp_path, text)
    main(["bands", "--config", path, "--out", str(tmp_path), "--dk", "5e-3"])
    _, _, data = read_csv(tmp_path / "b.csv")
    assert data.shape[0] == 200


def test_config_hash_reflects_overrides(tmp_path):
    text = "[circuit]\npreset = calibrated\n"
    path = write(tmp_path, text)
    base = load_config(path)
    over = load_config(path, {("numerics", "dk_over_km"): 5e-3})
    assert base.digest() != over.digest()


def test_plot_flag_writes_svg(tmp_path):
    pytest.importorskip("matplotlib")
    path = write(tmp_path, MINIMAL_PUMP)
    rc = main(["pump", "--config", path, "--out", str(tmp_path), "--plot"])
    assert rc == 0
    assert (tmp_path / "out.svg").exists()


def test_gk_command_small(tmp_path):
    text = """
[circuit]
preset = calibrated

[numerics]
dk_over_km = 1e-3

[atom]
x_minus_over_lambda = 0.0
g_minus_mhz = 0.04
x_plus_over_lambda = 0.5
g_plus_mhz = 0.136

[gk]
window_over_km = 0.05

[output]
csv = gk.csv
"""
    path = write(tmp_path, text)
    assert main(["gk", "--config", path, "--out", str(tmp_path)]) == 0
    _, names, data = read_csv(tmp_path / "gk.csv")
    assert names == ["dk_over_km", "re_g_mhz", "im_g_mhz"]
    # real part roughly flat, imaginary part crosses zero near the edge
    mid = np.argmin(np.abs(data[:, 0]))
    assert abs(data[mid, 2]) < 0.2 * abs(data[mid, 1])


def test_threads_env_default(monkeypatch):
    from pcwqed.cli import _threads

    class Args:
        threads = None

    monkeypatch.setenv("PCWQED_THREADS", "7")
    assert _threads(Args()) == 7
    monkeypatch.delenv("PCWQED_THREADS")
    assert _threads(Args()) == 1
    Args.threads = 3
    assert _threads(Args()) == 3


def test_atom_partial_plus_leg_rejected(tmp_path):
    text = """
[circuit]
preset = calibrated

[numerics]
dk_over_km = 5e-3

[atom]
x_plus_over_lambda = 0.5

[output]
csv = x.csv
"""
    path = write(tmp_path, text)
    rc = main(["boundstate", "--config", path, "--out", str(tmp_path)])
    assert rc == 1
