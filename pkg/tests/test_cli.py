import math
import subprocess
import sys

import numpy as np
import pytest

from uskd import output
from uskd.cli import main


def read_trace(path):
    header, rows = output.read_csv(path)
    return header, np.array(rows, dtype=float)


def files_bytes(d):
    return {p.name: p.read_bytes() for p in sorted(d.glob("*.csv"))}


def test_fig2_noise_free_column(tmp_path):
    assert main(["fig2", "--panel", "avg-coupler", "--ranges", "0", "--seed", "1", "--n", "50", "--grid", "20", "--out", str(tmp_path)]) == 0
    (csv,) = tmp_path.glob("fig2_*.csv")
    header, data = read_trace(csv)
    assert header == list(output.TRACE_HEADER)
    assert np.all(data[:, 1] == 1.0)
    manifest = output.read_keyvalue(tmp_path / "manifest.txt")
    assert manifest["seed"] == "1" and manifest["output_files"] == csv.name
    assert len(manifest["spec_digest"]) == 64


def test_fig2_half_turn(tmp_path):
    assert main(["fig2", "--panel", "avg-coupler", "--ranges", "3.14159", "--n", "2000", "--grid", "100", "--out", str(tmp_path)]) == 0
    (csv,) = tmp_path.glob("fig2_*.csv")
    _, data = read_trace(csv)
    assert data[:, 1].mean() == pytest.approx(0.75, abs=0.02)


@pytest.mark.parametrize("panel", ["top", "avg-coupler", "repeats", "avg-channel"])
def test_fig2_byte_identical(tmp_path, panel):
    args = ["fig2", "--panel", panel, "--n", "30", "--grid", "12", "--repeats", "3", "--seed", "7"]
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b), "--workers", "3"]) == 0
    fa = files_bytes(a)
    assert fa and fa == files_bytes(b)


def test_csv_format(tmp_path):
    main(["fig2", "--panel", "top", "--n", "5", "--out", str(tmp_path)])
    text = (tmp_path / "fig2_individual.csv").read_text()
    assert text.endswith("\n") and "\r" not in text
    lines = text.splitlines()
    assert all(line.count(",") == 4 for line in lines)
    for field in lines[1].split(","):
        digits = field.lstrip("-").split("e")[0].replace(".", "").lstrip("0")
        assert len(digits) <= 12


def test_fig3b_outputs(tmp_path):
    args = ["fig3b", "--grid", "11", "--repeats", "80", "--seed", "3", "--out", str(tmp_path)]
    assert main(args) == 0
    names = sorted(p.name for p in tmp_path.glob("*.csv"))
    assert names == ["fig3b_fluctuation.csv", "fig3b_n20.csv", "fig3b_n2000.csv"]
    header, fl = read_trace(tmp_path / "fig3b_fluctuation.csv")
    assert header[1] == "std_IA_n20"
    assert fl[0, 1] < 1e-3 and fl[-1, 1] < 1e-3
    assert fl[5, 0] == pytest.approx(math.pi)
    assert fl[5, 1] == pytest.approx(math.sqrt(1 / 8) / math.sqrt(20), rel=0.3)


def test_fig3b_missing_out(capsys):
    assert main(["fig3b", "--grid", "5"]) == 2
    assert "--out" in capsys.readouterr().err


def test_keygen_noise_immune(tmp_path):
    assert main(["keygen", "--rounds", "3000", "--coupler-range", "0", "--chan-range", "6.2832", "--seed", "5", "--out", str(tmp_path)]) == 0
    stats = output.read_keyvalue(tmp_path / "stats.txt")
    assert float(stats["error_rate"]) == 0.0 and float(stats["key_rate"]) == 1.0
    header, rows = output.read_csv(tmp_path / "rounds.csv")
    assert len(rows) == 3000 and header[0] == "round"


def test_keygen_eve_tap(tmp_path):
    assert main(["keygen", "--rounds", "4000", "--eve", "tap", "--seed", "5", "--out", str(tmp_path)]) == 0
    stats = output.read_keyvalue(tmp_path / "stats.txt")
    assert float(stats["eve_guess_rate"]) == pytest.approx(0.5, abs=0.03)


def test_keygen_exit_codes(tmp_path):
    assert main(["keygen", "--rounds", "0", "--out", str(tmp_path)]) == 2
    assert main(["keygen", "--rounds", "500", "--coupler-range", "6.28", "--max-error", "0.01", "--out", str(tmp_path)]) == 4
    assert main(["keygen", "--rounds", "200", "--max-error", "0.0", "--out", str(tmp_path)]) == 0


def test_keygen_walk_noise(tmp_path):
    assert main(["keygen", "--rounds", "300", "--walk-step", "0.01", "--out", str(tmp_path)]) == 0


def test_usage_errors(capsys):
    assert main(["fig2", "--bogus"]) == 2
    assert main(["fig2", "--panel", "sideways", "--out", "x"]) == 2
    assert main(["fig2", "--out", "x"]) == 2
    assert main([]) == 2
    assert "usage" in capsys.readouterr().err


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["fig2", "--panel", "top", "--n", "5", "--out", str(blocker / "sub")]) == 3


def test_verify(capsys):
    assert main(["verify", "--quick"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 5 and "FAIL" not in out


def test_verify_negative_control(capsys):
    assert main(["verify", "--quick", "--self-test-negative"]) == 1
    lines = capsys.readouterr().out.splitlines()
    failed = [line for line in lines if line.startswith("FAIL")]
    assert len(failed) == 1 and "one-way closed form" in failed[0]


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sweep\npanel = avg-coupler\nranges = 0\nn = 20\ngrid = 10\nseed = 11\n")
    out1 = tmp_path / "o1"
    assert main(["fig2", "--config", str(cfg), "--out", str(out1)]) == 0
    assert output.read_keyvalue(out1 / "manifest.txt")["seed"] == "11"
    out2 = tmp_path / "o2"
    assert main(["fig2", "--config", str(cfg), "--seed", "12", "--grid", "6", "--out", str(out2)]) == 0
    assert output.read_keyvalue(out2 / "manifest.txt")["seed"] == "12"
    _, data = read_trace(next(out2.glob("fig2_*.csv")))
    assert data.shape[0] == 6


def test_config_unknown_key(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    assert main(["verify", "--config", str(cfg)]) == 2


def test_seed_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("USKD_SEED", "31")
    assert main(["fig2", "--panel", "top", "--n", "5", "--out", str(tmp_path / "env")]) == 0
    assert output.read_keyvalue(tmp_path / "env" / "manifest.txt")["seed"] == "31"
    assert main(["fig2", "--panel", "top", "--n", "5", "--seed", "2", "--out", str(tmp_path / "flag")]) == 0
    assert output.read_keyvalue(tmp_path / "flag" / "manifest.txt")["seed"] == "2"


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "uskd", "verify", "--quick"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "PASS unitarity" in proc.stdout


def test_range_snaps_to_full_turn(tmp_path):
    assert main(["fig2", "--panel", "avg-coupler", "--ranges", "6.2832", "--n", "10", "--grid", "4", "--out", str(tmp_path / "a")]) == 0
    assert main(["fig2", "--panel", "avg-coupler", "--ranges", "6.3", "--n", "10", "--grid", "4", "--out", str(tmp_path / "b")]) == 2
