import csv
import io
import json
import os
import subprocess
from pathlib import Path

import pytest

BIN = os.environ.get("FIBRE_EMIT_BIN", "fibre-emit")
ROOT = Path(__file__).resolve().parents[2]


def run(*args, check=None):
    proc = subprocess.run([BIN, *args], capture_output=True, text=True)
    if check is not None:
        assert proc.returncode == check, proc.stderr
    return proc


def table(text):
    body = "\n".join(l for l in text.splitlines() if l and not l.startswith("#"))
    return list(csv.DictReader(io.StringIO(body)))


def header(text):
    return [l for l in text.splitlines() if l.startswith("#")]


def test_version_and_help():
    assert run("--version", check=0).stdout.strip() == "0.1.0"
    assert "validate" in run("--help", check=0).stdout


def test_first_row_reproduces_surface_ratios():
    out = run("run", "-s", "10s1/2:+1/2", "--sweep", "r:1:4:4", check=0).stdout
    rows = table(out)
    assert [float(r["sweep_value"]) for r in rows] == [1, 2, 3, 4]
    assert float(rows[0]["Gamma_g_over_Gamma0"]) == pytest.approx(0.18, rel=0.1)
    assert float(rows[0]["Gamma_r_over_Gamma0"]) == pytest.approx(1.24, rel=0.03)


def test_header_is_self_describing():
    hdr = "\n".join(header(run("run", "-s", "10s1/2", "--sweep", "r:1:1:1", check=0).stdout))
    for key in ("fibre-emit 0.1.0", "config_hash fnv1a64:", "dispersion", "tolerances", "achieved_rel"):
        assert key in hdr


def test_degenerate_sweep_single_row():
    rows = table(run("run", "-c", str(ROOT / "configs/surface_point.cfg"), check=0).stdout)
    assert len(rows) == 1


def test_output_is_deterministic_across_jobs(tmp_path):
    args = ["run", "-s", "10s1/2:+1/2", "-s", "10p1/2:+1/2", "--sweep", "r:1:2:4", "--detail", "-q"]
    one = tmp_path / "one.csv"
    three = tmp_path / "three.csv"
    run(*args, "-j", "1", "-o", str(one), check=0)
    run(*args, "-j", "3", "-o", str(three), check=0)
    assert one.read_bytes() == three.read_bytes()
    assert run(*args, "-j", "2", check=0).stdout.encode() == one.read_bytes()
    assert (tmp_path / "one.csv.cutoffs.csv").exists()


def test_json_format():
    out = run("run", "-s", "10s1/2", "--sweep", "r:1:2:2", "--format", "json", check=0).stdout
    doc = json.loads(out)
    assert set(doc) == {"meta", "rows"}
    assert doc["meta"]["version"] == "0.1.0"
    assert len(doc["rows"]) == 2


def test_flags_override_config():
    out = run("run", "-c", str(ROOT / "configs/surface_point.cfg"), "--set", "a_nm=200", check=0).stdout
    assert any("a_nm=200" in l for l in header(out))


def test_detail_shows_higher_order_onset(tmp_path):
    out = tmp_path / "a.csv"
    run("run", "-s", "10s1/2:+1/2", "--sweep", "a:150:260:12", "--detail", "-q", "-o", str(out), check=0)
    rows = table(out.read_text())
    col = "g:10s1/2->3p3/2:TE01"
    assert col in rows[0]
    # Empty cell: branch not guided at that radius.
    te = [r[col] for r in rows]
    assert te[0] == "" and float(te[-1]) > 0
    cut = table((tmp_path / "a.csv.cutoffs.csv").read_text())
    assert any(c["branch"] == "TE01" and c["channel"] == "10s1/2->3p3/2" for c in cut)


def test_guided_sweep_is_smooth_away_from_cutoffs():
    rows = table(run("run", "-s", "10s1/2:+1/2", "--sweep", "r:1:1.5:60", "-q", check=0).stdout)
    g = [float(r["Gamma_g_over_Gamma0"]) for r in rows]
    assert all(abs(b - a) < 0.05 * a for a, b in zip(g, g[1:]))


def test_validate_ok_and_fallback_warning():
    p = run("validate", "-s", "10p3/2:+1/2", check=0)
    assert "default n1 = 1.45" in p.stderr
    assert "is valid" in p.stderr


def test_validate_f_state():
    p = run("validate", "-s", "10f7/2:+1/2", check=2)
    assert "no reduced elements for l=3" in p.stderr


def test_validate_inside_fibre():
    p = run("validate", "-s", "10s1/2", "--sweep", "r:0.5:2:4", check=2)
    assert "error" in p.stderr


def test_config_errors_exit_2(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("state = 10s1/2\nwhat = 3\n")
    p = run("run", "-c", str(bad), check=2)
    assert "bad.cfg:2" in p.stderr
    run("run", check=2)
    run("run", "-s", "10s1/2", "--sweep", "r:1:2", check=2)
    run("run", "-c", str(tmp_path / "missing.cfg"), check=2)
    run("bogus", check=2)


def test_physics_error_exit_3_names_point():
    p = run("run", "-s", "10s1/2", "--sweep", "r:1:1:1", "--set", "m_limit=1", check=3)
    assert "sweep point" in p.stderr


def test_config_files_validate():
    for cfg in sorted((ROOT / "configs").glob("*.cfg")):
        run("validate", "-c", str(cfg), check=0)
