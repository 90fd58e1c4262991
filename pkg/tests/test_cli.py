import json

import pytest

from grwlab.cli import run


def _read_manifest(outdir):
    with open(outdir / "manifest.json") as fh:
        return json.load(fh)


def test_rates_deuteron(capsys):
    assert run(["rates", "--n", "2", "--lambda-si", "1e-16"]) == 0
    assert capsys.readouterr().out.strip() == "2e-16"


def test_rates_table(capsys):
    assert run(["rates"]) == 0
    out = capsys.readouterr().out
    assert "1e+23" in out and "1e-07" in out


def test_unknown_subcommand_fails(capsys):
    assert run(["frobnicate"]) == 1


def test_missing_subcommand_fails():
    assert run([]) == 1


def test_evolve_trajectory_lambda_zero_identical(tmp_path):
    common = [
        "--grid-n", "256", "--grid-extent", "64", "--t-total-internal", "1",
        "--dt-internal", "0.005", "--sigma0", "2",
    ]
    assert run(["evolve", "--out", str(tmp_path / "a")] + common) == 0
    assert run(
        ["trajectory", "--out", str(tmp_path / "b"), "--lambda-si", "0"] + common
    ) == 0
    a = (tmp_path / "a" / "final_state.qsl1").read_bytes()
    b = (tmp_path / "b" / "final_state.qsl1").read_bytes()
    assert a == b


def test_manifest_lists_every_output(tmp_path):
    out = tmp_path / "run"
    assert run([
        "evolve", "--out", str(out), "--grid-n", "256", "--grid-extent", "64",
        "--t-total-internal", "0.5", "--dt-internal", "0.005",
    ]) == 0
    manifest = _read_manifest(out)
    produced = {p.name for p in out.iterdir()} - {"manifest.json"}
    assert set(manifest["outputs"]) == produced
    assert manifest["subcommand"] == "evolve"
    assert "grwlab" in manifest["versions"]
    assert "started_utc" in manifest["timing"]


def test_reproducible_modulo_timing(tmp_path):
    args = [
        "trajectory", "--lambda-internal", "2", "--rc-internal", "1",
        "--mass", "200", "--grid-n", "256", "--grid-extent", "64",
        "--t-total-internal", "1", "--dt-internal", "0.005", "--seed", "9",
    ]
    for name in ("r1", "r2"):
        assert run(args + ["--out", str(tmp_path / name)]) == 0
    for fname in ("final_state.qsl1", "samples.csv", "events.csv", "record.json"):
        a = (tmp_path / "r1" / fname).read_bytes()
        b = (tmp_path / "r2" / fname).read_bytes()
        assert a == b, fname
    m1, m2 = _read_manifest(tmp_path / "r1"), _read_manifest(tmp_path / "r2")
    m1.pop("timing"), m2.pop("timing")
    assert m1 == m2


def test_config_file_and_flag_override(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[evolve]\nt_total_internal = 0.5\ngrid_n = 256\n")
    out = tmp_path / "out"
    assert run([
        "evolve", "--config", str(cfg), "--out", str(out),
        "--grid-extent", "64", "--dt-internal", "0.005",
    ]) == 0
    manifest = _read_manifest(out)
    assert manifest["config"]["t_total_internal"] == "0.5"
    assert manifest["config"]["grid_extent"] == "64"


def test_unknown_config_key_rejected(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[evolve]\nwarp_factor = 9\n")
    assert run(["evolve", "--config", str(cfg), "--out", str(tmp_path / "x")]) == 1


def test_mixed_units_rejected(tmp_path):
    code = run([
        "trajectory", "--out", str(tmp_path / "x"),
        "--lambda-si", "1e-16", "--lambda-internal", "1",
    ])
    assert code == 1


def test_bad_physics_config_is_exit_two(tmp_path):
    # grid too fine for this dt: the spectral step guard trips at runtime
    code = run([
        "evolve", "--out", str(tmp_path / "x"), "--grid-n", "2048",
        "--grid-extent", "16", "--dt-internal", "0.05",
    ])
    assert code == 2


def test_exclusion_summary_span(tmp_path):
    out = tmp_path / "excl"
    assert run(["exclusion", "--out", str(out)]) == 0
    with open(out / "summary.json") as fh:
        summary = json.load(fh)
    assert summary["closed"] is True
    assert summary["span_lambda_decades"] == pytest.approx(8.0, abs=0.2)
    names = {c["name"] for c in summary["curves"]}
    assert {"theory_lower", "current_upper", "interference_upper"} <= names
    header = (out / "raster.csv").read_text().splitlines()[0]
    assert header == "log10_rc,log10_lambda,allowed"


def test_snapshot_inspect_and_csv(tmp_path, capsys):
    src = tmp_path / "src"
    assert run([
        "evolve", "--out", str(src), "--grid-n", "256", "--grid-extent", "64",
        "--t-total-internal", "0.5", "--dt-internal", "0.005",
    ]) == 0
    out = tmp_path / "dump"
    code = run([
        "snapshot", str(src / "final_state.qsl1"), "--out", str(out),
        "--csv", "state.csv",
    ])
    assert code == 0
    info = json.loads(capsys.readouterr().out)
    assert info["n_points"] == 256
    lines = (out / "state.csv").read_text().splitlines()
    assert lines[0] == "x,re,im"
    assert len(lines) == 257


def test_csv_floats_have_17_significant_digits(tmp_path):
    out = tmp_path / "run"
    assert run([
        "evolve", "--out", str(out), "--grid-n", "256", "--grid-extent", "64",
        "--t-total-internal", "0.5", "--dt-internal", "0.005",
    ]) == 0
    raw = (out / "samples.csv").read_bytes()
    assert b"\r" not in raw  # LF endings only
    a_var = raw.decode().splitlines()[1].split(",")[3]
    assert len(a_var.replace(".", "").replace("-", "").lstrip("0")) >= 16


def test_threads_env_default(tmp_path, monkeypatch):
    monkeypatch.setenv("GRWLAB_THREADS", "3")
    out = tmp_path / "run"
    assert run([
        "evolve", "--out", str(out), "--grid-n", "256", "--grid-extent", "64",
        "--t-total-internal", "0.5", "--dt-internal", "0.005",
    ]) == 0
    assert _read_manifest(out)["threads"] == 3
