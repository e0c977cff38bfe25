import json
import os
from pathlib import Path

import numpy as np
import pytest

from chaoscope.cli import main
from chaoscope.pipeline import (
    ConfigError,
    cache_load,
    cache_store,
    execute,
    load_config,
    report,
    resolved_g,
)


def write_config(path: Path, out_dir: Path, **overrides) -> Path:
    base = {
        "model": {"kind": "dicke", "sector": "even", "j": "2.0",
                  "cutoffs": "30 40", "g": "0.5", "gamma": "0"},
        "indicators": {"indicators": "nnsd eta rk", "k": "1", "bins": "10"},
        "unfolding": {"degree": "2"},
        "run": {"output_dir": str(out_dir), "workers": "1"},
    }
    for sect, kv in overrides.items():
        base.setdefault(sect, {}).update(kv)
    lines = []
    for sect, kv in base.items():
        lines.append(f"[{sect}]")
        lines.extend(f"{k} = {v}" for k, v in kv.items())
    path.write_text("\n".join(lines) + "\n")
    return path


def test_load_config_defaults_and_scaling(tmp_path):
    cfg_path = write_config(tmp_path / "run.ini", tmp_path / "out",
                            model={"g": "0.8 1.2", "g_scale": "gc"})
    cfg = load_config(cfg_path)
    assert cfg.g_values == [0.8, 1.2]
    assert cfg.bins == 10
    # omega = omega0 = 1: g_c = 1/sqrt(2)
    assert resolved_g(cfg, 1.0, 0.0) == pytest.approx(1 / np.sqrt(2))


def test_load_config_errors(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_config(tmp_path / "missing.ini")
    bad = write_config(tmp_path / "bad.ini", tmp_path / "out",
                       indicators={"indicators": "nnsd bogus"})
    with pytest.raises(ConfigError, match="bogus"):
        load_config(bad)
    desc = write_config(tmp_path / "desc.ini", tmp_path / "out",
                        model={"cutoffs": "10 8"})
    with pytest.raises(ConfigError, match="ascending"):
        load_config(desc)


def test_worker_env_cap(tmp_path, monkeypatch):
    monkeypatch.setenv("CHAOSCOPE_MAX_WORKERS", "2")
    cfg = load_config(write_config(tmp_path / "run.ini", tmp_path / "out",
                                   run={"workers": "8"}))
    assert cfg.workers == 2


def test_cache_round_trip_real_and_complex(tmp_path):
    rng = np.random.default_rng(0)
    for arr in (rng.standard_normal(64),
                rng.standard_normal(33) + 1j * rng.standard_normal(33)):
        p = tmp_path / "x.spec"
        cache_store(p, arr, {"tag": "t"})
        back, head = cache_load(p)
        assert np.array_equal(back, arr)
        assert head["tag"] == "t"
        assert head["count"] == arr.size


def test_run_produces_manifest_and_csvs(tmp_path):
    out = tmp_path / "out"
    cfg = load_config(write_config(tmp_path / "run.ini", out))
    manifest = execute(cfg)
    assert manifest["eigensolves"]["total"] == 2
    assert manifest["eigensolves"]["cache_hits"] == 0
    point = out / "gamma_0" / "g_0.5"
    for name in ("nnsd.csv", "eta.csv", "ratios.csv"):
        assert (point / name).exists()
    with open(out / "manifest.json") as f:
        on_disk = json.load(f)
    assert on_disk["points"][0]["eta"] == manifest["points"][0]["eta"]
    for rel, digest in manifest["hashes"].items():
        assert len(digest) == 64
        assert (out / rel).exists()


def test_rerun_hits_cache_and_reproduces_bytes(tmp_path):
    out = tmp_path / "out"
    cfg_path = write_config(tmp_path / "run.ini", out)
    first = execute(load_config(cfg_path))
    nnsd_bytes = (out / "gamma_0" / "g_0.5" / "nnsd.csv").read_bytes()
    second = execute(load_config(cfg_path))
    assert second["eigensolves"]["cache_hits"] == second["eigensolves"]["total"]
    assert (out / "gamma_0" / "g_0.5" / "nnsd.csv").read_bytes() == nnsd_bytes
    assert first["hashes"] == second["hashes"]


def test_sweep_outputs_worker_count_invariant(tmp_path):
    outs = {}
    for workers, tag in ((1, "a"), (4, "b")):
        out = tmp_path / tag
        cfg = load_config(write_config(
            tmp_path / f"run_{tag}.ini", out,
            model={"g": "0.2 0.5 0.8 1.1 1.4"},
            run={"output_dir": str(out), "workers": str(workers)}))
        manifest = execute(cfg, aggregate=True)
        outs[tag] = (out, manifest)
    a_dir, a_man = outs["a"]
    b_dir, b_man = outs["b"]
    assert a_man["hashes"] == b_man["hashes"]
    assert (a_dir / "eta_scan.csv").read_bytes() == \
        (b_dir / "eta_scan.csv").read_bytes()
    assert (a_dir / "rk_scan.csv").exists()


def test_open_system_run_csr(tmp_path):
    out = tmp_path / "out"
    cfg = load_config(write_config(
        tmp_path / "run.ini", out,
        model={"kind": "dicke", "sector": "full", "j": "0.5", "cutoffs": "6",
               "g": "0.9", "gamma": "1.1", "open": "true"},
        indicators={"indicators": "csr", "bins": "10"},
        spectra={"alpha": "2.0"}))
    manifest = execute(cfg)
    assert not manifest["failures"]
    rec = manifest["points"][0]
    assert 0 <= rec["csr"]["r_mean"] <= 1
    assert "g_over_gcgamma" in rec
    assert (out / "gamma_1.1" / "g_0.9" / "csr.csv").exists()


def test_open_system_run_weak_parity_sector(tmp_path):
    """sector=even on an open run diagonalizes one weak-parity block."""
    counts = {}
    for sector in ("full", "even"):
        out = tmp_path / f"out_{sector}"
        cfg = load_config(write_config(
            tmp_path / f"run_{sector}.ini", out,
            model={"kind": "dicke", "sector": sector, "j": "0.5",
                   "cutoffs": "6", "g": "0.9", "gamma": "1.1",
                   "open": "true"},
            indicators={"indicators": "csr", "bins": "10"},
            spectra={"alpha": "2.0", "exclude_zero_mode": "false"}))
        manifest = execute(cfg)
        assert not manifest["failures"]
        counts[sector] = manifest["points"][0]["kept"]
    # the two blocks halve the superoperator dimension
    assert counts["even"] < counts["full"]


def test_tc_closed_run_uses_sector_assembly(tmp_path):
    out = tmp_path / "out"
    cfg = load_config(write_config(
        tmp_path / "run.ini", out,
        model={"kind": "tavis_cummings", "sector": "full", "j": "2.0",
               "cutoffs": "10 12", "g": "0.7", "q_max": "12"},
        indicators={"indicators": "rk", "k": "1 2"}))
    manifest = execute(cfg)
    # one solve only: sector assembly ignores extra cutoffs
    assert manifest["eigensolves"]["total"] == 1
    assert set(manifest["points"][0]["rk"]) == {1, 2}


def test_report_summarizes_manifest(tmp_path):
    out = tmp_path / "out"
    execute(load_config(write_config(tmp_path / "run.ini", out)))
    summary = report(out)
    assert summary["n_points"] == 1
    assert summary["n_failures"] == 0
    assert "eta" in summary["points"][0]
    with pytest.raises(FileNotFoundError):
        report(tmp_path / "nowhere")


def test_cli_run_and_exit_codes(tmp_path, capsys):
    out = tmp_path / "out"
    cfg_path = write_config(tmp_path / "run.ini", out)
    assert main(["run", str(cfg_path)]) == 0
    assert "1 points done" in capsys.readouterr().out
    assert main(["report", str(out)]) == 0
    capsys.readouterr()
    bad = write_config(tmp_path / "bad.ini", out,
                       indicators={"indicators": "bogus"})
    assert main(["run", str(bad)]) == 2
    assert main(["report", str(tmp_path / "empty")]) == 2


def test_cli_baseline_writes_csv(tmp_path, capsys):
    rc = main(["baseline", "--kind", "poisson1d", "--n", "500",
               "--realizations", "2", "--seed", "3",
               "--out", str(tmp_path)])
    assert rc == 0
    path = tmp_path / "nnsd_poisson1d.csv"
    assert path.exists()
    assert path.read_text().splitlines()[0] == "bin_center,pdf"


def test_cli_baseline_write_table_header(tmp_path, capsys):
    rc = main(["baseline", "--kind", "poisson2d", "--n", "400",
               "--realizations", "1", "--seed", "4",
               "--out", str(tmp_path), "--write-table"])
    assert rc == 0
    lines = (tmp_path / "ref_nnsd_poisson2d.csv").read_text().splitlines()
    head = json.loads(lines[0].lstrip("# "))
    assert head["kind"] == "poisson2d"
    assert head["version"] >= 1
    assert lines[1] == "s,pdf"
