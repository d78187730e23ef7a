import subprocess
import sys

import numpy as np
import pytest

from openbaker import io
from openbaker.cli import EXIT_CONFIG, EXIT_OK, EXIT_RESOURCE, main

SMALL = {
    "classical-repeller": ["classical.K=9", "classical.n_ic=10", "classical.t=4"],
    "exact-spectrum": ["N=27", "spectral.save_vectors=true"],
    "dloc": ["N=27", "spectral.nu_step=0.1", "spectral.dloc_R=0.01"],
    "scar-basis": ["N=27", "scar.l_max=3", "scar.n_outside=2", "classical.K=9", "classical.n_ic=10"],
    "semiclassical": ["N=27", "scar.l_max=3", "profile.R=0.1", "spectral.nu_c=0.6", "semiclassical.R_grid=0.1", "semiclassical.husimi_K=9"],
    "husimi": ["N=27", "profile.R=0.1", "semiclassical.husimi_K=9"],
    "performance-scan": ["N=27", "scar.l_max=3", "spectral.nu_c=0.6", "semiclassical.R_grid=0 0.1"],
}


def run(command, out, extra=()):
    args = [command, "-o", str(out)]
    for item in list(SMALL[command]) + list(extra):
        args += ["--set", item]
    return main(args)


def snapshot(directory):
    return {p.name: p.read_bytes() for p in sorted(directory.iterdir())}


@pytest.mark.parametrize("command", sorted(SMALL))
def test_command_runs_and_is_deterministic(command, tmp_path):
    out = tmp_path / "out"
    assert run(command, out) == EXIT_OK
    first = snapshot(out)
    assert "config.resolved.ini" in first
    assert run(command, out) == EXIT_OK
    assert snapshot(out) == first


@pytest.mark.parametrize("command", sorted(SMALL))
def test_every_json_carries_the_config_hash(command, tmp_path):
    run(command, tmp_path)
    digest = (tmp_path / "config.resolved.ini").read_text().rsplit("config_hash = ", 1)[1].strip()
    metas = []
    for p in tmp_path.glob("*.json"):
        obj = io.read_json(p)
        metas.append(obj.get("metadata", obj))
    assert metas and io.check_same_config(metas) == digest


def test_exact_spectrum_outputs(tmp_path):
    run("exact-spectrum", tmp_path, ["profile.R=1", "profile.shape=constant"])
    z, meta = io.read_spectrum(tmp_path / "spectrum_exact.json")
    assert len(z) == 27 and np.allclose(np.abs(z), 1)
    R, header = io.read_operator(tmp_path / "eigvecs_right")
    assert R.shape == (27, 27) and header["label"] == "right-eigenvectors"


def test_classical_repeller_outputs(tmp_path):
    run("classical-repeller", tmp_path)
    for name in ("forward", "backward", "intersection"):
        v, meta = io.read_grid(tmp_path / f"measure_{name}")
        assert v.shape == (9, 9) and meta["direction"] == name
        assert v.sum() == pytest.approx(1)


def test_dloc_table(tmp_path):
    run("dloc", tmp_path)
    rows = io.read_table(tmp_path / "dloc.csv")
    assert {r["profile"] for r in rows} == {"step", "complete"}
    assert len(rows) == 2 * 11


def test_semiclassical_outputs(tmp_path):
    run("semiclassical", tmp_path)
    names = set(p.name for p in tmp_path.iterdir())
    for expected in ("spectrum_semiclassical.json", "performance.json", "Q_exact.csv", "Q_semiclassical.csv", "overlap.json", "nsf_scan.csv"):
        assert expected in names
    rows = io.read_table(tmp_path / "nsf_scan.csv")
    assert rows[0]["reached_flag"] in ("true", "false")


def test_config_error_exit_code(tmp_path, capsys):
    assert main(["exact-spectrum", "-o", str(tmp_path), "--set", "N=20"]) == EXIT_CONFIG
    assert "config error" in capsys.readouterr().err
    assert main(["exact-spectrum", "-c", str(tmp_path / "missing.ini")]) == EXIT_CONFIG


def test_resource_guard_exit_code(tmp_path):
    assert main(["exact-spectrum", "-o", str(tmp_path), "--set", "N=6561"]) == EXIT_RESOURCE
    assert not (tmp_path / "spectrum_exact.json").exists()


def test_config_file_is_read(tmp_path):
    ini = tmp_path / "c.ini"
    ini.write_text("[run]\nN = 9\n[profile]\nshape = complete\n")
    assert main(["exact-spectrum", "-c", str(ini), "-o", str(tmp_path / "o")]) == EXIT_OK
    z, meta = io.read_spectrum(tmp_path / "o" / "spectrum_exact.json")
    assert len(z) == 9 and meta["profile"]["shape"] == "complete"


def test_console_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "openbaker.cli", "exact-spectrum", "-o", str(tmp_path), "-s", "N=9"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "spectrum_exact.json").exists()
