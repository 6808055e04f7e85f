import json

import numpy as np
import pytest

from nhc.dynamics import project_trajectory
from nhc.cli import EXIT_BREAKDOWN, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK, main
from nhc.trajio import read_trajectory

HARMONIC = {
    "n": 1,
    "hbar": 1.0,
    "hamiltonian": {"H_re": [[1, 0], [0, 1]]},
    "initial": {"route": "both", "z_re": [0.3, 1.0], "B_re": [[0.2]], "B_im": [[1.5]]},
    "time": {"t0": 0.0, "t1": 2.0, "dt_sample": 0.05},
}

BLOWUP = {
    "n": 1,
    "hamiltonian": {"H_re": [[0, 0], [0, 0]], "H_im": [[0, 0], [0, 1]]},
    "initial": {"route": "complex", "z_re": [0, 1], "B_im": [[1]]},
    "time": {"t1": 2.0, "dt_sample": 0.01},
}


def write(tmp_path, doc, name="run.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def test_propagate_both_routes_agree(tmp_path):
    cfg = write(tmp_path, HARMONIC)
    out = tmp_path / "ho.csv"
    assert main(["propagate", "--config", cfg, "--out", str(out)]) == EXIT_OK
    ct = read_trajectory(tmp_path / "ho_complex.csv")
    rt = read_trajectory(tmp_path / "ho_real.csv")
    assert np.max(np.abs(project_trajectory(ct).Z - rt.Z)) <= 1e-6


def test_propagate_is_deterministic(tmp_path):
    cfg = write(tmp_path, HARMONIC)
    for fmt in ("csv", "jsonl"):
        a, b = tmp_path / f"a.{fmt}", tmp_path / f"b.{fmt}"
        assert main(["propagate", "--config", cfg, "--out", str(a), "--format", fmt]) == EXIT_OK
        assert main(["propagate", "--config", cfg, "--out", str(b), "--format", fmt]) == EXIT_OK
        for route in ("complex", "real"):
            assert (tmp_path / f"a_{route}.{fmt}").read_bytes() == (tmp_path / f"b_{route}.{fmt}").read_bytes()


def test_propagate_breakdown(tmp_path):
    cfg = write(tmp_path, BLOWUP)
    out = tmp_path / "blow.csv"
    assert main(["propagate", "--config", cfg, "--out", str(out)]) == EXIT_BREAKDOWN
    footer = out.read_text().splitlines()[-1]
    assert footer.startswith("# breakdown t=")
    t = float(footer.split("t=")[1].split()[0])
    assert abs(t - 1.0) <= 1e-3


def test_propagate_asymmetric_hamiltonian(tmp_path, capsys):
    doc = json.loads(json.dumps(HARMONIC))
    doc["hamiltonian"]["H_re"] = [[1, 0.5], [0, 1]]
    assert main(["propagate", "--config", write(tmp_path, doc), "--out", str(tmp_path / "x.csv")]) == EXIT_CONFIG
    assert "H_re[0][1]=0.5 vs H_re[1][0]=0.0" in capsys.readouterr().err


def test_propagate_missing_config(tmp_path):
    assert main(["propagate", "--config", str(tmp_path / "none.json")]) == EXIT_CONFIG


def test_propagate_uses_output_section(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    doc = dict(HARMONIC, initial=dict(HARMONIC["initial"], route="real"), output={"path": "o.jsonl", "format": "jsonl"})
    assert main(["propagate", "--config", write(tmp_path, doc)]) == EXIT_OK
    assert (tmp_path / "o.jsonl").exists()


@pytest.mark.parametrize(
    "z_re, z_im, Z, sigma",
    [
        ([0.4, -1.0], [0, 0], [0.4, -1.0], 0j),
        ([0, 0], [0, 1], [1.0, 0.0], -0.5j),
        ([0, 0], [1, 0], [0.0, -1.0], None),
    ],
)
def test_project(tmp_path, capsys, z_re, z_im, Z, sigma):
    doc = dict(HARMONIC, initial={"z_re": z_re, "z_im": z_im, "B_im": [[1]]})
    assert main(["project", "--config", write(tmp_path, doc)]) == EXIT_OK
    out = json.loads(capsys.readouterr().out)
    assert np.allclose(out["Z"], Z)
    if sigma is not None:
        assert complex(out["sigma"]["re"], out["sigma"]["im"]) == pytest.approx(sigma)
    assert np.allclose(out["frame_im"], [[1], [0]])


def test_project_invalid_shape(tmp_path):
    doc = dict(HARMONIC, initial={"z_re": [0, 0], "B_im": [[-1]]})
    assert main(["project", "--config", write(tmp_path, doc)]) == EXIT_CONFIG


def test_example_contraction(tmp_path, capsys):
    assert main(["example", "contraction", "--gamma", "1", "--t1", "3", "--out", str(tmp_path)]) == EXIT_OK
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["passed"] and max(summary["deviations"].values()) <= 1e-5
    assert (tmp_path / "closed_form.csv").exists() and (tmp_path / "run.csv").exists()


def test_example_blowup_reports_breakdown(capsys):
    assert main(["example", "blowup", "--b", "1"]) == EXIT_OK
    summary = json.loads(capsys.readouterr().out)
    assert abs(summary["info"]["t_breakdown"] - 1.0) <= 1e-3


def test_example_pt_shifted_closure(capsys):
    assert main(["example", "pt_shifted", "--gamma", "0", "1", "--t1", "6.2832"]) == EXIT_OK
    dev = json.loads(capsys.readouterr().out)["deviations"]
    assert dev["closure_Z"] <= 1e-4


def test_example_errors():
    assert main(["example", "nonsense"]) == EXIT_CONFIG
    assert main(["example", "contraction", "--gamma", "1", "2"]) == EXIT_CONFIG
    assert main(["example", "damped_oscillator", "--delta", "1", "0"]) == EXIT_CONFIG


def test_validate_exit_codes(capsys):
    assert main(["validate", "--level", "fast"]) == EXIT_OK
    assert main(["validate", "--level", "fast", "--inject-fault"]) == EXIT_NUMERICAL
    report = capsys.readouterr().out
    assert "FAIL\tgeometry.metric_symplectic\tGΩG=Ω" in report


def test_validate_jsonl(capsys):
    assert main(["validate", "--format", "jsonl", "--seed", "4"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert all(json.loads(ln)["status"] in ("PASS", "INFO") for ln in lines)


def test_bad_arguments():
    assert main(["frobnicate"]) == EXIT_CONFIG
    assert main([]) == EXIT_CONFIG
