import copy
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nhc.dynamics import ComplexTrajectory, RealTrajectory, integrate_complex_path, integrate_real_path
from nhc.errors import ConfigError
from nhc.phasespace import QuadraticHamiltonian
from nhc.scenario import TimeDependence, load_scenario, parse_scenario
from nhc.trajio import (
    complex_columns,
    format_csv,
    format_jsonl,
    parse_csv,
    parse_jsonl,
    read_trajectory,
    real_columns,
    write_trajectory,
)

BASE = {
    "n": 1,
    "hbar": 1.0,
    "hamiltonian": {"H_re": [[1, 0], [0, 1]], "H_im": [[0, 0], [0, 0]]},
    "initial": {"route": "both", "z_re": [0, 1], "B_im": [[1]]},
    "time": {"t0": 0.0, "t1": 1.0, "dt_sample": 0.1},
}


def doc(**changes):
    d = copy.deepcopy(BASE)
    for path, value in changes.items():
        node = d
        keys = path.split("__")
        for k in keys[:-1]:
            node = node[k]
        if value is None:
            node.pop(keys[-1], None)
        else:
            node[keys[-1]] = value
    return d


def test_parse_defaults():
    sc = parse_scenario(doc())
    assert sc.route == "both" and sc.output_format == "csv" and sc.stride == 1
    assert np.array_equal(sc.z0, [0, 1]) and sc.B0[0, 0] == 1j
    assert sc.alpha_convention == "normalized" and sc.beta_convention == "literal"
    z0, B0 = sc.complex_start()
    Z0, G0, beta0 = sc.real_start()
    assert np.array_equal(Z0, [0, 1]) and np.allclose(G0, np.eye(2)) and beta0 == 0


def test_real_start_from_complex_centre():
    sc = parse_scenario(doc(initial__z_im=[0, 0.5]))
    Z0, _, beta0 = sc.real_start()
    # z = (0, 1 + 0.5i), B = i: P = p + B(Q - q) = 0.5, sigma = 1/2 (P + p)(Q - q) = -i/8
    assert np.allclose(Z0, [0.5, 1.0])
    assert beta0 == pytest.approx(-0.25)


def test_real_initial_state():
    d = doc()
    d["initial"] = {"route": "real", "Z": [0.5, 0.0], "G": [[2, 0], [0, 0.5]]}
    sc = parse_scenario(d)
    z0, B0 = sc.complex_start()
    assert np.allclose(B0, [[0.5j]]) and np.allclose(z0, [0.5, 0])


@pytest.mark.parametrize(
    "changes, fragment",
    [
        ({"n": 0}, "n must be"),
        ({"hamiltonian": None}, "missing section 'hamiltonian'"),
        ({"hamiltonian__H_re": [[1, 0.5], [0, 1]]}, "H_re[0][1]=0.5 vs H_re[1][0]=0.0"),
        ({"hamiltonian__H_re": [[1, 0], [0, 1], [0, 0]]}, "shape"),
        ({"hamiltonian__H_im": [[1, 0], [1e-3, 1]]}, "H_im"),
        ({"initial__route": "sideways"}, "route"),
        ({"initial__B_im": [[-1]]}, "invalid initial state"),
        ({"initial__z_re": None}, "both z and B"),
        ({"time__t1": None}, "t1"),
        ({"time__t1": -1.0}, "precedes"),
        ({"time__dt_sample": 0}, "positive"),
        ({"integrator": {"beta_convention": "other"}}, "beta_convention"),
        ({"output": {"format": "xml"}}, "format"),
        ({"output": {"stride": 0}}, "stride"),
        ({"hamiltonian__time_dependence": "sawtooth"}, "preset"),
    ],
)
def test_parse_errors(changes, fragment):
    with pytest.raises(ConfigError, match=None) as info:
        parse_scenario(doc(**changes))
    assert fragment in str(info.value)


def test_small_asymmetry_is_symmetrized():
    sc = parse_scenario(doc(hamiltonian__H_re=[[1, 1e-8], [0, 1]]))
    assert sc.H[0, 1] == pytest.approx(5e-9)


def test_load_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_scenario(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        load_scenario(bad)


def test_time_dependence():
    assert TimeDependence().factor(3.0) == 1.0
    assert TimeDependence("cosine", omega=2.0, amplitude=0.5).factor(0.0) == 1.5
    assert TimeDependence("linear_ramp", rate=0.1).factor(2.0) == pytest.approx(1.2)
    sc = parse_scenario(doc(hamiltonian__time_dependence={"preset": "cosine", "omega": 2.0, "amplitude": 0.5}))
    H, _ = sc.hamiltonian().at(0.0)
    assert np.allclose(H, 1.5 * np.eye(2))


# -- trajectory files ----------------------------------------------------------


def sample_trajectories():
    ham = QuadraticHamiltonian(n=1, H=np.array([[1.0 - 0.1j, 0.3], [0.3, 0.7]]))
    ct = integrate_complex_path([0.1 + 0.2j, -0.4], 0.3 + 1.1j, ham, 0.0, 1.0, dt_sample=0.1)
    rt = integrate_real_path([0.1, -0.4], np.eye(2), ham, 0.0, 1.0, dt_sample=0.1)
    blow = integrate_complex_path([0.0, 1.0], 1j, QuadraticHamiltonian(n=1, H=np.diag([0, 1j])), 0.0, 2.0,
                                  dt_sample=0.1)
    return ct, rt, blow


def assert_same(a, b):
    assert type(a) is type(b)
    if isinstance(a, ComplexTrajectory):
        fields = ("t", "z", "B", "alpha")
    else:
        fields = ("t", "Z", "G", "beta")
    for f in fields:
        assert np.array_equal(getattr(a, f), getattr(b, f)), f
    assert (a.breakdown is None) == (b.breakdown is None)
    if a.breakdown is not None:
        assert a.breakdown.t_breakdown == b.breakdown.t_breakdown
        assert a.breakdown.reason is b.breakdown.reason


def test_columns():
    assert complex_columns(1) == ["t", "Re_z_1", "Re_z_2", "Im_z_1", "Im_z_2", "Re_B_1_1", "Im_B_1_1",
                                  "Re_alpha", "Im_alpha"]
    assert real_columns(1) == ["t", "Z_1", "Z_2", "G_1_1", "G_1_2", "G_2_1", "G_2_2", "beta"]
    assert len(complex_columns(2)) == 1 + 8 + 8 + 2


def test_round_trips_are_exact():
    for traj in sample_trajectories():
        assert_same(parse_csv(format_csv(traj)), traj)
        assert_same(parse_jsonl(format_jsonl(traj)), traj)


def test_breakdown_footer():
    _, _, blow = sample_trajectories()
    text = format_csv(blow)
    assert text.splitlines()[-1].startswith("# breakdown t=0.99")
    assert text.splitlines()[-1].endswith("reason=positivity-loss")
    last = json.loads(format_jsonl(blow).splitlines()[-1])
    assert last["type"] == "breakdown" and last["reason"] == "positivity-loss"


def test_stride():
    ct, _, _ = sample_trajectories()
    back = parse_csv(format_csv(ct, stride=3))
    assert np.array_equal(back.t, ct.t[::3])


def test_write_and_read(tmp_path):
    for traj in sample_trajectories():
        for fmt in ("csv", "jsonl"):
            path = write_trajectory(traj, tmp_path / f"run.{fmt}", fmt)
            assert_same(read_trajectory(path), traj)
    with pytest.raises(ConfigError):
        write_trajectory(traj, tmp_path / "run.xml", "xml")


def test_output_is_deterministic():
    a = sample_trajectories()
    b = sample_trajectories()
    for x, y in zip(a, b):
        assert format_csv(x) == format_csv(y)
        assert format_jsonl(x) == format_jsonl(y)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(allow_nan=False, allow_infinity=False), min_size=8, max_size=8))
def test_csv_round_trip_arbitrary_floats(vals):
    rt = RealTrajectory(t=np.array([vals[0]]), Z=np.array([vals[1:3]]), G=np.array([vals[3:7]]).reshape(1, 2, 2),
                        beta=np.array([vals[7]]))
    assert_same(parse_csv(format_csv(rt)), rt)
