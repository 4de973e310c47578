import json

import numpy as np
import pytest

from bkmflow import export
from bkmflow.pipeline import run_scenario, verify_dir
from bkmflow.errors import ConfigError


@pytest.fixture
def run_dir(tmp_path, small_scenario):
    res = run_scenario(small_scenario, out_dir=tmp_path / "run")
    assert res.exit_code == 0
    return tmp_path / "run", res


def test_artifacts_written(run_dir):
    d, res = run_dir
    for name in (export.SCENARIO_FILE, export.SOLUTION_FILE, export.SUMMARY_FILE, export.CSV_FILE):
        assert (d / name).exists()
    assert len(list((d / export.FRAMES_DIR).glob("frame_*.csv"))) == 9
    summary = json.loads((d / export.SUMMARY_FILE).read_text())
    assert summary["status"] == "pass"
    assert summary["checks"]["pde"]["report"]["name"] == "bkm_finite_evolution"


def test_csv_round_trips_exactly(run_dir):
    d, res = run_dir
    head, data = export.read_csv(d / export.CSV_FILE)
    assert head == ["t", "x", "u_1", "q"]
    sol = res.solution
    assert data.shape == (sol.t_nodes.size * sol.x_nodes.size, 4)
    np.testing.assert_array_equal(data[:, 2], sol.u[0].ravel())
    np.testing.assert_array_equal(data[:, 3], sol.q.ravel())
    fh, frame = export.read_csv(d / export.FRAMES_DIR / "frame_0004.csv")
    np.testing.assert_array_equal(frame[:, 2], sol.u[0, 4])


def test_identical_runs_give_identical_csv(tmp_path, small_scenario, run_dir):
    d, _ = run_dir
    run_scenario(small_scenario, out_dir=tmp_path / "again")
    assert (tmp_path / "again" / export.CSV_FILE).read_bytes() == (d / export.CSV_FILE).read_bytes()


def test_solution_reload_and_verify(run_dir):
    d, res = run_dir
    sol = export.load_solution(d, res.scenario.bkm_spec())
    np.testing.assert_array_equal(sol.u, res.solution.u)
    np.testing.assert_array_equal(sol.phase.w, res.solution.phase.w)
    again = verify_dir(d)
    assert again.exit_code == 0
    assert again.check("pde").value == res.check("pde").value


def test_verify_dir_without_solution(tmp_path, small_scenario):
    (tmp_path / export.SCENARIO_FILE).write_text(json.dumps(small_scenario))
    with pytest.raises(ConfigError):
        verify_dir(tmp_path)


def test_failed_threshold_gives_exit_1(small_scenario):
    small_scenario["checks"]["pde"] = 1e-12
    res = run_scenario(small_scenario)
    assert res.exit_code == 1 and res.status == "fail"
    assert not res.check("pde").passed and res.check("level").passed


def test_singularity_gives_exit_3(singular_scenario):
    res = run_scenario(singular_scenario)
    assert res.exit_code == 3 and res.status == "error"
    assert "stackel-hamiltonian" in res.error


def test_config_error_propagates(small_scenario):
    small_scenario["reduction"]["c_roots"] = [0.0, 1.0]
    with pytest.raises(ConfigError):
        run_scenario(small_scenario)


def test_scenario_input_forms(tmp_path, small_scenario):
    path = tmp_path / "small.scenario"
    path.write_text(json.dumps(small_scenario))
    a = run_scenario(path)
    b = run_scenario(json.dumps(small_scenario))
    np.testing.assert_array_equal(a.solution.u, b.solution.u)
