import json

import numpy as np
import pytest

from lagrelax.cli import main
from lagrelax.instances import make_restricted_instance, save_instance


def run_cli(capsys, argv):
    rc = main(argv)
    out = capsys.readouterr().out
    return rc, json.loads(out)


@pytest.fixture
def instance_file(tmp_path):
    path = tmp_path / "inst.json"
    save_instance(make_restricted_instance([1.0, 2.0]), path)
    return str(path)


@pytest.fixture
def family_file(tmp_path):
    path = tmp_path / "family.json"
    path.write_text(json.dumps({
        "variant": "dual-lb", "mu": 1.0, "sigma": 1.0,
        "epsilon": 0.2, "pi_max": 3.0, "B": 1.0,
    }))
    return str(path)


@pytest.fixture
def warm_family_file(tmp_path):
    path = tmp_path / "warm.json"
    path.write_text(json.dumps({"variant": "warmstart-lb", "epsilon": 0.2, "pi_max": 2.0}))
    return str(path)


def test_dual_solve(capsys, instance_file):
    rc, out = run_cli(capsys, ["dual-solve", "--instance", instance_file,
                               "--pi-max", "3", "--iters", "2000"])
    assert rc == 0
    assert out["weak_duality_ok"] is True
    assert out["value"] <= out["opt"] + 1e-12
    assert out["value"] == pytest.approx(1.5, abs=1e-2)
    assert np.allclose(out["pi_hat"], [1.0, 2.0], atol=0.05)


def test_learn_each_algo(capsys, family_file, warm_family_file):
    for algo, fam in (("sga", family_file), ("erm", family_file),
                      ("warmstart", warm_family_file)):
        rc, out = run_cli(capsys, ["learn", "--algo", algo, "--family", fam,
                                   "--N", "20", "--seed", "5", "--s", "3",
                                   "--iterations", "100"])
        assert rc == 0
        assert out["learner"] == algo
        assert out["n"] == 20
        assert len(out["pi"]) == 3
        assert all(p >= 0.0 for p in out["pi"])


def test_learn_is_seed_deterministic(capsys, family_file):
    args = ["learn", "--algo", "sga", "--family", family_file,
            "--N", "30", "--seed", "11", "--s", "4"]
    _, a = run_cli(capsys, args)
    _, b = run_cli(capsys, args)
    assert a["pi"] == b["pi"]


def test_hardfam_verify(capsys):
    rc, out = run_cli(capsys, ["hardfam-verify", "--s", "8", "--mu", "1",
                               "--sigma", "1", "--eps", "0.2", "--N", "10"])
    assert rc == 0
    assert out["packing"]["m"] >= 2
    assert out["packing"]["first_codeword_zero"] is True
    assert out["kl"]["exact_n_sample"] <= out["kl"]["quadratic_bound"]
    assert out["maximizer_check"]["max_coordinate_error"] <= 1e-3
    assert out["separation_l1"]["meets_s_over_8"] is True


def test_bounds(capsys):
    rc, out = run_cli(capsys, ["bounds", "--s", "4", "--n", "100",
                               "--B", "1", "--pi-max", "1"])
    assert rc == 0
    assert out["sga_bound"] == pytest.approx(0.8)
    assert out["dudley_bound"] == pytest.approx(4.2539, abs=1e-3)
    assert out["covering_log"] > 0


def test_vrp_demo(capsys):
    rc, out = run_cli(capsys, ["vrp-demo", "--nodes", "5", "--vehicles", "2",
                               "--seed", "3", "--iters", "40"])
    assert rc == 0
    assert out["best_bound"] <= out["opt"] + 1e-9
    assert out["weak_duality_ok"] is True
    assert out["gap"] >= -1e-9


def test_rates_and_slope(capsys, tmp_path):
    cfg_path = tmp_path / "exp.json"
    cfg_path.write_text(json.dumps({
        "family": {"variant": "dual-lb", "mu": 1.0, "sigma": 1.0,
                   "epsilon": 0.2, "pi_max": 3.0, "B": 1.0},
        "learners": ["sga"], "s_grid": [4], "n_grid": [25, 100, 400],
        "trials": 10, "master_seed": 21,
    }))
    out_path = tmp_path / "rates.csv"
    rc, out = run_cli(capsys, ["rates", "--config", str(cfg_path),
                               "--out", str(out_path)])
    assert rc == 0
    assert out["records"] == 30
    assert out_path.exists()

    rc, fit = run_cli(capsys, ["slope", "--in", str(out_path), "--learner", "sga"])
    assert rc == 0
    assert -1.0 < fit["slope"] < 0.0
    assert 0.0 <= fit["r_squared"] <= 1.0


def test_rates_no_timing_is_reproducible(capsys, tmp_path):
    cfg_path = tmp_path / "exp.json"
    cfg_path.write_text(json.dumps({
        "family": {"variant": "warmstart-lb", "epsilon": 0.2, "pi_max": 2.0},
        "learners": ["warmstart"], "s_grid": [4], "n_grid": [25, 100],
        "trials": 2, "master_seed": 5,
    }))
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    run_cli(capsys, ["rates", "--config", str(cfg_path), "--out", str(p1), "--no-timing"])
    run_cli(capsys, ["rates", "--config", str(cfg_path), "--out", str(p2), "--no-timing"])
    assert p1.read_bytes() == p2.read_bytes()


def test_config_error_exit_code(capsys, tmp_path):
    cfg_path = tmp_path / "bad.json"
    cfg_path.write_text(json.dumps({
        "family": {"variant": "dual-lb", "epsilon": 0.2, "pi_max": 3.0},
        "learners": ["warmstart"],  # wrong variant for this learner
        "s_grid": [4], "n_grid": [25, 100], "trials": 1, "master_seed": 0,
    }))
    rc = main(["rates", "--config", str(cfg_path), "--out", str(tmp_path / "x.csv")])
    capsys.readouterr()
    assert rc == 2
