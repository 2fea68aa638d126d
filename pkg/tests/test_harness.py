import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from relweights.bandit import agent_rngs, rng_stream, sample_bandit
from relweights.cli import main
from relweights.coopucb2 import AlgoParams, run_episode
from relweights.graph import gen_clustered, gen_complete, gen_star, load_graph, save_graph
from relweights.harness import (
    SHIPPED_NETWORKS,
    ConfigError,
    MethodSpec,
    config_from_dict,
    convergence_table,
    load_config,
    resolve_method,
    resolve_network,
    simulate,
    write_table,
)
from relweights.spectral import convergence_factor, convergence_time
from relweights.weights import kappa_weights, read_weights_csv

SMALL = {"network": "complete5", "methods": ["kappa", "maxdeg"], "n_arms": 10, "horizon": 60, "runs": 4, "seed": 3}


def write_config(tmp_path, raw, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(raw))
    return path


def test_minimal_config_defaults(tmp_path):
    cfg = load_config(write_config(tmp_path, {"network": "star5", "methods": ["fdla"]}))
    assert (cfg.n_arms, cfg.sigma, cfg.horizon, cfg.runs) == (100, 1.0, 1000, 10000)
    assert cfg.methods == (MethodSpec("fdla"),)
    params = cfg.algo_params()
    assert (params.sigma_g, params.gamma, params.eta, params.f) == (1.0, 1.1, 2.0, "sqrt_log")


def test_horizon_must_fit():
    with pytest.raises(ConfigError, match="horizon"):
        config_from_dict({"network": "star5", "methods": ["kappa"], "horizon": 50})


def test_unknown_key_suggestion():
    with pytest.raises(ConfigError, match="did you mean 'horizon'"):
        config_from_dict({"network": "star5", "methods": ["kappa"], "horzon": 500})


@pytest.mark.parametrize(
    "raw, field",
    [
        ({"methods": ["kappa"]}, "network"),
        ({"network": "star5"}, "methods"),
        ({"network": "star5", "methods": []}, "methods"),
        ({"network": "star5", "methods": ["kappa"], "runs": "ten"}, "runs"),
        ({"network": "star5", "methods": ["kappa"], "runs": 0}, "runs"),
        ({"network": "star5", "methods": ["kappa"], "sigma": True}, "sigma"),
        ({"network": "star5", "methods": ["simplex"]}, "simplex"),
        ({"network": "star5", "methods": [{"method": "kappa", "kappa": 2.0}]}, "kappa"),
        ({"network": "star5", "methods": ["kappa"], "gamma": 0.5}, "gamma"),
    ],
)
def test_config_errors_name_field(raw, field):
    with pytest.raises(ConfigError, match=field):
        config_from_dict(raw)


def test_config_method_objects():
    cfg = config_from_dict({"network": "star5", "methods": [{"method": "kappa", "kappa": 0.1}, "const"]})
    assert cfg.methods == (MethodSpec("kappa", 0.1), MethodSpec("best_constant"))
    assert cfg.methods[0].label == "kappa=0.1"


def test_invalid_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{network: star5")
    with pytest.raises(ConfigError, match="invalid JSON"):
        load_config(path)


def test_resolve_network_names(tmp_path):
    assert resolve_network("complete5") == gen_complete(5)
    assert resolve_network("star7") == gen_star(7)
    assert resolve_network("cluster3x4_star") == gen_clustered(3, 4, "star")
    for name in SHIPPED_NETWORKS:
        assert resolve_network(name).connected
    assert resolve_network("cluster3") == gen_clustered(3, 5)
    path = tmp_path / "g.txt"
    save_graph(gen_star(4), path)
    assert resolve_network(str(path)) == gen_star(4)
    with pytest.raises(ConfigError):
        resolve_network("hypercube")


def test_resolve_method_aliases():
    assert resolve_method("maxdeg") == "max_degree"
    assert resolve_method("FDLA") == "fdla"
    with pytest.raises(ConfigError):
        resolve_method("metropolis")


def test_table_single_cell(tmp_path):
    table = convergence_table(["complete5"], ["maxdeg"])
    assert list(table) == ["max_degree"]
    rho, tau = table["max_degree"]["complete5"]
    assert rho == pytest.approx(0.25) and tau == pytest.approx(0.7213475, abs=1e-6)
    path = tmp_path / "t.csv"
    write_table(table, path)
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["method", "complete5_rho", "complete5_tau"]
    assert len(rows) == 2 and len(rows[1]) == 3


def test_table_cli_appends_graph(tmp_path, capsys):
    gpath = tmp_path / "path4.txt"
    gpath.write_text("m 4\ne 0 1\ne 1 2\ne 2 3\n")
    out = tmp_path / "t.csv"
    code = main(["table", "--network", "complete5", "--graph", str(gpath), "--method", "kappa",
                 "--method", "localdeg", "--out", str(out)])
    assert code == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["method", "complete5_rho", "complete5_tau", f"{gpath}_rho", f"{gpath}_tau"]
    assert [r[0] for r in rows[1:]] == ["kappa=0.02", "local_degree"]
    assert float(rows[1][1]) == pytest.approx(0.975)


def test_cli_optimize_examples(tmp_path, capsys):
    assert main(["optimize", "--network", "star5", "--method", "fdla"]) == 0
    out = capsys.readouterr().out
    rho = float(out.split("rho=")[1].split()[0])
    assert rho == pytest.approx(0.667, abs=5e-3)
    wpath = tmp_path / "w.csv"
    assert main(["optimize", "--network", "complete5", "--method", "maxdeg", "--out", str(wpath)]) == 0
    out = capsys.readouterr().out
    assert "rho=0.25 " in out and "tau=0.721348" in out
    p, meta = read_weights_csv(wpath)
    assert meta["method"] == "max_degree"
    assert convergence_factor(p) == pytest.approx(0.25)


def test_cli_disconnected_graph(tmp_path, capsys):
    gpath = tmp_path / "bad_disconnected.txt"
    gpath.write_text("m 4\ne 0 1\ne 2 3\n")
    assert main(["optimize", "--graph", str(gpath), "--method", "fmmc"]) == 1
    assert "disconnected" in capsys.readouterr().err


def test_cli_validation_errors(tmp_path, capsys):
    assert main(["optimize", "--network", "star5", "--method", "simplex"]) == 1
    assert main(["optimize", "--network", "nowhere.txt", "--method", "fmmc"]) == 1
    cfg = write_config(tmp_path, {"network": "star5", "methods": ["kappa"], "horzon": 10})
    assert main(["simulate", "--config", str(cfg)]) == 1
    assert "horizon" in capsys.readouterr().err


def test_cli_strict_nonconvergence(capsys):
    args = ["optimize", "--network", "cluster2x3", "--method", "fmmc", "--max-iters", "3", "--no-refine"]
    assert main(args) == 0
    assert main(args + ["--strict"]) == 2


def test_cli_trace(tmp_path):
    trace = tmp_path / "trace.csv"
    assert main(["optimize", "--network", "star5", "--method", "fmmc", "--trace", str(trace)]) == 0
    lines = trace.read_text().splitlines()
    assert lines[0] == "iteration,rho"
    values = [float(x.split(",")[1]) for x in lines[1:]]
    assert all(b <= a for a, b in zip(values, values[1:]))


def test_console_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "relweights", "optimize", "--network", "complete5", "--method", "kappa"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert "rho=0.975" in proc.stdout


def test_simulate_outputs(tmp_path):
    cfg = config_from_dict({**SMALL, "out": str(tmp_path / "out")})
    res = simulate(cfg)
    names = sorted(p.name for p in res.files)
    assert names == sorted([
        "curve_kappa_0.02.csv", "curve_max_degree.csv", "weights_kappa_0.02.csv",
        "weights_max_degree.csv", "summary.csv", "config.json",
    ])
    rows = list(csv.DictReader((tmp_path / "out" / "curve_max_degree.csv").open()))
    assert len(rows) == 50
    assert rows[0]["t"] == "11" and rows[-1]["t"] == "60"
    summary = list(csv.DictReader((tmp_path / "out" / "summary.csv").open()))
    assert [r["method"] for r in summary] == ["kappa=0.02", "max_degree"]
    assert set(summary[0]) == {"method", "network", "rho", "tau", "settling_step", "final_regret_mean"}


def test_summary_matches_weight_csvs(tmp_path):
    out = tmp_path / "out"
    simulate(config_from_dict({**SMALL, "methods": ["kappa", "const", "fmmc"], "out": str(out)}))
    for row in csv.DictReader((out / "summary.csv").open()):
        slug = row["method"].replace("=", "_")
        p, _ = read_weights_csv(out / f"weights_{slug}.csv")
        rho = convergence_factor(p)
        assert float(row["rho"]) == pytest.approx(rho, abs=1e-12)
        assert float(row["tau"]) == pytest.approx(convergence_time(rho), rel=1e-9)


def test_simulate_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    simulate(config_from_dict({**SMALL, "out": str(a)}))
    simulate(config_from_dict({**SMALL, "out": str(b)}))
    for f in sorted(a.iterdir()):
        if f.name == "config.json":
            continue
        assert f.read_bytes() == (b / f.name).read_bytes(), f.name
    c = tmp_path / "c"
    simulate(config_from_dict({**SMALL, "seed": 4, "out": str(c)}))
    assert (a / "curve_max_degree.csv").read_bytes() != (c / "curve_max_degree.csv").read_bytes()


def test_simulate_cli_byte_identical(tmp_path, capsys):
    cfg = write_config(tmp_path, SMALL)
    outs = [tmp_path / "x", tmp_path / "y"]
    for out in outs:
        assert main(["simulate", "--config", str(cfg), "--out", str(out), "--runs", "2"]) == 0
    assert "settling_step=" in capsys.readouterr().out
    for name in ("curve_kappa_0.02.csv", "summary.csv"):
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()


def test_single_run_curve_is_episode(tmp_path):
    cfg = config_from_dict({**SMALL, "methods": ["kappa"], "runs": 1})
    res = simulate(cfg, write=False)
    g = gen_complete(5)
    b = sample_bandit(10, rng_stream(3, 0, 0))
    logs = run_episode(g, kappa_weights(g), b, AlgoParams(), 60, agent_rngs(3, 0, 5))
    assert np.array_equal(res.curves["kappa=0.02"].mean, [e.delta for e in logs])
    assert np.all(res.curves["kappa=0.02"].stderr == 0)


def test_common_random_numbers(tmp_path):
    # identical weights under two labels see identical bandits and rewards
    cfg = config_from_dict({**SMALL, "methods": ["maxdeg", "localdeg"]})
    res = simulate(cfg, write=False)
    assert np.array_equal(res.curves["max_degree"].mean, res.curves["local_degree"].mean)
