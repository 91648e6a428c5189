import json
import subprocess
import sys
from pathlib import Path

from maxbounds.cli import main
from maxbounds.processes import PathEnsemble

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

SMALL = """\
[process]
hurst = 0.5
n_steps = 64
n_paths = 1000
[spec]
delta = 0.25
[experiment]
name = {name}
{seed}suite_samples = 200
[band]
a = -0.1
b = 0.1
[lambda_grid]
values = 1.5, 2.0
marginal = {marginal}
"""


def write_cfg(tmp_path, name="all", seed="seed = 7\n", marginal="0.5, 1.0", fname=None):
    path = tmp_path / (fname or f"{name}.cfg")
    path.write_text(SMALL.format(name=name, seed=seed, marginal=marginal))
    return str(path)


def run(*argv):
    return main(list(argv))


def test_bounds_table_json_and_csv(tmp_path, capsys):
    cfg = write_cfg(tmp_path)
    assert run("bounds", "--config", cfg) == 0
    table = json.loads(capsys.readouterr().out)
    names = {b["name"] for b in table["bounds"]}
    assert {"lemma1_sup_moment_bound", "prop1_lq_bound", "theorem_tail_bound", "fbm_sup_bound",
            "fbm_sup_bound_general", "fbm_marginal_tail", "upcross_moment_bound",
            "upcross_random_time_bound"} <= names
    assert table["seed"] == 7
    assert run("bounds", "--config", cfg, "--format", "csv", "--out", str(tmp_path / "o")) == 0
    text = (tmp_path / "o" / "bounds.csv").read_bytes()
    assert b"\r" not in text and text.count(b"\n") == len(table["bounds"])


def test_shipped_configs_tabulate(capsys):
    for name in ("default.cfg", "fbm.cfg"):
        assert run("bounds", "--config", str(CONFIGS / name)) == 0
    capsys.readouterr()


def test_usage_errors_exit_2(tmp_path, capsys):
    assert run("verify", "--bogus") == 2
    assert "usage" in capsys.readouterr().err
    assert run("bounds", "--config", str(tmp_path / "missing.cfg")) == 2
    bad = tmp_path / "bad.cfg"
    bad.write_text("[process]\nwiggle = 1\n")
    assert run("bounds", "--config", str(bad)) == 2
    infeasible = tmp_path / "chain.cfg"
    infeasible.write_text("[spec]\nq = 1.5\nalpha = 0.6\ndelta = 0.25\n[experiment]\nname = upcross\n")
    assert run("verify", "--config", str(infeasible)) == 2
    assert "feasible choice" in capsys.readouterr().err


def test_verify_exit_codes(tmp_path, capsys):
    ok = write_cfg(tmp_path, name="marginal_tail_fbm")
    assert run("verify", "--config", ok) == 0
    # no finite sample certifies a bound that underflows to zero
    failing = write_cfg(tmp_path, name="marginal_tail_fbm", marginal="50.0", fname="fail.cfg")
    assert run("verify", "--config", failing) == 1
    capsys.readouterr()


def test_seed_precedence_and_echo(tmp_path, capsys):
    cfg = write_cfg(tmp_path, name="doob_lq")
    run("verify", "--config", cfg)
    assert json.loads(capsys.readouterr().out)["seed"] == 7
    run("verify", "--config", cfg, "--seed", "0x10")
    assert json.loads(capsys.readouterr().out)["seed"] == 16
    unseeded = write_cfg(tmp_path, name="doob_lq", seed="", fname="unseeded.cfg")
    run("verify", "--config", unseeded)
    assert json.loads(capsys.readouterr().out)["seed"] == 0xC0FFEE


def test_verify_byte_identical_across_runs_and_threads(tmp_path, monkeypatch):
    cfg = write_cfg(tmp_path)
    outs = []
    for i, threads in enumerate(("1", "8", "1")):
        d = tmp_path / f"r{i}"
        assert run("verify", "--config", cfg, "--out", str(d), "--threads", threads) == 0
        outs.append((d / "report.json").read_bytes())
    monkeypatch.setenv("MAXBOUNDS_THREADS", "4")
    d = tmp_path / "env"
    assert run("verify", "--config", cfg, "--out", str(d)) == 0
    outs.append((d / "report.json").read_bytes())
    assert len(set(outs)) == 1
    monkeypatch.setenv("MAXBOUNDS_THREADS", "many")
    assert run("verify", "--config", cfg) == 2


def test_verify_csv_summary(tmp_path):
    cfg = write_cfg(tmp_path, name="sup_tail_fbm")
    assert run("verify", "--config", cfg, "--format", "csv", "--out", str(tmp_path)) == 0
    lines = (tmp_path / "report.csv").read_text().splitlines()
    assert lines[0] == "experiment,lambda,empirical,ci_high,bound,pass,margin"
    assert len(lines) == 3 and all(l.split(",")[5] == "true" for l in lines[1:])


def test_report_rederives_verdicts(tmp_path, capsys):
    cfg = write_cfg(tmp_path, name="marginal_tail_fbm")
    assert run("verify", "--config", cfg, "--out", str(tmp_path)) == 0
    assert run("report", "--out", str(tmp_path)) == 0
    assert (tmp_path / "summary.json").is_file()
    report = json.loads((tmp_path / "report.json").read_text())
    report["verdicts"][0]["bound"]["value"] = 0.0
    tampered = tmp_path / "tampered.json"
    tampered.write_text(json.dumps(report))
    assert run("report", "--input", str(tampered)) == 1
    out = json.loads(capsys.readouterr().out)
    assert out["verdicts"][0]["pass"] is False and not out["summary"]["all_passed"]
    garbage = tmp_path / "garbage.json"
    garbage.write_text("{}")
    assert run("report", "--input", str(garbage)) == 2


def test_simulate_then_upcross_input(tmp_path, capsys):
    cfg = write_cfg(tmp_path)
    assert run("simulate", "--config", cfg, "--format", "csv", "--out", str(tmp_path)) == 0
    ens = PathEnsemble.from_csv((tmp_path / "ensemble.csv").read_text())
    assert ens.values.shape == (1000, 65)
    assert run("upcross", "--config", cfg, "--input", str(tmp_path / "ensemble.csv")) == 0
    out = json.loads(capsys.readouterr().out)
    assert len(out["paths"]) == 1000 and out["delta"] == 0.25
    assert run("upcross", "--config", cfg, "--input", str(tmp_path / "nope.csv")) == 2


def test_upcross_command_runs_experiment(tmp_path, capsys):
    assert run("upcross", "--config", write_cfg(tmp_path)) == 0
    report = json.loads(capsys.readouterr().out)
    assert [v["experiment"] for v in report["verdicts"]] == ["upcross"]


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "maxbounds", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.startswith("maxbounds")
