import json
import math
from pathlib import Path

import numpy as np
import pytest

from resosplit.harness import (
    Check,
    ConfigError,
    VerificationReport,
    fit_drift_slope,
    load_config,
    run_experiment,
    run_sweep,
    verify_suite,
)
from resosplit.harness.checks import dft_checks, run_checks
from resosplit.harness.cli import main
from resosplit.harness.config import config_from_dict
from resosplit.harness.io import emit_csv, emit_json, read_csv
from resosplit.harness.runner import CSV_COLUMNS, TrajectoryRecord, sweep_configs
from resosplit.spectral import forward_dft

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def base(**changes):
    d = {
        "equation": "cubic",
        "K": 4,
        "n_steps": 10,
        "step": {"p": 1, "q": 2},
        "initial": {"kind": "fourier", "coeffs": {"0": 1.0, "-2": 0.5}},
    }
    d.update(changes)
    return d


# --- configuration ------------------------------------------------------------


@pytest.mark.parametrize(
    "changes,field",
    [
        ({"equation": "heat"}, "equation"),
        ({"sigma": 0}, "sigma"),
        ({"K": 5}, "K"),
        ({"K": 2}, "K"),
        ({"n_steps": -1}, "n_steps"),
        ({"step": {"p": 0, "q": 2}}, "step.p"),
        ({"step": {"p": 1, "q": 2, "power": 3}}, "step.power"),
        ({"step": {"tau": 0.5, "q": 2}}, "step"),
        ({"step": {"tau": -1.0}}, "step.tau"),
        ({"tolerances": {"bogus": 1.0}}, "tolerances"),
        ({"equation": "linear"}, "potential"),
        ({"colour": "red"}, "unknown top-level"),
        ({"K": 6, "initial": {"kind": "resonant_pair", "amplitude": 0.5}}, "K"),
    ],
)
def test_config_errors_name_the_field(changes, field):
    with pytest.raises(ConfigError, match=field):
        config_from_dict(base(**changes))


def test_missing_required_key():
    d = base()
    del d["n_steps"]
    with pytest.raises(ConfigError, match="n_steps"):
        config_from_dict(d)


def test_malformed_toml(tmp_path):
    p = tmp_path / "bad.toml"
    p.write_text("equation = \n")
    with pytest.raises(ConfigError):
        load_config(p)


@pytest.mark.parametrize("name", sorted(p.name for p in CONFIGS.glob("*.toml")))
def test_shipped_configs_load(name):
    load_config(CONFIGS / name)


def test_cfl_numbers_of_shipped_configs():
    _, s = run_experiment(load_config(CONFIGS / "cubic_k4.toml").replace(n_steps=1))
    assert s["cfl_number_over_pi"] == pytest.approx(16)
    _, s = run_experiment(load_config(CONFIGS / "cfl_q8.toml").replace(n_steps=1))
    assert s["cfl_number_over_pi"] == pytest.approx(8)


def test_classification():
    assert run_experiment(config_from_dict(base()))[1]["classification"] == "resonant"
    assert run_experiment(config_from_dict(base(step={"tau": 0.7})))[1]["classification"] == "nonresonant"
    s = run_experiment(config_from_dict(base(K=6, step={"p": 1, "q": 4})))[1]
    assert s["classification"] == "rational-nonresonant" and not s["drift_claimed"]


# --- outputs ------------------------------------------------------------------


def test_csv_schema(tmp_path):
    traj, _ = run_experiment(config_from_dict(base(n_steps=7)))
    path = tmp_path / "t.csv"
    emit_csv(traj.records, path)
    rows = read_csv(path)
    assert tuple(rows[0]) == CSV_COLUMNS
    assert [int(r["n"]) for r in rows] == list(range(8))
    assert float(rows[0]["t"]) == 0.0


def test_csv_header_only(tmp_path):
    path = tmp_path / "empty.csv"
    emit_csv([], path)
    assert path.read_text() == ",".join(CSV_COLUMNS) + "\n"


def test_csv_blank_for_missing_values(tmp_path):
    traj, _ = run_experiment(config_from_dict(base(step={"tau": 0.7}, n_steps=2)))
    path = tmp_path / "t.csv"
    emit_csv(traj.records, path)
    assert all(r["h1_lower_bound"] == "" for r in read_csv(path))


def test_runs_are_byte_identical(tmp_path):
    cfg = config_from_dict(base(initial={"kind": "random", "project": True, "scale": 0.5}, seed=7, n_steps=20))
    outs = []
    for i in range(2):
        traj, summary = run_experiment(cfg)
        emit_csv(traj.records, tmp_path / f"{i}.csv")
        emit_json(summary, tmp_path / f"{i}.json")
        outs.append(((tmp_path / f"{i}.csv").read_bytes(), (tmp_path / f"{i}.json").read_bytes()))
    assert outs[0] == outs[1]


def test_json_echo_reproduces_csv(tmp_path):
    cfg = load_config(CONFIGS / "linear_energy.toml").replace(n_steps=30)
    traj, summary = run_experiment(cfg)
    emit_csv(traj.records, tmp_path / "a.csv")
    emit_json(summary, tmp_path / "a.json")
    echoed = config_from_dict(json.loads((tmp_path / "a.json").read_text())["config"])
    traj2, _ = run_experiment(echoed)
    emit_csv(traj2.records, tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_summary_has_conventions_and_constants():
    _, s = run_experiment(config_from_dict(base()))
    assert s["conventions"]["cubic_energy_quartic_factor"] == 0.25
    assert s["assembled_constants"]["h1_slope_factor"] == pytest.approx(4 / math.pi**2)
    assert s["l2_relative_variation"] < 1e-13


# --- drift fit ----------------------------------------------------------------


def _records(ts, ys):
    return [TrajectoryRecord(n=i, t=t, l2=1.0, h1=y, kinetic_TK=0.0, energy_HK=0.0) for i, (t, y) in
            enumerate(zip(ts, ys))]


def test_fit_drift_slope_exact_line():
    t = np.linspace(0, 10, 11)
    slope, intercept, resid = fit_drift_slope(_records(t, 3 * t - 2))
    assert slope == pytest.approx(3) and intercept == pytest.approx(-2) and resid < 1e-12


def test_fit_drift_slope_window_and_noise():
    t = np.arange(100.0)
    y = np.where(t < 50, 0.0, 2 * t) + 0.1 * (-1) ** np.arange(100)
    slope, _, resid = fit_drift_slope(_records(t, y), (50, 99))
    assert slope == pytest.approx(2, rel=1e-3)
    assert resid == pytest.approx(0.1, rel=1e-2)


def test_fit_drift_slope_degenerate():
    with pytest.raises(ValueError):
        fit_drift_slope(_records([0.0], [1.0]))
    with pytest.raises(ValueError):
        fit_drift_slope(_records([1.0, 1.0], [1.0, 2.0]))


# --- verification suite ------------------------------------------------------


def test_report_bookkeeping():
    r = VerificationReport({})
    r.add(Check("a", "pass", 0.0, 1.0, "x"))
    r.add(Check("b", "reported", 2.0, None, "y"))
    with pytest.raises(ValueError):
        r.add(Check("a", "pass", 0.0, 1.0, "x"))
    with pytest.raises(ValueError):
        Check("c", "maybe", None, None, "z")
    assert r.passed and r.exit_status == 0 and r["b"].measured == 2.0
    r.add(Check("c", "fail", 3.0, 1.0, "z"))
    assert not r.passed and r.exit_status == 1
    assert r.counts() == {"pass": 1, "fail": 1, "skipped": 0, "reported": 1}
    assert "FAILED" in r.render()


def test_dft_checks_pass():
    assert all(c.status == "pass" for c in dft_checks(0))


def test_fault_injection_broken_normalisation():
    def broken(U):
        return forward_dft(U).__class__(U.grid, 2 * forward_dft(U).coeffs)

    report = verify_suite(seed=0, hooks={"forward_dft": broken}, acceptance=False)
    assert report["dft-parseval"].failed
    assert report["dft-naive-agreement"].failed
    assert report.exit_status == 1


def test_unknown_hook_rejected():
    with pytest.raises(ValueError):
        verify_suite(hooks={"l2_norm": lambda U: 0}, acceptance=False)


def test_run_checks_resonant_config():
    checks = {c.name: c for c in run_checks(load_config(CONFIGS / "linear_energy.toml").replace(n_steps=200))}
    assert all(c.status == "pass" for c in checks.values()), [c.line() for c in checks.values()]


def test_nonresonant_config_skips_drift_checks():
    checks = {c.name: c for c in run_checks(load_config(CONFIGS / "nonresonant.toml"))}
    assert checks["run-l2-conservation"].status == "pass"
    for name in ("run-closed-form", "run-h1-drift-bound", "run-energy-bound"):
        assert checks[name].status == "skipped"
        assert checks[name].detail.startswith("not claimed")


def test_tolerance_below_roundoff_fails():
    cfg = load_config(CONFIGS / "linear_energy.toml").replace(tolerances={"closed_form": 1e-16})
    report = verify_suite(cfg, acceptance=False)
    assert report["run-closed-form"].failed and report["run-closed-form"].measured > 1e-16
    assert report["run-l2-conservation"].status == "pass"


# --- sweeps and CLI -----------------------------------------------------------


def test_sweep_configs_cartesian_product():
    cfg = load_config(CONFIGS / "sweep_cfl.toml")
    configs = sweep_configs(cfg)
    assert [(c.K, c.step["q"]) for c in configs] == [(8, 4), (16, 8), (32, 16)]
    with pytest.raises(ConfigError, match="sweep"):
        sweep_configs(cfg.replace(sweep={"colour": [1]}))
    with pytest.raises(ConfigError, match="sweep"):
        sweep_configs(cfg.replace(sweep=None))


def test_run_sweep_rows():
    cfg = load_config(CONFIGS / "sweep_cfl.toml").replace(n_steps=16)
    rows = run_sweep(cfg)
    assert [r["cfl_number"] / math.pi for r in rows] == pytest.approx([8, 8, 8])
    assert all(r["classification"] == "resonant" for r in rows)
    assert rows == run_sweep(cfg, workers=2)


def test_cli_simulate(tmp_path, capsys):
    assert main(["simulate", str(CONFIGS / "cubic_k4.toml"), "--out-dir", str(tmp_path)]) == 0
    assert len(read_csv(tmp_path / "cubic_k4.csv")) == 101
    summary = json.loads((tmp_path / "cubic_k4.json").read_text())
    assert summary["classification"] == "resonant"
    assert "resonant step" in capsys.readouterr().out


def test_cli_seed_and_tolerance_overrides(tmp_path):
    assert main(["simulate", str(CONFIGS / "cubic_k4.toml"), "--out-dir", str(tmp_path), "--seed", "9",
                 "--tolerance", "closed_form=1e-9"]) == 0
    cfg = json.loads((tmp_path / "cubic_k4.json").read_text())["config"]
    assert cfg["seed"] == 9 and cfg["tolerances"] == {"closed_form": 1e-9}


@pytest.mark.parametrize("bad", ["closed_form", "bogus=1", "closed_form=abc"])
def test_cli_rejects_bad_tolerance(bad):
    with pytest.raises(SystemExit) as info:
        main(["simulate", str(CONFIGS / "cubic_k4.toml"), "--tolerance", bad])
    assert info.value.code == 2


def test_cli_config_errors_exit_2(tmp_path, capsys):
    p = tmp_path / "bad.toml"
    p.write_text('equation = "cubic"\nK = 5\nn_steps = 1\n[step]\np = 1\nq = 2\n[initial]\nkind = "constant"\n')
    assert main(["simulate", str(p)]) == 2
    assert "K" in capsys.readouterr().err
    assert main(["simulate", str(tmp_path / "missing.toml")]) == 2


def test_cli_verify_without_acceptance(tmp_path, capsys):
    code = main(["verify", str(CONFIGS / "nonresonant.toml"), "--skip-acceptance", "--out-dir", str(tmp_path)])
    assert code == 0
    out = capsys.readouterr().out
    assert "SKIPPED" in out and "PASSED" in out
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["passed"] and report["counts"]["skipped"] == 3


def test_cli_verify_failure_exit_1():
    assert main(["verify", str(CONFIGS / "linear_energy.toml"), "--skip-acceptance",
                 "--tolerance", "closed_form=1e-16"]) == 1


def test_cli_bounds(tmp_path, capsys):
    assert main(["bounds", str(CONFIGS / "cubic_k4.toml"), "--out-dir", str(tmp_path)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["bound_constants"]["C1"] == pytest.approx(4 / math.pi)
    assert (tmp_path / "bounds.json").exists()


def test_cli_sweep(tmp_path, capsys):
    assert main(["sweep", str(CONFIGS / "sweep_cfl.toml"), "--out-dir", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "sweep_cfl.csv")
    assert [int(r["K"]) for r in rows] == [8, 16, 32]
