import json

import jsonschema

from sirkit.cli import EXIT_CONFIG, EXIT_INTEGRATION, EXIT_OK, EXIT_STRICT, main
from sirkit.io import report_schema, verdicts

BASE = {"beta": 0.3, "gamma": 0.1, "init_s": 0.99, "init_i": 0.01, "init_r": 0.0, "t_end": 100.0}


def write_config(tmp_path, data, name="scenario.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def test_simulate_writes_outputs(tmp_path):
    cfg = write_config(tmp_path, BASE)
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "run")]) == EXIT_OK
    report = json.loads((tmp_path / "run" / "report.json").read_text())
    jsonschema.validate(report, report_schema())
    assert report["invariants"]["overall"]
    assert (tmp_path / "run" / "trajectory.csv").read_text().startswith("t,s,i,r,p_i,g_i\n")


def test_simulate_is_byte_identical(tmp_path):
    cfg = write_config(tmp_path, BASE)
    main(["simulate", "--config", cfg, "--out", str(tmp_path / "a")])
    main(["simulate", "--config", cfg, "--out", str(tmp_path / "b")])
    for name in ("trajectory.csv", "report.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_check_reproduces_verdicts(tmp_path):
    cfg = write_config(tmp_path, BASE)
    main(["simulate", "--config", cfg, "--out", str(tmp_path / "run")])
    code = main(
        ["check", "--trajectory", str(tmp_path / "run" / "trajectory.csv"), "--beta", "0.3", "--gamma", "0.1",
         "--out", str(tmp_path / "chk")]
    )
    assert code == EXIT_OK
    sim = json.loads((tmp_path / "run" / "report.json").read_text())
    chk = json.loads((tmp_path / "chk" / "report.json").read_text())
    jsonschema.validate(chk, report_schema())
    assert verdicts(sim) == verdicts(chk)
    assert chk["invariants"]["checks"] == sim["invariants"]["checks"]


def test_check_defaults_to_cwd(tmp_path, monkeypatch):
    cfg = write_config(tmp_path, BASE)
    main(["simulate", "--config", cfg, "--out", str(tmp_path / "run")])
    monkeypatch.chdir(tmp_path)
    assert main(["check", "--trajectory", "run/trajectory.csv", "--beta", "0.3", "--gamma", "0.1"]) == EXIT_OK
    assert (tmp_path / "report.json").exists()


def test_strict_exit_on_failed_check(tmp_path):
    cfg = write_config(tmp_path, BASE)
    main(["simulate", "--config", cfg, "--out", str(tmp_path / "run")])
    lines = (tmp_path / "run" / "trajectory.csv").read_text().splitlines()
    cols = lines[-1].split(",")
    cols[3] = repr(float(cols[3]) + 1e-3)  # R leaks population at the last node
    lines[-1] = ",".join(cols)
    bad = tmp_path / "bad.csv"
    bad.write_text("\n".join(lines) + "\n")
    args = ["check", "--trajectory", str(bad), "--beta", "0.3", "--gamma", "0.1", "--out", str(tmp_path / "c")]
    assert main(args) == EXIT_OK
    report = json.loads((tmp_path / "c" / "report.json").read_text())
    assert "conservation" in report["invariants"]["failing"]
    assert main(args + ["--strict"]) == EXIT_STRICT


def test_check_missing_column_exit_2(tmp_path):
    bad = tmp_path / "short.csv"
    bad.write_text("t,s,i,r,p_i\n0,0.99,0.01,0,0\n1,0.98,0.02,0,0\n")
    assert main(["check", "--trajectory", str(bad), "--beta", "0.3", "--gamma", "0.1"]) == EXIT_CONFIG


def test_zero_beta_names_the_field(tmp_path, caplog):
    cfg = write_config(tmp_path, dict(BASE, beta=0))
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "run")]) == EXIT_CONFIG
    assert "beta" in caplog.text


def test_config_errors_exit_2(tmp_path):
    assert main(["simulate", "--config", str(tmp_path / "missing.json"), "--out", str(tmp_path)]) == EXIT_CONFIG
    cfg = write_config(tmp_path, dict(BASE, gamma=-0.1))
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path)]) == EXIT_CONFIG
    cfg = write_config(tmp_path, dict(BASE, R0=3.0))
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path)]) == EXIT_CONFIG
    assert main(["simulate", "--out", str(tmp_path)]) == EXIT_CONFIG
    assert main(["bogus"]) == EXIT_CONFIG


def test_integration_error_exit_3(tmp_path):
    cfg = write_config(tmp_path, dict(BASE, max_steps=3))
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "run")]) == EXIT_INTEGRATION


def test_sweep(tmp_path):
    cfg = write_config(tmp_path, [BASE, dict(BASE, beta=0.05, t_end=20.0)])
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "run")]) == EXIT_CONFIG
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "run"), "--sweep"]) == EXIT_OK
    second = json.loads((tmp_path / "run" / "scenario_001" / "report.json").read_text())
    assert second["scenario"]["beta"] == 0.05
    assert second["threshold"]["i_monotone"]["status"] == "pass"


def test_samples_option(tmp_path):
    cfg = write_config(tmp_path, BASE)
    main(["simulate", "--config", cfg, "--out", str(tmp_path / "run"), "--samples", "3000"])
    report = json.loads((tmp_path / "run" / "report.json").read_text())
    assert report["invariants"]["n_samples"] >= 3000


def test_levelcurve(tmp_path):
    out = tmp_path / "lc.csv"
    args = ["levelcurve", "--beta", "0.3", "--gamma", "0.1", "--s-min", "0.01", "--s-max", "1", "--n", "50"]
    assert main(args + ["--from-init", "0.99", "0.01", "0", "--out", str(out)]) == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == "s,i,feasible" and len(lines) == 51
    assert main(args + ["--v0", "1.2", "--out", str(out)]) == EXIT_OK
    assert main(args + ["--from-init", "0", "0.5", "0.5", "--out", str(out)]) == EXIT_CONFIG
    bad_range = ["levelcurve", "--beta", "0.3", "--gamma", "0.1", "--v0", "1", "--s-min", "1", "--s-max", "0.5",
                 "--n", "5", "--out", str(out)]
    assert main(bad_range) == EXIT_CONFIG
