import csv
import io
import json
import math

import pytest

from confined_compton import cli
from confined_compton.errors import SearchError
from confined_compton.radial import StateSpec


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_solve_json_schema(capsys):
    code, out, _ = run(capsys, "solve", "--state", "1,0", "--state", "2,1", "--rc", "2", "--rc", "inf",
                       "--moments=-1,2,4", "--alphas", "3")
    assert code == cli.EXIT_OK
    doc = json.loads(out)
    assert doc["schema"] == 1 and doc["command"] == "solve"
    recs = doc["records"]
    assert [(r["state"], r["rc"]) for r in recs] == [("1s", 2.0), ("2p", 2.0), ("1s", "inf"), ("2p", "inf")]
    r = recs[0]
    assert r["energy_au"]["value"] == pytest.approx(-0.125, abs=1e-11)
    # every number travels with its tolerance
    for key in ("energy_au", "J0_au", "p2_virial_au", "p4_position_au", "shannon", "onicescu_au"):
        assert set(r[key]) == {"value", "tol"}
    assert set(r["moments_au"]) == {"-1", "2", "4"}
    assert r["moments_au"]["4"]["value"] == pytest.approx(r["p4_position_au"]["value"])
    assert recs[2]["moments_au"]["4"]["value"] == pytest.approx(5.0, rel=1e-8)
    assert r["diagnostics"]["node_count"] == 0


def test_solve_csv_has_unit_header(capsys):
    code, out, _ = run(capsys, "solve", "--state", "3,2", "--rc", "0.5", "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    header = rows[0]
    for col in ("rc_au", "energy_au", "J0_au", "p_m1_au", "p2_au", "tol_energy", "tail_bound"):
        assert col in header
    assert len(rows) == 2 and len(rows[1]) == len(header)
    assert float(rows[1][header.index("energy_au")]) == pytest.approx(63.160184467379366, rel=1e-10)


def test_profile_csv_and_json(capsys):
    code, out, _ = run(capsys, "profile", "--state", "1,0", "--q-max", "4", "--points", "5", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 5 and "q_au" in rows[0] and "J_au" in rows[0]
    assert float(rows[0]["J_au"]) == pytest.approx(8 / (3 * math.pi), rel=1e-10)
    code, out, _ = run(capsys, "profile", "--state", "1,0", "--rc", "1", "--points", "3")
    prof = json.loads(out)["profiles"][0]
    assert prof["q"] == [0.0, 5.0, 10.0] and len(prof["entropy_density"]) == 3


def test_scan_json(capsys):
    code, out, _ = run(capsys, "scan", "--n-max", "3", "--l-max", "1", "--rc", "inf", "--quantity", "onicescu")
    assert code == 0
    rows = json.loads(out)["rows"]
    assert [(r["l"], r["n"]) for r in rows] == [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]
    assert rows[0]["value"] == pytest.approx(7 / (8 * math.pi), abs=1e-10)


def test_env_var_and_out_flag(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(cli.OUT_ENV, str(tmp_path / "env"))
    code, out, _ = run(capsys, "solve", "--state", "1,0", "--format", "csv")
    assert code == 0 and out == ""
    assert (tmp_path / "env" / "solve.csv").read_text().startswith("state,")
    target = tmp_path / "explicit.json"
    assert run(capsys, "solve", "--out", str(target))[0] == 0
    assert json.loads(target.read_text())["schema"] == 1


def test_determinism_and_parallel_order(tmp_path, capsys):
    args = ["solve", "--state", "1,0", "--state", "2,0", "--state", "3,2", "--rc", "0.7", "--rc", "4"]
    outs = []
    for extra in (["--jobs", "1"], ["--jobs", "2"], ["--jobs", "1"]):
        path = tmp_path / f"run{len(outs)}.json"
        assert cli.main(args + extra + ["--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1] == outs[2]


def test_io_failure_exit_code(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    code, _, err = run(capsys, "solve", "--out", str(blocker / "sub" / "out.json"))
    assert code == cli.EXIT_IO and "I/O failure" in err


def test_accuracy_failure_exit_code(capsys):
    # a cutoff far below the momentum spread fails the normalization check
    code, out, _ = run(capsys, "solve", "--state", "1,0", "--rc", "1", "--pmax-override", "0.5")
    assert code == cli.EXIT_ACCURACY
    assert json.loads(out)["records"][0]["error"] == "AccuracyError"


def test_solver_failure_is_recorded_and_others_continue(monkeypatch, capsys):
    real = cli.compute

    def flaky(spec, *a, **kw):
        if spec.n == 2:
            raise SearchError("no bracket")
        return real(spec, *a, **kw)

    monkeypatch.setattr(cli, "compute", flaky)
    code, out, _ = run(capsys, "solve", "--state", "1,0", "--state", "2,0", "--state", "3,0", "--rc", "5")
    assert code == cli.EXIT_SOLVER
    recs = json.loads(out)["records"]
    assert [r.get("error") for r in recs] == [None, "SearchError", None]


def test_bad_input_is_a_usage_error(capsys):
    for argv in (["solve", "--state", "2,2"], ["solve", "--rc", "-1"], ["solve", "--state", "x"],
                 ["scan", "--n-max", "12"]):
        with pytest.raises(SystemExit) as e:
            cli.main(argv)
        assert e.value.code == 2
    capsys.readouterr()


def test_reproduce_reports_failures(monkeypatch, capsys):
    from confined_compton.reproduce import Cell

    cells = [Cell(1, "1s", 1.0, 1.0, "J0", 1.0, 1.0, 1e-4, True, "printed", ""),
             Cell(1, "2s", 1.0, 1.0, "J0", 1.1, 1.0, 1e-4, True, "printed", "")]
    monkeypatch.setattr(cli, "reproduce", lambda table, qspec: cells)
    code, out, err = run(capsys, "reproduce", "--table", "1", "--format", "csv")
    assert code == cli.EXIT_ACCURACY
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["status"] for r in rows] == ["pass", "fail"]
    assert "2s" in err and "1s" not in err


def test_run_config_validation():
    with pytest.raises(Exception):
        cli.RunConfig(fmt="xml")
    cfg = cli.RunConfig(states=((1, 0), (2, 1)), rcs=(1.0, math.inf))
    assert cfg.specs()[1] == StateSpec(1.0, 1.0, 2, 1)
    assert not cfg.specs()[3].confined
