"""Command line behavior: exit codes, output schemas, config handling.

Everything runs in-process through main() except one subprocess test that
exercises the installed console script end to end.
"""

import json
import pathlib
import shutil
import subprocess
import sys

import pytest

from yrelay.cli import (
    EXIT_FAILURE,
    EXIT_OK,
    EXIT_USAGE,
    load_config,
    main,
    parse_dof_spec,
    parse_sweep_spec,
)

GOLDEN = pathlib.Path(__file__).parent / "golden" / "sweep_small.csv"
SWEEP_ARGS = [
    "--quiet", "sweep", "--k", "3", "--m", "4", "--n", "3", "--dof", "uniform:1",
    "--sweep-db", "10:10:30", "--trials", "5", "--seed", "42", "--mode", "genie",
    "--out", "csv",
]


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


# -------------------------------------------------------------------- parsing


def test_parse_dof_entries():
    d = parse_dof_spec("1-2=1,2-1=1/2", 4)
    assert str(d.get(1, 2)) == "1"
    assert str(d.get(2, 1)) == "1/2"
    assert d.get(3, 4) == 0


def test_parse_dof_uniform():
    d = parse_dof_spec("uniform:2/3", 3)
    assert all(v == pytest.approx(2 / 3) for v in map(float, d.as_tuple()))


def test_parse_dof_rejects_garbage():
    import argparse

    for bad in ("1-2", "12=1", "1-2=", "1-2=x", "1-2=1,1-2=2"):
        with pytest.raises(argparse.ArgumentTypeError):
            parse_dof_spec(bad, 4)


def test_parse_sweep():
    assert parse_sweep_spec("30:5:60") == tuple(float(x) for x in range(30, 65, 5))
    assert parse_sweep_spec("10:10:10") == (10.0,)
    import argparse

    for bad in ("30:5", "a:b:c", "30:0:60", "60:5:30"):
        with pytest.raises(argparse.ArgumentTypeError):
            parse_sweep_spec(bad)


# ------------------------------------------------------------------ dof verbs


def test_dof_check_member_exits_zero(capsys):
    code, out, _ = run_cli(capsys, "dof", "check", "--k", "4", "--n", "6", "--dof", "uniform:1")
    assert code == EXIT_OK
    blob = json.loads(out)
    assert blob["member"] is True
    assert blob["construction_feasible"] is True
    assert len(blob["tight_permutations"]) == 24


def test_dof_check_violation_exits_one(capsys):
    code, out, _ = run_cli(capsys, "dof", "check", "--k", "4", "--n", "6", "--dof", "1-2=7")
    assert code == EXIT_FAILURE
    blob = json.loads(out)
    assert blob["member"] is False
    assert blob["witness"] is not None
    assert blob["max_value"] == "7"


def test_dof_sumdof(capsys):
    code, out, _ = run_cli(capsys, "dof", "sumdof", "--k", "4", "--n", "6")
    assert code == EXIT_OK
    blob = json.loads(out)
    assert blob["sum_dof"] == "12"


def test_dof_gap(capsys):
    code, out, _ = run_cli(capsys, "dof", "gap", "--k", "4", "--n", "6")
    assert code == EXIT_OK
    blob = json.loads(out)
    assert blob["gap_found"] is True
    assert blob["construction_feasible"] is False


def test_dof_vertices(capsys):
    code, out, _ = run_cli(capsys, "dof", "vertices-k3", "--n", "6")
    assert code == EXIT_OK
    blob = json.loads(out)
    assert blob["count"] == 12


# ------------------------------------------------------------ plan / simulate


def test_plan_json(capsys):
    code, out, _ = run_cli(capsys, "plan", "--k", "4", "--n", "6", "--dof", "uniform:1")
    assert code == EXIT_OK
    blob = json.loads(out)
    assert blob["T"] == 1 and blob["padding"] == 0
    assert len(blob["slots"]) == 6


def test_plan_infeasible_exits_one(capsys):
    code, out, err = run_cli(capsys, "plan", "--k", "4", "--n", "6", "--dof", "1-2=7")
    assert code == EXIT_FAILURE
    assert out == ""
    assert "Infeasible" in err
    assert "Traceback" not in err


def test_simulate_reports_round(capsys):
    code, out, _ = run_cli(
        capsys, "simulate", "--k", "4", "--m", "6", "--n", "6",
        "--power-db", "40", "--seed", "3", "--no-noise",
    )
    assert code == EXIT_OK
    blob = json.loads(out)
    assert blob["mode"] == "genie"
    assert max(blob["rel_errors"].values()) <= 1e-8


def test_mppi_check(capsys):
    code, out, _ = run_cli(capsys, "mppi-check", "--k", "3", "--n", "4", "--m", "6",
                           "--trials", "20", "--seed", "1")
    assert code == EXIT_OK
    blob = json.loads(out)
    assert blob["ok"] is True
    assert blob["max_diagonalization_residual"] <= 1e-9


# ---------------------------------------------------------------------- sweep


def test_sweep_matches_golden_csv(capsys):
    code, out, _ = run_cli(capsys, *SWEEP_ARGS)
    assert code == EXIT_OK
    assert out.encode() == GOLDEN.read_bytes()


def test_sweep_repeat_is_byte_identical(capsys):
    _, first, _ = run_cli(capsys, *SWEEP_ARGS)
    _, second, _ = run_cli(capsys, *SWEEP_ARGS)
    assert first == second


def test_sweep_json_output(capsys):
    args = [a if a != "csv" else "json" for a in SWEEP_ARGS]
    code, out, _ = run_cli(capsys, *args)
    assert code == EXIT_OK
    blob = json.loads(out)
    assert len(blob["rows"]) == 3
    assert blob["provenance"]["seed"] == 42


def test_sweep_quiet_controls_stderr(capsys):
    _, _, err = run_cli(capsys, *SWEEP_ARGS)
    assert err == ""
    noisy_args = [a for a in SWEEP_ARGS if a != "--quiet"]
    _, _, err = run_cli(capsys, *noisy_args)
    assert "sweep:" in err


def test_sweep_infeasible_exits_one(capsys):
    code, _, err = run_cli(capsys, "--quiet", "sweep", "--k", "4", "--n", "6", "--m", "6",
                           "--dof", "1-2=7", "--sweep-db", "10:10:10", "--trials", "1")
    assert code == EXIT_FAILURE
    assert "Infeasible" in err


def test_console_script_end_to_end():
    exe = shutil.which("yrelay")
    assert exe, "console script not installed"
    proc = subprocess.run([exe] + SWEEP_ARGS, capture_output=True)
    assert proc.returncode == EXIT_OK
    assert proc.stdout == GOLDEN.read_bytes()


# --------------------------------------------------------------------- config


def test_config_file_supplies_defaults(tmp_path, capsys):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("# experiment setup\nk = 3\nn = 2\n")
    code, out, _ = run_cli(capsys, "--config", str(cfg), "dof", "sumdof")
    assert code == EXIT_OK
    assert json.loads(out)["sum_dof"] == "4"


def test_flags_override_config(tmp_path, capsys):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("k = 3\nn = 2\n")
    code, out, _ = run_cli(capsys, "--config", str(cfg), "dof", "sumdof", "--n", "3")
    assert code == EXIT_OK
    assert json.loads(out)["sum_dof"] == "6"


def test_config_parser_grammar(tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("\n# comment only\nk = 4  # trailing comment\nmode = raw\n")
    assert load_config(str(cfg)) == {"k": "4", "mode": "raw"}


def test_config_errors_exit_two(tmp_path, capsys):
    missing = tmp_path / "nope.cfg"
    code, _, err = run_cli(capsys, "--config", str(missing), "dof", "sumdof")
    assert code == EXIT_USAGE
    assert "config error" in err

    bad = tmp_path / "bad.cfg"
    bad.write_text("not a key value line\n")
    code, _, err = run_cli(capsys, "--config", str(bad), "dof", "sumdof")
    assert code == EXIT_USAGE

    unknown = tmp_path / "unknown.cfg"
    unknown.write_text("frobnicate = 1\n")
    code, _, err = run_cli(capsys, "--config", str(unknown), "dof", "sumdof")
    assert code == EXIT_USAGE
    assert "unknown config key" in err


def exit_code(argv):
    # argparse reports its own failures through SystemExit(2); values parsed
    # after dispatch come back as a plain return code
    try:
        return main(argv)
    except SystemExit as exc:
        return exc.code


def test_usage_errors_exit_two(capsys):
    assert exit_code(["sweep", "--sweep-db", "oops"]) == EXIT_USAGE
    assert exit_code(["dof", "check", "--dof", "banana"]) == EXIT_USAGE
    assert exit_code(["not-a-command"]) == EXIT_USAGE
    err = capsys.readouterr().err
    assert "Traceback" not in err
