import json
import subprocess
import sys

import numpy as np
import pytest

from geoctl.cli import build_parser, load_json, main
from geoctl.export import read_csv, read_report

DRIFT = '{"q":[1,0,0,0],"z":[0,0,0],"w":[0,0,0]}'
CASE_I = json.dumps({
    "drift": {"q": [1, 0, 0, 0], "z": [0, 0, 0], "w": [0, 0, 0]},
    "controls": [{"q": [0, 1, 0, 0], "z": [0, 0, 0], "w": [0, 0, 0]}],
    "range": {"kind": "finite", "dim": 1, "values": [[-1], [1]]},
})


def run(tmp_path, *argv):
    return main([*argv, "--out-dir", str(tmp_path)])


def test_parser_has_subcommands():
    p = build_parser()
    for cmd in ("simulate", "attractors", "reachable", "verify-ics", "larc", "example-pn", "case"):
        args = p.parse_args([cmd] + {"simulate": ["--system", "{}", "--x0", "[1,0,0,0]"],
                                     "attractors": ["--system", "{}", "--controls", "[]"],
                                     "reachable": ["--system", "{}", "--x0", "[1,0,0,0]"],
                                     "verify-ics": ["--system", "{}", "--candidate", "{}"],
                                     "larc": ["--generators", "[]"],
                                     "example-pn": [], "case": ["iii"]}[cmd])
        assert args.seed == 0 and args.tol == 5e-2


def test_load_json_file_and_inline(tmp_path):
    f = tmp_path / "x.json"
    f.write_text("[1, 2]")
    assert load_json(str(f)) == [1, 2]
    assert load_json("[3]") == [3]


def test_simulate(tmp_path, capsys):
    assert run(tmp_path, "simulate", "--field", DRIFT, "--x0", "[0,1,0,0]", "--t", "20", "--h", "0.01") == 0
    rows = read_csv(tmp_path / "trajectory.csv")
    assert rows.shape[1] == 5 and np.allclose(rows[-1, 1:], [1, 0, 0, 0], atol=1e-6)
    assert (tmp_path / "trajectory.csv").read_text().startswith("t,w,x,y,z\n")
    assert "PASS" in capsys.readouterr().out


def test_simulate_schedule(tmp_path):
    rc = run(tmp_path, "simulate", "--system", CASE_I, "--x0", "[1,0,0,0]",
             "--schedule", "[[20, [1]]]", "--h", "0.01", "--json")
    assert rc == 0
    end = read_csv(tmp_path / "trajectory.csv")[-1, 1:]
    assert np.allclose(end, [1 / np.sqrt(2), 1 / np.sqrt(2), 0, 0], atol=1e-6)
    assert run(tmp_path, "simulate", "--system", CASE_I, "--x0", "[1,0,0,0]",
               "--schedule", "[[1, [3]]]") == 2


def test_attractors(tmp_path):
    box = CASE_I.replace('"kind": "finite", "dim": 1, "values": [[-1], [1]]', '"kind": "box", "dim": 1')
    assert run(tmp_path, "attractors", "--system", box, "--controls", "[[-1],[0],[1]]") == 0
    pts = read_csv(tmp_path / "attractors.csv")
    assert np.allclose(pts[1], [1, 0, 0, 0])


def test_reachable_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert run(d, "reachable", "--system", CASE_I, "--x0", "[0,0,1,0]", "--samples", "50",
                   "--seed", "3", "--out", "cloud.csv") == 0
    assert (a / "cloud.csv").read_bytes() == (b / "cloud.csv").read_bytes()
    assert (a / "report.json").read_bytes() == (b / "report.json").read_bytes()


def test_verify_ics_exit_codes(tmp_path):
    good = json.dumps({"kind": "segment", "p1": [2 ** -0.5, 2 ** -0.5, 0, 0],
                       "p2": [2 ** -0.5, -(2 ** -0.5), 0, 0]})
    assert run(tmp_path, "verify-ics", "--system", CASE_I, "--candidate", good,
               "--samples", "500", "--grid", "6") == 0
    rep = read_report(tmp_path / "report.json")
    assert set(rep["checks"]) == {"invariance", "reachability", "attraction"}
    small = json.dumps({"kind": "segment", "p1": [1, 0, 0, 0], "p2": [2 ** -0.5, 2 ** -0.5, 0, 0]})
    assert run(tmp_path, "verify-ics", "--system", CASE_I, "--candidate", small,
               "--samples", "300", "--grid", "6") == 1


def test_larc(tmp_path):
    assert run(tmp_path, "larc", "--generators", "[[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]") == 0
    assert read_report(tmp_path / "report.json")["rank"] == 10
    assert run(tmp_path, "larc", "--generators", "[[1,0,0,0],[0,1,0,0]]") == 1


def test_case_iii_boundary(tmp_path):
    run(tmp_path, "case", "iii", "--samples", "300", "--grid", "4", "--horizon", "10")
    b = read_csv(tmp_path / "boundary.csv")
    assert np.allclose(b[:, 0], 0.7071, atol=5e-5)
    rep = read_report(tmp_path / "report.json")
    assert rep["command"] == "case" and rep["case"] == "iii"


def test_case_fixture_error(tmp_path, capsys):
    assert run(tmp_path, "case", "ii_prime", "--z1", "[0,1,0,0]", "--z2", "[0,1,0,0]") == 2
    assert "great circle" in capsys.readouterr().err


def test_bad_json(tmp_path):
    assert run(tmp_path, "simulate", "--system", "{not json", "--x0", "[1,0,0,0]") == 2


def test_unwritable_out_dir(tmp_path):
    blocker = tmp_path / "f"
    blocker.write_text("")
    assert main(["larc", "--generators", "[[1,0,0,0]]", "--out-dir", str(blocker / "x")]) == 3


def test_example_pn_small(tmp_path):
    rc = run(tmp_path, "example-pn", "--n", "3", "--samples", "40", "--horizon", "5")
    assert rc in (0, 1)
    rep = read_report(tmp_path / "report.json")
    assert rep["larc_rank"] == 8 and rep["checks"]["larc"]["pass"]
    assert rep["checks"]["b_invariance"]["pass"]
    assert read_csv(tmp_path / "boundary.csv").shape == (200, 3)


def test_console_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "geoctl.cli", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and "geoctl" in out.stdout
