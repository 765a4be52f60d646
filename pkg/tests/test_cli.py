import json
import subprocess
import sys

import pytest

from amplikit.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_chords_enum_lists_three_diagrams(capsys):
    code, out, _ = run(capsys, "chords", "enum", "--n", "6", "--k", "1")
    assert code == 0
    assert [l for l in out.splitlines() if not l.startswith("#")] == ["(1,2,3,4)", "(1,2,4,5)", "(2,3,4,5)"]


def test_cells_count_8_2(capsys):
    code, out, _ = run(capsys, "cells", "count", "--n", "8", "--k", "2")
    assert code == 0 and out.strip() == "176"


def test_tilings_verify_7_2(capsys):
    code, out, _ = run(capsys, "tilings", "verify", "--n", "7", "--k", "2", "--samples", "40", "--seed", "0",
                       "--json")
    assert code == 0 and all(rep["ok"] for rep in json.loads(out))


def test_usage_errors_exit_2(capsys):
    assert run(capsys, "chords", "enum", "--n", "6")[0] == 2
    assert run(capsys, "nonsense")[0] == 2
    code, _, err = run(capsys, "tile", "dominoes", "--n", "7", "--chords", "1,2,2,3")
    assert code == 2 and "error" in err


def test_verification_failure_exits_1(capsys):
    code, out, err = run(capsys, "panel", "run", "<1 2 3 4>", "<1 2 3 5>", "--size", "4")
    assert code == 1 and "verification failed" in err
    assert json.loads(out)["equal"] is False
    code, out, _ = run(capsys, "panel", "run", "<1 2 3|4 5|6 7 8>",
                       "<1 2 3 4>*<5 6 7 8> + -<1 2 3 5>*<4 6 7 8>")
    assert code == 0


@pytest.mark.parametrize("argv", [
    ["tile", "dominoes", "--n", "8", "--chords", "2,3,5,6;1,2,6,7", "--json"],
    ["tile", "signs", "--n", "8", "--chords", "2,3,5,6;1,2,6,7", "--samples", "4"],
    ["tile", "functionaries", "--n", "7", "--chords", "2,3,4,5", "--json"],
    ["tile", "membership", "--n", "8", "--chords", "2,3,5,6;1,2,6,7", "--json"],
    ["tile", "invert", "--n", "7", "--chords", "2,3,4,5"],
    ["seed", "build", "--n", "8", "--chords", "2,3,5,6;1,2,6,7", "--json"],
    ["seed", "build", "--rectangles", "3", "6"],
    ["seed", "dot", "--rectangles", "2", "5"],
    ["seed", "verify", "--n", "8", "--chords", "2,3,5,6;1,2,6,7", "--mutations", "5"],
    ["plabic", "trip"],
    ["plabic", "positroid", "--json"],
    ["plabic", "move", "--count", "5"],
    ["cells", "enum", "--n", "6", "--k", "1"],
    ["cells", "matrix", "--n", "7", "--chords", "2,3,4,5", "--json"],
    ["chords", "relations", "--n", "9", "--chords", "3,4,5,6;1,2,7,8", "--json"],
    ["tilings", "enum", "--n", "6", "--k", "1"],
    ["tilings", "count", "--n", "7", "--k", "2"],
])
def test_commands_succeed_and_are_deterministic(capsys, argv):
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first[0] == 0
    assert first[1] == second[1] and first[1]
    if "--json" in argv:
        json.loads(first[1])


def test_console_entry_point_is_byte_identical():
    cmd = [sys.executable, "-m", "amplikit.cli", "tile", "signs", "--n", "8", "--chords", "2,3,5,6;1,2,6,7",
           "--samples", "3", "--seed", "4"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and a
