"""Golden outputs for a fixed set of CLI invocations, plus exit-code behavior.

Set UPDATE_GOLDENS=1 to rewrite the files under tests/goldens.
"""

import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from cotangent.cli import main

GOLDENS = Path(__file__).parent / "goldens"

CASES = {
    "cohomology_torus7_Q": ["cohomology", "--complex", "torus7", "--field", "Q"],
    "twisted_circle3_F7": ["twisted", "--monodromy", "2", "--field", "F7", "--format", "json"],
    "homss_torus7_F7": ["homss", "--complex", "torus7", "--monodromy=2,3", "--monodromy1=2,3", "--field", "F7"],
    "corner_rank2": ["corner", "--base-dims", "1,0,1", "--fiber-dims", "0:2", "--h0", "1"],
    "barres_sphere2_Q": ["barres", "--complex", "sphere2", "--field", "Q", "--w", "2"],
    "loopspace_sphere3": ["loopspace", "--sset", "sphere3_min", "--depth", "6", "--format", "json"],
    "dualize_A3": ["dualize", "--quiver", "A3"],
    "tower_square_S3": ["tower", "--quiver", "square", "--object", "S3", "--format", "json"],
    "towerss_A3_S1": ["towerss", "--quiver", "A3", "--object", "S1"],
    "cover_circle3_F7": ["cover", "--monodromy", "2", "--field", "F7", "--format", "json"],
    "ext_Z2_Q": ["ext", "--module", "Z2", "--field", "Q", "--top", "3", "--format", "json"],
    "obstructions_Z3_Q": ["obstructions", "--module", "Z3", "--field", "Q", "--top", "4"],
}


def run_cli(args, hashseed="0"):
    env = dict(os.environ, PYTHONHASHSEED=hashseed)
    return subprocess.run([sys.executable, "-m", "cotangent", *args], capture_output=True, env=env, timeout=120)


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden(name):
    first = run_cli(CASES[name], "0")
    second = run_cli(CASES[name], "12345")
    assert first.returncode == 0, first.stderr.decode()
    assert first.stdout == second.stdout
    path = GOLDENS / f"{name}.txt"
    if os.environ.get("UPDATE_GOLDENS"):
        path.write_bytes(first.stdout)
    assert first.stdout == path.read_bytes()


def test_json_envelope(capsys):
    assert main(["ext", "--module", "Z1", "--field", "F3", "--top", "1", "--format", "json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["command"] == "ext" and out["schema_version"] == 1
    assert out["result"]["ext"] == {"0": 1, "1": 1}


def test_selftest_exits_zero():
    r = run_cli(["selftest"])
    assert r.returncode == 0, r.stdout.decode() + r.stderr.decode()
    assert b"FAIL" not in r.stdout


@pytest.mark.parametrize("args", [
    ["cohomology", "--complex", "no_such_complex"],
    ["cohomology", "--complex", "torus7", "--field", "F4"],
    ["twisted", "--monodromy", "1,2,3"],
    ["loopspace", "--sset", "sphere2_min", "--depth", "-1"],
    ["mutate", "--quiver", "A3", "--object", "P7", "--by", "P0"],
    ["nonsense"],
])
def test_bad_input_exits_two(args, capsys):
    with pytest.raises(SystemExit) as e:
        sys.exit(main(args))
    assert e.value.code == 2


def test_invariant_violation_exits_three(tmp_path, capsys):
    # triangle (0,1,2) with transport 2 on one edge only: not flat
    data = {
        "complex": "sphere2",
        "field": "Q",
        "edges": {"0,1": [[2]]},
    }
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data))
    assert main(["twisted", "--system", str(path)]) == 3
