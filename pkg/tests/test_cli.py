"""Command line interface: exit codes, report shapes, determinism."""
from __future__ import annotations

import json
import os
import subprocess
import sys

import pytest

from equisynth import asset_path
from equisynth.cli import main

GAME = str(asset_path("five_player_game.json"))
G1 = str(asset_path("comm_g1.json"))
G2 = str(asset_path("comm_g2.json"))
G3 = str(asset_path("comm_g3.json"))


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_build_text_report(capsys):
    code, out, err = run(capsys, "build", "--game", GAME, "--comm", G1)
    assert code == 0
    assert "protagonist states: 85" in out
    assert "antagonist states: 572" in out
    assert "deviated states: 78" in out
    assert err == ""


def test_build_json_report(capsys):
    code, out, _ = run(capsys, "build", "--game", GAME, "--comm", G2, "--format", "json")
    assert code == 0
    data = json.loads(out)
    stats = data["stats"]
    assert stats["eve_states"] == 79
    assert stats["adam_states"] == 391
    assert data["violations"] == []
    assert stats["eve_states"] <= stats["eve_bound"]
    assert stats["adam_states"] <= stats["adam_bound"]


def test_build_dot_output(capsys, tmp_path):
    target = tmp_path / "arena.dot"
    code, out, _ = run(
        capsys, "build", "--game", GAME, "--comm", G1,
        "--format", "dot", "--out", str(target),
    )
    assert code == 0
    assert out == ""
    assert target.read_text().startswith("digraph epistemic {")


def test_build_state_cap(capsys):
    code, _, err = run(capsys, "build", "--game", GAME, "--comm", G1, "--state-cap", "10")
    assert code == 3
    assert "resource cap" in err


def test_missing_file_is_an_input_error(capsys, tmp_path):
    code, _, err = run(capsys, "build", "--game", str(tmp_path / "nope.json"), "--comm", G1)
    assert code == 2
    assert err.startswith("error:")


def test_solve_found(capsys):
    code, out, _ = run(
        capsys, "solve", "--game", GAME, "--comm", G1,
        "--predicate", "p[2]=1 & p[3]=1 & p[4]=1",
    )
    assert code == 0
    assert "status: found" in out
    assert "payoff: (0,0,1,1,1)" in out
    assert "(v0 v1)^w" in out
    assert "re-verification: pass" in out


def test_solve_not_found(capsys):
    code, out, _ = run(
        capsys, "solve", "--game", GAME, "--comm", G3,
        "--predicate", "p[2]=1 & p[3]=1 & p[4]=1",
        "--main-inf", "v0,v1",
    )
    assert code == 1
    assert "status: not-found" in out


def test_solve_unsatisfiable_predicate(capsys):
    code, out, _ = run(capsys, "solve", "--game", GAME, "--comm", G1, "--predicate", "p[0]=9")
    assert code == 1
    assert "candidates tried: 0" in out


def test_bad_predicate_syntax(capsys):
    code, _, err = run(capsys, "solve", "--game", GAME, "--comm", G1, "--predicate", "p[0]")
    assert code == 2
    assert err.startswith("error:")


def test_unknown_main_inf_vertex(capsys):
    code, _, err = run(capsys, "solve", "--game", GAME, "--comm", G1, "--main-inf", "v0,zz")
    assert code == 2
    assert "zz" in err


def test_solve_report_is_deterministic(capsys):
    argv = ("solve", "--game", GAME, "--comm", G2, "--format", "json",
            "--predicate", "p[2]>=1")
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second


@pytest.fixture()
def report_path(capsys, tmp_path):
    path = tmp_path / "report.json"
    code, _, _ = run(
        capsys, "solve", "--game", GAME, "--comm", G1,
        "--predicate", "p[2]=1 & p[3]=1 & p[4]=1",
        "--format", "json", "--out", str(path),
    )
    assert code == 0
    return path


def test_verify_solve_report(capsys, report_path):
    code, out, _ = run(capsys, "verify", "--game", GAME, "--comm", G1, str(report_path))
    assert code == 0
    assert "status: pass" in out


def test_verify_bare_profile(capsys, report_path, tmp_path):
    profile = json.loads(report_path.read_text())["profile"]
    bare = tmp_path / "profile.json"
    bare.write_text(json.dumps(profile))
    code, out, _ = run(capsys, "verify", "--game", GAME, "--comm", G1, str(bare))
    assert code == 0
    assert "status: pass" in out


def test_verify_tampered_profile(capsys, report_path, tmp_path):
    data = json.loads(report_path.read_text())
    changed = 0
    for block in data["profile"]["punish"]:
        if block["dev"] == ["4"]:
            for row in block["entries"]:
                if row["key"] == "v0|4:0,1,4":
                    row["action"] = {"4": ["a", "a", "a", "a", "a"]}
                    changed += 1
    assert changed
    bad = tmp_path / "tampered.json"
    bad.write_text(json.dumps(data))
    code, out, err = run(capsys, "verify", "--game", GAME, "--comm", G1, str(bad))
    assert code == 4
    assert "status: fail" in out
    assert "suspects {4}" in out
    assert "Traceback" not in err


def test_verify_against_wrong_game(capsys, report_path):
    code, _, err = run(capsys, "verify", "--game", GAME, "--comm", G3, str(report_path))
    assert code == 2
    assert "does not match" in err


def test_verify_wrong_predicate(capsys, report_path):
    code, out, _ = run(
        capsys, "verify", "--game", GAME, "--comm", G1, str(report_path),
        "--predicate", "p[2]=0",
    )
    assert code == 4
    assert "predicate" in out


def test_verify_main_inf_mismatch(capsys, report_path):
    code, out, _ = run(
        capsys, "verify", "--game", GAME, "--comm", G1, str(report_path),
        "--main-inf", "v0p",
    )
    assert code == 4
    assert "--main-inf" in out


def test_verify_garbage_profile(capsys, tmp_path):
    junk = tmp_path / "junk.json"
    junk.write_text('{"hello": 3}')
    code, _, err = run(capsys, "verify", "--game", GAME, "--comm", G1, str(junk))
    assert code == 2
    assert err.startswith("error:")


def test_logging_stays_on_stderr():
    # In a fresh process so the environment variable governs the logging setup.
    argv = [sys.executable, "-m", "equisynth", "build", "--game", GAME, "--comm", G1]
    quiet = subprocess.run(argv, capture_output=True, text=True, env={**os.environ})
    assert quiet.returncode == 0
    assert quiet.stderr == ""
    env = {**os.environ, "EQUISYNTH_LOG": "debug"}
    loud = subprocess.run(argv, capture_output=True, text=True, env=env)
    assert loud.returncode == 0
    assert loud.stdout == quiet.stdout
    assert "equisynth" in loud.stderr
