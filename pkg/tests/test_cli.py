from __future__ import annotations

import json

import pytest

from reachfuzz.cli import main
from reachfuzz.fuzzer import FuzzConfig
from reachfuzz.frontend import parse_or_raise
from reachfuzz.gen import generate_source

BAD = "inputs 1..5; var a = 1; var a = 2; step(in){}"


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_gen_prints_source(capsys):
    code, out, _ = run(capsys, "gen", "--seed", "3")
    assert code == 0
    assert out == generate_source(seed=3)
    parse_or_raise(out)


def test_gen_writes_file(tmp_path, capsys):
    target = tmp_path / "prog.rrp"
    code, out, _ = run(capsys, "gen", "--seed", "4", "--out", str(target))
    assert code == 0
    assert target.read_text() == generate_source(seed=4)


def test_check_valid_program(tmp_path, capsys):
    f = tmp_path / "p.rrp"
    f.write_text(generate_source(seed=1))
    code, out, _ = run(capsys, "check", str(f))
    assert code == 0
    assert "ok" in out and "alphabet 1..5" in out


def test_check_invalid_program_exit_one(tmp_path, capsys):
    f = tmp_path / "bad.rrp"
    f.write_text(BAD)
    code, out, err = run(capsys, "check", str(f))
    assert code == 1
    assert "duplicate declaration" in out + err


def test_check_missing_file_exit_two(capsys):
    code, out, err = run(capsys, "check", "no_such_file.rrp")
    assert code == 2


def test_analyze_reports_plan_size(tmp_path, capsys):
    f = tmp_path / "p.rrp"
    f.write_text(
        "inputs 1..5; var a = 0; step(in){ if (in == 3) { a = 2; } else { a = 1; } }"
    )
    code, out, _ = run(capsys, "analyze", str(f), "--plan")
    assert code == 0
    assert "|S| = 2" in out
    assert "certificate" in out


def test_analyze_intervals_and_cfg(tmp_path, capsys):
    f = tmp_path / "p.rrp"
    f.write_text("inputs 1..5; var a = 1; step(in){ if (in == 1) { a = 2; } }")
    code, out, _ = run(capsys, "analyze", str(f), "--intervals", "--cfg")
    assert code == 0
    assert "a: [1, 2]" in out
    assert "block 0" in out


def test_fuzz_writes_campaign_and_summary(tmp_path, capsys):
    f = tmp_path / "p.rrp"
    f.write_text(generate_source(seed=3))
    out_dir = tmp_path / "camp"
    code, out, _ = run(capsys, "fuzz", str(f), "--seed", "1",
                       "--max-execs", "800", "--out", str(out_dir))
    assert code == 0
    assert "errors in" in out and "execs" in out
    stats = json.loads((out_dir / "stats.json").read_text())
    assert stats["execs"] >= 800
    assert (out_dir / "timing.json").exists()


def test_fuzz_budget_zero_reports_seeding(tmp_path, capsys):
    f = tmp_path / "p.rrp"
    f.write_text(generate_source(seed=3))
    out_dir = tmp_path / "camp0"
    code, out, _ = run(capsys, "fuzz", str(f), "--seed", "1",
                       "--max-execs", "0", "--out", str(out_dir))
    assert code == 0
    stats = json.loads((out_dir / "stats.json").read_text())
    assert stats["execs"] == 5 + FuzzConfig().random_seed_count


def test_replay_prints_status_and_novelty(tmp_path, capsys):
    f = tmp_path / "p.rrp"
    f.write_text("inputs 1..5; var a = 0; step(in){ if (in == 2) { error 7; } }")
    w = tmp_path / "input.txt"
    w.write_text("1 2\n")
    code, out, _ = run(capsys, "replay", str(f), str(w))
    assert code == 0
    assert "status: error(7)" in out
    assert "steps: 1" in out
    assert "new_branch_bits" in out


def test_oracle_lists_witnesses(tmp_path, capsys):
    f = tmp_path / "p.rrp"
    f.write_text(
        "inputs 1..2; var s = 0; step(in){ "
        "if (s == 1) { if (in == 2) { error 7; } } "
        "if (in == 1) { s = 1; } }"
    )
    code, out, _ = run(capsys, "oracle", str(f))
    assert code == 0
    assert "error 7: reachable, witness=1 2, len=2" in out


def test_report_csv_ascending_and_verified(tmp_path, capsys):
    f = tmp_path / "p.rrp"
    f.write_text(generate_source(seed=3))
    out_dir = tmp_path / "camp"
    run(capsys, "fuzz", str(f), "--seed", "1",
        "--max-execs", "2000", "--out", str(out_dir))
    code, out, _ = run(capsys, "report", str(out_dir), str(f))
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 10
    ids = [int(l.split(",")[0]) for l in lines]
    assert ids == sorted(ids) == list(range(1, 11))
    for line in lines:
        k, verdict = line.split(",")
        assert verdict in ("error_reachable", "UNKNOWN")
    assert any(l.endswith("error_reachable") for l in lines)


def test_report_missing_campaign_exit_two(tmp_path, capsys):
    f = tmp_path / "p.rrp"
    f.write_text(generate_source(seed=3))
    code, out, err = run(capsys, "report", str(tmp_path / "nope"), str(f))
    assert code == 2


def test_main_rejects_unknown_command(capsys):
    with pytest.raises(SystemExit):
        main(["garbage"])
