import json
import subprocess
import sys
from pathlib import Path

import pytest

from set2seu.cli import EXIT_MISSING_STAGE, EXIT_OK, EXIT_PARSE, main

DATA = Path(__file__).parent / "data"


def run_cli(args):
    return main([str(a) for a in args])


def read_json(path):
    return json.loads(Path(path).read_text())


def strip_timestamp(text):
    return "\n".join(l for l in text.splitlines() if '"generated_at"' not in l)


def test_run_wire_pipeline(tmp_path, capsys):
    out = tmp_path / "out"
    assert run_cli(["run", "--input", DATA / "wire.bench", "--out", out]) == EXIT_OK
    report = read_json(out / "report.json")
    assert report["methods"]["static"]["total_faults"] == "1"
    assert report["methods"]["propagated"]["total_faults"] == "1"
    assert report["methods"]["random"]["total_faults"] == "1"
    for name in ["cones.json", "sites.json", "sets.json", "patterns.json", "report.csv"]:
        assert (out / name).exists()


def test_cone_chain_sets_json_matches_cone_table(tmp_path):
    out = tmp_path / "out"
    assert run_cli(["run", "--input", DATA / "cone_chain.bench", "--out", out]) == EXIT_OK
    cones = read_json(out / "sets.json")["cones"]
    assert cones == [
        {"cone": "A", "members": ["A", "B"], "multiplicity": 2},
        {"cone": "B", "members": ["A", "B", "C"], "multiplicity": 3},
        {"cone": "C", "members": ["B", "C", "D"], "multiplicity": 3},
        {"cone": "D", "members": ["C", "D"], "multiplicity": 2},
    ]


def test_two_runs_are_byte_stable(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert run_cli(["run", "--input", DATA / "fanout_demo.bench", "--out", out]) == EXIT_OK
    for name in ["cones.json", "sites.json", "sets.json", "sets.csv", "patterns.json", "report.csv"]:
        assert (a / name).read_bytes() == (b / name).read_bytes()
    ra = strip_timestamp((a / "report.json").read_text())
    rb = strip_timestamp((b / "report.json").read_text())
    assert ra == rb


def test_stage_composition_equals_full_run(tmp_path):
    staged, full = tmp_path / "staged", tmp_path / "full"
    src = DATA / "divergent3.bench"
    for cmd in ["parse", "cones", "sets", "propagate", "report"]:
        assert run_cli([cmd, "--input", src, "--out", staged]) == EXIT_OK
    assert run_cli(["run", "--input", src, "--out", full]) == EXIT_OK
    for name in ["cones.json", "sites.json", "sets.json", "patterns.json", "report.csv"]:
        assert (staged / name).read_bytes() == (full / name).read_bytes()
    assert strip_timestamp((staged / "report.json").read_text()) == strip_timestamp(
        (full / "report.json").read_text()
    )


def test_report_consumes_stage_artifacts(tmp_path):
    out = tmp_path / "out"
    src = DATA / "divergent3.bench"
    for cmd in ["sets", "propagate"]:
        assert run_cli([cmd, "--input", src, "--out", out]) == EXIT_OK
    assert run_cli(["report", "--out", out]) == EXIT_OK
    fresh = tmp_path / "fresh"
    assert run_cli(["run", "--input", src, "--out", fresh]) == EXIT_OK
    assert strip_timestamp((out / "report.json").read_text()) == strip_timestamp(
        (fresh / "report.json").read_text()
    )


def test_missing_upstream_artifact_exit_4(tmp_path):
    out = tmp_path / "empty"
    out.mkdir()
    assert run_cli(["report", "--out", out]) == EXIT_MISSING_STAGE


def test_parse_error_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.bench"
    bad.write_text("INPUT(a)\ng = AND(a, zz)\n")
    assert run_cli(["parse", "--input", bad, "--out", tmp_path / "o"]) == EXIT_PARSE
    err = capsys.readouterr().err
    assert "line 2" in err


def test_missing_input_exit_3(tmp_path):
    rc = run_cli(["run", "--input", tmp_path / "nope.bench", "--out", tmp_path / "o"])
    assert rc == 3


def test_sfi_only_population(capsys):
    assert run_cli(["report", "--sfi-only", "--population", 4140]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    plans = {p["margin"]: p["n"] for p in data["plans"]}
    assert plans[0.05] == 352
    assert plans[0.01] == 2893
    assert plans[0.001] == 4122


def test_sfi_only_requires_population(capsys):
    assert run_cli(["report", "--sfi-only"]) == EXIT_PARSE


def test_config_file_with_cli_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "# pipeline settings\n"
        f"input = {DATA / 'divergent.bench'}\n"
        "margins = 0.05, 0.01\n"
        "confidence = 95\n"
        "pattern-cap = 16\n"
    )
    out = tmp_path / "out"
    assert run_cli(["run", "--config", cfg, "--out", out, "--margins", "0.05"]) == EXIT_OK
    report = read_json(out / "report.json")
    assert report["config"]["margins"] == [0.05]
    assert report["config"]["pattern_cap"] == 16


def test_bad_config_key_rejected(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("frobnicate = 3\n")
    assert run_cli(["run", "--config", cfg]) == EXIT_PARSE


def test_json_circuit_input_equivalent(tmp_path):
    bench_out = tmp_path / "bench"
    assert run_cli(["parse", "--input", DATA / "divergent3.bench", "--out", bench_out]) == EXIT_OK
    json_in = bench_out / "circuit.json"
    json_run = tmp_path / "fromjson"
    bench_run = tmp_path / "frombench"
    assert run_cli(["run", "--input", json_in, "--out", json_run]) == EXIT_OK
    assert run_cli(["run", "--input", DATA / "divergent3.bench", "--out", bench_run]) == EXIT_OK
    assert (json_run / "sets.json").read_bytes() == (bench_run / "sets.json").read_bytes()
    assert (json_run / "patterns.json").read_bytes() == (bench_run / "patterns.json").read_bytes()


def test_exclude_flag_removes_sites(tmp_path):
    out = tmp_path / "out"
    assert run_cli(
        ["cones", "--input", DATA / "cone_chain.bench", "--out", out, "--exclude", "x12,pa"]
    ) == EXIT_OK
    sites = read_json(out / "sites.json")
    names = {s["site_net"] for s in sites}
    assert "x12" not in names
    for s in sites:
        assert "x12" not in s["represented_nets"]
        assert "pa" not in s["represented_nets"]


def test_jobs_flag_stable_output(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run_cli(["propagate", "--input", DATA / "divergent3.bench", "--out", a, "--jobs", 1]) == EXIT_OK
    assert run_cli(["propagate", "--input", DATA / "divergent3.bench", "--out", b, "--jobs", 2]) == EXIT_OK
    assert (a / "patterns.json").read_bytes() == (b / "patterns.json").read_bytes()


def test_console_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "set2seu", "report", "--sfi-only", "--population", "511"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    data = json.loads(proc.stdout)
    assert {p["margin"]: p["n"] for p in data["plans"]}[0.05] == 220


def test_export_cnf_writes_dimacs_per_site(tmp_path):
    out = tmp_path / "out"
    rc = run_cli(
        ["propagate", "--input", DATA / "divergent.bench", "--out", out, "--export-cnf"]
    )
    assert rc == EXIT_OK
    files = sorted((out / "cnf").glob("site_*.cnf"))
    assert len(files) == 4
    text = files[0].read_text()
    assert text.splitlines()[0].startswith("c miter for SET site")
    assert any(line.startswith("p cnf ") for line in text.splitlines())


def test_all_nets_mode_runs(tmp_path):
    out_all = tmp_path / "all"
    out_c = tmp_path / "collapsed"
    src = DATA / "divergent.bench"
    assert run_cli(["run", "--input", src, "--out", out_all, "--mode", "all_nets"]) == EXIT_OK
    assert run_cli(["run", "--input", src, "--out", out_c]) == EXIT_OK
    all_sites = read_json(out_all / "sites.json")
    collapsed = read_json(out_c / "sites.json")
    assert len(all_sites) >= len(collapsed)
    assert {s["site_net"] for s in collapsed} <= {s["site_net"] for s in all_sites}


def test_verbose_per_site_timing_on_stderr(tmp_path, capsys):
    out = tmp_path / "out"
    rc = run_cli(["propagate", "--input", DATA / "wire.bench", "--out", out, "--verbose"])
    assert rc == EXIT_OK
    err = capsys.readouterr().err
    assert "site x:" in err


def test_overflow_flag_keeps_exit_zero(tmp_path):
    out = tmp_path / "out"
    rc = run_cli(
        ["run", "--input", DATA / "fanout_demo.bench", "--out", out, "--pattern-cap", "2"]
    )
    assert rc == EXIT_OK
    pats = read_json(out / "patterns.json")
    assert any(s["overflow"] for s in pats["sites"])
    report = read_json(out / "report.json")
    assert report["overflow_sites"] >= 1
