import json
import subprocess
import sys

import pytest

from rank2hecke.cli import CACHE_ENV, main, validate_report


def _strip_durations(data):
    for g in data["groups"]:
        for st in g["stages"]:
            st.pop("duration_ms")
    return data


@pytest.fixture(scope="module")
def g4_g6_report(tmp_path_factory):
    out = tmp_path_factory.mktemp("cli") / "report.json"
    code = main(["verify", "--groups", "g4,G6", "--output", str(out), "--no-cache"])
    return code, json.loads(out.read_text())


def test_verify_two_groups(g4_g6_report, capsys):
    code, data = g4_g6_report
    assert code == 0
    validate_report(data)
    assert [g["group"] for g in data["groups"]] == ["G4", "G6"]
    assert all(g["pass"] for g in data["groups"])
    stages = {st["name"]: st for st in data["groups"][0]["stages"]}
    assert stages["det-exact"]["details"]["determinant"] == "-c0^96"


def test_report_is_reproducible(g4_g6_report, tmp_path):
    out = tmp_path / "again.json"
    assert main(["verify", "--groups", "G4,G6", "--output", str(out), "--no-cache"]) == 0
    assert _strip_durations(json.loads(out.read_text())) == _strip_durations(g4_g6_report[1])


def test_summary_table_printed(tmp_path, capsys):
    assert main(["verify", "--groups", "G12", "--checks", "table,det-exact",
                 "--output", str(tmp_path / "r.json")]) == 0
    text = capsys.readouterr().out
    assert "G12" in text and "-a0^576" in text and "exact" in text and "PASS" in text


@pytest.mark.parametrize("argv", [
    ["verify", "--groups", "g99"],
    ["verify", "--checks", "gram,nope"],
    ["verify", "--prime", "2147483648"],
    ["verify", "--prime", "101"],
    ["verify", "--trials", "0"],
    ["verify", "--bogus-flag"],
    ["frobnicate"],
])
def test_usage_errors_exit_2(argv, capsys):
    assert main(argv) == 2
    assert capsys.readouterr().err


def test_dump_catalog(tmp_path):
    path = tmp_path / "cat.json"
    assert main(["dump-catalog", str(path)]) == 0
    assert len(json.loads(path.read_text())["groups"]) == 12


def test_cache_from_environment(tmp_path, monkeypatch):
    cache = tmp_path / "cache"
    monkeypatch.setenv(CACHE_ENV, str(cache))
    args = ["verify", "--groups", "G4", "--checks", "table", "--output", str(tmp_path / "r.json")]
    assert main(args) == 0
    assert list(cache.glob("*.json"))
    first = json.loads((tmp_path / "r.json").read_text())["groups"][0]["cache_hash"]
    assert main(args) == 0
    assert json.loads((tmp_path / "r.json").read_text())["groups"][0]["cache_hash"] == first


def test_parallel_jobs(tmp_path):
    out = tmp_path / "r.json"
    assert main(["verify", "--groups", "G4,G12", "--checks", "table,relations", "--jobs", "2",
                 "--output", str(out)]) == 0
    assert [g["group"] for g in json.loads(out.read_text())["groups"]] == ["G4", "G12"]


def test_console_script_entry():
    proc = subprocess.run([sys.executable, "-m", "rank2hecke.cli", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and "rank2hecke" in proc.stdout
