import pandas as pd
import pytest

from surface_app import cli
from surface_app.logic.constants import REPLAY_COLUMNS
from surface_app.logic.helpers.threshold import CSV_COLUMNS


def _write_planted(path, distances=(3, 5, 7), crossing=5e-3):
    rows = []
    for d in distances:
        for p in (3e-3, 4e-3, 6e-3, 8e-3, 1e-2):
            mean = 100.0 * (p / crossing) ** (-d)
            rows.append({"d": d, "p": p, "trials": 50, "mean": mean, "stderr": 0.01 * mean, "censored_count": 0})
    pd.DataFrame(rows, columns=CSV_COLUMNS).to_csv(path, index=False)


def test_run_writes_summary(tmp_path):
    out = tmp_path / "results.csv"
    code = cli.main([
        "run", "--distances", "3", "--ps", "0,0.5", "--trials", "2", "--max-cycles", "3",
        "--workers", "1", "--seed", "2", "--out", str(out),
    ])
    assert code == 0
    summary = pd.read_csv(out)
    assert list(summary.columns) == CSV_COLUMNS
    assert summary["p"].tolist() == [0.0, 0.5]
    assert summary.loc[0, "censored_count"] == 2
    assert summary.loc[0, "mean"] == 3


def test_plotdata_with_baseline(tmp_path):
    results, baseline, out = tmp_path / "results.csv", tmp_path / "baseline.csv", tmp_path / "plot.dat"
    _write_planted(results)
    assert cli.main(["baseline", "--ps", "0.003,0.5", "--trials", "3", "--max-cycles", "50", "--out", str(baseline)]) == 0
    assert cli.main(["plotdata", str(results), "--baseline", str(baseline), "--out", str(out)]) == 0

    lines = out.read_text().splitlines()
    assert lines[0] == "# p mean_d3 mean_d5 mean_d7 stderr_d3 stderr_d5 stderr_d7 baseline"
    assert len(lines) == 1 + 6


def test_estimate_prints_crossing(tmp_path, capsys):
    results = tmp_path / "results.csv"
    _write_planted(results)
    assert cli.main(["estimate", str(results), "--bootstrap", "100"]) == 0
    printed = capsys.readouterr().out
    assert printed.startswith("p_th = 0.005 ")


def test_estimate_needs_two_distances(tmp_path):
    results = tmp_path / "results.csv"
    _write_planted(results, distances=(3,))
    assert cli.main(["estimate", str(results)]) == 2


def test_replay_records_and_decodes(tmp_path):
    trace, out = tmp_path / "run.trace", tmp_path / "replay.csv"
    code = cli.main([
        "replay", str(trace), "--record", "-d", "3", "-p", "0.01", "--cycles", "6", "--seed", "4", "--out", str(out),
    ])
    assert code == 0
    assert trace.read_bytes()
    frame = pd.read_csv(out)
    assert list(frame.columns) == REPLAY_COLUMNS
    assert len(frame) == 12


def test_replay_rejects_foreign_file(tmp_path):
    trace = tmp_path / "notes.trace"
    trace.write_bytes(b"plain text, not a trace")
    assert cli.main(["replay", str(trace)]) == 2


def test_distill_table(tmp_path, tmp_cache):
    out = tmp_path / "steane.txt"
    assert cli.main(["distill", "--code", "steane", "--table", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "# steane"
    assert lines[1] == "pattern probability correction output fidelity"
    assert len(lines) == 2 + 8
    assert all(line.split()[1] == "0.125000" for line in lines[2:])


def test_invalid_sweep_arguments(tmp_path):
    assert cli.main(["run", "--distances", "3", "--ps", "0.01", "--trials", "0", "--out", str(tmp_path / "x")]) == 2


def test_unknown_command():
    with pytest.raises(SystemExit):
        cli.main(["teleport"])
