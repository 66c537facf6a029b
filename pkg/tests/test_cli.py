import io

import pandas as pd
import pytest

from relayroute.cli import EXIT_CONFIG, EXIT_OK, EXIT_PARTIAL, main
from relayroute.io.config import parse_config
from relayroute.io.report import FRAME_COLUMNS, RUN_COLUMNS
from relayroute.io.topology import dump_topology
from relayroute.model.topology import generate_topology
from relayroute.params import SimConfig, TopologyConfig
from relayroute.sweep import SWEEP_COLUMNS

SMALL = ["--ms", "3", "--rs", "2", "--frames", "4", "--set", "bco.max_iterations=5"]


def test_validate_config_prints_the_full_config(capsys):
    assert main(["validate-config"]) == EXIT_OK
    out, err = capsys.readouterr()
    assert parse_config(out) == SimConfig()
    assert "[Config] OK" in err


def test_validate_config_applies_flags(capsys):
    assert main(["validate-config", "--scenario", "5hop", "--ms", "7", "--seed", "9"]) == EXIT_OK
    cfg = parse_config(capsys.readouterr().out)
    assert cfg.max_hops == 5
    assert cfg.n_ms == 7
    assert cfg.seed == 9


def test_config_error_exit_code(tmp_path, capsys):
    path = tmp_path / "bad.yaml"
    path.write_text("frame:\n  slots_per_frame: 0\n", encoding="utf-8")
    assert main(["validate-config", "--config", str(path)]) == EXIT_CONFIG
    assert "frame.slots_per_frame (line 2)" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [
        ["validate-config", "--config", "does/not/exist.yaml"],
        ["validate-config", "--set", "sim.framez=3"],
        ["validate-config", "--scenario", "9hop"],
        ["sweep", "--values", "a,b"],
        ["sweep", "--values", "4,2"],
    ],
)
def test_bad_inputs_exit_with_config_error(argv, capsys):
    assert main(argv) == EXIT_CONFIG
    assert "[Config]" in capsys.readouterr().err


def test_run_writes_one_row(capsys):
    assert main(["run", "--algo", "dijkstra", *SMALL]) == EXIT_OK
    df = pd.read_csv(io.StringIO(capsys.readouterr().out))
    assert list(df.columns) == list(RUN_COLUMNS)
    assert df["algorithm"].tolist() == ["dijkstra"]
    assert df["frames"].tolist() == [4]


def test_run_per_frame(capsys):
    assert main(["run", "--algo", "ebcd", "--per-frame", *SMALL]) == EXIT_OK
    df = pd.read_csv(io.StringIO(capsys.readouterr().out))
    assert list(df.columns) == list(FRAME_COLUMNS)
    assert df["frame_index"].tolist() == [0, 1, 2, 3]


def test_compare_output_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["compare", *SMALL, "--out", str(a)]) == EXIT_OK
    assert main(["compare", *SMALL, "--out", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    df = pd.read_csv(a)
    assert df["algorithm"].tolist() == ["ebcd", "dijkstra"]
    assert df["demand_digest"].nunique() == 1


def test_compare_summary(capsys):
    assert main(["run", "--algo", "both", "--summary", *SMALL]) == EXIT_OK
    out = capsys.readouterr().out
    assert "savings_percent" in out
    assert "%" in out.splitlines()[-1]


def test_compare_to_excel(tmp_path):
    path = tmp_path / "cmp.xlsx"
    assert main(["compare", *SMALL, "--out", str(path)]) == EXIT_OK
    df = pd.read_excel(path, engine="openpyxl")
    assert list(df.columns) == list(RUN_COLUMNS)
    assert len(df) == 2


def test_topology_replay(tmp_path, capsys):
    t = generate_topology(TopologyConfig(n_rs=2, n_ms=3), 4)
    path = tmp_path / "topology.yaml"
    dump_topology(t, str(path))
    argv = ["run", "--algo", "dijkstra", "--frames", "3", "--topology", str(path)]
    assert main(argv) == EXIT_OK
    df = pd.read_csv(io.StringIO(capsys.readouterr().out))
    assert df["unreachable"].tolist() == [len(t.unreachable)]


def test_sweep_rows(capsys):
    argv = ["sweep", "--values", "2,3", "--fixed", "2", "--seeds", "2", "--frames", "3"]
    assert main([*argv, "--set", "bco.max_iterations=5"]) == EXIT_OK
    df = pd.read_csv(io.StringIO(capsys.readouterr().out))
    assert list(df.columns) == list(SWEEP_COLUMNS)
    assert df["axis_value"].tolist() == [2, 2, 2, 3, 3, 3]
    assert df["seed"].astype(str).tolist() == ["0", "1", "mean", "0", "1", "mean"]


def test_sweep_with_a_failing_point_is_partial(capsys):
    argv = [
        "sweep",
        "--values", "0,2",
        "--fixed", "2",
        "--frames", "3",
        "--set", "sim.power_cap_fallback=false",
        "--set", "channel.noise_density_dbm_per_hz=-40",
    ]
    assert main(argv) == EXIT_PARTIAL
    out, err = capsys.readouterr()
    df = pd.read_csv(io.StringIO(out))
    assert df.loc[0, "ebcd_mean_mj"] == 0.0
    assert df.loc[2, "ebcd_mean_mj"] != df.loc[2, "ebcd_mean_mj"]
    assert "failed" in err
