import pytest

from graphdiff.cli import load_config, main
from graphdiff.harness import read_rows


def run_cli(argv):
    return main(list(argv))


def test_help_exits_zero(capsys):
    with pytest.raises(SystemExit) as exc:
        run_cli(["mdep", "--help"])
    assert exc.value.code == 0
    assert "usage" in capsys.readouterr().out


def test_unknown_flag_rejected(capsys):
    with pytest.raises(SystemExit) as exc:
        run_cli(["efpc", "--frobnicate", "1"])
    assert exc.value.code == 2


def test_invalid_beta_exits_two(capsys):
    code = run_cli(["etdb", "--beta", "1.5", "--out", "/dev/null"])
    assert code == 2
    assert "beta must be in [0,1]" in capsys.readouterr().err


def test_efpc_run_prints_summary(tmp_path, capsys):
    out = tmp_path / "efpc.csv"
    code = run_cli(
        [
            "efpc",
            "--nodes",
            "50,100,200",
            "--beta",
            "0.2",
            "--trials",
            "4",
            "--seed",
            "0",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    text = capsys.readouterr().out
    assert "metric=posterior_var slope=" in text
    assert "r2=" in text
    rows = read_rows(out)
    assert {r.metric for r in rows} == {"posterior_var", "m_times_var", "posterior_mean"}


def test_reproducible_for_same_argv(tmp_path):
    args = ["etdb", "--nodes", "50,100,200", "--trials", "3", "--seed", "7"]
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run_cli(args + ["--out", str(out1)]) == 0
    assert run_cli(args + ["--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("trials=20\nnodes=50,100,200\n# comment line\n\n", encoding="utf-8")
    out = tmp_path / "out.csv"
    code = run_cli(
        ["efpc", "--config", str(cfg), "--trials", "5", "--out", str(out)]
    )
    assert code == 0
    rows = read_rows(out)
    assert max(r.seed for r in rows) == 4  # flag value wins over the file


def test_config_file_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("nonsense=1\n", encoding="utf-8")
    code = run_cli(["efpc", "--config", str(cfg), "--out", str(tmp_path / "x.csv")])
    assert code == 2
    err = capsys.readouterr().err
    assert "nonsense" in err and ":1" in err


def test_empty_config_file_keeps_defaults(tmp_path):
    cfg = tmp_path / "empty.cfg"
    cfg.write_text("", encoding="utf-8")
    assert load_config(cfg) == {}


def test_dump_config_round_trips(tmp_path):
    dump = tmp_path / "effective.cfg"
    code = run_cli(
        [
            "efpc",
            "--nodes",
            "50,100",
            "--trials",
            "3",
            "--dump-config",
            str(dump),
            "--out",
            str(tmp_path / "never.csv"),
        ]
    )
    assert code == 0
    overrides = load_config(dump)
    assert overrides["sizes"] == (50, 100)
    assert overrides["trials"] == 3
    assert overrides["base_seed"] == 0
    # reloading the dumped config reproduces the identical effective config
    dump2 = tmp_path / "effective2.cfg"
    code = run_cli(["efpc", "--config", str(dump), "--dump-config", str(dump2)])
    assert code == 0
    assert load_config(dump2) == overrides


def test_default_configs_round_trip_for_every_subcommand(tmp_path):
    for sub in ("efpc", "etdb", "mdep", "jpc", "jtdb", "jmep", "gamma", "scalefree"):
        dump = tmp_path / f"{sub}.cfg"
        assert run_cli([sub, "--dump-config", str(dump)]) == 0
        first = load_config(dump)
        dump2 = tmp_path / f"{sub}2.cfg"
        assert run_cli([sub, "--config", str(dump), "--dump-config", str(dump2)]) == 0
        assert load_config(dump2) == first


def test_env_seed_override(tmp_path, monkeypatch):
    out1, out2 = tmp_path / "s1.csv", tmp_path / "s2.csv"
    args = ["efpc", "--nodes", "50,100,200", "--trials", "3"]
    monkeypatch.setenv("GRAPHDIFF_SEED", "99")
    assert run_cli(args + ["--seed", "0", "--out", str(out1)]) == 0
    monkeypatch.delenv("GRAPHDIFF_SEED")
    assert run_cli(args + ["--seed", "99", "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_gamma_subcommand_reports_trend(tmp_path, capsys):
    code = run_cli(
        [
            "gamma",
            "--nodes",
            "60",
            "--trials",
            "3",
            "--gamma",
            "0,0.5,0.99",
            "--out",
            str(tmp_path / "g.csv"),
        ]
    )
    assert code == 0
    assert "spearman_rho=" in capsys.readouterr().out


def test_channels_subcommand(capsys):
    code = run_cli(["channels", "--beta", "0.1", "--steps", "4"])
    assert code == 0
    out = capsys.readouterr().out
    assert "cumulative_flip_prob" in out
    assert "0.18" in out  # two steps of 0.1 compose to 0.18


def test_plot_writes_png(tmp_path):
    out = tmp_path / "efpc.csv"
    code = run_cli(
        ["efpc", "--nodes", "50,100,200", "--trials", "3", "--out", str(out), "--plot"]
    )
    assert code == 0
    png = tmp_path / "efpc.png"
    assert png.exists() and png.stat().st_size > 0
