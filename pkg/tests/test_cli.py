import csv
import io
import subprocess
import sys
import textwrap

import numpy as np
import pytest

from signalwaste.cli import dispatch, emit_csv
from signalwaste.config import ConfigError, load_config, parse_config

ISO = """
benefit: {stakes: 1.0, shape: isoelastic, beta: 1.0}
cost: {variant: multiplicative, gamma: 1.0, sigma: 1.0}
domain: {theta_bar: 1.0, grid_points: 128}
"""


@pytest.fixture
def cfg(tmp_path):
    def write(text, name="run.yaml"):
        p = tmp_path / name
        p.write_text(textwrap.dedent(text))
        return str(p)
    return write


def run(argv, capsys):
    code = dispatch(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.reader(io.StringIO(text)))


# -- emit_csv ------------------------------------------------------------------


def test_single_row_file(tmp_path):
    p = tmp_path / "one.csv"
    emit_csv([(1, 0.5)], str(p), ["n", "x"])
    assert p.read_text() == "n,x\n1,0.5\n"


def test_round_trip_precision(tmp_path):
    rng = np.random.default_rng(3)
    data = rng.lognormal(0, 5, size=(200, 3))
    p = tmp_path / "r.csv"
    emit_csv(data, str(p), ["a", "b", "c"])
    back = np.loadtxt(p, delimiter=",", skiprows=1)
    assert np.max(np.abs(back / data - 1)) <= 1e-11


def test_ragged_rows_rejected():
    with pytest.raises(ValueError):
        emit_csv([(1, 2), (3,)])
    with pytest.raises(ValueError):
        emit_csv([])


def test_unwritable_path():
    with pytest.raises(OSError):
        emit_csv([(1,)], "/nonexistent-dir/x.csv")


# -- subcommands -----------------------------------------------------------------


def test_waste_column_is_textually_constant(cfg, capsys):
    code, out, _ = run(["waste", "--config", cfg(ISO)], capsys)
    r = rows(out)
    assert code == 0 and r[0] == ["theta", "W"] and len(r) == 129
    assert {row[1] for row in r[1:]} == {"0.5"}
    theta = [float(row[0]) for row in r[1:]]
    assert np.all(np.diff(theta) > 0)


def test_solve_writes_file(cfg, tmp_path, capsys):
    out_path = tmp_path / "s.csv"
    code, _, _ = run(["solve", "--config", cfg(ISO), "--out", str(out_path)], capsys)
    data = np.loadtxt(out_path, delimiter=",", skiprows=1)
    assert code == 0 and out_path.read_text().startswith("theta,action,cost\n")
    assert np.allclose(data[:, 1], data[:, 0] ** 2 / 2, rtol=1e-11)
    assert np.allclose(data[:, 2], data[:, 0] / 2, rtol=1e-11)


def test_sweep(cfg, capsys):
    code, out, _ = run(["sweep", "--config", cfg(ISO), "--stakes", "1", "2", "--gamma", "1", "4",
                        "--grid-points", "64"], capsys)
    r = rows(out)
    assert code == 0 and r[0] == ["s", "gamma", "theta", "W", "action", "cost"]
    assert len(r) == 1 + 4 * 64
    assert {row[3] for row in r[1:]} == {"0.5"}


def test_verify_ic_pass(cfg, capsys):
    code, out, _ = run(["verify-ic", "--config", cfg(ISO)], capsys)
    assert code == 0 and out.startswith("IC passed")


def test_verify_ic_fail_prints_witness(cfg, capsys, monkeypatch):
    from signalwaste import cli
    from signalwaste.equilibrium import Strategy

    real = cli.solve
    monkeypatch.setattr(cli, "solve", lambda *a: (lambda s: Strategy(s.theta, 1.5 * s.actions))(real(*a)))
    code, out, _ = run(["verify-ic", "--config", cfg(ISO)], capsys)
    r = rows(out)
    assert code == 1 and r[0] == ["theta", "theta_hat", "gain"]
    assert float(r[1][2]) > 1e-3


def test_tournament_and_seed_determinism(capsys):
    argv = ["tournament", "--n", "3", "--trials", "5000", "--seed", "7"]
    first = run(argv, capsys)
    second = run(argv + ["--workers", "3"], capsys)
    assert first == second and first[0] == 0
    assert rows(first[1])[1][-1] == "0.666666666667"


def test_tournament_single_trial_flags_se(capsys):
    code, out, _ = run(["tournament", "--n", "2", "--trials", "1"], capsys)
    assert code == 0 and rows(out)[1][9] == "nan"


def test_tullock(capsys):
    code, out, _ = run(["tullock", "--n", "2"], capsys)
    assert code == 0 and rows(out)[1] == ["2", "1", "1", "1", "0.25", "0.5"]


def test_compare(capsys):
    code, out, _ = run(["compare", "--n-list", "2", "1000", "--r", "0.5"], capsys)
    assert rows(out)[1:] == [["2", "0.5", "0.25"], ["1000", "0.999", "0.4995"]]


def test_auction(capsys):
    code, out, _ = run(["auction", "--beta", "1", "--sigma", "1", "--n", "2", "--grid-points", "64"], capsys)
    r = rows(out)
    assert code == 0 and len(r) == 65
    assert max(float(x[3]) for x in r[1:]) <= 1e-9


@pytest.mark.parametrize("family, s, c, w", [("quadcubic", "5", "1", "0.4"),
                                             ("ratio", "0.75", "1", "0.666666666667")])
def test_counterexample(family, s, c, w, capsys):
    code, out, _ = run(["counterexample", "--family", family, "--s", s], capsys)
    assert code == 0 and rows(out)[1] == [s, c, w]


def test_counterexample_mixed(capsys):
    argv = ["counterexample", "--family", "mixed", "--s", "5", "--weights", "1,1",
            "--gammas", "2,3", "--sigmas", "1,2"]
    code, out, _ = run(argv, capsys)
    assert code == 0 and rows(out)[1] == ["5", "1", "0.4"]
    argv[-1] = "1,3"
    code, _, err = run(argv, capsys)
    assert code == 2 and "not constant" in err


# -- errors ----------------------------------------------------------------------


def test_unknown_subcommand_exits_two(capsys):
    with pytest.raises(SystemExit) as exc:
        dispatch(["frobnicate"])
    assert exc.value.code == 2
    assert "usage" in capsys.readouterr().err


@pytest.mark.parametrize("text", [
    "benefit: {shape: cubic}",
    "cost: {variant: quartic}",
    "domain: {grid_points: 10}",
    "solver: {tol: -1}",
    "solver: {method: shooting}",
    "benefit: {beta: abc}",
    "- just\n- a list",
    "benefit: {stakes: 1, beta: [",
])
def test_bad_config_exits_two(text, cfg, capsys):
    code, out, err = run(["waste", "--config", cfg(text)], capsys)
    assert code == 2 and out == "" and err.count("\n") == 1


def test_missing_config_exits_two(capsys):
    assert run(["waste"], capsys)[0] == 2
    assert run(["waste", "--config", "/no/such/file.yaml"], capsys)[0] == 2


def test_grid_override_validated(cfg, capsys):
    assert run(["waste", "--config", cfg(ISO), "--grid-points", "8"], capsys)[0] == 2


# -- config ------------------------------------------------------------------------


def test_config_defaults():
    rc = parse_config({"benefit": {"beta": 2}})
    assert rc.domain.grid_points == 1024 and rc.method == "auto" and rc.tol == 1e-12
    assert rc.environment.benefit.shape.beta == 2.0


def test_config_variants(cfg):
    rc = load_config(cfg("""
        benefit: {stakes: 3, shape: isoelastic, beta: 0.5}
        cost: {variant: mixed, weights: [1, 2], gamma: [1, 2], sigma: [0.5, 1.5]}
    """))
    assert rc.environment.cost.gammas == (1.0, 2.0)
    rc = load_config(cfg("""
        benefit: {shape: power_of_cdf, n: 3, k: 2}
        cost: {strain: tabulated, strain_table: {theta: [0, 0.5, 1], values: [1, 0.6, 0.3]}}
    """))
    assert rc.environment.benefit.shape.elasticity == 4.0
    with pytest.raises(ConfigError):
        parse_config({"cost": {"strain": "tabulated"}})


def test_shipped_configs_run(capsys):
    import pathlib
    root = pathlib.Path(__file__).resolve().parents[1] / "configs"
    for path in sorted(root.glob("*.yaml")):
        assert run(["verify-ic", "--config", str(path), "--grid-points", "128"], capsys)[0] == 0, path


# -- reproduce ---------------------------------------------------------------------


@pytest.mark.slow
def test_reproduce_is_deterministic():
    cmd = [sys.executable, "-m", "signalwaste", "reproduce", "--seed", "5"]
    a = subprocess.run(cmd, capture_output=True, check=False)
    b = subprocess.run(cmd, capture_output=True, check=False)
    assert a.returncode == 0, a.stdout.decode() + a.stderr.decode()
    assert a.stdout == b.stdout
    assert a.stdout.decode().rstrip().endswith("10/10 criteria passed")
