import csv
import io
import math
import os

import numpy as np
import pytest

from relaylab import cli
from relaylab import rng as rngs
from relaylab.config import ConfigError, ExperimentConfig, load_config, parse_params
from relaylab.experiments import ResultRow, run_fig2, run_fig3, run_fig4
from relaylab.output import OutputError, emit_outputs, output_paths, to_csv, to_svg
from relaylab.params import SystemParams

SMALL = dict(n_slots=1000, replications=2, horizon=500, seed=5)


# -- seeds ------------------------------------------------------------------

def test_streams_depend_only_on_address():
    a = rngs.generator(1, 2, 3, 4).random(5)
    b = rngs.generator(1, 2, 3, 4).random(5)
    c = rngs.generator(1, 2, 3, 5).random(5)
    assert np.array_equal(a, b) and not np.array_equal(a, c)
    assert not np.array_equal(rngs.generator(2, 2, 3, 4).random(5), a)


def test_seed_required():
    with pytest.raises(ValueError):
        rngs.seed_sequence(None)
    with pytest.raises(ValueError):
        rngs.experiment_code("fig9")


# -- configuration ----------------------------------------------------------

def test_defaults_need_no_file():
    cfg = load_config(experiment="fig2")
    assert cfg.sweep_variable == "zeta"
    assert cfg.grid[0] == pytest.approx(1e-4) and cfg.grid[-1] == pytest.approx(1e-2)
    assert cfg.params == SystemParams()
    cfg3 = load_config(experiment="fig3")
    assert cfg3.sweep_variable == "E_C"
    assert cfg3.grid[0] == pytest.approx(5e-4) and cfg3.grid[-1] == pytest.approx(5e-3)


def test_db_keys_are_linearized():
    p = parse_params([("tau_P_db", "10"), ("Ptilde_T_db", "30"), ("P_T_dbm", "0"), ("E_C", "0.003")])
    assert p.tau_P == pytest.approx(10.0)
    assert p.Ptilde_T == pytest.approx(1.0)
    assert p.P_T == pytest.approx(1e-3)
    assert p.E_C == 0.003


def test_full_file(tmp_path):
    text = """
[experiment]
id = fig3
seed = 42
n_slots = 5000
replications = 4
horizon = 1000
far_field = no
[sweep]
variable = E_C
start = 1e-3
stop = 4e-3
num = 4
[params]
tau_A_db = 3   # dB
[bandit]
gamma = 0.95
canonical_discount = yes
[output]
dir = somewhere
"""
    path = tmp_path / "c.ini"
    path.write_text(text)
    cfg = load_config(path=str(path))
    assert cfg.experiment == "fig3" and cfg.seed == 42
    assert cfg.grid == pytest.approx((1e-3, 2e-3, 3e-3, 4e-3))
    assert cfg.params.tau_A == pytest.approx(10 ** 0.3)
    assert cfg.gamma == 0.95 and cfg.canonical_discount
    assert cfg.out_dir == "somewhere"
    assert not cfg.far_field and load_config().far_field


@pytest.mark.parametrize("text,field", [
    ("[params]\neta = 1.5\n", "params.eta"),
    ("[params]\nbogus = 1\n", "params.bogus"),
    ("[experiment]\nn_slots = 0\n", "experiment.n_slots"),
    ("[experiment]\nseed = -1\n", "experiment.seed"),
    ("[sweep]\ngrid = 3e-3, 1e-3\n", "sweep.grid"),
    ("[bandit]\ngamma = 0\n", "bandit.gamma"),
    ("[bandit]\npolicies = ucb, thompson\n", "bandit.policies"),
    ("[experiment]\nhorizon = ten\n", "experiment.horizon"),
    ("[nonsense]\na = 1\n", "nonsense"),
    ("[experiment]\nwat = 1\n", "experiment.wat"),
])
def test_config_errors_name_the_field(text, field):
    with pytest.raises(ConfigError) as exc:
        load_config(text=text, experiment="fig2")
    assert exc.value.field == field


def test_E_C_grid_must_exceed_E_A():
    with pytest.raises(ConfigError) as exc:
        load_config(text="[sweep]\ngrid = 1e-4, 1e-3\n", experiment="fig3")
    assert exc.value.field == "sweep.grid"


# -- experiments ------------------------------------------------------------

@pytest.fixture(scope="module")
def fig2_rows():
    cfg = ExperimentConfig("fig2", grid=(1e-3,), **SMALL)
    return run_fig2(cfg)


def test_fig2_columns(fig2_rows):
    names = [r.estimator for r in fig2_rows]
    assert names == ["p_active", "p_passive", "p_optimal", "p_optimal_analytic",
                     "term_PA_analytic", "term_J_analytic", "term_K_analytic",
                     "p_random", "p_bandit"]
    for r in fig2_rows:
        assert 0.0 <= r.estimate <= 1.0
        assert 0.0 <= r.std_error <= 0.5
    d = {r.estimator: r for r in fig2_rows}
    assert d["p_optimal"].estimate >= max(d["p_active"].estimate, d["p_passive"].estimate)
    assert d["p_active"].n_samples == 1000


def test_random_column_is_coin_average(fig2_rows):
    d = {r.estimator: r for r in fig2_rows}
    mid = 0.5 * (d["p_active"].estimate + d["p_passive"].estimate)
    assert abs(d["p_random"].estimate - mid) < 4 * d["p_random"].std_error


def test_fig3_passive_flat_and_active_grows():
    cfg = ExperimentConfig("fig3", grid=(2.5e-4, 4e-3), **dict(SMALL, n_slots=6000))
    rows = run_fig3(cfg)
    d = {(r.sweep_value, r.estimator): r for r in rows}
    lo, hi = cfg.grid
    # passive success does not involve the circuit energy; points use separate streams
    a, b = d[(lo, "p_passive")], d[(hi, "p_passive")]
    assert abs(a.estimate - b.estimate) < 4 * math.hypot(a.std_error, b.std_error)
    assert d[(lo, "p_active")].estimate < d[(hi, "p_active")].estimate


def test_se_shrinks_with_slots():
    base = dict(SMALL, horizon=2000, replications=1)
    se = []
    for n in (20_000, 40_000):
        cfg = ExperimentConfig("fig2", grid=(1e-4,), **dict(base, n_slots=n))
        rows = run_fig2(cfg)
        se.append(next(r.std_error for r in rows if r.estimator == "p_optimal"))
    assert 1.3 <= se[0] / se[1] <= 1.5


def test_fig4_shape_and_oracle():
    cfg = ExperimentConfig("fig4", policies=("oracle", "random", "d-kl-ucb"),
                           replications=3, horizon=1000, seed=3)
    rows = run_fig4(cfg)
    assert len(rows) == 3 * 1000
    for name in cfg.policies:
        assert sum(r.policy == name for r in rows) == 1000
    assert all(r.cumulative_regret == 0 for r in rows if r.policy == "oracle")


def test_fig4_random_matches_expectation():
    from relaylab.bandit import canonical_schedule
    cfg = ExperimentConfig("fig4", policies=("random",), replications=60, horizon=10_000, seed=8)
    rows = run_fig4(cfg)
    final = rows[-1]
    mu = canonical_schedule().mean_matrix(10_000)
    expect = np.sum(mu.max(axis=1) - mu.mean(axis=1))
    assert abs(final.cumulative_regret - expect) < 3 * final.std_error


def test_threads_do_not_change_results():
    base = ExperimentConfig("fig4", policies=("kl-ucb", "random"), replications=4,
                            horizon=400, seed=9)
    a = to_csv(run_fig4(base))
    b = to_csv(run_fig4(base.replace(workers=3)))
    assert a == b


# -- output -----------------------------------------------------------------

def test_csv_quoting_and_header():
    rows = [ResultRow('x,"y"', 1.0, "p", 0.5, 0.1, 2, 10)]
    text = to_csv(rows)
    assert text.splitlines()[0] == "sweep_variable,sweep_value,estimator,estimate,std_error,replications,n_samples"
    assert text.endswith("\r\n")
    back = list(csv.reader(io.StringIO(text)))
    assert back[1][0] == 'x,"y"'


def test_emit_writes_named_files(tmp_path, fig2_rows):
    paths = emit_outputs(fig2_rows, "fig2", 5, str(tmp_path))
    assert [os.path.basename(p) for p in paths] == ["fig2_seed5.csv", "fig2_seed5.svg"]
    assert open(paths[1]).read().startswith("<?xml")
    assert sorted(os.listdir(tmp_path)) == ["fig2_seed5.csv", "fig2_seed5.svg"]


def test_svg_is_deterministic(fig2_rows):
    assert to_svg(fig2_rows) == to_svg(fig2_rows)


def test_empty_table_writes_nothing(tmp_path):
    with pytest.raises(ValueError):
        emit_outputs([], "fig2", 1, str(tmp_path))
    assert os.listdir(tmp_path) == []


def test_unwritable_directory(tmp_path, fig2_rows):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OutputError) as exc:
        emit_outputs(fig2_rows, "fig2", 1, str(blocker / "sub"))
    assert "sub" in str(exc.value)


def test_output_paths():
    assert output_paths("d", "fig4", 7) == (os.path.join("d", "fig4_seed7.csv"),
                                            os.path.join("d", "fig4_seed7.svg"))


# -- command line -----------------------------------------------------------

def test_cli_analytic():
    out = io.StringIO()
    assert cli.main(["analytic"], out) == 0
    text = out.getvalue()
    assert "P_A = 0.8187" in text and "total = 0.8745" in text


def test_cli_simulate():
    out = io.StringIO()
    assert cli.main(["simulate", "--slots", "2000", "--seed", "3"], out) == 0
    assert "p_optimal" in out.getvalue() and "+/-" in out.getvalue()


def test_cli_fig4(tmp_path):
    out = io.StringIO()
    rc = cli.main(["fig4", "--replications", "2", "--horizon", "200", "--out", str(tmp_path),
                   "--seed", "4", "--gamma", "0.95", "--canonical-discount"], out)
    assert rc == 0
    assert (tmp_path / "fig4_seed4.csv").exists()


def test_cli_config_errors(tmp_path):
    bad = tmp_path / "bad.ini"
    bad.write_text("[params]\neta = 2\n")
    assert cli.main(["analytic", "--config", str(bad)], io.StringIO()) == 2
    assert cli.main(["fig2", "--config", str(tmp_path / "missing.ini")], io.StringIO()) == 2
    assert cli.main(["fig2", "--slots", "0"], io.StringIO()) == 2
    assert cli.main(["nonsense"], io.StringIO()) == 2


def test_cli_io_error(tmp_path):
    blocker = tmp_path / "f"
    blocker.write_text("x")
    rc = cli.main(["fig4", "--replications", "1", "--horizon", "50", "--out", str(blocker)],
                  io.StringIO())
    assert rc == 4


def test_cli_numeric_error(monkeypatch):
    from relaylab.laplace import QuadratureError

    def boom(*a, **k):
        raise QuadratureError("did not converge", 0.1, 1.0)

    monkeypatch.setattr(cli, "theorem_terms", boom)
    assert cli.main(["analytic"], io.StringIO()) == 3


@pytest.mark.parametrize("name", ["fig2.ini", "fig4.ini"])
def test_shipped_configs_load(name):
    root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    cfg = load_config(os.path.join(root, "configs", name))
    assert cfg.params == SystemParams()
    assert cfg.experiment == name.split(".")[0]
