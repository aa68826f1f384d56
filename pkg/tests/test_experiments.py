import json

import pandas as pd
import pytest

from backend import config
from backend.errors import InputError
from backend.experiments import (
    COLUMNS,
    ExperimentConfig,
    load_config,
    run_experiments,
    summarize,
    to_csv_text,
    write_csv,
    write_json,
)


def _cfg(**over) -> ExperimentConfig:
    base = dict(
        generators=[
            {"family": "path", "n": 10, "seed": 0},
            {"family": "cycle", "n": 12, "seed": 0},
            {"family": "cactus", "n": 14, "seed": 1},
        ],
        ks=[1, 2],
        epsilons=[0.3],
        q_path_samples=3,
        bounded_degree=True,
        seed=5,
    )
    base.update(over)
    return ExperimentConfig.model_validate(base)


@pytest.fixture(scope="module")
def report():
    return run_experiments(_cfg())


def test_rows_follow_config_order(report):
    assert [(r.instance, r.k) for r in report.rows] == [
        ("000-path-n10-s0", 1), ("000-path-n10-s0", 2),
        ("001-cycle-n12-s0", 1), ("001-cycle-n12-s0", 2),
        ("002-cactus-n14-s1", 1), ("002-cactus-n14-s1", 2),
    ]
    assert all(r.epsilon == "3/10" for r in report.rows)


def test_small_sweep_passes(report):
    assert report.failures == 0, [r for r in report.rows if not r.passed]
    for r in report.rows:
        assert r.minor_free is True
        assert r.d_valid and r.q_valid and r.audit_ok
        assert isinstance(r.gamma, int)
        assert r.Q <= r.added + r.gamma
        assert r.ratio >= 1
        assert r.q_path_violations == 0
        assert r.intercell_ok is True and r.border_ok is True
        assert 0 <= r.border_size <= r.n


def test_ratio_is_only_judged_behind_the_gate(report):
    cyc = [r for r in report.rows if r.family == "cycle"]
    assert cyc[0].gate and cyc[0].ratio_ok is True
    # C_12 has diameter 6 < 8
    assert not cyc[1].gate and cyc[1].ratio_ok is None and cyc[1].ratio is not None


def test_bounded_degree_columns(report):
    checked = [r for r in report.rows if r.bd_Q is not None]
    assert {r.family for r in checked} >= {"path", "cycle"}
    for r in checked:
        assert r.bd_valid and r.bd_transfer_ok and r.c_gamma_ok
        assert r.bd_Q <= r.bd_added + r.gamma


def test_naive_agreement_only_on_tiny_instances(report):
    for r in report.rows:
        if r.n <= 10:
            assert r.naive_ok is True
        else:
            assert r.naive_ok is None


def test_csv_is_byte_identical_across_runs_and_workers():
    one = to_csv_text(run_experiments(_cfg(workers=1, bounded_degree=False)))
    again = to_csv_text(run_experiments(_cfg(workers=1, bounded_degree=False)))
    many = to_csv_text(run_experiments(_cfg(workers=3, bounded_degree=False)))
    assert one == again == many


def test_results_ignore_env_knobs(monkeypatch):
    cfg = _cfg(epsilons=[], ks=[1], bounded_degree=False)
    base = to_csv_text(run_experiments(cfg))
    monkeypatch.setattr(config, "ROUND_FACTOR", 0)
    monkeypatch.setattr(config, "ORACLE_NODE_BUDGET", 1)
    assert to_csv_text(run_experiments(cfg)) == base


def test_round_limit_from_config_fails_every_k():
    rep = run_experiments(_cfg(round_factor=0, generators=[{"family": "path", "n": 10, "seed": 0}]))
    assert [(r.k, r.epsilon) for r in rep.rows] == [(1, "3/10"), (2, "3/10")]
    assert all(r.error.startswith("RoundLimitExceeded") and not r.passed for r in rep.rows)


def test_theoretical_mode_solves_whole_graph():
    rep = run_experiments(_cfg(epsilons=[], alpha=0.5, bounded_degree=False,
                               generators=[{"family": "path", "n": 20, "seed": 0}], ks=[2]))
    (row,) = rep.rows
    assert row.epsilon == "alpha=1/2"
    assert row.blocks == 1 and row.added == 0
    assert row.exact_ok is True and row.Q == row.gamma == 4


def test_without_epsilon_only_domset_runs():
    rep = run_experiments(_cfg(epsilons=[], ks=[1]))
    assert all(r.epsilon == "" and r.Q is None for r in rep.rows)
    assert all(r.D is not None for r in rep.rows)


def test_oracle_cap_skips_gamma():
    rep = run_experiments(_cfg(oracle_cap=5, ks=[1]))
    for r in rep.rows:
        assert r.gamma == "skipped: over cap"
        assert r.ratio is None and r.audit_ok is None
        assert r.passed


def test_oracle_budget_is_recorded_not_failed():
    rep = run_experiments(_cfg(oracle_budget=1, ks=[1], epsilons=[]))
    for r in rep.rows:
        assert r.gamma.startswith("skipped: budget")
        assert r.passed


def test_bad_instance_fails_one_row_per_slot():
    rep = run_experiments(_cfg(generators=[{"family": "cycle", "n": 2, "seed": 0}], epsilons=[0.3, 0.5]))
    assert [(r.k, r.epsilon) for r in rep.rows] == [(1, "3/10"), (1, "1/2"), (2, "3/10"), (2, "1/2")]
    assert all(not r.passed and r.error.startswith("InputError") for r in rep.rows)
    assert rep.failures == 4
    assert len(rep.details) == 4 and rep.details[0]["error"] == rep.rows[0].error


def test_csv_and_json_outputs(report, tmp_path):
    text = to_csv_text(report)
    assert text.splitlines()[0] == ",".join(COLUMNS)
    assert len(text.splitlines()) == len(report.rows) + 1

    csv_path = tmp_path / "out" / "results.csv"
    write_csv(report, str(csv_path))
    assert list(pd.read_csv(csv_path).columns) == list(COLUMNS)

    json_path = tmp_path / "results.json"
    write_json(report, str(json_path))
    data = json.loads(json_path.read_text())
    assert data["failures"] == 0
    assert len(data["rows"]) == len(data["details"]) == 6
    assert data["details"][0]["approx"]["variant"] == "voronoi"


def test_summary_per_family(report):
    s = report.summary()
    assert list(s.columns) == ["family", "rows", "failed", "ratio_max", "ratio_mean"]
    assert list(s["family"]) == ["cactus", "cycle", "path"]
    assert (s["rows"] == 2).all() and (s["failed"] == 0).all()
    assert (s["ratio_max"] >= s["ratio_mean"]).all()
    assert summarize([]).empty


def test_load_config(tmp_path):
    good = tmp_path / "cfg.json"
    good.write_text(json.dumps({"generators": [{"family": "fan", "n": 8}], "ks": [1]}))
    cfg = load_config(str(good))
    assert cfg.generators[0].family == "fan" and cfg.oracle_cap == 40

    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"generators": [{"family": "grid", "n": 8}]}))
    with pytest.raises(InputError):
        load_config(str(bad))
