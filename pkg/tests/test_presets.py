import json

import pytest

from app.models import RegimeKind, UnknownPreset
from app.services import presets, strategies


def test_catalogue_names():
    assert set(presets.PRESETS) == {
        "table4", "table5", "fig-workload", "fig-voting", "fig-tiebreak", "fig-twotype",
        "fig-manytype", "fig-anomaly-random", "fig-anomaly-bias", "fig-hetero",
    }


def test_unknown_preset():
    with pytest.raises(UnknownPreset):
        presets.run_preset("table9", K=10)


@pytest.mark.parametrize("name", sorted(n for n, p in presets.PRESETS.items() if p.sweep is not None))
def test_every_sweep_builds_valid_scenarios(name):
    points = list(presets.PRESETS[name].sweep(1))
    assert points
    labels = [label for label, _ in points]
    assert len(labels) == len(set(labels))


def test_sweep_sizes():
    assert len(list(presets.PRESETS["table4"].sweep(1))) == 5
    assert len(list(presets.PRESETS["fig-anomaly-bias"].sweep(1))) == 4 * 7
    assert len(list(presets.PRESETS["fig-twotype"].sweep(1))) == 4 * 10


def test_regime_preset_small_run():
    report = presets.run_preset("table5", K=50, seed=3, workers=2)
    scenarios = {row.scenario for row in report.rows}
    assert scenarios == {f"regime={r.value}" for r in presets.REGIMES}
    assert report.find("regime=high", "E", 30) is not None
    assert "preset=table5" in report.comments

    points = [c for c in report.comments if c.startswith("point[")]
    assert len(points) == 4
    config = json.loads(points[0].split("]=", 1)[1])
    assert config["seed"] == 3 and config["k"] == 30


def test_preset_runs_are_reproducible():
    first = presets.run_preset("table4", K=20, seed=5, workers=1)
    second = presets.run_preset("table4", K=20, seed=5, workers=3)
    assert first == second


def test_hetero_rows_match_compare(monkeypatch):
    monkeypatch.setattr(presets, "REGIMES", (RegimeKind.HIGH,))
    monkeypatch.setattr(presets, "WORKLOADS", (3,))
    report = presets.run_preset("fig-hetero", K=40, seed=9, workers=2)

    direct = strategies.compare_strategies(presets.base_config(9, 3, RegimeKind.HIGH), 3, 40, workers=2)
    row = report.find("regime=high;n=3", "delta_E", 30)
    assert row.value == pytest.approx(direct.delta_e[30])
    assert report.find("regime=high;n=3", "W_het", 0).value == 600.0

    points = [c for c in report.comments if c.startswith("point[")]
    assert len(points) == 1
    label, body = points[0].split("]=", 1)
    assert label == "point[regime=high;n=3"
    config = json.loads(body)
    assert config["seed"] == 9 and config["k"] == 30
    assert config["challenger"] == {"kind": "hetero", "n": 3}


@pytest.mark.slow
def test_reference_accuracy_values():
    by_workload = presets.run_preset("table4", K=1_000_000, seed=2024)
    assert by_workload.find("n=3", "E", 1).value == pytest.approx(0.9832, abs=0.02)

    by_regime = presets.run_preset("table5", K=1_000_000, seed=2024)
    e30 = {r: by_regime.find(f"regime={r.value}", "E", 30).value for r in presets.REGIMES}
    assert e30[RegimeKind.HIGH] < e30[RegimeKind.LOW] < e30[RegimeKind.MEDIUM] < e30[RegimeKind.RANDOM]
    assert e30[RegimeKind.RANDOM] == pytest.approx(21.5821, abs=0.3)
    assert e30[RegimeKind.LOW] == pytest.approx(18.98, abs=0.3)
    # regime alto fica acima do valor de referência 13.2258 (ver DESIGN.md)
    assert 13.0 < e30[RegimeKind.HIGH] < 14.5


@pytest.mark.slow
def test_random_scoring_degrades_accuracy():
    report = presets.run_preset("fig-anomaly-random", K=100_000, seed=2024)
    for regime in presets.REGIMES:
        rows = [r for r in report.rows if r.scenario.startswith(f"regime={regime.value};") and r.metric == "E"
                and r.i_or_bin == 30]
        for before, after in zip(rows, rows[1:]):
            slack = 3 * (before.stderr + after.stderr)
            assert after.value <= before.value + slack


@pytest.mark.slow
def test_bias_scoring_hurts_high_selectivity():
    report = presets.run_preset("fig-anomaly-bias", K=100_000, seed=2024)
    assert report.find("regime=high;fraction=0.15", "E", 30).value < 15
