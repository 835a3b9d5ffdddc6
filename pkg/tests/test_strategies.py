import numpy as np
import pytest

from app.models import RegimeKind, ReviewPlan, ValidationError
from app.services import strategies
from app.services.review_rounds import SLOTS_PER_REVIEW, draw_layout
from app.utils.rng import make_generator

from .conftest import build_config, exact_case_config


def test_workload_examples():
    assert strategies.workload(ReviewPlan.homogeneous(3), 200) == 600
    assert strategies.workload(ReviewPlan.heterogeneous(3), 200) == 600
    assert strategies.workload(ReviewPlan.heterogeneous(4), 200) == 800


def test_two_round_plan_shape():
    plan = ReviewPlan.heterogeneous(3)
    assert plan.round1_reviews == 1
    assert plan.round2_reviews == 4
    assert plan.review_capacity == 5
    assert plan.survivors(201) == 101


def test_run_round_draws_requested_reviews():
    config = build_config(plan=ReviewPlan.heterogeneous(3))
    rng = make_generator(8)
    B, N = 4, config.n_papers
    qualities = np.full((B, N), 3.0)
    slots = rng.random((B, N, config.draw_capacity, SLOTS_PER_REVIEW))

    first = strategies.run_round(1, qualities, config, slots)
    assert first.scores.shape == (B, N, 1)
    second = strategies.run_round(4, qualities[:, :10], config, slots[:, :10, 1:, :])
    assert second.scores.shape == (B, 10, 4)
    assert ((second.scores >= 1) & (second.scores <= config.m)).all()
    assert draw_layout(config).capacity == 5


def test_homogeneous_challenger_changes_nothing():
    config = build_config()
    report = strategies.compare_strategies(config, 3, 400, workers=2, challenger=ReviewPlan.homogeneous(3))
    assert all(delta == 0.0 for delta in report.delta_e.values())
    assert report.workloads == (60, 60)
    assert report.e_hom == report.e_het


def test_compare_reports_every_metric():
    config = build_config(metrics_i=(1, 5))
    report = strategies.compare_strategies(config, 4, 300, workers=2)
    assert set(report.delta_e) == {1, 5}
    assert report.workloads == (80, 80)
    for i in report.delta_e:
        assert report.delta_e[i] == pytest.approx(report.e_het[i] - report.e_hom[i])


def test_compare_needs_two_reviews():
    with pytest.raises(ValidationError):
        strategies.compare_strategies(build_config(), 1, 10)


def test_smallest_workload():
    config = exact_case_config(n_papers=3, k=2, n=1, m=5, sigma=0.01)
    assert strategies.smallest_workload(config, 1, 0.99, [3, 1, 2], 200, workers=1) == 1
    assert strategies.smallest_workload(config, 1, 1.5, [1, 2], 50, workers=1) is None


@pytest.mark.slow
def test_two_rounds_help_under_high_selectivity():
    from app.services.presets import base_config

    report = strategies.compare_strategies(base_config(seed=2024, n=3, regime=RegimeKind.HIGH), 3, 1_000_000)
    assert 3.0 <= report.delta_e[30] <= 5.0
    assert 0.25 <= report.ratio[30] <= 0.35
    assert report.workloads == (600, 600)


@pytest.mark.slow
def test_high_selectivity_needs_many_reviews():
    from app.services.presets import WORKLOADS, base_config

    n = strategies.smallest_workload(base_config(seed=2024, regime=RegimeKind.HIGH), 1, 0.95, WORKLOADS, 1_000_000)
    assert n is None or n >= 7


@pytest.mark.slow
def test_two_rounds_do_not_degrade_base_scenarios():
    from app.services.presets import REGIMES, base_config

    for regime in REGIMES:
        report = strategies.compare_strategies(base_config(seed=2024, n=4, regime=regime), 4, 100_000)
        slack = 3 * (report.stderr_hom[30] + report.stderr_het[30])
        assert report.delta_e[30] >= -slack
