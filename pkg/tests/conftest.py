import os
import sys

import pytest

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

import config as app_config  # noqa: E402
from app.models import (  # noqa: E402
    MatchingKind,
    MatchingModel,
    QualitySource,
    RegimeKind,
    ReviewPlan,
    ScenarioConfig,
    SelectivityRegime,
    SigmaPolicy,
    TieBreakRule,
    VotingKind,
    VotingRule,
)


@pytest.fixture(autouse=True)
def isolated_environment(tmp_path, monkeypatch):
    """Storage temporário e logs desligados em todos os testes."""
    monkeypatch.setenv("GROUPREC_STORAGE_DIR", str(tmp_path / "storage"))
    monkeypatch.setattr(app_config, "LOG_ENABLED", False)
    monkeypatch.setattr(app_config, "LOG_EXTERNAL_ENABLED", False)


def build_config(n_papers=20, k=5, m=5, n=3, regime=RegimeKind.MEDIUM, voting=VotingKind.AVERAGE,
                 tiebreak=TieBreakRule.LEAST_VARIANCE, seed=1234, plan=None, **changes) -> ScenarioConfig:
    return ScenarioConfig(
        n_papers=n_papers,
        k=k,
        m=m,
        review_policy=plan or ReviewPlan.homogeneous(n),
        regime=SelectivityRegime(regime, m),
        voting=voting if isinstance(voting, VotingRule) else VotingRule(voting),
        tiebreak=tiebreak,
        seed=seed,
        **changes,
    )


def exact_case_config(n_papers=4, k=2, n=2, m=3, sigma=1.0, seed=99) -> ScenarioConfig:
    """Caso especial: grade linear, σ constante, média, desempate aleatório."""
    return build_config(
        n_papers=n_papers, k=k, m=m, n=n, tiebreak=TieBreakRule.RANDOM, seed=seed,
        quality_source=QualitySource.LINEAR_GRID,
        sigma_policy=SigmaPolicy.constant(sigma),
        matching_model=MatchingModel(MatchingKind.NONE),
    )
