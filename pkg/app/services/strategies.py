# services/strategies.py
"""
Estratégias de alocação de revisões: homogênea e heterogênea em duas rodadas.
"""
from dataclasses import replace
from typing import Iterable, Optional

from app.models import ImprovementReport, PlanKind, ReviewPlan, ScenarioConfig, ValidationError
from app.services import mc_engine
from app.services.review_rounds import run_round
from app.utils.structured_logging import log_event

__all__ = ["run_round", "workload", "compare_strategies", "smallest_workload"]


def workload(plan: ReviewPlan, n_papers: int) -> int:
    """W = Σ n_i."""
    if plan.kind == PlanKind.HOMOGENEOUS:
        return n_papers * plan.n
    return n_papers * plan.round1_reviews + plan.survivors(n_papers) * plan.round2_reviews


def compare_strategies(config: ScenarioConfig, n: int, K: int, workers: Optional[int] = None,
                       challenger: Optional[ReviewPlan] = None) -> ImprovementReport:
    """
    Roda o cenário sob Homogeneous(n) e sob o desafiante (padrão: duas rodadas)
    com a mesma semente e a mesma capacidade de revisões, de modo que os dois
    braços compartilham qualidades, notas e chaves de desempate.
    """
    if n < 2:
        raise ValidationError(f"comparação exige n ≥ 2 (n={n})", invariant="n ≥ 2")

    baseline = ReviewPlan.homogeneous(n)
    challenger = challenger or ReviewPlan.heterogeneous(n)
    capacity = max(baseline.review_capacity, challenger.review_capacity, config.review_capacity or 0)

    hom_config = replace(config, review_policy=baseline, review_capacity=capacity)
    het_config = replace(config, review_policy=challenger, review_capacity=capacity)

    hom = mc_engine.run(hom_config, K, workers=workers, label=f"hom n={n}")
    het = mc_engine.run(het_config, K, workers=workers, label=f"{challenger.kind.value} n={n}")

    metrics = hom.metrics_i
    delta_e = {i: het.e_hat[i] - hom.e_hat[i] for i in metrics}
    ratio = {i: delta_e[i] / hom.e_hat[i] for i in metrics if hom.e_hat[i] > 0}

    report = ImprovementReport(
        delta_e=delta_e,
        ratio=ratio,
        workloads=(workload(baseline, config.n_papers), workload(challenger, config.n_papers)),
        e_hom=hom.e_hat,
        e_het=het.e_hat,
        stderr_hom={i: hom.stderr(i) for i in metrics},
        stderr_het={i: het.stderr(i) for i in metrics},
        K=K,
        seed=config.seed,
    )
    log_event("strategies.compare", n=n, K=K, challenger=challenger.kind.value,
              delta_e_k=delta_e.get(config.k), workloads=list(report.workloads))
    return report


def smallest_workload(config: ScenarioConfig, i: int, threshold: float, n_values: Iterable[int],
                      K: int, workers: Optional[int] = None) -> Optional[int]:
    """Menor n (homogêneo) com Ê[I_i] ≥ threshold, ou None."""
    if i not in config.metrics_i and i != config.k:
        config = replace(config, metrics_i=tuple(config.metrics_i) + (i,))

    for n in sorted(set(n_values)):
        candidate = replace(config, review_policy=ReviewPlan.homogeneous(n), review_capacity=None)
        report = mc_engine.run(candidate, K, workers=workers, label=f"n={n}")
        if report.e_hat[i] >= threshold:
            return n
    return None
