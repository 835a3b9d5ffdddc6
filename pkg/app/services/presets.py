# services/presets.py
"""
Catálogo de experimentos: cada preset é uma varredura de cenários em torno do
cenário-base (N=200, k=30, m=5, regime médio, σ=1, média, menor variância).
"""
from dataclasses import dataclass, replace
from typing import Callable, Iterator, Optional

import config as app_config
from app.models import (
    Behavior,
    CriticalMap,
    MatchingKind,
    MatchingModel,
    RegimeKind,
    ReviewPlan,
    ReportCsv,
    ScenarioConfig,
    SelectivityRegime,
    SigmaPolicy,
    TieBreakRule,
    UnknownPreset,
    VotingKind,
    VotingRule,
)
from app.services import mc_engine, report_csv, strategies
from app.utils.structured_logging import log_event

BASE_N_PAPERS = 200
BASE_K = 30
BASE_M = 5

REGIMES = (RegimeKind.HIGH, RegimeKind.MEDIUM, RegimeKind.LOW, RegimeKind.RANDOM)
WORKLOADS = tuple(range(2, 13))
TIEBREAK_RULES = (
    TieBreakRule.LEAST_VARIANCE,
    TieBreakRule.LARGEST_MAX,
    TieBreakRule.LARGEST_MIN,
    TieBreakRule.LARGEST_MEDIAN,
)


def base_config(seed: int, n: int = 3, regime: RegimeKind = RegimeKind.MEDIUM, **changes) -> ScenarioConfig:
    config = ScenarioConfig(
        n_papers=BASE_N_PAPERS,
        k=BASE_K,
        m=BASE_M,
        review_policy=ReviewPlan.homogeneous(n),
        regime=SelectivityRegime(regime, BASE_M),
        voting=VotingRule(VotingKind.AVERAGE),
        tiebreak=TieBreakRule.LEAST_VARIANCE,
        seed=seed,
    )
    return replace(config, **changes) if changes else config


def _fractions(start: float, stop: float, step: float) -> tuple:
    count = int(round((stop - start) / step)) + 1
    return tuple(round(start + j * step, 10) for j in range(count))


# ---------------------------------------------------
# Varreduras (rótulo, cenário)
# ---------------------------------------------------
def _workload_pmf(seed) -> Iterator:
    for n in (3, 4, 6, 8, 10):
        yield f"n={n}", base_config(seed, n)


def _regimes(seed) -> Iterator:
    for regime in REGIMES:
        yield f"regime={regime.value}", base_config(seed, 3, regime)


def _fig_workload(seed) -> Iterator:
    for regime in REGIMES:
        for n in WORKLOADS:
            yield f"regime={regime.value};n={n}", base_config(seed, n, regime)


def _fig_voting(seed) -> Iterator:
    rules = (VotingKind.AVERAGE, VotingKind.ELIMINATE_HIGH_LOW, VotingKind.PUNISH_LOW)
    for regime in REGIMES:
        for rule in rules:
            for n in range(3, 13):
                yield (f"regime={regime.value};voting={rule.value};n={n}",
                       base_config(seed, n, regime, voting=VotingRule(rule)))


def _fig_tiebreak(seed) -> Iterator:
    for regime in REGIMES:
        for rule in TIEBREAK_RULES:
            for n in WORKLOADS:
                yield (f"regime={regime.value};tiebreak={rule.value};n={n}",
                       base_config(seed, n, regime, tiebreak=rule))


def _fig_twotype(seed) -> Iterator:
    sigma = SigmaPolicy.two_type(0.5, 2.0)
    for regime in REGIMES:
        for fraction in _fractions(0.1, 1.0, 0.1):
            matching = MatchingModel(MatchingKind.TWO_TYPE, fraction=fraction)
            yield (f"regime={regime.value};fraction={fraction:g}",
                   base_config(seed, 4, regime, sigma_policy=sigma, matching_model=matching))


def _fig_manytype(seed) -> Iterator:
    sigma = SigmaPolicy.linear_in_critical(0.5, 1.5)
    matching = MatchingModel(MatchingKind.MANY_TYPE, levels=3, critical_map=CriticalMap.IDENTITY)
    rules = (VotingKind.AVERAGE, VotingKind.ELIMINATE_HIGH_LOW, VotingKind.PUNISH_LOW, VotingKind.WEIGHTED_AVERAGE)
    for regime in REGIMES:
        for rule in rules:
            for n in range(3, 13):
                yield (f"regime={regime.value};voting={rule.value};n={n}",
                       base_config(seed, n, regime, voting=VotingRule(rule),
                                   sigma_policy=sigma, matching_model=matching))


def _anomaly(behavior: Behavior, fractions: tuple):
    def sweep(seed) -> Iterator:
        for regime in REGIMES:
            for fraction in fractions:
                yield (f"regime={regime.value};fraction={fraction:g}",
                       base_config(seed, 4, regime, behavior_mix={behavior: fraction}))
    return sweep


@dataclass(frozen=True)
class Preset:
    name: str
    description: str
    sweep: Optional[Callable] = None


PRESETS = {
    p.name: p
    for p in (
        Preset("table4", "pmf/E/Var de I_i para n ∈ {3,4,6,8,10}, regime médio", _workload_pmf),
        Preset("table5", "quatro regimes de seletividade, n=3", _regimes),
        Preset("fig-workload", "E[I_i] por n=2..12 em cada regime", _fig_workload),
        Preset("fig-voting", "média, elimina extremos e pune notas baixas por n=3..12", _fig_voting),
        Preset("fig-tiebreak", "quatro regras de desempate por n=2..12", _fig_tiebreak),
        Preset("fig-twotype", "fração de matching do mesmo tipo 0.1..1, n=4, σ 0.5/2", _fig_twotype),
        Preset("fig-manytype", "quatro regras com l=3 níveis, σ(c)=0.5+1.5(1-c), f(μ)=μ", _fig_manytype),
        Preset("fig-anomaly-random", "fração de notas aleatórias 0.1..1, n=4",
               _anomaly(Behavior.RANDOM_SCORING, _fractions(0.1, 1.0, 0.1))),
        Preset("fig-anomaly-bias", "fração de notas enviesadas 0..0.3, n=4",
               _anomaly(Behavior.BIAS_SCORING, _fractions(0.0, 0.3, 0.05))),
        Preset("fig-hetero", "duas rodadas vs homogêneo por n=2..12 em cada regime"),
    )
}


# ---------------------------------------------------
# Execução
# ---------------------------------------------------
def _hetero_rows(seed: int, K: int, workers: Optional[int]) -> tuple:
    rows = []
    points = {}
    for regime in REGIMES:
        for n in WORKLOADS:
            label = f"regime={regime.value};n={n}"
            config = base_config(seed, n, regime)
            report = strategies.compare_strategies(config, n, K, workers=workers)
            rows.extend(report_csv.improvement_rows(label, report))
            points[f"point[{label}]"] = {**config.to_dict(), "challenger": ReviewPlan.heterogeneous(n).to_dict()}
            log_event("preset.point", preset="fig-hetero", scenario=label,
                      delta_e_k=report.delta_e.get(BASE_K))
    return rows, points


def run_preset(name: str, K: int = app_config.DEFAULT_ROUNDS, seed: int = app_config.DEFAULT_SEED,
               workers: Optional[int] = None) -> ReportCsv:
    preset = PRESETS.get(name)
    if preset is None:
        raise UnknownPreset(f"preset desconhecido: {name} (opções: {', '.join(PRESETS)})",
                            invariant="preset ∈ catalogue")

    log_event("preset.start", preset=name, K=K, seed=seed)
    base = base_config(seed)
    comments = report_csv.comments_for({
        "preset": name,
        "description": preset.description,
        "K": K,
        "seed": seed,
        "base": base.to_dict(),
    })

    if preset.sweep is None:
        rows, points = _hetero_rows(seed, K, workers)
    else:
        rows = []
        points = {}
        for label, config in preset.sweep(seed):
            report = mc_engine.run(config, K, workers=workers, label=f"{name} {label}")
            rows.extend(report_csv.accuracy_rows(label, report))
            points[f"point[{label}]"] = config.to_dict()
            log_event("preset.point", preset=name, scenario=label, e_k=report.e_hat[config.k])
    comments += report_csv.comments_for(points)

    log_event("preset.finish", preset=name, rows=len(rows))
    return report_csv.build_report(comments, rows)
