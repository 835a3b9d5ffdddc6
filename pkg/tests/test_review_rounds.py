import math

import numpy as np
import pytest

from app.models import (
    Behavior,
    CriticalMap,
    MatchingKind,
    MatchingModel,
    PlanKind,
    ReviewPlan,
    ReviewSet,
    SigmaPolicy,
    TieBreakRule,
    VotingKind,
)
from app.services import decision_rules, mc_engine, quality_model, review_rounds, score_model
from app.utils.rng import RoundStreams

from .conftest import build_config


# ---------------------------------------------------
# Referência escalar: um paper e uma revisão por vez
# ---------------------------------------------------
def _scalar_behavior(config, u_behavior: float) -> Behavior:
    random_share = config.behavior_mix.get(Behavior.RANDOM_SCORING, 0.0)
    bias_share = config.behavior_mix.get(Behavior.BIAS_SCORING, 0.0)
    if u_behavior < random_share:
        return Behavior.RANDOM_SCORING
    if u_behavior < random_share + bias_share:
        return Behavior.BIAS_SCORING
    return Behavior.HONEST


def _scalar_review(config, quality: float, slot) -> tuple:
    u_match, u_behavior, u_random, u_score = (float(x) for x in slot)
    matching = config.matching_model
    behavior = _scalar_behavior(config, u_behavior)

    if matching.kind == MatchingKind.TWO_TYPE:
        same_type = u_match < matching.fraction
        sigma = score_model.sigma_of_critical(float(same_type), config.sigma_policy, same_type=same_type)
        expertise = 2 if same_type else 1
    elif matching.kind == MatchingKind.MANY_TYPE:
        profile = score_model.reviewer_profile(u_match, matching.levels, matching.critical_map, behavior)
        sigma = score_model.sigma_of_critical(profile.critical_degree, config.sigma_policy)
        expertise = profile.expertise
    else:
        sigma = score_model.sigma_of_critical(matching.critical, config.sigma_policy)
        expertise = 1

    pmf = score_model.build_score_pmf(quality, sigma, config.m)
    # menor ℓ com u < F(ℓ)
    cdf = np.cumsum(pmf.probs)
    honest = 1 + sum(1 for level in range(config.m - 1) if u_score >= cdf[level])

    if behavior == Behavior.RANDOM_SCORING:
        score = min(1 + math.floor(u_random * config.m), config.m)
    elif behavior == Behavior.BIAS_SCORING:
        score = config.m if honest < config.bias_threshold else 1
    else:
        score = honest
    return score, expertise


def _scalar_reviews(config, quality: float, slots) -> ReviewSet:
    pairs = [_scalar_review(config, quality, slot) for slot in slots]
    return ReviewSet(tuple(s for s, _ in pairs), tuple(e for _, e in pairs))


def _scalar_top(config, review_sets: dict, count: int, ties: dict) -> list:
    aggregates = {p: decision_rules.aggregate(config.voting, r) for p, r in review_sets.items()}
    order = sorted(
        aggregates,
        key=lambda p: (-aggregates[p].gamma, decision_rules._meta_key(config.tiebreak, aggregates[p]), ties[p]),
    )
    return order[:count]


def _scalar_round(config, layout, u_row) -> list:
    u_quality, u_reviews, u_ties = layout.split(u_row[None, :])
    qualities = quality_model.round_qualities(config, u_quality)[0]
    u_reviews, u_ties = u_reviews[0], u_ties[0]
    N = config.n_papers
    plan = config.review_policy

    if plan.kind == PlanKind.HOMOGENEOUS:
        reviews = {p: _scalar_reviews(config, float(qualities[p]), u_reviews[p, :plan.n]) for p in range(N)}
        return _scalar_top(config, reviews, config.k, dict(enumerate(u_ties[0])))

    first = {p: _scalar_reviews(config, float(qualities[p]), u_reviews[p, :plan.round1_reviews]) for p in range(N)}
    survivors = _scalar_top(config, first, plan.survivors(N), dict(enumerate(u_ties[0])))

    combined = {}
    end = plan.round1_reviews + plan.round2_reviews
    for p in survivors:
        second = _scalar_reviews(config, float(qualities[p]), u_reviews[p, plan.round1_reviews:end])
        combined[p] = first[p].extended(second)
    return _scalar_top(config, combined, config.k, {p: u_ties[1, p] for p in survivors})


def _assert_block_matches_scalar(config, rounds: int = 6, start: int = 0):
    layout = review_rounds.draw_layout(config)
    u = RoundStreams(config.seed, layout.draws_per_round).uniforms(start, rounds)
    accepted, _ = review_rounds.simulate_block(config, layout, u)

    for b in range(rounds):
        assert list(accepted[b]) == _scalar_round(config, layout, u[b])


# ---------------------------------------------------
# Estratégia heterogênea
# ---------------------------------------------------
def _hetero_config(**changes):
    return build_config(n_papers=9, k=3, m=5, plan=ReviewPlan.heterogeneous(3), seed=31, **changes)


def test_heterogeneous_block_matches_scalar_rounds():
    _assert_block_matches_scalar(_hetero_config(), rounds=8)


def test_heterogeneous_survivors_are_round_one_leaders():
    config = _hetero_config()
    plan = config.review_policy
    layout = review_rounds.draw_layout(config)
    u = RoundStreams(config.seed, layout.draws_per_round).uniforms(0, 10)
    accepted, _ = review_rounds.simulate_block(config, layout, u)

    u_quality, u_reviews, u_ties = layout.split(u)
    qualities = quality_model.round_qualities(config, u_quality)
    first = review_rounds.run_round(plan.round1_reviews, qualities, config, u_reviews)
    gamma_key = first.scores.sum(axis=2)

    for b in range(u.shape[0]):
        # ⌈9/2⌉ = 5 sobreviventes; todo aceito veio da frente da rodada 1
        order = np.lexsort((u_ties[b, 0], -gamma_key[b]))
        survivors = set(order[:plan.survivors(config.n_papers)].tolist())
        assert len(survivors) == 5
        assert set(accepted[b].tolist()) <= survivors

        # nenhum eliminado tem γ maior que um sobrevivente
        cut = min(gamma_key[b, p] for p in survivors)
        assert all(gamma_key[b, p] <= cut for p in range(config.n_papers) if p not in survivors)


def test_heterogeneous_second_round_aggregates_retained_reviews():
    config = _hetero_config()
    plan = config.review_policy
    assert (plan.round1_reviews, plan.round2_reviews) == (1, 4)

    layout = review_rounds.draw_layout(config)
    u = RoundStreams(config.seed, layout.draws_per_round).uniforms(0, 6)
    u_quality, u_reviews, _ = layout.split(u)
    qualities = quality_model.round_qualities(config, u_quality)
    # as 5 notas de cada paper: 1 da rodada 1 seguida das 4 da rodada 2
    all_scores = review_rounds.run_round(plan.review_capacity, qualities, config, u_reviews).scores
    accepted, _ = review_rounds.simulate_block(config, layout, u)

    for b in range(u.shape[0]):
        totals = all_scores[b].sum(axis=1)
        # aceitos ordenados por γ sobre as 5 notas, não só sobre as 4 novas
        assert list(totals[accepted[b]]) == sorted(totals[accepted[b]], reverse=True)


def test_heterogeneous_eliminate_high_low_matches_scalar():
    # 3 notas na rodada 1, 3 + 6 agregadas na rodada 2
    config = build_config(n_papers=9, k=3, plan=ReviewPlan.heterogeneous(6), seed=32,
                          voting=VotingKind.ELIMINATE_HIGH_LOW, tiebreak=TieBreakRule.LARGEST_MEDIAN)
    _assert_block_matches_scalar(config, rounds=6)


# ---------------------------------------------------
# Matching e comportamentos
# ---------------------------------------------------
@pytest.mark.parametrize("fraction", [0.0, 0.4, 1.0])
def test_two_type_matching_matches_scalar(fraction):
    config = build_config(
        n_papers=8, k=3, n=3, seed=5,
        voting=VotingKind.WEIGHTED_AVERAGE,
        matching_model=MatchingModel(MatchingKind.TWO_TYPE, fraction=fraction),
        sigma_policy=SigmaPolicy.two_type(0.5, 2.0),
    )
    _assert_block_matches_scalar(config)


@pytest.mark.parametrize("critical_map", [CriticalMap.IDENTITY, CriticalMap.SQUARE])
def test_many_type_weighted_average_matches_scalar(critical_map):
    config = build_config(
        n_papers=8, k=3, n=4, seed=6,
        voting=VotingKind.WEIGHTED_AVERAGE,
        matching_model=MatchingModel(MatchingKind.MANY_TYPE, levels=3, critical_map=critical_map),
        sigma_policy=SigmaPolicy.linear_in_critical(0.5, 1.5),
    )
    _assert_block_matches_scalar(config)


def test_behavior_mix_matches_scalar():
    config = build_config(
        n_papers=10, k=4, n=3, seed=7,
        tiebreak=TieBreakRule.LARGEST_MIN,
        behavior_mix={Behavior.RANDOM_SCORING: 0.3, Behavior.BIAS_SCORING: 0.3},
    )
    _assert_block_matches_scalar(config, rounds=8)


def test_behavior_mix_in_heterogeneous_plan_matches_scalar():
    config = _hetero_config(
        behavior_mix={Behavior.RANDOM_SCORING: 0.25, Behavior.BIAS_SCORING: 0.25},
        matching_model=MatchingModel(MatchingKind.MANY_TYPE, levels=2),
        sigma_policy=SigmaPolicy.linear_in_critical(0.5, 1.5),
    )
    _assert_block_matches_scalar(config, rounds=6, start=40)


def test_engine_runs_mixed_configurations():
    configs = [
        build_config(n_papers=12, k=3, n=3, matching_model=MatchingModel(MatchingKind.TWO_TYPE, fraction=0.5),
                     sigma_policy=SigmaPolicy.two_type(0.5, 2.0), voting=VotingKind.WEIGHTED_AVERAGE),
        build_config(n_papers=12, k=3, n=3, matching_model=MatchingModel(MatchingKind.MANY_TYPE, levels=3),
                     sigma_policy=SigmaPolicy.linear_in_critical(0.5, 1.5),
                     behavior_mix={Behavior.BIAS_SCORING: 0.2}),
        _hetero_config(behavior_mix={Behavior.RANDOM_SCORING: 0.5}),
    ]
    for config in configs:
        whole = mc_engine.run(config, 60, workers=2)
        split = mc_engine.merge_reports([mc_engine.run_rounds(config, 0, 25, workers=1),
                                         mc_engine.run_rounds(config, 25, 60, workers=1)])
        assert whole.histograms == split.histograms
        assert sum(whole.histograms[config.k]) == 60
