# services/review_rounds.py
"""
Uma rodada do processo de decisão, vetorizada sobre um bloco de B rodadas.

Layout fixo das uniformes de cada rodada:
    [0, N)                     qualidade de cada paper
    [N, N + 4·N·R)             por (paper, revisão): matching, comportamento, nota aleatória, nota honesta
    [.., + 2·N)                desempate: uma uniforme por paper em cada etapa de seleção
R é a capacidade de revisões por paper do cenário.
"""
from dataclasses import dataclass

import numpy as np

from app.models import MatchingKind, PlanKind, ScenarioConfig
from app.services import decision_rules, quality_model, score_model

SELECTION_STAGES = 2
SLOTS_PER_REVIEW = 4


@dataclass(frozen=True)
class DrawLayout:
    n_papers: int
    capacity: int

    @property
    def draws_per_round(self) -> int:
        return self.n_papers * (1 + SLOTS_PER_REVIEW * self.capacity + SELECTION_STAGES)

    def split(self, u: np.ndarray):
        """(B, S) → qualidades (B, N), revisões (B, N, R, 4), desempate (B, 2, N)."""
        B = u.shape[0]
        N, R = self.n_papers, self.capacity
        review_end = N + SLOTS_PER_REVIEW * N * R
        u_quality = u[:, :N]
        u_reviews = u[:, N:review_end].reshape(B, N, R, SLOTS_PER_REVIEW)
        u_ties = u[:, review_end:review_end + SELECTION_STAGES * N].reshape(B, SELECTION_STAGES, N)
        return u_quality, u_reviews, u_ties


def draw_layout(config: ScenarioConfig) -> DrawLayout:
    return DrawLayout(n_papers=config.n_papers, capacity=config.draw_capacity)


@dataclass(frozen=True)
class RoundReviews:
    scores: np.ndarray      # (B, P, r) inteiros em 1..m
    expertise: np.ndarray   # (B, P, r) inteiros em 1..l


def _sigma_and_expertise(config: ScenarioConfig, u_match: np.ndarray):
    matching = config.matching_model
    policy = config.sigma_policy

    if matching.kind == MatchingKind.TWO_TYPE:
        same_type = u_match < matching.fraction
        sigma = score_model.sigma_many(policy, critical=same_type.astype(float), same_type=same_type)
        expertise = np.where(same_type, 2, 1)
        return sigma, expertise

    if matching.kind == MatchingKind.MANY_TYPE:
        expertise, critical = score_model.expertise_critical_many(u_match, matching.levels, matching.critical_map)
        return score_model.sigma_many(policy, critical=critical), expertise

    sigma = score_model.sigma_many(policy, critical=matching.critical)
    return sigma, np.ones(u_match.shape, dtype=np.int64)


def run_round(plan_round: int, qualities: np.ndarray, config: ScenarioConfig, slots: np.ndarray) -> RoundReviews:
    """
    Sorteia `plan_round` revisões novas para cada paper em `qualities` (B, P).
    `slots` traz as uniformes (B, P, plan_round, 4) desses papers.
    """
    slots = slots[:, :, :plan_round, :]
    u_match, u_behavior, u_random, u_score = (slots[..., j] for j in range(SLOTS_PER_REVIEW))

    sigma, expertise = _sigma_and_expertise(config, u_match)
    if np.ndim(sigma) == 0:
        # σ único: uma pmf por paper, compartilhada pelas revisões
        probs = score_model.score_pmf_block(qualities, sigma, config.m)[:, :, None, :]
    else:
        probs = score_model.score_pmf_block(qualities[:, :, None], sigma, config.m)

    honest = score_model.scores_from_uniforms(probs, u_score)
    codes = score_model.behavior_codes(u_behavior, config.behavior_mix)
    scores = score_model.apply_behaviors(codes, honest, u_random, config.m, config.bias_threshold)
    return RoundReviews(scores=scores, expertise=np.broadcast_to(expertise, scores.shape))


def _select(config: ScenarioConfig, reviews: RoundReviews, count: int, tie_uniforms: np.ndarray) -> np.ndarray:
    block = decision_rules.aggregate_block(
        config.voting,
        config.tiebreak,
        reviews.scores,
        reviews.expertise,
        levels=config.matching_model.expertise_levels,
    )
    return decision_rules.select_top_k_block(block, count, tie_uniforms)


def _take(values: np.ndarray, papers: np.ndarray) -> np.ndarray:
    index = papers.reshape(papers.shape + (1,) * (values.ndim - 2))
    return np.take_along_axis(values, index, axis=1)


def simulate_block(config: ScenarioConfig, layout: DrawLayout, u: np.ndarray):
    """
    Executa B rodadas; devolve (aceitos (B, k), posto verdadeiro de cada aceito (B, k)).
    Posto 0 = melhor paper por qualidade intrínseca.
    """
    u_quality, u_reviews, u_ties = layout.split(u)
    qualities = np.ascontiguousarray(quality_model.round_qualities(config, u_quality))

    order = np.argsort(-qualities, axis=1, kind="stable")
    true_rank = np.empty_like(order)
    np.put_along_axis(true_rank, order, np.arange(config.n_papers)[None, :], axis=1)

    plan = config.review_policy
    if plan.kind == PlanKind.HOMOGENEOUS:
        reviews = run_round(plan.n, qualities, config, u_reviews)
        accepted = _select(config, reviews, config.k, u_ties[:, 0, :])
    else:
        first = run_round(plan.round1_reviews, qualities, config, u_reviews)
        survivors = _select(config, first, plan.survivors(config.n_papers), u_ties[:, 0, :])

        survivor_slots = _take(u_reviews, survivors)[:, :, plan.round1_reviews:, :]
        second = run_round(plan.round2_reviews, _take(qualities, survivors), config, survivor_slots)
        combined = RoundReviews(
            scores=np.concatenate([_take(first.scores, survivors), second.scores], axis=2),
            expertise=np.concatenate([_take(first.expertise, survivors), second.expertise], axis=2),
        )
        chosen = _select(config, combined, config.k, _take(u_ties[:, 1, :], survivors))
        accepted = np.take_along_axis(survivors, chosen, axis=1)

    return accepted, np.take_along_axis(true_rank, accepted, axis=1)
