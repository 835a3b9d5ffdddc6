# services/decision_rules.py
"""
Regras de votação (γ exato) e seleção do top-k com regras de desempate.

Na API escalar γ é uma Fraction. No caminho vetorizado cada etapa de seleção
tem o mesmo n para todos os papers, então γ vira uma chave inteira exata
(γ multiplicado por um denominador comum); nenhuma comparação passa por float.
Convenção de sorteio nos dois caminhos: uma uniforme por paper, a menor vence
o empate residual.
"""
from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction

import numpy as np

from app.models import (
    AggregateScore,
    InsufficientReviews,
    ReviewSet,
    TieBreakRule,
    ValidationError,
    VotingKind,
    VotingRule,
)
from app.models.scenario import weighted_key_scale


class Ordering(IntEnum):
    PREFER_FIRST = -1
    UNORDERED = 0
    PREFER_SECOND = 1


# =========================================================
# 1. API ESCALAR
# =========================================================
def aggregate(rule: VotingRule, reviews: ReviewSet) -> AggregateScore:
    scores = reviews.scores
    n = len(scores)
    total = sum(scores)

    if rule.kind == VotingKind.AVERAGE:
        gamma = Fraction(total, n)
    elif rule.kind == VotingKind.ELIMINATE_HIGH_LOW:
        if n < 3:
            raise InsufficientReviews(f"eliminate-high-low exige 3 notas, recebeu {n}", invariant="n_i ≥ 3")
        gamma = Fraction(total - max(scores) - min(scores), n - 2)
    elif rule.kind == VotingKind.PUNISH_LOW:
        gamma = Fraction(total, n) - rule.eta * sum(1 for s in scores if s == 1)
    elif rule.kind == VotingKind.WEIGHTED_AVERAGE:
        weight = sum(reviews.expertise)
        if weight <= 0:
            raise ValidationError("soma de expertise nula", invariant="Σe > 0")
        gamma = Fraction(sum(s * e for s, e in zip(scores, reviews.expertise)), weight)
    else:
        raise ValidationError(f"regra de votação desconhecida: {rule.kind}")

    ordered = sorted(scores)
    return AggregateScore(
        gamma=gamma,
        variance=Fraction(n * sum(s * s for s in scores) - total * total, n * n),
        max=ordered[-1],
        min=ordered[0],
        median=Fraction(ordered[(n - 1) // 2]),
    )


def _meta_key(rule: TieBreakRule, agg: AggregateScore):
    # menor chave = preferido
    if rule == TieBreakRule.LEAST_VARIANCE:
        return agg.variance
    if rule == TieBreakRule.LARGEST_MAX:
        return -agg.max
    if rule == TieBreakRule.LARGEST_MIN:
        return -agg.min
    if rule == TieBreakRule.LARGEST_MEDIAN:
        return -agg.median
    return 0


def tiebreak_compare(rule: TieBreakRule, a: AggregateScore, b: AggregateScore) -> Ordering:
    key_a, key_b = _meta_key(rule, a), _meta_key(rule, b)
    if key_a < key_b:
        return Ordering.PREFER_FIRST
    if key_a > key_b:
        return Ordering.PREFER_SECOND
    return Ordering.UNORDERED


def select_top_k(gammas, k: int, tiebreak: TieBreakRule, rng: np.random.Generator) -> frozenset:
    N = len(gammas)
    if not 1 <= k <= N:
        raise ValidationError(f"k={k} fora de [1, {N}]", invariant="1 ≤ k ≤ N")
    draws = rng.random(N)
    order = sorted(range(N), key=lambda i: (-gammas[i].gamma, _meta_key(tiebreak, gammas[i]), draws[i]))
    return frozenset(order[:k])


# =========================================================
# 2. CAMINHO VETORIZADO (blocos de rodadas)
# =========================================================
@dataclass(frozen=True)
class AggregateBlock:
    """γ·denominador comum e chave de desempate, shape (B, P)."""

    gamma_key: np.ndarray
    meta_key: np.ndarray


def gamma_denominator(rule: VotingRule, n: int, levels: int = 1) -> int:
    if rule.kind == VotingKind.ELIMINATE_HIGH_LOW:
        return n - 2
    if rule.kind == VotingKind.PUNISH_LOW:
        return rule.eta.denominator * n
    if rule.kind == VotingKind.WEIGHTED_AVERAGE:
        return weighted_key_scale(n, levels)
    return n


def aggregate_block(rule: VotingRule, tiebreak: TieBreakRule, scores: np.ndarray,
                    expertise: np.ndarray, levels: int = 1) -> AggregateBlock:
    scores = scores.astype(np.int64)
    n = scores.shape[-1]
    total = scores.sum(axis=-1)

    if rule.kind == VotingKind.AVERAGE:
        gamma_key = total
    elif rule.kind == VotingKind.ELIMINATE_HIGH_LOW:
        if n < 3:
            raise InsufficientReviews(f"eliminate-high-low exige 3 notas, recebeu {n}", invariant="n_i ≥ 3")
        gamma_key = total - scores.max(axis=-1) - scores.min(axis=-1)
    elif rule.kind == VotingKind.PUNISH_LOW:
        ones = (scores == 1).sum(axis=-1)
        gamma_key = rule.eta.denominator * total - rule.eta.numerator * n * ones
    elif rule.kind == VotingKind.WEIGHTED_AVERAGE:
        expertise = expertise.astype(np.int64)
        scale = weighted_key_scale(n, levels)
        gamma_key = (scores * expertise).sum(axis=-1) * (scale // expertise.sum(axis=-1))
    else:
        raise ValidationError(f"regra de votação desconhecida: {rule.kind}")

    if tiebreak == TieBreakRule.LEAST_VARIANCE:
        meta_key = n * (scores * scores).sum(axis=-1) - total * total
    elif tiebreak == TieBreakRule.LARGEST_MAX:
        meta_key = -scores.max(axis=-1)
    elif tiebreak == TieBreakRule.LARGEST_MIN:
        meta_key = -scores.min(axis=-1)
    elif tiebreak == TieBreakRule.LARGEST_MEDIAN:
        meta_key = -np.sort(scores, axis=-1)[..., (n - 1) // 2]
    else:
        meta_key = np.zeros_like(total)

    return AggregateBlock(gamma_key=gamma_key, meta_key=meta_key)


def select_top_k_block(block: AggregateBlock, k: int, tie_uniforms: np.ndarray) -> np.ndarray:
    """Índices (B, k) dos aceitos, em ordem de preferência."""
    order = np.lexsort((tie_uniforms, block.meta_key, -block.gamma_key), axis=-1)
    return order[..., :k]
