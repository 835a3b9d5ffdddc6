# services/score_model.py
"""
Distribuição de cada nota: discretização da normal em {1..m}, ajuste de média
(α, β) para E[S] = Q, acoplamento matching → (expertise, grau crítico) e os
comportamentos anômalos. Cada operação tem a versão escalar (API pública) e a
versão vetorizada usada pelo motor; as duas seguem a mesma convenção de
uniforme → nota.
"""
import math
import threading
from typing import Optional

import numpy as np
from cachetools import LRUCache, cached
from scipy.special import ndtr

import config as app_config
from app.models import (
    AdjustmentInfeasible,
    Behavior,
    CriticalMap,
    ReviewerProfile,
    ScorePmf,
    SigmaKind,
    SigmaPolicy,
    ValidationError,
)

# Folga numérica aceita nos fatores do ajuste antes de declarar inviável
FEASIBILITY_TOLERANCE = 1e-12

BEHAVIOR_CODES = {
    Behavior.HONEST: 0,
    Behavior.RANDOM_SCORING: 1,
    Behavior.BIAS_SCORING: 2,
}


# =========================================================
# 1. DISCRETIZAÇÃO (normal em intervalos de largura 1)
# =========================================================
def _interval_mass(za, zb):
    # Pr[za < Z < zb] sem cancelamento na cauda superior
    return np.where(za > 0, ndtr(-za) - ndtr(-zb), ndtr(zb) - ndtr(za))


def discretize_many(Q, sigma, m: int) -> np.ndarray:
    """pmf de L para arrays de Q e σ (broadcast); última dimensão = m níveis."""
    Q = np.asarray(Q, dtype=float)[..., None]
    sigma = np.asarray(sigma, dtype=float)[..., None]
    lower = np.arange(1, m + 1, dtype=float) - 0.5
    mass = _interval_mass((lower - Q) / sigma, (lower + 1.0 - Q) / sigma)
    return mass / mass.sum(axis=-1, keepdims=True)


def discretize(Q: float, sigma: float, m: int) -> np.ndarray:
    if not 1.0 < Q < m:
        raise ValidationError(f"Q={Q} fora de (1, {m})", invariant="1 < Q < m")
    if not sigma > 0:
        raise ValidationError(f"σ={sigma} não positivo", invariant="σ > 0")
    return discretize_many(Q, sigma, m)


# =========================================================
# 2. AJUSTE DE MÉDIA (α, β)
# =========================================================
def adjust_many(probs: np.ndarray, Q):
    """
    Escala a massa baixa (ℓ ≤ ⌊Q⌋) por (1 - β) e a alta por (1 + α).
    Devolve (pmf ajustada, α, β, viável).

    Com A, B as massas baixa/alta e E_low, E_high as médias condicionais,
    α·B = β·A = (Q - E) / (E_high - E_low). A forma condicional evita o
    cancelamento de E - E_low quando uma das massas é minúscula.
    """
    probs = np.asarray(probs, dtype=float)
    m = probs.shape[-1]
    levels = np.arange(1, m + 1, dtype=float)
    Q = np.broadcast_to(np.asarray(Q, dtype=float), probs.shape[:-1])

    low = levels <= np.floor(Q)[..., None]
    low_probs = np.where(low, probs, 0.0)
    high_probs = probs - low_probs
    low_mass = low_probs.sum(axis=-1)
    high_mass = high_probs.sum(axis=-1)
    gap = Q - (probs * levels).sum(axis=-1)
    both = (low_mass > 0.0) & (high_mass > 0.0)

    low_cond = np.divide(low_probs, low_mass[..., None], out=np.zeros_like(probs), where=(low_mass > 0.0)[..., None])
    high_cond = np.divide(high_probs, high_mass[..., None], out=np.zeros_like(probs), where=(high_mass > 0.0)[..., None])
    span = ((high_cond - low_cond) * levels).sum(axis=-1)   # E_high - E_low ≥ 1
    shift = np.divide(gap, span, out=np.zeros_like(gap), where=both)

    # folga do arredondamento de E, relativa a cada massa
    resolution = 8.0 * np.spacing(float(m))
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        alpha = np.where(both, shift / high_mass, np.inf)
        beta = np.where(both, shift / low_mass, np.inf)
        beta_slack = FEASIBILITY_TOLERANCE + resolution / (low_mass * span)
        alpha_slack = FEASIBILITY_TOLERANCE + resolution / (high_mass * span)
    alpha = np.where(gap == 0.0, 0.0, alpha)
    beta = np.where(gap == 0.0, 0.0, beta)

    feasible = (gap == 0.0) | (both & (beta <= 1.0 + beta_slack) & (alpha >= -1.0 - alpha_slack))
    adjusted = np.where(low, probs - low_cond * shift[..., None], probs + high_cond * shift[..., None])
    return np.clip(adjusted, 0.0, 1.0), alpha, beta, feasible


def adjust(pmf_L, Q: float, sigma: float = math.nan) -> ScorePmf:
    probs = np.asarray(pmf_L, dtype=float)
    m = probs.shape[-1]
    if not 1 <= math.floor(Q) <= m - 1:
        raise ValidationError(f"⌊Q⌋ fora de {{1..{m - 1}}} (Q={Q})", invariant="⌊Q⌋ ∈ {1..m−1}")

    adjusted, alpha, beta, feasible = adjust_many(probs, Q)
    if not bool(feasible):
        raise AdjustmentInfeasible(Q, sigma, float(alpha), float(beta))

    return ScorePmf(
        m=m,
        probs=tuple(float(p) for p in adjusted),
        quality=float(Q),
        sigma=float(sigma),
        alpha=float(alpha),
        beta=float(beta),
    )


@cached(cache=LRUCache(maxsize=8192), lock=threading.Lock())
def build_score_pmf(Q: float, sigma: float, m: int) -> ScorePmf:
    """discretize + adjust, memorizado (ScorePmf é imutável)."""
    return adjust(discretize(Q, sigma, m), Q, sigma)


def score_pmf_block(Q, sigma, m: int) -> np.ndarray:
    """pmf ajustada vetorizada; levanta AdjustmentInfeasible no primeiro caso inválido."""
    probs = discretize_many(Q, sigma, m)
    Q_full = np.broadcast_to(np.asarray(Q, dtype=float), probs.shape[:-1])
    adjusted, alpha, beta, feasible = adjust_many(probs, Q_full)
    if not feasible.all():
        bad = np.unravel_index(np.argmin(feasible), feasible.shape)
        sigma_full = np.broadcast_to(np.asarray(sigma, dtype=float), probs.shape[:-1])
        raise AdjustmentInfeasible(float(Q_full[bad]), float(sigma_full[bad]), float(alpha[bad]), float(beta[bad]))
    return adjusted


def assert_feasible(qualities, sigmas, m: int) -> None:
    """Checa o ajuste em todas as combinações (Q, σ) informadas."""
    Q = np.asarray(qualities, dtype=float)[:, None]
    S = np.asarray(sigmas, dtype=float)[None, :]
    score_pmf_block(np.broadcast_to(Q, (Q.shape[0], S.shape[1])), np.broadcast_to(S, (Q.shape[0], S.shape[1])), m)


def feasibility_points(m: int, points: int = app_config.FEASIBILITY_Q_POINTS) -> np.ndarray:
    """
    Grade uniforme em (1, m) mais pontos colados em cada inteiro.

    Dentro de (j, j+1) a massa alta cresce e a baixa decresce com Q, então os
    menores valores de B e A aparecem junto de j e de j+1.
    """
    grid = np.linspace(1.0, float(m), points + 2)[1:-1]
    offsets = np.logspace(-1, -12, 12)
    near = [grid]
    for j in range(1, m + 1):
        near.append(np.array([np.nextafter(j, -np.inf), np.nextafter(j, np.inf)]))
        near.append(j - offsets)
        near.append(j + offsets)
    Q = np.unique(np.concatenate(near))
    return Q[(Q > 1.0) & (Q < m)]


# =========================================================
# 3. MATCHING → (EXPERTISE, GRAU CRÍTICO) E σ
# =========================================================
def expertise_critical_many(mu, levels: int, critical_map: CriticalMap = CriticalMap.IDENTITY):
    mu = np.asarray(mu, dtype=float)
    expertise = np.minimum(np.floor(mu * levels).astype(np.int64) + 1, levels)
    return expertise, critical_map(mu)


def matching_to_expertise_critical(mu: float, l: int, f: CriticalMap = CriticalMap.IDENTITY):
    if not 0.0 <= mu <= 1.0:
        raise ValidationError(f"μ={mu} fora de [0,1]", invariant="0 ≤ μ ≤ 1")
    if l < 1:
        raise ValidationError(f"l={l} inválido", invariant="l ≥ 1")
    expertise, critical = expertise_critical_many(mu, l, f)
    return int(expertise), float(critical)


def sigma_many(policy: SigmaPolicy, critical=None, same_type=None):
    if policy.kind == SigmaKind.CONSTANT:
        return policy.sigma
    if policy.kind == SigmaKind.TWO_TYPE:
        if same_type is None:
            raise ValidationError("política two-type exige o indicador de mesmo tipo", invariant="same_type given")
        return np.where(same_type, policy.sigma_match, policy.sigma_mismatch)
    if critical is None:
        raise ValidationError("política linear exige o grau crítico", invariant="c given")
    return policy.a + policy.b * (1.0 - np.asarray(critical, dtype=float))


def sigma_of_critical(c: Optional[float], policy: SigmaPolicy, same_type: Optional[bool] = None) -> float:
    return float(sigma_many(policy, critical=c, same_type=same_type))


def reviewer_profile(mu: float, levels: int, critical_map: CriticalMap = CriticalMap.IDENTITY,
                     behavior: Behavior = Behavior.HONEST) -> ReviewerProfile:
    expertise, critical = matching_to_expertise_critical(mu, levels, critical_map)
    return ReviewerProfile(matching_degree=mu, critical_degree=critical, expertise=expertise, behavior=behavior)


# =========================================================
# 4. SORTEIO DE NOTAS E COMPORTAMENTOS
# =========================================================
def scores_from_uniforms(probs: np.ndarray, u) -> np.ndarray:
    """Inversa da CDF: menor ℓ com u < F(ℓ)."""
    cdf = np.cumsum(probs, axis=-1)
    u = np.asarray(u, dtype=float)
    return 1 + (u[..., None] >= cdf[..., :-1]).sum(axis=-1)


def sample_score(dist: ScorePmf, rng: np.random.Generator) -> int:
    return int(scores_from_uniforms(np.asarray(dist.probs), rng.random()))


def behavior_codes(u, behavior_mix: dict) -> np.ndarray:
    """Uma uniforme por revisão → código do comportamento (0 honesto)."""
    u = np.asarray(u, dtype=float)
    random_share = behavior_mix.get(Behavior.RANDOM_SCORING, 0.0)
    bias_share = behavior_mix.get(Behavior.BIAS_SCORING, 0.0)
    codes = np.zeros(u.shape, dtype=np.int64)
    codes[u < random_share + bias_share] = BEHAVIOR_CODES[Behavior.BIAS_SCORING]
    codes[u < random_share] = BEHAVIOR_CODES[Behavior.RANDOM_SCORING]
    return codes


def apply_behaviors(codes, honest_scores, u_random, m: int,
                    threshold: int = app_config.BIAS_LOW_THRESHOLD) -> np.ndarray:
    honest_scores = np.asarray(honest_scores)
    random_scores = np.minimum(1 + np.floor(np.asarray(u_random) * m).astype(np.int64), m)
    biased = np.where(honest_scores < threshold, m, 1)
    out = np.where(codes == BEHAVIOR_CODES[Behavior.RANDOM_SCORING], random_scores, honest_scores)
    return np.where(codes == BEHAVIOR_CODES[Behavior.BIAS_SCORING], biased, out)


def apply_behavior(behavior: Behavior, honest_score: int, m: int, rng: np.random.Generator,
                   threshold: int = app_config.BIAS_LOW_THRESHOLD) -> int:
    if not 1 <= honest_score <= m:
        raise ValidationError(f"nota {honest_score} fora de 1..{m}", invariant="1 ≤ s ≤ m")
    code = BEHAVIOR_CODES[Behavior(behavior)]
    u_random = rng.random() if code == BEHAVIOR_CODES[Behavior.RANDOM_SCORING] else 0.0
    return int(apply_behaviors(np.asarray(code), np.asarray(honest_score), u_random, m, threshold))
