# services/exact_solver.py
"""
Solução exata do caso especial: revisores homogêneos, regra da média e
desempate aleatório. Como γ_i = total_i / n com o mesmo n para todos, todas as
comparações são feitas sobre os totais inteiros.

Pr[A(k) = S] soma, em cada nível ℓ da fronteira, os eventos em que o pior
paper de S está em ℓ:
    F ⊆ S  papers de S empatados em ℓ (não vazio), S \\ F acima de ℓ
    G ⊆ S̄  papers de fora empatados em ℓ, S̄ \\ G abaixo de ℓ
com peso 1 / C(|F| + |G|, |F|) para o sorteio favorecer exatamente F.
G = ∅ é o termo de dominância estrita. Os termos dependem só de |F| e |G|,
então cada lado vira um polinômio em x cujo coeficiente de x^f soma todos os
subconjuntos de tamanho f.
"""
import itertools
import math
import threading
import time

from cachetools import LRUCache, cached

import config as app_config
from app.models import (
    AvgScorePmf,
    BudgetExceeded,
    ExactInstance,
    InstanceTooLarge,
    ScorePmf,
    ValidationError,
)
from app.services import quality_model, score_model
from app.utils.structured_logging import log_event


# =========================================================
# 1. DISTRIBUIÇÃO DO TOTAL DE n NOTAS
# =========================================================
@cached(cache=LRUCache(maxsize=1024), lock=threading.Lock())
def avg_score_pmf(score_pmf: ScorePmf, n: int) -> AvgScorePmf:
    """Convolução n-vezes da pmf de uma nota; masses[t] = Pr[total = n + t]."""
    if n < 1:
        raise ValidationError(f"n inválido: {n}", invariant="n ≥ 1")

    probs = score_pmf.probs
    m = score_pmf.m
    current = list(probs)  # totais 1..m
    for _ in range(n - 1):
        width = len(current) + m - 1
        terms = [[] for _ in range(width)]
        for offset, p in enumerate(current):
            for level, q in enumerate(probs):
                terms[offset + level].append(p * q)
        current = [math.fsum(t) for t in terms]

    return AvgScorePmf(n=n, m=m, masses=tuple(current))


def grid_instance(n_papers: int, k: int, n: int, m: int, sigma: float = 1.0,
                  size_guard: int = app_config.EXACT_SIZE_GUARD) -> ExactInstance:
    """Instância da grade linear de qualidades (paper 0 = melhor) com σ constante."""
    qualities = quality_model.linear_quality_grid(n_papers, m)
    pmfs = tuple(score_model.build_score_pmf(float(q), float(sigma), m) for q in qualities)
    return ExactInstance(n_papers=n_papers, k=k, n=n, m=m, score_pmfs=pmfs, size_guard=size_guard)


def enumeration_cost(n_papers: int, k: int) -> int:
    """Combinações (S, F, G) visitadas por intersection_pmf_exact."""
    return math.comb(n_papers, k) * (2 ** k - 1) * 2 ** (n_papers - k)


def _check_guard(instance: ExactInstance) -> None:
    if instance.n_papers > instance.size_guard:
        cost = enumeration_cost(instance.n_papers, instance.k)
        raise InstanceTooLarge(
            f"N={instance.n_papers} acima do limite {instance.size_guard} "
            f"({cost:.3e} combinações de conjuntos)",
            invariant=f"N ≤ {instance.size_guard}",
        )


# =========================================================
# 2. TABELAS POR NÍVEL
# =========================================================
class _LevelTables:
    """Pr[total = ℓ], Pr[total > ℓ] e Pr[total < ℓ] de cada paper, por nível ℓ."""

    def __init__(self, instance: ExactInstance):
        n, m = instance.n, instance.m
        self.levels = range(n, n * m + 1)
        dists = [avg_score_pmf(pmf, n) for pmf in instance.score_pmfs]
        self.eq = [[d.pmf(t) for t in self.levels] for d in dists]
        self.gt = [[d.sf(t) for t in self.levels] for d in dists]
        self.lt = [[d.cdf(t - 1) for t in self.levels] for d in dists]

    def polynomial(self, papers, level: int, rest) -> list:
        """Coeficientes de Π (rest_i + eq_i·x) sobre `papers` no nível dado."""
        coeffs = [1.0]
        for i in papers:
            base, tied = rest[i][level], self.eq[i][level]
            nxt = [0.0] * (len(coeffs) + 1)
            for f, c in enumerate(coeffs):
                nxt[f] += c * base
                nxt[f + 1] += c * tied
            coeffs = nxt
        return coeffs

    def set_terms(self, target, others) -> list:
        terms = []
        for level in range(len(self.levels)):
            inside = self.polynomial(target, level, self.gt)
            outside = self.polynomial(others, level, self.lt)
            for f in range(1, len(inside)):
                if inside[f] == 0.0:
                    continue
                for g, b in enumerate(outside):
                    if b != 0.0:
                        terms.append(inside[f] * b / math.comb(f + g, f))
        return terms


def _validate_target(instance: ExactInstance, target_set) -> tuple:
    target = tuple(sorted(set(int(i) for i in target_set)))
    if len(target) != instance.k:
        raise ValidationError(f"conjunto alvo com {len(target)} papers, esperado k={instance.k}",
                              invariant="|target| = k")
    if target and not (0 <= target[0] and target[-1] < instance.n_papers):
        raise ValidationError("índice de paper fora de [0, N)", invariant="0 ≤ i < N")
    return target


# =========================================================
# 3. OPERAÇÕES EXATAS
# =========================================================
def prob_accept_set(instance: ExactInstance, target_set) -> float:
    _check_guard(instance)
    target = _validate_target(instance, target_set)
    others = tuple(i for i in range(instance.n_papers) if i not in target)
    tables = _LevelTables(instance)
    return math.fsum(tables.set_terms(target, others))


def intersection_pmf_exact(instance: ExactInstance) -> tuple:
    """pmf de I(k) = |A^I(k) ∩ A(k)| em {0..k}, somando Pr[A(k) = S] sobre todos os S."""
    _check_guard(instance)
    started = time.perf_counter()

    tables = _LevelTables(instance)
    truth = instance.truth_set
    papers = range(instance.n_papers)
    buckets = [[] for _ in range(instance.k + 1)]

    for target in itertools.combinations(papers, instance.k):
        chosen = set(target)
        others = tuple(i for i in papers if i not in chosen)
        hits = len(chosen & truth)
        buckets[hits].append(math.fsum(tables.set_terms(target, others)))

    pmf = tuple(math.fsum(b) for b in buckets)
    log_event(
        "exact.solve",
        n_papers=instance.n_papers,
        k=instance.k,
        n=instance.n,
        m=instance.m,
        sets=math.comb(instance.n_papers, instance.k),
        duration_ms=round((time.perf_counter() - started) * 1000, 2),
    )
    return pmf


def pmf_moments(pmf) -> tuple:
    """(E, Var) de uma pmf em {0..len-1}."""
    mean = math.fsum(i * p for i, p in enumerate(pmf))
    var = math.fsum((i - mean) ** 2 * p for i, p in enumerate(pmf))
    return mean, var


# =========================================================
# 4. ORÁCULO DE FORÇA BRUTA
# =========================================================
def _oracle_steps(instance: ExactInstance) -> int:
    assignments = instance.m ** (instance.n_papers * instance.n)
    return assignments * math.comb(instance.n_papers, instance.n_papers // 2)


def _paper_totals(score_pmf: ScorePmf, n: int) -> dict:
    # enumera as m^n tuplas de notas do paper
    terms: dict[int, list] = {}
    levels = range(1, score_pmf.m + 1)
    for scores in itertools.product(levels, repeat=n):
        p = math.prod(score_pmf.probs[s - 1] for s in scores)
        if p > 0.0:
            terms.setdefault(sum(scores), []).append(p)
    return {total: math.fsum(ps) for total, ps in sorted(terms.items())}


def _resolve_ties(totals, k: int, truth: frozenset, weight: float, buckets) -> None:
    cutoff = sorted(totals, reverse=True)[k - 1]
    above = [i for i, t in enumerate(totals) if t > cutoff]
    tied = [i for i, t in enumerate(totals) if t == cutoff]
    slots = k - len(above)
    base_hits = sum(1 for i in above if i in truth)

    outcomes = list(itertools.combinations(tied, slots))
    share = weight / len(outcomes)
    for chosen in outcomes:
        buckets[base_hits + sum(1 for i in chosen if i in truth)].append(share)


def brute_force_oracle(instance: ExactInstance) -> tuple:
    """
    Enumera todas as atribuições de notas, pondera pela probabilidade conjunta
    e resolve cada empate pela média exata sobre todos os sorteios possíveis.
    """
    steps = _oracle_steps(instance)
    if steps > app_config.ORACLE_STEP_BUDGET:
        raise BudgetExceeded(
            f"oráculo exigiria {steps:.3e} passos (limite {app_config.ORACLE_STEP_BUDGET:.0e})",
            invariant="oracle steps ≤ budget",
        )
    started = time.perf_counter()

    per_paper = [list(_paper_totals(pmf, instance.n).items()) for pmf in instance.score_pmfs]
    truth = instance.truth_set
    buckets = [[] for _ in range(instance.k + 1)]

    for assignment in itertools.product(*per_paper):
        weight = math.prod(p for _, p in assignment)
        if weight == 0.0:
            continue
        _resolve_ties([t for t, _ in assignment], instance.k, truth, weight, buckets)

    pmf = tuple(math.fsum(b) for b in buckets)
    log_event(
        "oracle.solve",
        n_papers=instance.n_papers,
        k=instance.k,
        n=instance.n,
        m=instance.m,
        steps=steps,
        duration_ms=round((time.perf_counter() - started) * 1000, 2),
    )
    return pmf
