# models/exact.py
import math
from dataclasses import dataclass

import config as app_config
from .errors import ValidationError
from .score import ScorePmf


@dataclass(frozen=True)
class AvgScorePmf:
    """
    Distribuição da soma das n notas de um paper (γ = total / n).
    masses[t] = Pr[total = n + t], para total em n..n·m.
    """

    n: int
    m: int
    masses: tuple

    def __post_init__(self):
        if len(self.masses) != self.n * (self.m - 1) + 1:
            raise ValidationError("suporte da média incompatível com (n, m)", invariant="support = [n, nm]")

    @property
    def totals(self) -> range:
        return range(self.n, self.n * self.m + 1)

    @property
    def mass(self) -> dict:
        return {total: p for total, p in zip(self.totals, self.masses)}

    def pmf(self, total: int) -> float:
        if total < self.n or total > self.n * self.m:
            return 0.0
        return self.masses[total - self.n]

    def cdf(self, total: int) -> float:
        """Pr[γ ≤ total/n] como soma de prefixo (compensada)."""
        if total < self.n:
            return 0.0
        return math.fsum(self.masses[: min(total, self.n * self.m) - self.n + 1])

    def sf(self, total: int) -> float:
        """Pr[γ > total/n] como soma de sufixo (sem cancelamento em 1 - cdf)."""
        if total < self.n:
            return 1.0
        return math.fsum(self.masses[total - self.n + 1:])


@dataclass(frozen=True)
class ExactInstance:
    """
    Caso especial: papers e revisores homogêneos, regra da média, desempate aleatório.
    Por convenção os papers estão indexados em ordem decrescente de qualidade,
    então A^I(k) = {0, ..., k-1}.
    """

    n_papers: int
    k: int
    n: int
    m: int
    score_pmfs: tuple
    size_guard: int = app_config.EXACT_SIZE_GUARD

    def __post_init__(self):
        object.__setattr__(self, "score_pmfs", tuple(self.score_pmfs))
        if len(self.score_pmfs) != self.n_papers:
            raise ValidationError("uma ScorePmf por paper", invariant="len(score_pmfs) = N")
        if not 1 <= self.k <= self.n_papers:
            raise ValidationError(f"k={self.k} fora de [1, N={self.n_papers}]", invariant="k ≤ N")
        if self.n < 1:
            raise ValidationError(f"n inválido: {self.n}", invariant="n ≥ 1")
        if any(p.m != self.m for p in self.score_pmfs):
            raise ValidationError("pmf com teto diferente de m", invariant="pmf.m = m")

    @classmethod
    def from_pmfs(cls, probs_per_paper, k: int, n: int = 1, **kwargs) -> "ExactInstance":
        pmfs = tuple(ScorePmf.from_probs(p) for p in probs_per_paper)
        return cls(n_papers=len(pmfs), k=k, n=n, m=pmfs[0].m, score_pmfs=pmfs, **kwargs)

    @property
    def truth_set(self) -> frozenset:
        return frozenset(range(self.k))

    def to_dict(self) -> dict:
        return {
            "n_papers": self.n_papers,
            "k": self.k,
            "n": self.n,
            "m": self.m,
            "qualities": [p.quality for p in self.score_pmfs],
            "size_guard": self.size_guard,
        }
