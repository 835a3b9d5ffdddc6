# models/score.py
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import InsufficientReviews, ValidationError
from .scenario import Behavior

# Tolerâncias dos invariantes de ScorePmf
MASS_TOLERANCE = 1e-12
MEAN_TOLERANCE = 1e-9


@dataclass(frozen=True)
class ScorePmf:
    """
    Distribuição de uma nota individual em {1..m}.
    probs[ℓ-1] = Pr[S = ℓ]; guarda Q, σ e os fatores do ajuste (α, β).
    """

    m: int
    probs: tuple
    quality: float
    sigma: float
    alpha: float = 0.0
    beta: float = 0.0

    def __post_init__(self):
        if len(self.probs) != self.m:
            raise ValidationError(f"pmf com {len(self.probs)} entradas para m={self.m}", invariant="len(probs) = m")
        if any(p < 0.0 or p > 1.0 for p in self.probs):
            raise ValidationError("probabilidade fora de [0,1]", invariant="0 ≤ p ≤ 1")
        total = math.fsum(self.probs)
        if abs(total - 1.0) > MASS_TOLERANCE:
            raise ValidationError(f"massa total {total!r}", invariant="Σ probs = 1")
        if abs(self.mean() - self.quality) > MEAN_TOLERANCE:
            raise ValidationError(f"média {self.mean()!r} difere de Q={self.quality!r}", invariant="E[S] = Q")

    @classmethod
    def from_probs(cls, probs) -> "ScorePmf":
        """pmf arbitrária (sem origem normal); Q passa a ser a própria média."""
        probs = tuple(float(p) for p in probs)
        quality = math.fsum((level + 1) * p for level, p in enumerate(probs))
        return cls(m=len(probs), probs=probs, quality=quality, sigma=0.0)

    def mean(self) -> float:
        return math.fsum((level + 1) * p for level, p in enumerate(self.probs))

    def cdf(self) -> tuple:
        acc = []
        for level in range(self.m):
            acc.append(math.fsum(self.probs[: level + 1]))
        return tuple(acc)

    def lower_mass(self) -> float:
        """Massa em ℓ ≤ ⌊Q⌋."""
        return math.fsum(self.probs[: math.floor(self.quality)])

    def upper_mass(self) -> float:
        return math.fsum(self.probs[math.floor(self.quality):])

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "probs": list(self.probs),
            "quality": self.quality,
            "sigma": self.sigma,
            "alpha": self.alpha,
            "beta": self.beta,
        }


@dataclass(frozen=True)
class ReviewerProfile:
    matching_degree: float
    critical_degree: float
    expertise: int
    behavior: Behavior = Behavior.HONEST

    def to_dict(self) -> dict:
        return {
            "matching_degree": self.matching_degree,
            "critical_degree": self.critical_degree,
            "expertise": self.expertise,
            "behavior": self.behavior.value,
        }


@dataclass(frozen=True)
class ReviewSet:
    scores: tuple
    expertise: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "scores", tuple(int(s) for s in self.scores))
        if self.expertise is None:
            object.__setattr__(self, "expertise", tuple(1 for _ in self.scores))
        else:
            object.__setattr__(self, "expertise", tuple(int(e) for e in self.expertise))
        if len(self.scores) < 1:
            raise InsufficientReviews("paper sem revisões", invariant="n_i ≥ 1")
        if len(self.scores) != len(self.expertise):
            raise ValidationError("notas e expertise com tamanhos diferentes", invariant="len(scores) = len(expertise)")
        if any(e < 1 for e in self.expertise):
            raise ValidationError("expertise deve ser ≥ 1", invariant="e ≥ 1")

    @property
    def n(self) -> int:
        return len(self.scores)

    def extended(self, other: "ReviewSet") -> "ReviewSet":
        """Junta revisões de rodadas diferentes do mesmo paper."""
        return ReviewSet(self.scores + other.scores, self.expertise + other.expertise)


@dataclass(frozen=True)
class AggregateScore:
    """γ exato (Fraction normalizada) mais os metadados de desempate."""

    gamma: Fraction
    variance: Fraction
    max: int
    min: int
    median: Fraction

    def to_dict(self) -> dict:
        return {
            "gamma": str(self.gamma),
            "variance": str(self.variance),
            "max": self.max,
            "min": self.min,
            "median": str(self.median),
        }
