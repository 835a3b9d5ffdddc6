# models/scenario.py
import hashlib
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Mapping, Optional

import config as app_config
from .errors import ValidationError


# ---------------------------------------------------
# Seletividade (qualidade intrínseca)
# ---------------------------------------------------
class RegimeKind(str, Enum):
    HIGH = "high"
    MEDIUM = "medium"
    LOW = "low"
    RANDOM = "random"


@dataclass(frozen=True)
class SelectivityRegime:
    kind: RegimeKind
    m: int

    def __post_init__(self):
        if self.m < 2:
            raise ValidationError(f"teto de nota inválido: m={self.m}", invariant="m ≥ 2")

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "m": self.m}


class QualitySource(str, Enum):
    REGIME = "regime"            # redesenha Q a cada rodada
    LINEAR_GRID = "linear-grid"  # grade fixa Q_i = m - i(m-1)/(N+1)


# ---------------------------------------------------
# Revisores
# ---------------------------------------------------
class SigmaKind(str, Enum):
    CONSTANT = "constant"
    TWO_TYPE = "two-type"
    LINEAR_IN_CRITICAL = "linear-in-critical"


@dataclass(frozen=True)
class SigmaPolicy:
    kind: SigmaKind
    sigma: float = 1.0
    sigma_match: float = 0.5
    sigma_mismatch: float = 2.0
    a: float = 0.5
    b: float = 1.5

    def __post_init__(self):
        if self.kind == SigmaKind.CONSTANT and not self.sigma > 0:
            raise ValidationError(f"σ deve ser positivo (σ={self.sigma})", invariant="σ > 0")
        if self.kind == SigmaKind.TWO_TYPE and not (self.sigma_match > 0 and self.sigma_mismatch > 0):
            raise ValidationError("σ_match e σ_mismatch devem ser positivos", invariant="σ > 0")
        if self.kind == SigmaKind.LINEAR_IN_CRITICAL:
            if not self.a > 0:
                raise ValidationError(f"a deve ser positivo (a={self.a})", invariant="σ > 0")
            if not self.b > 0:
                # b = 0 deixaria σ constante em c
                raise ValidationError(f"b deve ser positivo (b={self.b})", invariant="σ decreasing in c")

    @classmethod
    def constant(cls, sigma: float) -> "SigmaPolicy":
        return cls(SigmaKind.CONSTANT, sigma=sigma)

    @classmethod
    def two_type(cls, sigma_match: float, sigma_mismatch: float) -> "SigmaPolicy":
        return cls(SigmaKind.TWO_TYPE, sigma_match=sigma_match, sigma_mismatch=sigma_mismatch)

    @classmethod
    def linear_in_critical(cls, a: float, b: float) -> "SigmaPolicy":
        return cls(SigmaKind.LINEAR_IN_CRITICAL, a=a, b=b)

    def sigma_values(self, points: int = 11) -> tuple:
        """Todos os σ que a política pode emitir (amostrados no caso linear)."""
        if self.kind == SigmaKind.CONSTANT:
            return (self.sigma,)
        if self.kind == SigmaKind.TWO_TYPE:
            return (self.sigma_match, self.sigma_mismatch)
        return tuple(self.a + self.b * (1.0 - j / (points - 1)) for j in range(points))

    def to_dict(self) -> dict:
        if self.kind == SigmaKind.CONSTANT:
            return {"kind": self.kind.value, "sigma": self.sigma}
        if self.kind == SigmaKind.TWO_TYPE:
            return {"kind": self.kind.value, "sigma_match": self.sigma_match,
                    "sigma_mismatch": self.sigma_mismatch}
        return {"kind": self.kind.value, "a": self.a, "b": self.b}


class CriticalMap(str, Enum):
    IDENTITY = "identity"
    SQUARE = "square"

    def __call__(self, mu):
        if self == CriticalMap.SQUARE:
            return mu * mu
        return mu


class MatchingKind(str, Enum):
    NONE = "none"
    TWO_TYPE = "two-type"
    MANY_TYPE = "many-type"


@dataclass(frozen=True)
class MatchingModel:
    kind: MatchingKind
    critical: float = 1.0          # NONE: grau crítico constante
    fraction: float = 1.0          # TWO_TYPE: fração ρ de revisões do mesmo tipo
    levels: int = 3                # MANY_TYPE: níveis de expertise l
    critical_map: CriticalMap = CriticalMap.IDENTITY

    def __post_init__(self):
        if not 0.0 <= self.critical <= 1.0:
            raise ValidationError(f"grau crítico fora de [0,1]: {self.critical}", invariant="0 ≤ c ≤ 1")
        if not 0.0 <= self.fraction <= 1.0:
            raise ValidationError(f"fração fora de [0,1]: {self.fraction}", invariant="0 ≤ ρ ≤ 1")
        if self.levels < 1:
            raise ValidationError(f"níveis de expertise inválidos: {self.levels}", invariant="l ≥ 1")

    @property
    def expertise_levels(self) -> int:
        if self.kind == MatchingKind.TWO_TYPE:
            return 2
        if self.kind == MatchingKind.MANY_TYPE:
            return self.levels
        return 1

    def to_dict(self) -> dict:
        if self.kind == MatchingKind.NONE:
            return {"kind": self.kind.value, "critical": self.critical}
        if self.kind == MatchingKind.TWO_TYPE:
            return {"kind": self.kind.value, "fraction": self.fraction}
        return {"kind": self.kind.value, "levels": self.levels,
                "critical_map": self.critical_map.value}


class Behavior(str, Enum):
    HONEST = "honest"
    RANDOM_SCORING = "random-scoring"
    BIAS_SCORING = "bias-scoring"


# ---------------------------------------------------
# Regras de decisão
# ---------------------------------------------------
class VotingKind(str, Enum):
    AVERAGE = "average"
    ELIMINATE_HIGH_LOW = "eliminate-high-low"
    PUNISH_LOW = "punish-low"
    WEIGHTED_AVERAGE = "weighted-average"


@dataclass(frozen=True)
class VotingRule:
    kind: VotingKind
    eta: Fraction = Fraction(app_config.DEFAULT_PUNISH_ETA)

    def __post_init__(self):
        if self.eta < 0:
            raise ValidationError(f"η negativo: {self.eta}", invariant="η ≥ 0")

    @property
    def min_reviews(self) -> int:
        return 3 if self.kind == VotingKind.ELIMINATE_HIGH_LOW else 1

    def to_dict(self) -> dict:
        if self.kind == VotingKind.PUNISH_LOW:
            return {"rule": self.kind.value, "eta": str(self.eta)}
        return {"rule": self.kind.value}


class TieBreakRule(str, Enum):
    RANDOM = "random"
    LEAST_VARIANCE = "least-variance"
    LARGEST_MAX = "largest-max"
    LARGEST_MIN = "largest-min"
    LARGEST_MEDIAN = "largest-median"


# ---------------------------------------------------
# Estratégia de revisão
# ---------------------------------------------------
class PlanKind(str, Enum):
    HOMOGENEOUS = "homogeneous"
    HETEROGENEOUS_TWO_ROUND = "hetero"


@dataclass(frozen=True)
class ReviewPlan:
    kind: PlanKind
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError(f"n inválido: {self.n}", invariant="n ≥ 1")
        if self.kind == PlanKind.HETEROGENEOUS_TWO_ROUND and self.n < 2:
            raise ValidationError("estratégia em duas rodadas exige n ≥ 2", invariant="⌊n/2⌋ ≥ 1")

    @classmethod
    def homogeneous(cls, n: int) -> "ReviewPlan":
        return cls(PlanKind.HOMOGENEOUS, n)

    @classmethod
    def heterogeneous(cls, n: int) -> "ReviewPlan":
        return cls(PlanKind.HETEROGENEOUS_TWO_ROUND, n)

    @property
    def round1_reviews(self) -> int:
        if self.kind == PlanKind.HOMOGENEOUS:
            return self.n
        return self.n // 2

    @property
    def round2_reviews(self) -> int:
        if self.kind == PlanKind.HOMOGENEOUS:
            return 0
        return 2 * math.ceil(self.n / 2)

    def survivors(self, n_papers: int) -> int:
        if self.kind == PlanKind.HOMOGENEOUS:
            return n_papers
        return math.ceil(n_papers / 2)

    @property
    def review_capacity(self) -> int:
        """Revisões que um paper pode receber somando as rodadas."""
        return self.round1_reviews + self.round2_reviews

    @property
    def stage_reviews(self) -> tuple:
        """Quantidade de revisões agregadas em cada etapa de seleção."""
        if self.kind == PlanKind.HOMOGENEOUS:
            return (self.n,)
        return (self.round1_reviews, self.review_capacity)

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "n": self.n}


# ---------------------------------------------------
# Cenário completo
# ---------------------------------------------------
# Maior chave inteira usada na ordenação exata dos γ
_KEY_LIMIT = 2 ** 62


def weighted_key_scale(n: int, levels: int) -> int:
    """mmc dos denominadores possíveis de Σe (n..n·l)."""
    return math.lcm(*range(n, n * levels + 1))


def default_metrics(n_papers: int) -> tuple:
    return tuple(i for i in app_config.DEFAULT_METRICS_I if i <= n_papers)


@dataclass(frozen=True)
class ScenarioConfig:
    n_papers: int
    k: int
    m: int
    review_policy: ReviewPlan
    regime: SelectivityRegime
    voting: VotingRule
    tiebreak: TieBreakRule
    seed: int
    sigma_policy: SigmaPolicy = SigmaPolicy(SigmaKind.CONSTANT)
    matching_model: MatchingModel = MatchingModel(MatchingKind.NONE)
    behavior_mix: Mapping = field(default_factory=dict)
    metrics_i: Optional[tuple] = None
    quality_source: QualitySource = QualitySource.REGIME
    quality_variance: Optional[float] = None
    review_capacity: Optional[int] = None
    bias_threshold: int = app_config.BIAS_LOW_THRESHOLD

    def __post_init__(self):
        if self.metrics_i is None:
            object.__setattr__(self, "metrics_i", default_metrics(self.n_papers))
        else:
            object.__setattr__(self, "metrics_i", tuple(sorted(set(int(i) for i in self.metrics_i))))
        object.__setattr__(
            self, "behavior_mix",
            {Behavior(b): float(f) for b, f in dict(self.behavior_mix).items() if Behavior(b) != Behavior.HONEST},
        )
        self.validate()

    # ---------------------------------------------------
    # Invariantes cruzados
    # ---------------------------------------------------
    def validate(self) -> None:
        N, k = self.n_papers, self.k

        if N < 1:
            raise ValidationError(f"N inválido: {N}", invariant="N ≥ 1")
        if k < 1:
            raise ValidationError(f"k inválido: {k}", invariant="k ≥ 1")
        if k > N:
            raise ValidationError(f"k={k} maior que N={N}", invariant="k ≤ N")
        if self.m < 2:
            raise ValidationError(f"m inválido: {self.m}", invariant="m ≥ 2")
        if self.regime.m != self.m:
            raise ValidationError("regime com teto diferente do cenário", invariant="regime.m = m")
        if not 0 <= self.seed < 2 ** 64:
            raise ValidationError(f"semente fora de 64 bits: {self.seed}", invariant="0 ≤ seed < 2^64")

        for i in self.metrics_i:
            if not 1 <= i <= N:
                raise ValidationError(f"métrica I_{i} fora de [1, N]", invariant="1 ≤ i ≤ N")

        total = 0.0
        for behavior, fraction in self.behavior_mix.items():
            if not 0.0 <= fraction <= 1.0:
                raise ValidationError(f"fração de {behavior.value} fora de [0,1]", invariant="0 ≤ fraction ≤ 1")
            total += fraction
        if total > 1.0 + 1e-12:
            raise ValidationError(f"frações de comportamento somam {total}", invariant="Σ fractions ≤ 1")

        if self.sigma_policy.kind == SigmaKind.TWO_TYPE and self.matching_model.kind != MatchingKind.TWO_TYPE:
            raise ValidationError("σ two-type exige matching two-type", invariant="two-type σ ⇒ two-type matching")

        if self.quality_variance is not None and not self.quality_variance > 0:
            raise ValidationError("variância de qualidade deve ser positiva", invariant="σ² > 0")

        plan = self.review_policy
        for reviews in plan.stage_reviews:
            if reviews < self.voting.min_reviews:
                raise ValidationError(
                    f"{self.voting.kind.value} exige ao menos {self.voting.min_reviews} revisões por etapa "
                    f"(etapa com {reviews})",
                    invariant="n_i ≥ 3",
                )
        if k > plan.survivors(N):
            raise ValidationError(f"k={k} maior que os sobreviventes da rodada 1", invariant="k ≤ ⌈N/2⌉")

        if self.review_capacity is not None and self.review_capacity < plan.review_capacity:
            raise ValidationError("capacidade de revisões menor que o plano", invariant="capacity ≥ plan reviews")

        if self.voting.kind == VotingKind.WEIGHTED_AVERAGE:
            levels = self.matching_model.expertise_levels
            for reviews in plan.stage_reviews:
                if weighted_key_scale(reviews, levels) * reviews * self.m * levels >= _KEY_LIMIT:
                    raise ValidationError("chave exata do weighted-average estoura 63 bits",
                                          invariant="weighted key < 2^62")

    # ---------------------------------------------------
    # Helpers
    # ---------------------------------------------------
    @property
    def draw_capacity(self) -> int:
        return self.review_capacity or self.review_policy.review_capacity

    def to_dict(self) -> dict:
        data = {
            "n_papers": self.n_papers,
            "k": self.k,
            "m": self.m,
            "review_policy": self.review_policy.to_dict(),
            "regime": self.regime.kind.value,
            "quality_source": self.quality_source.value,
            "voting": self.voting.to_dict(),
            "tiebreak": self.tiebreak.value,
            "sigma_policy": self.sigma_policy.to_dict(),
            "matching_model": self.matching_model.to_dict(),
            "behavior_mix": {b.value: f for b, f in sorted(self.behavior_mix.items(), key=lambda x: x[0].value)},
            "metrics_i": list(self.metrics_i),
            "seed": self.seed,
            "bias_threshold": self.bias_threshold,
        }
        if self.quality_variance is not None:
            data["quality_variance"] = self.quality_variance
        if self.review_capacity is not None:
            data["review_capacity"] = self.review_capacity
        return data

    def digest(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=False, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class RunParams:
    rounds: Optional[int] = None
    guarantee: Optional[object] = None   # GuaranteeSpec
    out: Optional[str] = None
    workers: Optional[int] = None

    def __post_init__(self):
        if self.rounds is not None and self.rounds < 1:
            raise ValidationError(f"rodadas inválidas: {self.rounds}", invariant="K ≥ 1")
        if self.workers is not None and self.workers < 1:
            raise ValidationError(f"workers inválido: {self.workers}", invariant="workers ≥ 1")

    def to_dict(self) -> dict:
        data = {}
        if self.rounds is not None:
            data["rounds"] = self.rounds
        if self.guarantee is not None:
            data["guarantee"] = self.guarantee.to_dict()
        if self.out is not None:
            data["out"] = self.out
        if self.workers is not None:
            data["workers"] = self.workers
        return data
