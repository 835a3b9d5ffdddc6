# models/report.py
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional

from .errors import ValidationError


class BoundKind(str, Enum):
    LOOSE = "loose"
    TIGHT = "tight"


@dataclass(frozen=True)
class GuaranteeSpec:
    epsilon: float
    delta: float
    bound: BoundKind
    k: int
    p_floor: Optional[float] = None

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValidationError(f"ε deve ser positivo (ε={self.epsilon})", invariant="ε > 0")
        if not 0 < self.delta < 1:
            raise ValidationError(f"δ fora de (0,1): {self.delta}", invariant="0 < δ < 1")
        if self.k < 1:
            raise ValidationError(f"k inválido: {self.k}", invariant="k ≥ 1")
        if self.bound == BoundKind.LOOSE:
            if self.p_floor is None or not 0 < self.p_floor <= 1:
                raise ValidationError(f"p_floor fora de (0,1]: {self.p_floor}", invariant="0 < p_floor ≤ 1")

    def to_dict(self) -> dict:
        data = {"epsilon": self.epsilon, "delta": self.delta, "bound": self.bound.value, "k": self.k}
        if self.p_floor is not None:
            data["p_floor"] = self.p_floor
        return data


@dataclass(frozen=True)
class AccuracyReport:
    """
    Resultado do estimador: histogramas por rodada de I_i (sempre inclui i = k).
    Tudo o que é derivado (pmf, E, Var) sai dos histogramas, então dois relatórios
    com os mesmos histogramas são idênticos campo a campo.
    """

    k: int
    K: int
    seed: int
    config_digest: str
    histograms: dict
    rounds: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.K < 1:
            raise ValidationError("relatório sem rodadas", invariant="K ≥ 1")
        if self.k not in self.histograms:
            raise ValidationError("histograma de I(k) ausente", invariant="I(k) tallied")
        for i, hist in self.histograms.items():
            if sum(hist) != self.K:
                raise ValidationError(f"histograma de I_{i} soma {sum(hist)} != K={self.K}", invariant="Σ counts = K")

    # ---------------------------------------------------
    # Campos do estimador
    # ---------------------------------------------------
    @property
    def counts(self) -> tuple:
        return tuple(self.histograms[self.k])

    @property
    def metrics_i(self) -> tuple:
        return tuple(sorted(self.histograms))

    @property
    def pmf_hat(self) -> tuple:
        return tuple(Fraction(c, self.K) for c in self.counts)

    def mean_fraction(self, i: int) -> Fraction:
        hist = self.histograms[i]
        return Fraction(sum(v * c for v, c in enumerate(hist)), self.K)

    def variance_fraction(self, i: int) -> Fraction:
        """Σ (v - Ê)² p̂_v, calculada em racionais."""
        hist = self.histograms[i]
        second = Fraction(sum(v * v * c for v, c in enumerate(hist)), self.K)
        mean = self.mean_fraction(i)
        return second - mean * mean

    @property
    def e_hat(self) -> dict:
        return {i: float(self.mean_fraction(i)) for i in self.metrics_i}

    @property
    def var_hat(self) -> dict:
        return {i: float(self.variance_fraction(i)) for i in self.metrics_i}

    def stderr(self, i: int) -> float:
        return math.sqrt(float(self.variance_fraction(i)) / self.K)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "K": self.K,
            "seed": self.seed,
            "config_digest": self.config_digest,
            "counts": list(self.counts),
            "pmf_hat": [float(p) for p in self.pmf_hat],
            "E_hat": self.e_hat,
            "Var_hat": self.var_hat,
            "rounds": [list(r) for r in self.rounds],
        }


@dataclass(frozen=True)
class ImprovementReport:
    delta_e: dict
    ratio: dict
    workloads: tuple
    e_hom: dict
    e_het: dict
    stderr_hom: dict
    stderr_het: dict
    K: int
    seed: int

    def to_dict(self) -> dict:
        return {
            "delta_E": self.delta_e,
            "ratio": self.ratio,
            "workloads": {"hom": self.workloads[0], "hetero": self.workloads[1]},
            "E_hom": self.e_hom,
            "E_het": self.e_het,
            "stderr_hom": self.stderr_hom,
            "stderr_het": self.stderr_het,
            "K": self.K,
            "seed": self.seed,
        }


# ---------------------------------------------------
# Saída tabular (CSV)
# ---------------------------------------------------
REPORT_COLUMNS = ("scenario", "metric", "i_or_bin", "value", "stderr", "K", "seed")


@dataclass(frozen=True)
class ReportRow:
    scenario: str
    metric: str
    i_or_bin: int
    value: float
    stderr: Optional[float]
    K: int
    seed: int

    def as_tuple(self) -> tuple:
        return (self.scenario, self.metric, self.i_or_bin, self.value, self.stderr, self.K, self.seed)


@dataclass(frozen=True)
class ReportCsv:
    comments: tuple
    rows: tuple

    def find(self, scenario: str, metric: str, i_or_bin: int) -> Optional[ReportRow]:
        for row in self.rows:
            if row.scenario == scenario and row.metric == metric and row.i_or_bin == i_or_bin:
                return row
        return None
