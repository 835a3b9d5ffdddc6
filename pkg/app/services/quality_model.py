# services/quality_model.py
"""
Qualidade intrínseca dos papers sob os quatro regimes de auto-seletividade
e a grade determinística do caso especial.
"""
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import ndtr, ndtri

from app.models import QualitySource, RegimeKind, ScenarioConfig, SelectivityRegime, ValidationError
from app.utils.rng import open_unit


@dataclass(frozen=True)
class TruncatedNormal:
    mean: float
    variance: float
    upper: float
    lower: float = 1.0

    def __post_init__(self):
        if not self.variance > 0:
            raise ValidationError(f"variância deve ser positiva: {self.variance}", invariant="σ² > 0")
        if not self.lower < self.upper:
            raise ValidationError("intervalo de truncamento vazio", invariant="lower < upper")

    @property
    def sigma(self) -> float:
        return math.sqrt(self.variance)

    def _bounds(self):
        a = (self.lower - self.mean) / self.sigma
        b = (self.upper - self.mean) / self.sigma
        return a, b

    def cdf(self, x):
        a, b = self._bounds()
        z = (np.asarray(x, dtype=float) - self.mean) / self.sigma
        inside = (ndtr(z) - ndtr(a)) / (ndtr(b) - ndtr(a))
        return np.clip(inside, 0.0, 1.0)

    def pdf(self, x):
        a, b = self._bounds()
        x = np.asarray(x, dtype=float)
        z = (x - self.mean) / self.sigma
        dens = np.exp(-0.5 * z * z) / (math.sqrt(2.0 * math.pi) * self.sigma) / (ndtr(b) - ndtr(a))
        return np.where((x > self.lower) & (x < self.upper), dens, 0.0)

    def ppf(self, u):
        """
        Inversa da CDF truncada; u em [0, 1) é levado para o aberto (0, 1) e o
        resultado fica estritamente dentro de (lower, upper).
        """
        a, b = self._bounds()
        pa, pb = ndtr(a), ndtr(b)
        u = open_unit(np.asarray(u, dtype=float))
        x = self.mean + self.sigma * ndtri(pa + u * (pb - pa))
        return np.clip(x, np.nextafter(self.lower, np.inf), np.nextafter(self.upper, -np.inf))

    def expected_value(self) -> float:
        a, b = self._bounds()
        phi_a = math.exp(-0.5 * a * a) / math.sqrt(2.0 * math.pi)
        phi_b = math.exp(-0.5 * b * b) / math.sqrt(2.0 * math.pi)
        return self.mean + self.sigma * (phi_a - phi_b) / float(ndtr(b) - ndtr(a))


# ---------------------------------------------------
# Regimes
# ---------------------------------------------------
def regime_params(regime: SelectivityRegime):
    """(q, σ²) do regime; Random devolve (None, inf)."""
    m = regime.m
    if regime.kind == RegimeKind.HIGH:
        return float(m), 1.0
    if regime.kind == RegimeKind.MEDIUM:
        return (m + 1) / 2.0, 1.0
    if regime.kind == RegimeKind.LOW:
        return 1.0, 1.0
    return None, math.inf


def regime_distribution(regime: SelectivityRegime, variance: Optional[float] = None) -> Optional[TruncatedNormal]:
    mean, default_variance = regime_params(regime)
    if mean is None:
        return None
    return TruncatedNormal(mean=mean, variance=variance or default_variance, lower=1.0, upper=float(regime.m))


def qualities_from_uniforms(regime: SelectivityRegime, u, variance: Optional[float] = None) -> np.ndarray:
    """Uma uniforme por paper, qualquer formato de array."""
    dist = regime_distribution(regime, variance)
    if dist is None:
        m = float(regime.m)
        values = 1.0 + (m - 1.0) * open_unit(np.asarray(u, dtype=float))
        return np.clip(values, np.nextafter(1.0, np.inf), np.nextafter(m, -np.inf))
    return dist.ppf(u)


def sample_qualities(regime: SelectivityRegime, N: int, rng: np.random.Generator,
                     variance: Optional[float] = None) -> np.ndarray:
    if N < 1:
        raise ValidationError(f"N inválido: {N}", invariant="N ≥ 1")
    return qualities_from_uniforms(regime, rng.random(N), variance)


def linear_quality_grid(N: int, m: int) -> np.ndarray:
    if N < 1 or m < 2:
        raise ValidationError(f"grade inválida (N={N}, m={m})", invariant="N ≥ 1, m ≥ 2")
    i = np.arange(1, N + 1, dtype=float)
    return m - i * (m - 1) / (N + 1)


def round_qualities(config: ScenarioConfig, u: np.ndarray) -> np.ndarray:
    """Qualidades (B, N) de um bloco de rodadas."""
    if config.quality_source == QualitySource.LINEAR_GRID:
        grid = linear_quality_grid(config.n_papers, config.m)
        return np.broadcast_to(grid, u.shape)
    return qualities_from_uniforms(config.regime, u, config.quality_variance)
