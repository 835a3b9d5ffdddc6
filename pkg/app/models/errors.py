# models/errors.py
from typing import Optional


class GroupRecError(Exception):
    """Base de todos os erros de domínio; `exit_code` é usado pela CLI."""

    exit_code = 1


class ValidationError(GroupRecError):
    """Configuração ou entrada que viola um invariante do modelo."""

    exit_code = 2

    def __init__(self, message: str, invariant: Optional[str] = None):
        super().__init__(message)
        self.invariant = invariant


class ParseError(ValidationError):
    """Arquivo de cenário ilegível ou com campo de tipo errado."""

    def __init__(self, message: str, line: Optional[int] = None, field: Optional[str] = None):
        where = []
        if line is not None:
            where.append(f"linha {line}")
        if field is not None:
            where.append(f"campo '{field}'")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)
        self.line = line
        self.field = field


class UnknownPreset(ValidationError):
    pass


class InsufficientReviews(ValidationError):
    pass


class InstanceTooLarge(ValidationError):
    pass


class BudgetExceeded(ValidationError):
    pass


class ConfigMismatch(ValidationError):
    pass


class AdjustmentInfeasible(GroupRecError):
    """O ajuste de média (α, β) produziu probabilidade fora de [0, 1]."""

    exit_code = 3

    def __init__(self, quality: float, sigma: float, alpha: float, beta: float):
        super().__init__(
            f"ajuste inviável para Q={quality:.6g}, σ={sigma:.6g} (α={alpha:.6g}, β={beta:.6g})"
        )
        self.quality = quality
        self.sigma = sigma
        self.alpha = alpha
        self.beta = beta


class RunCanceled(GroupRecError):
    exit_code = 130


__all__ = [
    "GroupRecError",
    "ValidationError",
    "ParseError",
    "UnknownPreset",
    "InsufficientReviews",
    "InstanceTooLarge",
    "BudgetExceeded",
    "ConfigMismatch",
    "AdjustmentInfeasible",
    "RunCanceled",
]
