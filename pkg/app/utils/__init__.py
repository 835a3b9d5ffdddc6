# app/utils/__init__.py

from . import structured_logging
from . import rng

__all__ = [
    "structured_logging",
    "rng",
]
