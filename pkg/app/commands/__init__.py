# app/commands/__init__.py

from .simulate import simulate_cmd
from .exact import exact_cmd
from .plan import plan_cmd
from .reproduce import reproduce_cmd
from .compare import compare_cmd

__all__ = [
    "simulate_cmd",
    "exact_cmd",
    "plan_cmd",
    "reproduce_cmd",
    "compare_cmd",
]
