"""Vacca-type rational series for Euler's constant and ln(4/pi).

Exact rational terms, certified enclosures, finite-range verification of the
underlying identities, and a convergence benchmark across bases q.
"""

from .digits import Sign, count_binary_digits, delta, epsilon, floor_log
from .errors import BudgetExhausted, PrecisionUnreachable, UnalignedCut, VaccaError
from .numerics import Enclosure, a_term, decimal_render, log_ratio, rational_sum
from .series import EvalReport, Family, SeriesId, evaluate, partial_sum, rational_term, tail_bound

__version__ = "0.1.0"

__all__ = [
    "BudgetExhausted", "Enclosure", "EvalReport", "Family", "PrecisionUnreachable", "SeriesId",
    "Sign", "UnalignedCut", "VaccaError", "a_term", "count_binary_digits", "decimal_render",
    "delta", "epsilon", "evaluate", "floor_log", "log_ratio", "partial_sum", "rational_sum",
    "rational_term", "tail_bound",
]
