"""
Métricas de certificación. Las curvas de convergencia viven en core.analysis.curves.
"""

from .metrics import (
    AutoregressiveEvaluator,
    chi_square_gof,
    chi_square_statistic,
    empirical_distribution,
    nll_and_ppl,
    tv_distance,
)

__all__ = [
    'AutoregressiveEvaluator',
    'chi_square_gof',
    'chi_square_statistic',
    'empirical_distribution',
    'nll_and_ppl',
    'tv_distance',
]
