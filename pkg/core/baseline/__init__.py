"""
Línea base de Gibbs: modelos condicionales, pasos, cadenas y propagación exacta.
"""

from .gibbs import (
    ConditionalModel,
    DenoiserConditional,
    ExactConditional,
    gibbs_propagate_exact,
    gibbs_run,
    gibbs_step,
)

__all__ = [
    'ConditionalModel',
    'DenoiserConditional',
    'ExactConditional',
    'gibbs_propagate_exact',
    'gibbs_run',
    'gibbs_step',
]
