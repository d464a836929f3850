"""
Dinámica de Glauber inversa: muestreo, relleno condicional y propagación exacta.
"""

from .exact import reverse_propagate_exact, theorem1_min_steps
from .sampler import (
    Prompt,
    ReverseDiagnostics,
    SamplerConfig,
    conditional_sample,
    posterior_probs,
    query_step,
    reverse_step,
    sample,
    sample_batch,
    top_p_filter,
)

__all__ = [
    'reverse_propagate_exact',
    'theorem1_min_steps',
    'Prompt',
    'ReverseDiagnostics',
    'SamplerConfig',
    'conditional_sample',
    'posterior_probs',
    'query_step',
    'reverse_step',
    'sample',
    'sample_batch',
    'top_p_filter',
]
