"""
Proceso forward: ruido posición a posición, muestreo directo y propagación exacta.
"""

from .exact import forward_kernel, forward_propagate_exact, forward_tensors, forward_tv_curve, lemma1_bound
from .process import (
    ForwardTriple,
    direct_position_marginal,
    flip_matrix,
    flip_probability,
    forward_sample_direct,
    forward_sample_direct_batch,
    forward_step,
)

__all__ = [
    'ForwardTriple',
    'direct_position_marginal',
    'flip_matrix',
    'flip_probability',
    'forward_kernel',
    'forward_propagate_exact',
    'forward_sample_direct',
    'forward_sample_direct_batch',
    'forward_step',
    'forward_tensors',
    'forward_tv_curve',
    'lemma1_bound',
]
