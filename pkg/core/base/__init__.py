"""
Tipos de dominio compartidos: alfabeto, ruido, barrido, tablas conjuntas y azar.
"""

from .alphabet import (
    OMEGA,
    PHI,
    MaskedSequence,
    TokenAlphabet,
    TokenSequence,
    as_sequence,
    decode_index,
    encode_contexts,
    encode_index,
    encode_rows,
)
from .joint import DEFAULT_CAP, JointDistribution, apply_coordinate_kernel, check_cap, context_rows
from .noise import NoiseDistribution, NoiseSequence, build_unigram_noise
from .rng import RngStream
from .schedule import ScanSchedule, schedule_position

__all__ = [
    'OMEGA',
    'PHI',
    'MaskedSequence',
    'TokenAlphabet',
    'TokenSequence',
    'as_sequence',
    'decode_index',
    'encode_contexts',
    'encode_index',
    'encode_rows',
    'DEFAULT_CAP',
    'JointDistribution',
    'apply_coordinate_kernel',
    'check_cap',
    'context_rows',
    'NoiseDistribution',
    'NoiseSequence',
    'build_unigram_noise',
    'RngStream',
    'ScanSchedule',
    'schedule_position',
]
