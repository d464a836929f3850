"""
Fixtures compartidas de la suite.
Ubicación: tests/conftest.py
"""

import pytest

from core.base.joint import JointDistribution
from core.base.noise import NoiseDistribution, NoiseSequence
from core.base.presets import random_instance
from core.base.schedule import ScanSchedule


def proceso(V, L, T, stay_prob=0.5, permutation=None):
    """Barrido round-robin y ruido constante Π(φ) = stay_prob con Π(·|X) uniforme."""
    schedule = ScanSchedule.round_robin(L, T, permutation)
    noise_seq = NoiseSequence.constant(NoiseDistribution.uniform(V, stay_prob), T)
    return schedule, noise_seq


def instancias_sembradas(cantidad=20):
    """Objetivos aleatorios con V ∈ {2, 3} y L ∈ {2, 3}, todos con soporte completo."""
    formas = [(2, 2), (2, 3), (3, 2), (3, 3)]
    return [random_instance(*formas[k % len(formas)], seed=100 + k) for k in range(cantidad)]


@pytest.fixture
def worked_instance():
    """P* = (AA .5, AB .25, BA .25, BB 0) con A = 0, B = 1."""
    return JointDistribution([0.5, 0.25, 0.25, 0.0], 2, 2)


@pytest.fixture
def half_noise():
    return NoiseDistribution.uniform(2, 0.5)


@pytest.fixture
def worked_process():
    """Barrido identidad con T = 4 sobre la instancia de trabajo."""
    return proceso(2, 2, 4)
