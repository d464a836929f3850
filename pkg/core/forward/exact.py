"""
Propagación exacta del proceso forward y cota de convergencia.
Ubicación: core/forward/exact.py

El kernel de un paso sobre la tabla completa es
    P_{t+1}(x) = Π_t(φ)·P_t(x) + Π_t(x_i)·P_t(X_{-i} = x_{-i}),  i = i_t
"""

import logging
import math
from typing import List, Tuple

import numpy as np

from core.analysis.metrics import tv_distance
from core.base.joint import JointDistribution, check_cap
from core.base.noise import NoiseDistribution, NoiseSequence
from core.base.schedule import ScanSchedule, schedule_position
from core.errors import DomainError, StepRangeError

logger = logging.getLogger(__name__)


def forward_kernel(tensor: np.ndarray, position: int, noise: NoiseDistribution) -> np.ndarray:
    """Aplica un paso del kernel forward en `position` a un tensor (V,)*L."""
    L = tensor.ndim
    forma = [1] * L
    forma[position] = tensor.shape[position]
    marginal = tensor.sum(axis=position, keepdims=True)
    return noise.stay_prob * tensor + noise.token_mass().reshape(forma) * marginal


def forward_tensors(p_star: JointDistribution, schedule: ScanSchedule, noise_seq: NoiseSequence,
                    upto: int) -> List[np.ndarray]:
    """
    Lista [P_0, P_1, ..., P_upto] como tensores, en una sola pasada.

    Args:
        upto: Último índice, 0 ≤ upto ≤ T
    """
    if not 0 <= upto <= schedule.horizon:
        raise StepRangeError(f"t={upto} fuera de 0..{schedule.horizon}.")
    check_cap(p_star.V, p_star.L, p_star.cap)

    tensores = [np.array(p_star.tensor())]
    for s in range(upto):
        tensores.append(forward_kernel(tensores[-1], schedule_position(schedule, s), noise_seq.at(s)))
    return tensores


def forward_propagate_exact(p_star: JointDistribution, t: int, schedule: ScanSchedule,
                            noise_seq: NoiseSequence) -> JointDistribution:
    """
    Distribución exacta P_t de X_t.

    Args:
        p_star: P* = P_0
        t: Número de pasos, 0 ≤ t ≤ T
        schedule: Barrido
        noise_seq: {Π_s}

    Returns:
        JointDistribution P_t

    Raises:
        ResourceLimitError: Si V^L supera el tope
    """
    tensor = forward_tensors(p_star, schedule, noise_seq, t)[-1]
    return p_star.with_tensor(tensor)


def lemma1_bound(L: int, eps: float, T: int) -> float:
    """
    Cota min(1, L·(1-ε)^⌊T/L⌋) de TV(P_T, Π(·|X)^⊗L).

    Args:
        L: Longitud
        eps: ε con Π_t(φ) ≤ 1 - ε, 0 < ε ≤ 1
        T: Horizonte, T ≥ 0

    Raises:
        DomainError: Si ε ∉ (0, 1] o T < 0

    Example:
        >>> lemma1_bound(4, 0.5, 16)
        0.25
    """
    if not 0.0 < eps <= 1.0:
        raise DomainError(f"ε={eps} fuera de (0, 1]; el lema exige Π_t(φ) ≤ 1 - ε con ε > 0.")
    if T < 0:
        raise DomainError(f"T={T} negativo.")
    barridos = T // L
    cota = L * math.pow(1.0 - eps, barridos)
    return min(1.0, cota)


def forward_tv_curve(p_star: JointDistribution, schedule: ScanSchedule,
                     noise_seq: NoiseSequence) -> List[Tuple[int, float, float]]:
    """
    TV(P_t, Π(·|X)^⊗L) en cada barrido completo t = 0, L, 2L, ... ≤ T, con la cota del lema.

    Returns:
        list: Tuplas (t, tv, cota)
    """
    L = p_star.L
    eps = 1.0 - noise_seq.max_stay_prob()
    tensores = forward_tensors(p_star, schedule, noise_seq, schedule.horizon)
    referencia = JointDistribution.product(noise_seq.terminal().token_probs, L, p_star.cap)
    curva = []
    for t in range(0, schedule.horizon + 1, L):
        tv = tv_distance(p_star.with_tensor(tensores[t]), referencia)
        cota = lemma1_bound(L, eps, t) if eps > 0 else 1.0
        curva.append((t, tv, cota))
        logger.debug("t=%d TV(P_t, Π^⊗L)=%.3e cota=%.3e", t, tv, cota)
    return curva
