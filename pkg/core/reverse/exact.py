"""
Propagación exacta de la dinámica inversa y presupuesto de pasos.
Ubicación: core/reverse/exact.py
"""

import math
from typing import Optional

import numpy as np

from core.base.joint import JointDistribution, apply_coordinate_kernel, check_cap
from core.base.noise import NoiseSequence
from core.base.schedule import ScanSchedule, schedule_position
from core.classifier.models import DenoiserModel
from core.errors import DomainError, InvalidConfigurationError, InvalidInputError
from core.reverse.sampler import ReverseDiagnostics, SamplerConfig, posterior_probs


def reverse_propagate_exact(model: DenoiserModel, schedule: ScanSchedule, noise_seq: NoiseSequence,
                            init: JointDistribution, config: Optional[SamplerConfig] = None,
                            diagnostics: Optional[ReverseDiagnostics] = None) -> JointDistribution:
    """
    Ley exacta de X̂_0 empujando `init` por el kernel inverso para t = T-1, ..., 0.

    Args:
        model: Denoiser
        schedule: Barrido (su horizonte fija T)
        noise_seq: {Π_t}
        init: Ley de X̂_T
        config: Debe ser neutral (top_p = 1, temperature = 1)
        diagnostics: Acumulador opcional de desviaciones de score

    Returns:
        JointDistribution: P̂_0

    Raises:
        InvalidConfigurationError: Si config aplica top-p o temperatura
        ResourceLimitError: Si V^L supera el tope
    """
    config = config or SamplerConfig()
    if not config.is_neutral:
        raise InvalidConfigurationError("La propagación exacta no admite top_p < 1 ni temperature ≠ 1.")
    if (init.V, init.L) != (model.V, schedule.length):
        raise InvalidInputError(f"init (V={init.V}, L={init.L}) no coincide con el modelo y el barrido.")
    check_cap(init.V, init.L, init.cap)

    tensor = np.array(init.tensor())
    for t in range(schedule.horizon - 1, -1, -1):
        def kernel(filas, t=t):
            return posterior_probs(filas, t, model, schedule, noise_seq, config, diagnostics)

        tensor = apply_coordinate_kernel(tensor, schedule_position(schedule, t), kernel)
    return init.with_tensor(tensor)


def theorem1_min_steps(L: int, p: float, delta: float) -> int:
    """
    Pasos mínimos T ≥ L·log(L/δ)/log(1/(1-p)) para garantizar TV(P̂_0, P*) ≤ δ.

    Args:
        L: Longitud
        p: Probabilidad de ruido 1 - Π(φ), en (0, 1)
        delta: Tolerancia δ > 0

    Raises:
        DomainError: Si p ∉ (0, 1) o δ ≤ 0

    Example:
        >>> theorem1_min_steps(4, 0.5, 0.25)
        16
        >>> theorem1_min_steps(1024, 0.5, 0.01)
        17044
    """
    if not 0.0 < p < 1.0:
        raise DomainError(f"p={p} fuera de (0, 1).")
    if not delta > 0.0:
        raise DomainError(f"δ={delta} debe ser positivo.")
    valor = L * math.log(L / delta) / math.log(1.0 / (1.0 - p))
    # Redondeo previo para que 16.000000000000004 no suba a 17
    return max(0, math.ceil(round(valor, 9)))
