"""
Entrenamiento del denoiser por la reducción a clasificación binaria.
Ubicación: core/classifier/training.py

Cada iteración sortea B secuencias X_0 ~ P*, K pasos t ~ Unif{0..T-2} por
secuencia, genera (X_t, Z_t, X_{t+1}) con el muestreo directo y actualiza el
modelo con los B·K ejemplos. Con B = K = 1 es el bucle de un ejemplo por
iteración.
"""

import logging
from typing import Callable, Optional

import numpy as np

from core.base.joint import JointDistribution
from core.base.noise import NoiseSequence
from core.base.rng import RngStream
from core.base.schedule import ScanSchedule
from core.classifier.models import DenoiserModel, ExactOracle
from core.classifier.posterior import make_train_batch
from core.errors import InvalidInputError, UnsupportedConfigurationError
from core.forward.process import flip_matrix, forward_sample_direct_batch

logger = logging.getLogger(__name__)


def train(model: DenoiserModel, p_star, schedule: ScanSchedule, noise_seq: NoiseSequence,
          iterations: int, rng: RngStream, batch_size: int = 1, timesteps_per_example: int = 1,
          loss_callback: Optional[Callable[[int, float], None]] = None,
          progress_callback=None) -> DenoiserModel:
    """
    Entrena un TabularModel o LogisticModel in situ.

    Args:
        model: Modelo entrenable (mismo V, L y T que el barrido)
        p_star: JointDistribution o función (rng, n) -> matriz (n, L) de muestras de P*
        schedule: Barrido
        noise_seq: {Π_t} con Π_t(·|X) constante
        iterations: Número de iteraciones N ≥ 0
        rng: Flujo aleatorio
        batch_size: Secuencias X_0 por iteración
        timesteps_per_example: Pasos t sorteados por cada X_0
        loss_callback: Recibe (iteración, pérdida media) tras cada actualización
        progress_callback: Firma progress_callback(current, total, message, percentage)

    Returns:
        DenoiserModel: El mismo modelo, entrenado

    Raises:
        UnsupportedConfigurationError: Si T < 2 o el ruido no es constante en tokens
    """
    if iterations < 0 or batch_size < 1 or timesteps_per_example < 1:
        raise InvalidInputError("iterations ≥ 0, batch_size ≥ 1 y timesteps_per_example ≥ 1.")
    T = schedule.horizon
    if T < 2:
        raise UnsupportedConfigurationError("El entrenamiento sortea t en {0..T-2}: se necesita T ≥ 2.")
    if model.horizon != T or model.L != schedule.length:
        raise InvalidInputError(f"Modelo (L={model.L}, T={model.horizon}) incompatible con el barrido "
                                f"(L={schedule.length}, T={T}).")
    if iterations == 0:
        return model

    muestrear = p_star.sample_sequences if isinstance(p_star, JointDistribution) else p_star
    flips = flip_matrix(schedule, noise_seq)
    aviso_cada = max(1, iterations // 100)

    for iteracion in range(1, iterations + 1):
        x0s = np.repeat(muestrear(rng, batch_size), timesteps_per_example, axis=0)
        ts = rng.integers(0, T - 1, size=x0s.shape[0])
        _, z, x_next = forward_sample_direct_batch(x0s, ts, schedule, noise_seq, rng, flips=flips)
        perdida = model.update_batch(make_train_batch(x_next, z, ts, schedule))

        if loss_callback:
            loss_callback(iteracion, perdida)
        if progress_callback and (iteracion % aviso_cada == 0 or iteracion == iterations):
            porcentaje = int(iteracion / iterations * 100)
            progress_callback(iteracion, iterations, f"Iteración {iteracion}/{iterations}", porcentaje)

    logger.info("Entrenamiento %s terminado: %d iteraciones de %d ejemplos",
                model.kind, iterations, batch_size * timesteps_per_example)
    return model


def max_oracle_error(model: DenoiserModel, oracle: ExactOracle) -> float:
    """
    max |ŷ_a - q_a| sobre toda terna alcanzable (t, contexto, a) con t ∈ {0..T-2}.

    Una terna es alcanzable si P(X_{t+1} = x) > 0, con x el contexto
    completado con a en la posición i_t.
    """
    if model.V != oracle.V or model.L != oracle.L:
        raise InvalidInputError("El modelo y el oráculo deben compartir V y L.")
    V, L = oracle.V, oracle.L
    T = min(model.horizon, oracle.horizon)
    # Todas las secuencias de X^L, agrupadas por contexto en la posición visitada
    todas = np.stack(np.unravel_index(np.arange(V ** L), (V,) * L), axis=1).astype(np.int64)

    peor = 0.0
    for t in range(T - 1):
        posicion = oracle.schedule.permutation[t % L]
        siguiente = oracle.joint_at(t + 1).reshape(-1)
        alcanzables = siguiente > 0
        if not np.any(alcanzables):
            continue
        filas = todas[alcanzables]
        y_modelo = model.predict_batch(filas, posicion, t)
        y_oraculo = oracle.predict_batch(filas, posicion, t)
        revelados = filas[:, posicion]
        indice = np.arange(filas.shape[0])
        diferencia = np.abs(y_modelo[indice, revelados] - y_oraculo[indice, revelados])
        peor = max(peor, float(diferencia.max()))
    return peor
