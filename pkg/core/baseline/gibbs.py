"""
Línea base de Gibbs (Glauber independiente del tiempo).
Ubicación: core/baseline/gibbs.py

Cada paso re-muestrea una posición desde P(X_i | X_{-i}) según un modelo
condicional fijo, recorriendo las posiciones en round-robin. Con las
condicionales exactas de P*, P* es estacionaria para este kernel.
"""

import logging
from abc import ABC, abstractmethod
from typing import Optional, Sequence

import numpy as np

from core.base.alphabet import MaskedSequence, TokenSequence, as_sequence, encode_contexts
from core.base.joint import JointDistribution, apply_coordinate_kernel
from core.base.noise import NoiseSequence
from core.base.rng import RngStream
from core.base.schedule import ScanSchedule
from core.classifier.models import DenoiserModel
from core.classifier.posterior import invert_posterior
from core.errors import DegenerateDistributionError, InvalidInputError
from core.reverse.sampler import SamplerConfig, query_step, top_p_filter

logger = logging.getLogger(__name__)


class ConditionalModel(ABC):
    """P_i(· | x_{-i}) para cualquier posición i."""

    def __init__(self, V: int, L: int):
        self.V = int(V)
        self.L = int(L)

    def conditional(self, masked: MaskedSequence) -> np.ndarray:
        """Vector de probabilidad sobre X para la posición enmascarada dado el resto."""
        return self.conditional_batch(np.array([masked.fill(0)], dtype=np.int64), masked.masked_position)[0]

    @abstractmethod
    def conditional_batch(self, x: np.ndarray, position: int) -> np.ndarray:
        """Matriz (N, V) de condicionales; el valor de x en `position` se ignora."""


class ExactConditional(ConditionalModel):
    """
    Condicionales exactas de P*.

    Un contexto con P*(X_{-i} = x_{-i}) = 0 no tiene condicional definida; se
    usa fallback_probs = Π(·|X) y se cuenta el evento en fallback_count.

    Raises:
        InvalidInputError: Si fallback_probs no es una distribución sobre X
    """

    def __init__(self, p_star: JointDistribution, fallback_probs: Sequence[float]):
        super().__init__(p_star.V, p_star.L)
        self.p_star = p_star
        self.fallback_probs = np.asarray(fallback_probs, dtype=float).ravel()
        if (self.fallback_probs.size != p_star.V or np.any(self.fallback_probs < 0)
                or abs(self.fallback_probs.sum() - 1.0) > 1e-12):
            raise InvalidInputError(f"fallback_probs debe ser una distribución sobre {p_star.V} tokens.")
        self.fallback_count = 0
        self._tablas = [
            np.moveaxis(p_star.tensor(), i, -1).reshape(-1, p_star.V) for i in range(p_star.L)
        ]

    def conditional_batch(self, x: np.ndarray, position: int) -> np.ndarray:
        filas = self._tablas[position][encode_contexts(x, position, self.V)]
        masas = filas.sum(axis=1, keepdims=True)
        sin_masa = masas[:, 0] <= 0
        resultado = np.divide(filas, masas, out=np.zeros_like(filas), where=masas > 0)
        if np.any(sin_masa):
            self.fallback_count += int(sin_masa.sum())
            logger.warning("Posición %d: %d contextos con probabilidad cero bajo P*; se usa Π(·|X).",
                           position, int(sin_masa.sum()))
            resultado[sin_masa] = self.fallback_probs
        return resultado


class DenoiserConditional(ConditionalModel):
    """
    Adaptador de un DenoiserModel como modelo condicional.

    La condicional de la posición i se obtiene invirtiendo ŷ con la inversión cerrada en el
    primer paso que visita i, el más cercano a los datos limpios.
    """

    def __init__(self, model: DenoiserModel, schedule: ScanSchedule, noise_seq: NoiseSequence):
        super().__init__(model.V, model.L)
        self.model = model
        self.schedule = schedule
        self.noise_seq = noise_seq

    def conditional_batch(self, x: np.ndarray, position: int) -> np.ndarray:
        t = self.schedule.first_visit(position)
        y_hat = self.model.predict_batch(np.asarray(x, dtype=np.int64), position, query_step(self.model, t))
        scores = invert_posterior(y_hat, self.noise_seq.at(t))
        totales = scores.sum(axis=1, keepdims=True)
        if np.any(totales <= 0):
            raise DegenerateDistributionError(f"Scores nulos para la posición {position}.")
        return scores / totales


def _distribucion_paso(model: ConditionalModel, x: np.ndarray, position: int, config: SamplerConfig) -> np.ndarray:
    probs = model.conditional_batch(x, position)
    if config.top_p < 1.0:
        probs = top_p_filter(probs, config.top_p)
    return probs


def gibbs_step(x: Sequence[int], i: int, model: ConditionalModel, config: SamplerConfig,
               rng: RngStream) -> TokenSequence:
    """
    Re-muestrea la posición i desde model.conditional(i, x_{-i}); el resto no cambia.

    Example:
        P* = (AA .5, AB .25, BA .25, BB 0), x = (B, A), i = 0 → X_0 ~ (A 2/3, B 1/3)
    """
    x = list(as_sequence(x, model.V, model.L))
    probs = _distribucion_paso(model, np.array([x]), i, config)[0]
    x[i] = rng.categorical(probs)
    return tuple(x)


def gibbs_run(x_init: Optional[Sequence[int]], sweeps: int, model: ConditionalModel,
              schedule: ScanSchedule, config: SamplerConfig, rng: RngStream) -> TokenSequence:
    """
    K barridos round-robin completos de gibbs_step.

    Args:
        x_init: Estado inicial; None sortea cada posición uniforme en X
        sweeps: K ≥ 0
        model: Modelo condicional
        schedule: Sólo se usa su permutación
        config: top_p opcional
        rng: Flujo aleatorio

    Returns:
        TokenSequence: Estado tras K·L pasos
    """
    if sweeps < 0:
        raise InvalidInputError(f"sweeps={sweeps} negativo.")
    if x_init is None:
        x = tuple(int(v) for v in rng.integers(0, model.V, size=model.L))
    else:
        x = as_sequence(x_init, model.V, model.L)

    for _ in range(sweeps):
        for posicion in schedule.permutation:
            x = gibbs_step(x, posicion, model, config, rng)
    return x


def gibbs_propagate_exact(init: JointDistribution, sweeps: int, model: ConditionalModel,
                          schedule: ScanSchedule) -> JointDistribution:
    """Ley exacta tras K barridos del kernel de Gibbs, partiendo de `init`."""
    if sweeps < 0:
        raise InvalidInputError(f"sweeps={sweeps} negativo.")
    tensor = np.array(init.tensor())
    for _ in range(sweeps):
        for posicion in schedule.permutation:
            tensor = apply_coordinate_kernel(
                tensor, posicion, lambda filas, posicion=posicion: model.conditional_batch(filas, posicion)
            )
    return init.with_tensor(tensor)
