"""
Dinámica de Glauber inversa: paso de denoising, muestreo y relleno condicional.
Ubicación: core/reverse/sampler.py

El paso t visita i_t, consulta al modelo con esa posición enmascarada,
invierte ŷ en forma cerrada, normaliza, aplica temperatura y top-p, y sortea el
nuevo token. El barrido es el mismo del proceso forward recorrido al revés
(i_{T-1}, ..., i_0).

Los modelos aprendidos sólo vieron t ∈ {0..T-2} en entrenamiento; una
consulta en t = T-1 usa la tabla de t = T-2.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from core.base.alphabet import TokenSequence, as_sequence
from core.base.noise import NoiseSequence
from core.base.rng import RngStream
from core.base.schedule import ScanSchedule, schedule_position
from core.classifier.models import DenoiserModel
from core.classifier.posterior import invert_posterior
from core.errors import (
    CertificationError,
    DegenerateDistributionError,
    InvalidConfigurationError,
    InvalidInputError,
)

logger = logging.getLogger(__name__)

TOLERANCIA_TOP_P = 1e-12
TOLERANCIA_SIN_NORMALIZAR = 1e-9


@dataclass(frozen=True)
class SamplerConfig:
    """
    Parámetros del muestreo inverso.

    Attributes:
        top_p: Masa del núcleo en (0, 1]; 1 desactiva el truncado
        temperature: Temperatura > 0; 1 desactiva
        temperature_fraction: Fracción inicial del bucle inverso (t ≥ T·(1 - f)) con temperatura
        normalize_scores: Si False, los scores deben sumar 1 (sólo modelos exactos)
    """

    top_p: float = 1.0
    temperature: float = 1.0
    temperature_fraction: float = 1.0
    normalize_scores: bool = True

    def __post_init__(self):
        if not 0.0 < self.top_p <= 1.0:
            raise InvalidConfigurationError(f"top_p={self.top_p} fuera de (0, 1].")
        if not self.temperature > 0.0:
            raise InvalidConfigurationError(f"temperature={self.temperature} debe ser positiva.")
        if not 0.0 < self.temperature_fraction <= 1.0:
            raise InvalidConfigurationError(f"temperature_fraction={self.temperature_fraction} fuera de (0, 1].")

    @property
    def is_neutral(self) -> bool:
        """True si el muestreo sigue exactamente los posteriores (sin top-p ni temperatura)."""
        return self.top_p == 1.0 and self.temperature == 1.0

    def temperature_at(self, t: int, horizon: int) -> float:
        return self.temperature if t >= horizon * (1.0 - self.temperature_fraction) else 1.0

    def to_dict(self) -> dict:
        return {
            "normalize_scores": self.normalize_scores,
            "temperature": self.temperature,
            "temperature_fraction": self.temperature_fraction,
            "top_p": self.top_p,
        }


@dataclass(frozen=True)
class Prompt:
    """Posiciones J fijadas y el token c_j de cada una."""

    positions: Tuple[int, ...] = ()
    tokens: Tuple[int, ...] = ()

    def __post_init__(self):
        posiciones = tuple(int(p) for p in self.positions)
        tokens = tuple(int(c) for c in self.tokens)
        if len(posiciones) != len(tokens):
            raise InvalidInputError("El prompt necesita un token por posición.")
        if len(set(posiciones)) != len(posiciones):
            raise InvalidInputError(f"Posiciones repetidas en el prompt: {posiciones}.")
        object.__setattr__(self, "positions", posiciones)
        object.__setattr__(self, "tokens", tokens)

    @classmethod
    def from_dict(cls, datos: dict) -> "Prompt":
        return cls(tuple(datos.get("positions", ())), tuple(datos.get("tokens", ())))

    @classmethod
    def from_slice(cls, x0: Sequence[int], start: int, stop: int) -> "Prompt":
        """
        Prompt que fija todo x0 salvo el tramo [start, stop), que queda para rellenar.

        Example:
            >>> Prompt.from_slice((0, 1, 1, 0), 1, 3)
            Prompt(positions=(0, 3), tokens=(0, 0))
        """
        L = len(x0)
        if not 0 <= start <= stop <= L:
            raise InvalidInputError(f"Tramo [{start}, {stop}) fuera de 0..{L}.")
        fijas = [j for j in range(L) if not start <= j < stop]
        return cls(tuple(fijas), tuple(int(x0[j]) for j in fijas))

    def validate_for(self, V: int, L: int):
        for posicion, token in zip(self.positions, self.tokens):
            if not 0 <= posicion < L:
                raise InvalidInputError(f"Posición {posicion} del prompt fuera de 0..{L - 1}.")
            if not 0 <= token < V:
                raise InvalidInputError(f"Token {token} del prompt fuera de 0..{V - 1}.")

    def as_mapping(self) -> dict:
        return dict(zip(self.positions, self.tokens))

    def to_dict(self) -> dict:
        return {"positions": list(self.positions), "tokens": list(self.tokens)}

    def __len__(self):
        return len(self.positions)


@dataclass
class ReverseDiagnostics:
    """Acumula |Σ_a score(a) - 1| por paso como diagnóstico de calidad del modelo."""

    steps: int = 0
    max_score_deviation: float = 0.0
    total_score_deviation: float = field(default=0.0, repr=False)

    def record(self, desviaciones: np.ndarray):
        desviaciones = np.asarray(desviaciones, dtype=float)
        if desviaciones.size == 0:
            return
        self.steps += int(desviaciones.size)
        self.max_score_deviation = max(self.max_score_deviation, float(desviaciones.max()))
        self.total_score_deviation += float(desviaciones.sum())

    @property
    def mean_score_deviation(self) -> float:
        return self.total_score_deviation / self.steps if self.steps else 0.0

    def to_dict(self) -> dict:
        return {
            "max_score_deviation": self.max_score_deviation,
            "mean_score_deviation": self.mean_score_deviation,
            "steps": self.steps,
        }


def top_p_filter(probs, p: float) -> np.ndarray:
    """
    Truncado de núcleo: conserva el menor prefijo (orden descendente) con masa ≥ p.

    Empates por id ascendente. Acepta un vector o una matriz (N, V) por filas.

    Example:
        >>> top_p_filter([0.7, 0.2, 0.1], 0.8)
        array([0.77777778, 0.22222222, 0.        ])
    """
    probs = np.asarray(probs, dtype=float)
    if p >= 1.0:
        return probs.copy()
    if not p > 0.0:
        raise InvalidConfigurationError(f"top_p={p} fuera de (0, 1].")

    filas = np.atleast_2d(probs)
    V = filas.shape[1]
    ids = np.broadcast_to(np.arange(V), filas.shape)
    orden = np.lexsort((ids, -filas), axis=-1)
    ordenadas = np.take_along_axis(filas, orden, axis=1)
    previa = np.cumsum(ordenadas, axis=1) - ordenadas
    conservar = previa < p - TOLERANCIA_TOP_P

    mascara = np.zeros_like(conservar)
    np.put_along_axis(mascara, orden, conservar, axis=1)
    filtradas = np.where(mascara, filas, 0.0)
    filtradas = filtradas / filtradas.sum(axis=1, keepdims=True)
    return filtradas.reshape(probs.shape)


def query_step(model: DenoiserModel, t: int) -> int:
    """Paso consultado al modelo: t, salvo t = T-1 en modelos aprendidos (se usa T-2)."""
    if model.learned and t == model.horizon - 1 and t > 0:
        return t - 1
    return t


def posterior_probs(x_next: np.ndarray, t: int, model: DenoiserModel, schedule: ScanSchedule,
                    noise_seq: NoiseSequence, config: SamplerConfig,
                    diagnostics: Optional[ReverseDiagnostics] = None) -> np.ndarray:
    """
    Distribución del nuevo token en i_t para cada fila de x_next (N, L).

    Returns:
        np.ndarray: (N, V) filas que suman 1

    Raises:
        DegenerateDistributionError: Si todos los scores de una fila son cero
    """
    posicion = schedule_position(schedule, t)
    noise = noise_seq.at(t)
    y_hat = model.predict_batch(np.asarray(x_next, dtype=np.int64), posicion, query_step(model, t))
    scores = invert_posterior(y_hat, noise)

    totales = scores.sum(axis=1)
    desviaciones = np.abs(totales - 1.0)
    if diagnostics is not None:
        diagnostics.record(desviaciones)
    logger.debug("t=%d i=%d max|Σscore-1|=%.3e", t, posicion, float(desviaciones.max()))

    if np.any(totales <= 0):
        raise DegenerateDistributionError(f"Todos los scores son cero en t={t}, posición {posicion}.")
    if config.normalize_scores:
        probs = scores / totales[:, None]
    elif np.any(desviaciones > TOLERANCIA_SIN_NORMALIZAR):
        raise DegenerateDistributionError(
            f"Scores sin normalizar suman {float(totales.max()):.12g} en t={t}; activar normalize_scores."
        )
    else:
        probs = scores

    temperatura = config.temperature_at(t, schedule.horizon)
    if temperatura != 1.0:
        probs = probs ** (1.0 / temperatura)
        probs = probs / probs.sum(axis=1, keepdims=True)
    if config.top_p < 1.0:
        probs = top_p_filter(probs, config.top_p)
    return probs


def reverse_step(x_next: Sequence[int], t: int, model: DenoiserModel, schedule: ScanSchedule,
                 noise_seq: NoiseSequence, config: SamplerConfig, rng: RngStream,
                 diagnostics: Optional[ReverseDiagnostics] = None) -> TokenSequence:
    """
    Un paso de la dinámica inversa: X_{t+1} → X_t, re-muestreando sólo i_t.

    Args:
        x_next: Secuencia x_{t+1}
        t: Paso, 0 ≤ t < T
        model: Denoiser
        schedule: Barrido
        noise_seq: {Π_t}
        config: Parámetros de muestreo
        rng: Flujo aleatorio
        diagnostics: Acumulador opcional de desviaciones de score

    Returns:
        TokenSequence: x_t

    Raises:
        DegenerateDistributionError: Si todos los scores son cero
    """
    x = list(as_sequence(x_next, model.V, schedule.length))
    probs = posterior_probs(np.array([x]), t, model, schedule, noise_seq, config, diagnostics)[0]
    x[schedule_position(schedule, t)] = rng.categorical(probs)
    return tuple(x)


def _inicializar(schedule: ScanSchedule, noise_seq: NoiseSequence, rng: RngStream, n: int) -> np.ndarray:
    # X̂_T ~ Π_T(·|X)^L; se sortean las L posiciones aunque luego el prompt fije algunas
    terminal = noise_seq.at(schedule.horizon - 1)
    return rng.categorical_many(terminal.token_probs, n * schedule.length).reshape(n, schedule.length)


def _verificar_prompt(x: np.ndarray, prompt: Prompt):
    for posicion, token in zip(prompt.positions, prompt.tokens):
        if np.any(x[..., posicion] != token):
            raise CertificationError(f"La posición {posicion} del prompt no se preservó.")


def conditional_sample(model: DenoiserModel, schedule: ScanSchedule, noise_seq: NoiseSequence,
                       config: SamplerConfig, prompt: Optional[Prompt], rng: RngStream,
                       diagnostics: Optional[ReverseDiagnostics] = None) -> TokenSequence:
    """
    Relleno condicional: las posiciones de J se fijan y nunca se re-muestrean.

    Con J vacío sigue exactamente el mismo camino (y consume el mismo azar) que sample().

    Returns:
        TokenSequence: X̂_0 con X̂_{0,j} = c_j para todo j ∈ J
    """
    prompt = prompt or Prompt()
    prompt.validate_for(model.V, schedule.length)
    fijas = prompt.as_mapping()

    x = _inicializar(schedule, noise_seq, rng, 1)[0]
    for posicion, token in fijas.items():
        x[posicion] = token

    for t in range(schedule.horizon - 1, -1, -1):
        posicion = schedule_position(schedule, t)
        if posicion in fijas:
            continue
        probs = posterior_probs(x[None, :], t, model, schedule, noise_seq, config, diagnostics)[0]
        x[posicion] = rng.categorical(probs)

    _verificar_prompt(x, prompt)
    return tuple(int(v) for v in x)


def sample(model: DenoiserModel, schedule: ScanSchedule, noise_seq: NoiseSequence,
           config: SamplerConfig, rng: RngStream,
           diagnostics: Optional[ReverseDiagnostics] = None) -> TokenSequence:
    """
    Muestreo incondicional: X̂_T ~ Π_T(·|X)^L y reverse_step para t = T-1, ..., 0.

    Example:
        Con P* concentrada en x* y T ≥ L, el oráculo exacto devuelve siempre x*.
    """
    return conditional_sample(model, schedule, noise_seq, config, None, rng, diagnostics)


def sample_batch(model: DenoiserModel, schedule: ScanSchedule, noise_seq: NoiseSequence,
                 config: SamplerConfig, rng: RngStream, n: int, prompt: Optional[Prompt] = None,
                 diagnostics: Optional[ReverseDiagnostics] = None) -> np.ndarray:
    """
    n cadenas independientes en paralelo, vectorizadas por paso.

    Misma ley que n llamadas a conditional_sample, con otro consumo del flujo aleatorio.

    Returns:
        np.ndarray: Matriz (n, L) de muestras X̂_0
    """
    prompt = prompt or Prompt()
    prompt.validate_for(model.V, schedule.length)
    fijas = prompt.as_mapping()

    x = _inicializar(schedule, noise_seq, rng, n)
    for posicion, token in fijas.items():
        x[:, posicion] = token

    for t in range(schedule.horizon - 1, -1, -1):
        posicion = schedule_position(schedule, t)
        if posicion in fijas or n == 0:
            continue
        probs = posterior_probs(x, t, model, schedule, noise_seq, config, diagnostics)
        x[:, posicion] = rng.categorical_rows(probs)

    _verificar_prompt(x, prompt)
    return x
