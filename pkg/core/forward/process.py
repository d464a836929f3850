"""
Proceso forward de ruido: un paso, probabilidad de re-sorteo y muestreo directo.
Ubicación: core/forward/process.py

Un paso t visita la posición i_t, sortea Z_t ~ Π_t y
    X_{t+1} = X_t                         si Z_t = φ
    X_{t+1,i_t} = Z_t, resto igual        si Z_t ∈ X

El muestreo directo obtiene X_t desde X_0 sin simular los t pasos: la
posición j fue re-sorteada al menos una vez con probabilidad
1 - ∏_{s∈τ_t(j)} Π_s(φ). Requiere Π_s(·|X) constante en s.
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from core.base.alphabet import PHI, TokenSequence, as_sequence
from core.base.noise import NoiseDistribution, NoiseSequence
from core.base.rng import RngStream
from core.base.schedule import ScanSchedule, schedule_position
from core.errors import InvalidInputError, StepRangeError, UnsupportedConfigurationError


@dataclass(frozen=True)
class ForwardTriple:
    """(X_t, Z_t, X_{t+1}) de un paso forward en el tiempo t."""

    x_t: TokenSequence
    z_t: int
    x_t_plus_1: TokenSequence
    t: int
    position: int

    def __post_init__(self):
        diferencias = [k for k in range(len(self.x_t)) if self.x_t[k] != self.x_t_plus_1[k]]
        if any(k != self.position for k in diferencias):
            raise InvalidInputError("x_t y x_{t+1} sólo pueden diferir en la posición i_t.")
        if self.z_t == PHI and diferencias:
            raise InvalidInputError("Con Z_t = φ se exige x_{t+1} = x_t.")
        if self.z_t != PHI and self.x_t_plus_1[self.position] != self.z_t:
            raise InvalidInputError("Con Z_t ∈ X se exige x_{t+1,i_t} = Z_t.")


def forward_step(x_t: Sequence[int], t: int, schedule: ScanSchedule, noise: NoiseDistribution,
                 rng: RngStream) -> ForwardTriple:
    """
    Aplica un paso del proceso forward.

    Args:
        x_t: Secuencia actual
        t: Paso, 0 ≤ t < T
        schedule: Barrido que fija i_t
        noise: Π_t
        rng: Flujo aleatorio

    Returns:
        ForwardTriple con (x_t, z_t, x_{t+1})

    Example:
        Con Π_t(φ) = 1 siempre se obtiene z_t = PHI y x_{t+1} = x_t.
    """
    x_t = as_sequence(x_t, noise.V, schedule.length)
    posicion = schedule_position(schedule, t)

    resultado = rng.categorical(noise.outcome_probs())
    if resultado == noise.V:
        return ForwardTriple(x_t, PHI, x_t, t, posicion)

    siguiente = list(x_t)
    siguiente[posicion] = resultado
    return ForwardTriple(x_t, resultado, tuple(siguiente), t, posicion)


def flip_probability(j: int, t: int, schedule: ScanSchedule, noise_seq: NoiseSequence) -> float:
    """
    Probabilidad de que la posición j haya sido re-sorteada desde Π(·|X) en los pasos 0..t-1.

    Se calcula como 1 - ∏_{s∈τ_t(j)} Π_s(φ) enumerando τ_t(j) explícitamente.

    Args:
        j: Posición, 0 ≤ j < L
        t: Paso, 0 ≤ t ≤ T
        schedule: Barrido
        noise_seq: {Π_s}

    Returns:
        float: Probabilidad en [0, 1]

    Example:
        >>> # Π_0(φ)=0.9, Π_3(φ)=0.6, τ = {0, 3}
        >>> 1 - 0.9 * 0.6
        0.46
    """
    permanencia = 1.0
    for s in schedule.visits(j, t):
        permanencia *= noise_seq.at(s).stay_prob
    return 1.0 - permanencia


def flip_matrix(schedule: ScanSchedule, noise_seq: NoiseSequence) -> np.ndarray:
    """
    Matriz F[t, j] = flip_probability(j, t) para t = 0..T, calculada en un solo recorrido.
    """
    T, L = schedule.horizon, schedule.length
    F = np.zeros((T + 1, L))
    permanencia = np.ones(L)
    for t, posicion in enumerate(schedule.positions()):
        F[t] = 1.0 - permanencia
        permanencia[posicion] *= noise_seq.at(t).stay_prob
    F[T] = 1.0 - permanencia
    return F


def _validar_ruido_directo(noise_seq: NoiseSequence):
    if not noise_seq.is_token_constant():
        raise UnsupportedConfigurationError(
            "El muestreo directo requiere Π_t(·|X) constante en el tiempo; sólo Π_t(φ) puede variar."
        )


def forward_sample_direct_batch(x0s: np.ndarray, ts: np.ndarray, schedule: ScanSchedule,
                                noise_seq: NoiseSequence, rng: RngStream,
                                flips: Optional[np.ndarray] = None) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Versión vectorizada del muestreo directo X_0 → (X_t, Z_t, X_{t+1}).

    Args:
        x0s: Matriz (N, L) de secuencias iniciales
        ts: Vector (N,) de pasos, 0 ≤ t < T
        schedule: Barrido
        noise_seq: {Π_s} con Π_s(·|X) constante
        rng: Flujo aleatorio
        flips: flip_matrix precalculada (opcional)

    Returns:
        tuple: (x_t (N, L), z_t (N,) con PHI = -1, x_{t+1} (N, L))

    Raises:
        UnsupportedConfigurationError: Si Π_s(·|X) varía con s
        StepRangeError: Si algún t está fuera de 0..T-1
    """
    _validar_ruido_directo(noise_seq)
    x0s = np.asarray(x0s, dtype=np.int64)
    ts = np.asarray(ts, dtype=np.int64)
    N, L = x0s.shape
    T = schedule.horizon
    if N and (ts.min() < 0 or ts.max() >= T):
        raise StepRangeError(f"Pasos fuera de 0..{T - 1}.")

    F = flips if flips is not None else flip_matrix(schedule, noise_seq)
    token_probs = noise_seq.at(0).token_probs
    filas = np.arange(N)

    # X_t: cada posición re-sorteada con probabilidad F[t, j]
    resortear = rng.random((N, L)) < F[ts]
    nuevos = rng.categorical_many(token_probs, N * L).reshape(N, L)
    x_t = np.where(resortear, nuevos, x0s)

    # Un paso más en i_t
    posiciones = np.asarray(schedule.permutation, dtype=np.int64)[ts % L]
    quedarse = rng.random(N) < noise_seq.stay_probs()[ts]
    tokens = rng.categorical_many(token_probs, N)
    z_t = np.where(quedarse, PHI, tokens)
    x_t1 = x_t.copy()
    x_t1[filas, posiciones] = np.where(quedarse, x_t[filas, posiciones], tokens)
    return x_t, z_t, x_t1


def forward_sample_direct(x0: Sequence[int], t: int, schedule: ScanSchedule, noise_seq: NoiseSequence,
                          rng: RngStream) -> ForwardTriple:
    """
    Obtiene (X_t, Z_t, X_{t+1}) directamente desde X_0.

    Distribucionalmente equivalente a t llamadas a forward_step seguidas de una más.

    Raises:
        UnsupportedConfigurationError: Si Π_s(·|X) varía con s
    """
    x0 = as_sequence(x0, noise_seq.V, schedule.length)
    if not 0 <= t < schedule.horizon:
        raise StepRangeError(f"Paso t={t} fuera de 0..{schedule.horizon - 1}.")
    x_t, z_t, x_t1 = forward_sample_direct_batch(np.array([x0]), np.array([t]), schedule, noise_seq, rng)
    return ForwardTriple(
        tuple(int(v) for v in x_t[0]),
        int(z_t[0]),
        tuple(int(v) for v in x_t1[0]),
        t,
        schedule_position(schedule, t),
    )


def direct_position_marginal(x0: Sequence[int], j: int, t: int, schedule: ScanSchedule,
                             noise_seq: NoiseSequence) -> np.ndarray:
    """
    Distribución analítica de X_{t,j} implícita en el muestreo directo.

    (1 - p)·δ_{x0_j} + p·Π(·|X), con p = flip_probability(j, t).
    """
    _validar_ruido_directo(noise_seq)
    p = flip_probability(j, t, schedule, noise_seq)
    marginal = p * np.array(noise_seq.at(0).token_probs, dtype=float)
    marginal[int(x0[j])] += 1.0 - p
    return marginal
