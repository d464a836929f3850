"""
Reducción a clasificación binaria: ejemplos de entrenamiento, pérdida y posteriores.
Ubicación: core/classifier/posterior.py

Para el paso t con posición i = i_t y token revelado a = x_{t+1,i}:
    q_a = P(Z_t = a | X_{t+1} = x)
        = Π_t(a)·P_t(X_{-i}=x_{-i}) / [Π_t(φ)·P_t(x) + Π_t(a)·P_t(X_{-i}=x_{-i})]
y la inversión cerrada devuelve el posterior de denoising
    P(X_{t,i} = a | X_{t+1,-i}) = (Π_t(a)/Π_t(φ))·(1/q_a - 1).
"""

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from core.base.alphabet import PHI, MaskedSequence, encode_contexts
from core.base.joint import JointDistribution
from core.base.noise import NoiseDistribution, NoiseSequence
from core.base.schedule import ScanSchedule, schedule_position
from core.errors import DomainError, NumericGuardError, UndefinedConditionalError

CLAMP_EPS = 1e-6


@dataclass(frozen=True)
class TrainExample:
    """Un ejemplo de la tarea B_t(P*, Π, a): contexto enmascarado, token revelado y etiqueta 1_{Z_t=a}."""

    masked: MaskedSequence
    revealed: int
    label: int
    t: int


@dataclass(frozen=True)
class TrainBatch:
    """
    Lote vectorizado de ejemplos.

    Attributes:
        x_next: (N, L) secuencias X_{t+1} completas (la posición i_t contiene a)
        positions: (N,) posición enmascarada i_t
        revealed: (N,) token revelado a = x_{t+1,i_t}
        labels: (N,) etiquetas 0/1
        ts: (N,) pasos
    """

    x_next: np.ndarray
    positions: np.ndarray
    revealed: np.ndarray
    labels: np.ndarray
    ts: np.ndarray

    def __len__(self):
        return int(self.labels.shape[0])

    @classmethod
    def from_examples(cls, examples: Sequence[TrainExample]) -> "TrainBatch":
        """Agrupa ejemplos individuales; la posición enmascarada recibe el token revelado."""
        x_next = np.array([e.masked.fill(e.revealed) for e in examples], dtype=np.int64)
        return cls(
            x_next,
            np.array([e.masked.masked_position for e in examples], dtype=np.int64),
            np.array([e.revealed for e in examples], dtype=np.int64),
            np.array([e.label for e in examples], dtype=np.int64),
            np.array([e.t for e in examples], dtype=np.int64),
        )

    def context_indices(self, V: int) -> np.ndarray:
        """Índice row-major de x_{-i} (L-1 tokens) para cada fila."""
        return encode_contexts(self.x_next, self.positions, V)

    def example(self, n: int) -> TrainExample:
        masked = MaskedSequence.from_sequence(self.x_next[n], int(self.positions[n]))
        return TrainExample(masked, int(self.revealed[n]), int(self.labels[n]), int(self.ts[n]))


def make_train_example(triple) -> TrainExample:
    """
    Convierte un ForwardTriple en un ejemplo de entrenamiento.

    Enmascara i_t con OMEGA; etiqueta = 1_{z_t ≠ φ}; token revelado = x_{t+1,i_t}.

    Example:
        x_{t+1} = (A, B), i_t = 1 → entradas (A, ω), masked_position = 1
    """
    posicion = triple.position
    revelado = int(triple.x_t_plus_1[posicion])
    etiqueta = 0 if triple.z_t == PHI else 1
    masked = MaskedSequence.from_sequence(triple.x_t_plus_1, posicion)
    return TrainExample(masked, revelado, etiqueta, triple.t)


def make_train_batch(x_next: np.ndarray, z: np.ndarray, ts: np.ndarray, schedule: ScanSchedule) -> TrainBatch:
    """Versión vectorizada de make_train_example a partir de la salida del muestreo directo."""
    x_next = np.asarray(x_next, dtype=np.int64)
    ts = np.asarray(ts, dtype=np.int64)
    posiciones = np.asarray(schedule.permutation, dtype=np.int64)[ts % schedule.length]
    revelados = x_next[np.arange(x_next.shape[0]), posiciones]
    etiquetas = (np.asarray(z) != PHI).astype(np.int64)
    return TrainBatch(x_next, posiciones, revelados, etiquetas, ts)


def bce_loss(y_hat_a: float, label: int) -> float:
    """
    Entropía cruzada binaria -1_{Z≠φ}·log ŷ - 1_{Z=φ}·log(1 - ŷ).

    Args:
        y_hat_a: Predicción ya recortada, en (0, 1)
        label: 0 ó 1

    Raises:
        NumericGuardError: Si ŷ ∉ (0, 1) (sin recortar)

    Example:
        >>> round(bce_loss(0.8, 1), 5)
        0.22314
    """
    y = float(y_hat_a)
    if not 0.0 < y < 1.0:
        raise NumericGuardError(f"ŷ={y} fuera de (0, 1); recortar antes de evaluar la pérdida.")
    return -math.log(y) if int(label) == 1 else -math.log1p(-y)


def bce_loss_array(y_hat: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """bce_loss elemento a elemento tras recortar a [ε, 1-ε]."""
    y = np.clip(np.asarray(y_hat, dtype=float), CLAMP_EPS, 1.0 - CLAMP_EPS)
    labels = np.asarray(labels)
    return np.where(labels == 1, -np.log(y), -np.log1p(-y))


def oracle_noise_posterior(p_star: JointDistribution, t: int, schedule: ScanSchedule,
                           noise_seq: NoiseSequence, x_next) -> float:
    """
    q = P(Z_t = x_{t+1,i_t} | X_{t+1} = x_{t+1}) calculado con P_t propagada exactamente.

    Args:
        p_star: P*
        t: Paso
        schedule: Barrido
        noise_seq: {Π_s}; se usa Π_s para s < t al propagar y Π_t en la fórmula
        x_next: Secuencia x_{t+1}

    Raises:
        UndefinedConditionalError: Si P(X_{t+1} = x_{t+1}) = 0

    Example:
        En la instancia P* = (AA .5, AB .25, BA .25, BB 0), Π(φ)=.5 uniforme,
        t=0, i_0=0 y x=(A, A): q = 3/7.
    """
    from core.forward.exact import forward_propagate_exact

    p_t = forward_propagate_exact(p_star, t, schedule, noise_seq)
    posicion = schedule_position(schedule, t)
    noise = noise_seq.at(t)
    masked = MaskedSequence.from_sequence(x_next, posicion)
    a = int(x_next[posicion])

    contexto = p_t.context_vector(masked)
    marginal = float(contexto.sum())
    senal = float(noise.token_mass()[a]) * marginal
    denominador = noise.stay_prob * float(contexto[a]) + senal
    if denominador <= 0:
        raise UndefinedConditionalError(f"P(X_{{t+1}} = {tuple(x_next)}) = 0: la condicional no está definida.")
    return senal / denominador


def invert_posterior(y_hat, noise: NoiseDistribution) -> np.ndarray:
    """
    Inversión cerrada: score(a) = (Π_t(a)/Π_t(φ))·(1/ŷ_a - 1), sin normalizar.

    ŷ se recorta por abajo a ε; ŷ_a = 1 da exactamente score 0.

    Args:
        y_hat: DenoiserOutput o vector de longitud V
        noise: Π_t

    Raises:
        DomainError: Si Π_t(φ) = 0

    Example:
        ŷ_A = 3/7, Π(A) = 0.25, Π(φ) = 0.5 → score 2/3
    """
    if noise.stay_prob <= 0:
        raise DomainError("Π_t(φ) = 0: la inversión cerrada divide por cero.")
    valores = np.asarray(getattr(y_hat, "y_hat", y_hat), dtype=float)
    valores = np.clip(valores, CLAMP_EPS, 1.0)
    return (noise.token_mass() / noise.stay_prob) * (1.0 / valores - 1.0)


def check_invertible_noise(noise_seq: NoiseSequence):
    """
    Verifica que la inversión cerrada sea exacta en todos los pasos de {Π_t}.

    El oráculo nunca predice q_a por debajo de Π_t(a)/(Π_t(a) + Π_t(φ)). Si
    Π_t(a) = 0 el score de a es nulo; si ese piso no supera ε, el recorte de ŷ
    altera el score y la inversión deja de recuperar el posterior.

    Raises:
        DomainError: Si Π_t(φ) = 0, algún Π_t(a) = 0 o el piso cae en ε o por debajo

    Example:
        conteos unigrama (0, 5) → DomainError (el token 0 no tiene masa de ruido)
    """
    for t, noise in enumerate(noise_seq.at(s) for s in range(noise_seq.horizon)):
        if noise.stay_prob <= 0:
            raise DomainError(f"Π_{t}(φ) = 0: la inversión cerrada divide por cero.")
        masa = noise.token_mass()
        if np.any(masa <= 0):
            a = int(np.argmin(masa))
            raise DomainError(f"Π_{t}({a}) = 0: la inversión cerrada no está definida para ese token.")
        piso = masa / (masa + noise.stay_prob)
        if np.any(piso <= CLAMP_EPS):
            a = int(np.argmin(piso))
            raise DomainError(
                f"Π_{t}({a})/(Π_{t}({a}) + Π_{t}(φ)) = {float(piso[a]):.3e} ≤ ε = {CLAMP_EPS}: "
                "el recorte de ŷ distorsiona la inversión cerrada."
            )


def noise_posterior_from_posterior(posterior, noise: NoiseDistribution) -> np.ndarray:
    """
    Mapa directo de un posterior p_a = P(X_{t,i}=a | X_{t+1,-i}) a q_a.

    q_a = Π(a) / (Π(φ)·p_a + Π(a)); inverso exacto de invert_posterior.
    """
    p = np.asarray(posterior, dtype=float)
    masa = noise.token_mass()
    return masa / (noise.stay_prob * p + masa)
