"""
Distribuciones de ruido Π_t sobre X ∪ {φ}.
Ubicación: core/base/noise.py

Π_t(φ) = stay_prob es la probabilidad de no tocar la posición visitada;
Π_t(a) = (1 - stay_prob)·token_probs[a] para a ∈ X.
"""

from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np

from core.errors import InvalidInputError, StepRangeError

TOLERANCIA_SUMA = 1e-12


@dataclass(frozen=True)
class NoiseDistribution:
    """Π_t: probabilidad de quedarse y distribución de tokens Π_t(·|X)."""

    stay_prob: float
    token_probs: np.ndarray = field(repr=False)

    def __post_init__(self):
        stay = float(self.stay_prob)
        if not 0.0 <= stay <= 1.0:
            raise InvalidInputError(f"stay_prob={stay} fuera de [0, 1].")
        probs = np.array(self.token_probs, dtype=float).ravel()
        if probs.size == 0 or np.any(probs < 0):
            raise InvalidInputError("token_probs debe ser no vacío y no negativo.")
        if abs(probs.sum() - 1.0) > TOLERANCIA_SUMA:
            raise InvalidInputError(f"token_probs suma {probs.sum():.15g}, se esperaba 1.")
        probs.setflags(write=False)
        object.__setattr__(self, "stay_prob", stay)
        object.__setattr__(self, "token_probs", probs)

    @classmethod
    def uniform(cls, V: int, stay_prob: float = 0.5) -> "NoiseDistribution":
        return cls(stay_prob, np.full(V, 1.0 / V))

    @property
    def V(self) -> int:
        return int(self.token_probs.size)

    @property
    def flip_prob(self) -> float:
        """p = 1 - Π(φ)."""
        return 1.0 - self.stay_prob

    def token_mass(self) -> np.ndarray:
        """Vector Π_t(a) para a ∈ X (sin normalizar por 1 - Π(φ))."""
        return (1.0 - self.stay_prob) * self.token_probs

    def outcome_probs(self) -> np.ndarray:
        """Vector de longitud V+1: Π_t(0), ..., Π_t(V-1), Π_t(φ)."""
        return np.append(self.token_mass(), self.stay_prob)

    def to_dict(self) -> dict:
        return {"stay_prob": self.stay_prob, "token_probs": [float(p) for p in self.token_probs]}

    @classmethod
    def from_dict(cls, datos: dict) -> "NoiseDistribution":
        return cls(float(datos["stay_prob"]), np.asarray(datos["token_probs"], dtype=float))

    def __eq__(self, other):
        if not isinstance(other, NoiseDistribution):
            return NotImplemented
        return self.stay_prob == other.stay_prob and np.array_equal(self.token_probs, other.token_probs)

    def __hash__(self):
        return hash((self.stay_prob, self.token_probs.tobytes()))


def build_unigram_noise(corpus_counts: Sequence[float], stay_prob: float) -> NoiseDistribution:
    """
    Construye Π a partir de conteos unigrama: Π(z) = (1 - Π(φ))·n_z / N.

    Args:
        corpus_counts: Conteo n_z de cada token (longitud V)
        stay_prob: Π(φ)

    Returns:
        NoiseDistribution con token_probs = n / N

    Raises:
        InvalidInputError: Si hay conteos negativos o todos son cero

    Example:
        >>> build_unigram_noise([3, 1], 0.5).token_probs
        array([0.75, 0.25])
    """
    conteos = np.asarray(corpus_counts, dtype=float).ravel()
    if conteos.size == 0 or np.any(conteos < 0):
        raise InvalidInputError("Los conteos deben ser no negativos y no vacíos.")
    total = conteos.sum()
    if total <= 0:
        raise InvalidInputError("Todos los conteos son cero: no hay unigrama que estimar.")
    return NoiseDistribution(stay_prob, conteos / total)


class NoiseSequence:
    """
    Secuencia {Π_t}_{t<T} de distribuciones de ruido.

    at(t) exige 0 ≤ t < T; terminal() es la distribución usada para inicializar
    X̂_T (la del último paso, Π_{T-1}, o la única si la secuencia es constante).
    """

    def __init__(self, distributions: Sequence[NoiseDistribution]):
        self._dists: List[NoiseDistribution] = list(distributions)
        if not self._dists:
            raise InvalidInputError("La secuencia de ruido necesita al menos un elemento.")
        V = self._dists[0].V
        if any(d.V != V for d in self._dists):
            raise InvalidInputError("Todas las Π_t deben compartir el mismo V.")

    @classmethod
    def constant(cls, noise: NoiseDistribution, T: int) -> "NoiseSequence":
        if T < 1:
            raise InvalidInputError(f"Horizonte T={T} inválido.")
        return cls([noise] * T)

    @property
    def horizon(self) -> int:
        return len(self._dists)

    @property
    def V(self) -> int:
        return self._dists[0].V

    def at(self, t: int) -> NoiseDistribution:
        if not 0 <= t < len(self._dists):
            raise StepRangeError(f"Paso t={t} fuera de 0..{len(self._dists) - 1}.")
        return self._dists[t]

    def terminal(self) -> NoiseDistribution:
        return self._dists[-1]

    def stay_probs(self) -> np.ndarray:
        return np.array([d.stay_prob for d in self._dists])

    def max_stay_prob(self) -> float:
        return float(self.stay_probs().max())

    def is_token_constant(self) -> bool:
        """True si Π_t(·|X) no varía con t (sólo Π_t(φ) puede variar)."""
        primera = self._dists[0].token_probs
        return all(np.array_equal(d.token_probs, primera) for d in self._dists[1:])

    def truncated(self, T: int) -> "NoiseSequence":
        """Prefijo {Π_t}_{t<T}; horizontes más cortos reutilizan el mismo ruido."""
        if not 1 <= T <= len(self._dists):
            raise StepRangeError(f"No se puede truncar a T={T} (horizonte {len(self._dists)}).")
        return NoiseSequence(self._dists[:T])

    def __len__(self):
        return len(self._dists)
