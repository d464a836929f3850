"""
Flujos aleatorios deterministas basados en contador.
Ubicación: core/base/rng.py

RngStream envuelve numpy.random.Generator con el bit generator Philox
(basado en contador). Misma semilla ⇒ misma secuencia, bit a bit. fork()
deriva sub-flujos independientes con SeedSequence.spawn, uno por cadena.
"""

from typing import List, Optional, Sequence

import numpy as np


class RngStream:
    """Flujo aleatorio de un solo dueño; usar fork() para cadenas paralelas."""

    def __init__(self, seed: int, _seed_sequence: Optional[np.random.SeedSequence] = None):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self._seed_sequence = _seed_sequence or np.random.SeedSequence(self.seed)
        self._generator = np.random.Generator(np.random.Philox(self._seed_sequence))

    @property
    def spawn_key(self):
        return tuple(self._seed_sequence.spawn_key)

    @property
    def generator(self) -> np.random.Generator:
        return self._generator

    def fork(self, n: int) -> List["RngStream"]:
        """Devuelve n sub-flujos independientes y reproducibles."""
        return [RngStream(self.seed, hijo) for hijo in self._seed_sequence.spawn(n)]

    def random(self, size=None):
        return self._generator.random(size)

    def integers(self, low, high=None, size=None):
        return self._generator.integers(low, high, size=size)

    def categorical(self, probs: Sequence[float]) -> int:
        """
        Un sorteo de una categórica por inversión de la CDF.

        Tolera vectores no normalizados (se escala por la suma acumulada).
        """
        acumulada = np.cumsum(np.asarray(probs, dtype=float))
        u = self._generator.random() * acumulada[-1]
        indice = int(np.searchsorted(acumulada, u, side="right"))
        return min(indice, len(acumulada) - 1)

    def categorical_many(self, probs: Sequence[float], size: int) -> np.ndarray:
        """size sorteos i.i.d. de la misma categórica."""
        acumulada = np.cumsum(np.asarray(probs, dtype=float))
        u = self._generator.random(size) * acumulada[-1]
        indices = np.searchsorted(acumulada, u, side="right")
        return np.minimum(indices, len(acumulada) - 1).astype(np.int64)

    def categorical_rows(self, probs: np.ndarray) -> np.ndarray:
        """Un sorteo por fila de una matriz (N, V) de categóricas, con un uniforme por fila."""
        acumulada = np.cumsum(np.asarray(probs, dtype=float), axis=1)
        u = self._generator.random(acumulada.shape[0]) * acumulada[:, -1]
        indices = (acumulada <= u[:, None]).sum(axis=1)
        return np.minimum(indices, acumulada.shape[1] - 1).astype(np.int64)
