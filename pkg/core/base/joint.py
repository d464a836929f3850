"""
Tablas de probabilidad conjunta explícitas sobre X^L.
Ubicación: core/base/joint.py

JointDistribution guarda P*, P_t o P̂_0 como un tensor denso de forma (V,)*L
en orden row-major: el índice plano de x es Σ_k x_k·V^{L-1-k}. El tope de
enumeración protege la memoria (por defecto 10^7 estados).

Serialización JSON: {"L": int, "V": int, "probs": [...]} con probs plano.
"""

from typing import Callable, Sequence

import numpy as np

from core.base.alphabet import OMEGA, MaskedSequence, as_sequence
from core.errors import InvalidInputError, ResourceLimitError

DEFAULT_CAP = 10 ** 7
TOLERANCIA_NORMA = 1e-10


def check_cap(V: int, L: int, cap: int = DEFAULT_CAP) -> int:
    """
    Verifica que V^L no supere el tope de enumeración.

    Returns:
        int: Número de estados V^L

    Raises:
        ResourceLimitError: Si V^L > cap
    """
    estados = int(V) ** int(L)
    if estados > cap:
        raise ResourceLimitError(f"V^L = {V}^{L} = {estados} supera el tope de enumeración {cap}.")
    return estados


class JointDistribution:
    """Distribución conjunta inmutable sobre X^L."""

    def __init__(self, probs, V: int, L: int, cap: int = DEFAULT_CAP, renormalize: bool = False):
        """
        Args:
            probs: Tabla plana (V^L) o tensor (V,)*L de reales no negativos
            V: Tamaño del alfabeto
            L: Longitud de secuencia
            cap: Tope de enumeración
            renormalize: Si True divide por la suma (para errores de redondeo acumulados)

        Raises:
            ResourceLimitError: Si V^L > cap
            InvalidInputError: Si hay entradas negativas o la suma se desvía de 1 más de 1e-10
        """
        if V < 1 or L < 1:
            raise InvalidInputError(f"V={V} y L={L} deben ser positivos.")
        estados = check_cap(V, L, cap)
        tabla = np.array(probs, dtype=float).reshape(-1)
        if tabla.size != estados:
            raise InvalidInputError(f"La tabla tiene {tabla.size} entradas, se esperaban V^L={estados}.")
        if np.any(tabla < 0) or not np.all(np.isfinite(tabla)):
            raise InvalidInputError("La tabla contiene probabilidades negativas o no finitas.")
        total = tabla.sum()
        if renormalize and total > 0:
            tabla = tabla / total
        elif abs(total - 1.0) > TOLERANCIA_NORMA:
            raise InvalidInputError(f"La tabla suma {total:.15g}; la desviación supera {TOLERANCIA_NORMA}.")

        self.V = int(V)
        self.L = int(L)
        self.cap = int(cap)
        self._tensor = tabla.reshape((self.V,) * self.L)
        self._tensor.setflags(write=False)

    # ------------------------------------------------------------------
    # Constructores
    # ------------------------------------------------------------------
    @classmethod
    def uniform(cls, V: int, L: int, cap: int = DEFAULT_CAP) -> "JointDistribution":
        estados = check_cap(V, L, cap)
        return cls(np.full(estados, 1.0 / estados), V, L, cap)

    @classmethod
    def point_mass(cls, x: Sequence[int], V: int, cap: int = DEFAULT_CAP) -> "JointDistribution":
        x = as_sequence(x, V)
        L = len(x)
        tensor = np.zeros((V,) * L)
        tensor[x] = 1.0
        return cls(tensor, V, L, cap)

    @classmethod
    def product(cls, token_probs: Sequence[float], L: int, cap: int = DEFAULT_CAP) -> "JointDistribution":
        """Π(·|X)^{⊗L}."""
        marginal = np.asarray(token_probs, dtype=float)
        V = marginal.size
        check_cap(V, L, cap)
        tensor = marginal
        for _ in range(L - 1):
            tensor = np.multiply.outer(tensor, marginal)
        return cls(tensor, V, L, cap, renormalize=True)

    # ------------------------------------------------------------------
    # Acceso
    # ------------------------------------------------------------------
    @property
    def num_states(self) -> int:
        return self.V ** self.L

    def tensor(self) -> np.ndarray:
        """Vista de sólo lectura con forma (V,)*L."""
        return self._tensor

    def flat(self) -> np.ndarray:
        return self._tensor.reshape(-1)

    def prob(self, x: Sequence[int]) -> float:
        return float(self._tensor[tuple(int(v) for v in x)])

    def context_vector(self, masked: MaskedSequence) -> np.ndarray:
        """Vector c[a] = P(x con x_i = a) para el contexto visible de `masked`."""
        indice = tuple(slice(None) if token == OMEGA else int(token) for token in masked.entries)
        return np.array(self._tensor[indice], dtype=float)

    def marginal(self, position: int) -> np.ndarray:
        """Distribución marginal de una posición."""
        ejes = tuple(k for k in range(self.L) if k != position)
        return self._tensor.sum(axis=ejes) if ejes else self._tensor.copy()

    def support(self) -> np.ndarray:
        """Índices planos con probabilidad positiva."""
        return np.flatnonzero(self.flat() > 0)

    def sample_indices(self, rng, n: int) -> np.ndarray:
        """n índices planos i.i.d. según la tabla."""
        return rng.categorical_many(self.flat(), n)

    def sample_sequences(self, rng, n: int) -> np.ndarray:
        """Matriz (n, L) de secuencias i.i.d. según la tabla."""
        indices = self.sample_indices(rng, n)
        return np.stack(np.unravel_index(indices, (self.V,) * self.L), axis=1).astype(np.int64)

    def with_tensor(self, tensor: np.ndarray, renormalize: bool = True) -> "JointDistribution":
        return JointDistribution(tensor, self.V, self.L, self.cap, renormalize=renormalize)

    # ------------------------------------------------------------------
    # Serialización
    # ------------------------------------------------------------------
    def to_dict(self) -> dict:
        return {"L": self.L, "V": self.V, "probs": [float(p) for p in self.flat()]}

    @classmethod
    def from_dict(cls, datos: dict, cap: int = DEFAULT_CAP) -> "JointDistribution":
        try:
            return cls(datos["probs"], int(datos["V"]), int(datos["L"]), cap)
        except KeyError as e:
            raise InvalidInputError(f"Falta la clave {e} en la distribución conjunta.") from e

    def __repr__(self):
        return f"JointDistribution(V={self.V}, L={self.L}, soporte={self.support().size})"


def context_rows(V: int, L: int, position: int) -> np.ndarray:
    """
    Matriz (V^{L-1}, L): una fila por contexto x_{-i}, en orden row-major, con 0 en `position`.
    """
    if L == 1:
        return np.zeros((1, 1), dtype=np.int64)
    contextos = np.stack(np.unravel_index(np.arange(V ** (L - 1)), (V,) * (L - 1)), axis=1)
    return np.insert(contextos.astype(np.int64), position, 0, axis=1)


def apply_coordinate_kernel(
    tensor: np.ndarray,
    position: int,
    kernel: Callable[[np.ndarray], np.ndarray],
) -> np.ndarray:
    """
    Empuja una tabla a través de un kernel que sólo re-muestrea `position`.

    Para cada contexto x_{-i} con masa m > 0, la nueva fila es m·kernel(ctx).
    Los contextos sin masa no se consultan.

    Args:
        tensor: Tabla (V,)*L
        position: Posición i re-muestreada
        kernel: Función filas (N, L) → matriz (N, V) de distribuciones del nuevo
            token; el valor de las filas en `position` no es significativo

    Returns:
        np.ndarray: Nueva tabla (V,)*L
    """
    L = tensor.ndim
    V = tensor.shape[0]
    movido = np.moveaxis(tensor, position, -1).reshape(-1, V)
    masas = movido.sum(axis=1)
    activos = masas > 0
    nuevo = np.zeros_like(movido)

    if np.any(activos):
        filas = context_rows(V, L, position)[activos]
        nuevo[activos] = masas[activos, None] * np.asarray(kernel(filas), dtype=float)

    return np.moveaxis(nuevo.reshape((V,) * (L - 1) + (V,)), -1, position)
