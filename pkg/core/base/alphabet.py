"""
Alfabeto de tokens, secuencias y secuencias enmascaradas.
Ubicación: core/base/alphabet.py

Los tokens son enteros densos 0..V-1. Los dos símbolos reservados quedan
fuera de ese rango para cualquier V:
    PHI   = -1  → resultado "no cambiar" del sorteo de ruido Z_t
    OMEGA = -2  → máscara en la posición que predice el denoiser
"""

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from core.errors import InvalidInputError

PHI = -1
OMEGA = -2

TokenSequence = Tuple[int, ...]


@dataclass(frozen=True)
class TokenAlphabet:
    """Conjunto finito X = {0, ..., V-1} más los símbolos reservados φ y ω."""

    size: int

    def __post_init__(self):
        if int(self.size) < 1:
            raise InvalidInputError(f"El alfabeto necesita al menos un token (V={self.size}).")

    @property
    def phi(self) -> int:
        return PHI

    @property
    def omega(self) -> int:
        return OMEGA

    def contains(self, token: int) -> bool:
        return 0 <= int(token) < self.size


def as_sequence(entries: Sequence[int], V: int, L: int = None) -> TokenSequence:
    """
    Convierte y valida una secuencia de tokens.

    Args:
        entries: Tokens (lista, tupla o array)
        V: Tamaño del alfabeto
        L: Longitud esperada (opcional)

    Returns:
        TokenSequence: Tupla inmutable de enteros

    Raises:
        InvalidInputError: Si algún token está fuera de 0..V-1 o la longitud no coincide
    """
    secuencia = tuple(int(x) for x in entries)
    if len(secuencia) == 0:
        raise InvalidInputError("La secuencia no puede ser vacía.")
    if L is not None and len(secuencia) != L:
        raise InvalidInputError(f"Longitud {len(secuencia)} distinta de L={L}.")
    for posicion, token in enumerate(secuencia):
        if not 0 <= token < V:
            raise InvalidInputError(f"Token {token} en la posición {posicion} fuera de 0..{V - 1}.")
    return secuencia


@dataclass(frozen=True)
class MaskedSequence:
    """
    Secuencia con exactamente una posición reemplazada por OMEGA.

    Se construye con MaskedSequence.from_sequence(); el constructor directo
    valida el invariante.
    """

    entries: TokenSequence
    masked_position: int

    def __post_init__(self):
        if not 0 <= self.masked_position < len(self.entries):
            raise InvalidInputError(f"Posición enmascarada {self.masked_position} fuera de rango.")
        omegas = [k for k, token in enumerate(self.entries) if token == OMEGA]
        if omegas != [self.masked_position]:
            raise InvalidInputError("Debe haber exactamente un OMEGA, en masked_position.")
        if any(token == PHI for token in self.entries):
            raise InvalidInputError("PHI no es un token válido dentro de una secuencia.")

    @classmethod
    def from_sequence(cls, x: Sequence[int], position: int) -> "MaskedSequence":
        entradas = list(int(v) for v in x)
        if not 0 <= position < len(entradas):
            raise InvalidInputError(f"Posición {position} fuera de 0..{len(entradas) - 1}.")
        entradas[position] = OMEGA
        return cls(tuple(entradas), position)

    @property
    def length(self) -> int:
        return len(self.entries)

    def context(self) -> TokenSequence:
        """x_{-i}: los L-1 tokens visibles, en orden."""
        return tuple(t for k, t in enumerate(self.entries) if k != self.masked_position)

    def fill(self, token: int) -> TokenSequence:
        """Secuencia completa con `token` en la posición enmascarada."""
        entradas = list(self.entries)
        entradas[self.masked_position] = int(token)
        return tuple(entradas)


def encode_index(x: Sequence[int], V: int) -> int:
    """Índice row-major Σ_k x_k·V^{L-1-k} de una secuencia (o contexto)."""
    indice = 0
    for token in x:
        indice = indice * V + int(token)
    return indice


def decode_index(index: int, V: int, L: int) -> TokenSequence:
    """Inversa de encode_index."""
    return tuple(int(v) for v in np.unravel_index(int(index), (V,) * L)) if L > 0 else ()


def encode_rows(X: np.ndarray, V: int) -> np.ndarray:
    """encode_index vectorizado sobre las filas de una matriz (N, L) de tokens."""
    X = np.asarray(X, dtype=np.int64)
    if X.shape[1] == 0:
        return np.zeros(X.shape[0], dtype=np.int64)
    pesos = V ** np.arange(X.shape[1] - 1, -1, -1, dtype=np.int64)
    return X @ pesos


def encode_contexts(X: np.ndarray, positions, V: int) -> np.ndarray:
    """
    Índice row-major del contexto x_{-i} de cada fila de una matriz (N, L).

    Args:
        X: Secuencias completas
        positions: Posición omitida, escalar o vector (N,)
        V: Tamaño del alfabeto

    Returns:
        np.ndarray: (N,) índices en 0..V^{L-1}-1
    """
    X = np.asarray(X, dtype=np.int64)
    N, L = X.shape
    posiciones = np.broadcast_to(np.asarray(positions, dtype=np.int64), (N,))
    if L == 1:
        return np.zeros(N, dtype=np.int64)
    columnas = np.arange(L)[None, :] != posiciones[:, None]
    return encode_rows(X[columnas].reshape(N, L - 1), V)
