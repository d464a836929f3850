"""
Barrido round-robin de posiciones.
Ubicación: core/base/schedule.py

position(t) = permutation[t mod L] para 0 ≤ t < T. Los conjuntos de visitas
τ_t(j) = {s < t : i_s = j} se enumeran directamente en vez de usar una
fórmula cerrada para m_t(j).
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence, Tuple

from core.errors import InvalidInputError, StepRangeError


@dataclass(frozen=True)
class ScanSchedule:
    """Permutación fija de 0..L-1 y horizonte T."""

    permutation: Tuple[int, ...]
    horizon: int

    def __post_init__(self):
        perm = tuple(int(p) for p in self.permutation)
        if sorted(perm) != list(range(len(perm))) or not perm:
            raise InvalidInputError(f"La permutación {perm} no es una biyección de 0..L-1.")
        if int(self.horizon) < 1:
            raise InvalidInputError(f"Horizonte T={self.horizon} inválido.")
        object.__setattr__(self, "permutation", perm)
        object.__setattr__(self, "horizon", int(self.horizon))

    @classmethod
    def round_robin(cls, L: int, T: int, permutation: Optional[Sequence[int]] = None) -> "ScanSchedule":
        """Barrido con la permutación dada o la identidad por defecto."""
        return cls(tuple(permutation) if permutation is not None else tuple(range(L)), T)

    @property
    def length(self) -> int:
        return len(self.permutation)

    def with_horizon(self, T: int) -> "ScanSchedule":
        return ScanSchedule(self.permutation, T)

    def positions(self) -> Tuple[int, ...]:
        """(i_0, ..., i_{T-1})."""
        return _posiciones(self.permutation, self.horizon)

    def visits(self, j: int, t: int) -> Tuple[int, ...]:
        """τ_t(j) = {s < t : i_s = j}, 0 ≤ t ≤ T."""
        if not 0 <= t <= self.horizon:
            raise StepRangeError(f"t={t} fuera de 0..{self.horizon}.")
        if not 0 <= j < self.length:
            raise StepRangeError(f"Posición j={j} fuera de 0..{self.length - 1}.")
        return tuple(s for s in range(t) if self.permutation[s % self.length] == j)

    def first_visit(self, j: int) -> int:
        """Primer paso s con i_s = j (puede ser ≥ T si el horizonte es corto)."""
        return self.permutation.index(j)


@lru_cache(maxsize=256)
def _posiciones(permutation: Tuple[int, ...], horizon: int) -> Tuple[int, ...]:
    L = len(permutation)
    return tuple(permutation[t % L] for t in range(horizon))


def schedule_position(schedule: ScanSchedule, t: int) -> int:
    """
    Posición i_t visitada en el paso t.

    Args:
        schedule: Barrido round-robin
        t: Paso, 0 ≤ t < T

    Returns:
        int: permutation[t mod L]

    Raises:
        StepRangeError: Si t está fuera de 0..T-1

    Example:
        >>> schedule_position(ScanSchedule((2, 0, 1), 6), 1)
        0
    """
    if not 0 <= t < schedule.horizon:
        raise StepRangeError(f"Paso t={t} fuera de 0..{schedule.horizon - 1}.")
    return schedule.permutation[t % schedule.length]
