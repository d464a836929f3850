"""
Curvas de convergencia TV vs número de barridos para GGM y Gibbs.
Ubicación: core/analysis/curves.py

Ambos métodos parten de Π(·|X)^⊗L y se evalúan con propagación exacta:
GGM corre T = K·L pasos inversos con el oráculo exacto; Gibbs corre K
barridos con las condicionales exactas de P*.
"""

import logging
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence

import pandas as pd

from core.analysis.metrics import tv_distance
from core.base.joint import JointDistribution
from core.base.noise import NoiseDistribution, NoiseSequence
from core.base.schedule import ScanSchedule
from core.baseline.gibbs import ExactConditional, gibbs_propagate_exact
from core.classifier.models import ExactOracle
from core.errors import InvalidInputError
from core.reverse.exact import reverse_propagate_exact

logger = logging.getLogger(__name__)

METHODS = ("ggm", "gibbs")
COLUMNAS = ["method", "K", "T", "tv", "bound"]


@dataclass(frozen=True)
class CurvePoint:
    method: str
    K: int
    T: int
    tv: float
    bound: Optional[float] = None

    @property
    def within_bound(self) -> bool:
        return self.bound is None or self.tv <= self.bound + 1e-12


@dataclass
class ConvergenceCurve:
    """
    Puntos (K, TV) de un método sobre una instancia.

    fallback_queries cuenta los contextos sin masa consultados (oráculo) o las
    condicionales indefinidas reemplazadas por Π(·|X) (Gibbs).
    """

    method: str
    instance: dict
    points: List[CurvePoint] = field(default_factory=list)
    fallback_queries: int = 0

    def append(self, punto: CurvePoint):
        if self.points and punto.K <= self.points[-1].K:
            raise InvalidInputError("Los K de una curva deben ser estrictamente crecientes.")
        if not 0.0 <= punto.tv <= 1.0:
            raise InvalidInputError(f"TV={punto.tv} fuera de [0, 1].")
        self.points.append(punto)

    def within_envelope(self) -> bool:
        return all(p.within_bound for p in self.points)

    def is_non_increasing(self, tolerance: float = 1e-12) -> bool:
        valores = [p.tv for p in self.points]
        return all(b <= a + tolerance for a, b in zip(valores, valores[1:]))

    def first_below(self, delta: float) -> Optional[int]:
        """Menor K con TV ≤ δ, o None."""
        for punto in self.points:
            if punto.tv <= delta:
                return punto.K
        return None

    def tv_at(self, K: int) -> Optional[float]:
        for punto in self.points:
            if punto.K == K:
                return punto.tv
        return None

    def to_dataframe(self) -> pd.DataFrame:
        filas = [[p.method, p.K, p.T, p.tv, p.bound] for p in self.points]
        return pd.DataFrame(filas, columns=COLUMNAS)


def convergence_curve(method: str, instance: JointDistribution, sweeps: Iterable[int],
                      noise: Optional[NoiseDistribution] = None,
                      permutation: Optional[Sequence[int]] = None,
                      descriptor: Optional[dict] = None) -> ConvergenceCurve:
    """
    TV entre la ley exacta del método tras K barridos y P*, para cada K.

    Args:
        method: "ggm" o "gibbs"
        instance: P*
        sweeps: Valores de K (se ordenan y deduplican)
        noise: Π (por defecto uniforme con Π(φ) = 0.5)
        permutation: Orden del barrido (identidad por defecto)
        descriptor: Metadatos de la instancia que acompañan a la curva

    Returns:
        ConvergenceCurve: Para GGM cada punto lleva la cota min(1, L(1-p)^K)

    Example:
        Con K = 0 ambos métodos reportan TV(Π^⊗L, P*).
    """
    if method not in METHODS:
        raise InvalidInputError(f"Método {method!r} desconocido; opciones: {', '.join(METHODS)}.")
    valores_K = sorted(set(int(k) for k in sweeps))
    if not valores_K or valores_K[0] < 0:
        raise InvalidInputError("La lista de barridos debe ser no vacía y no negativa.")

    V, L = instance.V, instance.L
    noise = noise or NoiseDistribution.uniform(V, 0.5)
    inicial = JointDistribution.product(noise.token_probs, L, instance.cap)
    curva = ConvergenceCurve(method, dict(descriptor or {"V": V, "L": L}))

    if method == "ggm":
        horizonte_max = max(valores_K[-1] * L, 1)
        schedule_max = ScanSchedule.round_robin(L, horizonte_max, permutation)
        ruido_max = NoiseSequence.constant(noise, horizonte_max)
        oraculo = ExactOracle(instance, schedule_max, ruido_max)
        p = noise.flip_prob
        for K in valores_K:
            T = K * L
            if T == 0:
                final = inicial
            else:
                final = reverse_propagate_exact(oraculo, schedule_max.with_horizon(T), ruido_max, inicial)
            cota = min(1.0, L * (1.0 - p) ** K)
            curva.append(CurvePoint(method, K, T, tv_distance(final, instance), cota))
        curva.fallback_queries = oraculo.unreachable_queries
    else:
        condicional = ExactConditional(instance, noise.token_probs)
        schedule = ScanSchedule.round_robin(L, max(L, 1), permutation)
        actual, K_actual = inicial, 0
        for K in valores_K:
            actual = gibbs_propagate_exact(actual, K - K_actual, condicional, schedule)
            K_actual = K
            curva.append(CurvePoint(method, K, K * L, tv_distance(actual, instance), None))
        curva.fallback_queries = condicional.fallback_count

    for punto in curva.points:
        logger.debug("%s K=%d TV=%.3e cota=%s", method, punto.K, punto.tv, punto.bound)
    return curva


def curves_to_dataframe(curvas: Iterable[ConvergenceCurve]) -> pd.DataFrame:
    """Concatena curvas en una tabla con columnas method, K, T, tv, bound."""
    tablas = [c.to_dataframe() for c in curvas]
    if not tablas:
        return pd.DataFrame(columns=COLUMNAS)
    return pd.concat(tablas, ignore_index=True)
