"""
Métricas de certificación: variación total, NLL/PPL y bondad de ajuste chi-cuadrado.
Ubicación: core/analysis/metrics.py

La perplejidad generativa se evalúa con las condicionales exactas de P* en
lugar de un modelo de lenguaje externo; la definición de las fórmulas se
mantiene (suma desde l=2, división por L, media de exponenciales).
"""

import logging
import math
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from core.base.alphabet import encode_rows
from core.base.joint import JointDistribution
from core.errors import EvaluationError, InsufficientSamplesError, ShapeMismatchError

logger = logging.getLogger(__name__)

UMBRAL_AGRUPACION = 5.0


def tv_distance(P: JointDistribution, Q: JointDistribution) -> float:
    """
    Distancia de variación total ½·Σ_x |P(x) - Q(x)|.

    Raises:
        ShapeMismatchError: Si (L, V) difieren

    Example:
        >>> tv_distance(JointDistribution([.5, .5], 2, 1), JointDistribution([1, 0], 2, 1))
        0.5
    """
    if (P.L, P.V) != (Q.L, Q.V):
        raise ShapeMismatchError(f"Formas distintas: (L={P.L}, V={P.V}) vs (L={Q.L}, V={Q.V}).")
    tv = 0.5 * float(np.abs(P.flat() - Q.flat()).sum())
    return min(1.0, max(0.0, tv))


def empirical_distribution(samples, V: int, L: int, cap: Optional[int] = None) -> JointDistribution:
    """Distribución empírica de una lista o matriz (N, L) de secuencias."""
    filas = np.asarray(samples, dtype=np.int64).reshape(-1, L)
    if filas.shape[0] == 0:
        raise InsufficientSamplesError("No hay muestras para construir la distribución empírica.")
    conteos = np.bincount(encode_rows(filas, V), minlength=V ** L).astype(float)
    kwargs = {"cap": cap} if cap is not None else {}
    return JointDistribution(conteos / conteos.sum(), V, L, renormalize=True, **kwargs)


class AutoregressiveEvaluator:
    """
    Vista autoregresiva exacta de P*: P(x_l | x_{<l}) por marginales de prefijo.

    Args:
        p_star: Distribución objetivo
        floor: Probabilidad mínima; None = condicional nula es error
    """

    def __init__(self, p_star: JointDistribution, floor: Optional[float] = None):
        self.p_star = p_star
        self.floor = floor
        tensor = p_star.tensor()
        # prefijos[l] tiene forma (V,)*(l+1): P(X_{≤l} = ·)
        self._prefijos = []
        for l in range(p_star.L):
            ejes = tuple(range(l + 1, p_star.L))
            self._prefijos.append(tensor.sum(axis=ejes) if ejes else np.array(tensor))

    def conditional(self, x: Sequence[int], l: int) -> float:
        """P(X_l = x_l | X_{<l} = x_{<l}) con l indexado desde 0."""
        conjunta = float(self._prefijos[l][tuple(x[: l + 1])])
        previa = float(self._prefijos[l - 1][tuple(x[:l])]) if l > 0 else 1.0
        if previa <= 0 or conjunta <= 0:
            if self.floor is None:
                raise EvaluationError(f"Condicional nula en la posición {l} para {tuple(x)} sin probabilidad mínima.")
            return self.floor
        return max(conjunta / previa, self.floor or 0.0)

    def sequence_nll(self, x: Sequence[int]) -> float:
        """NLL(x) = -(1/L)·Σ_{l=2}^{L} log P(x_l | x_{<l})."""
        L = self.p_star.L
        suma = sum(math.log(self.conditional(x, l)) for l in range(1, L))
        return -suma / L


def nll_and_ppl(samples: Iterable[Sequence[int]], evaluator: AutoregressiveEvaluator) -> Tuple[float, float]:
    """
    NLL medio y PPL medio de un lote: PPL = (1/B)·Σ exp(NLL(x_i)) ≠ exp(NLL medio).

    Args:
        samples: Secuencias generadas
        evaluator: Vista autoregresiva de P*

    Returns:
        tuple: (NLL medio, PPL medio)

    Raises:
        EvaluationError: Si una condicional es nula y no hay probabilidad mínima
        InsufficientSamplesError: Si el lote está vacío

    Example:
        Lote con NLL (0, ln 4) → PPL = (1 + 4) / 2 = 2.5, mientras exp(NLL medio) = 2.
    """
    nlls = [evaluator.sequence_nll(tuple(int(v) for v in x)) for x in samples]
    if not nlls:
        raise InsufficientSamplesError("Lote vacío: no hay NLL que promediar.")
    nll_medio = float(np.mean(nlls))
    ppl_medio = float(np.mean(np.exp(nlls)))
    return nll_medio, ppl_medio


def chi_square_statistic(samples, P: JointDistribution) -> Tuple[float, int]:
    """
    Estadístico chi-cuadrado con agrupación de estados de conteo esperado < 5.

    Los estados con esperado < 5 se juntan en un único bin; si ese bin sigue por
    debajo del umbral se fusiona con el bin conservado de menor esperado.

    Returns:
        tuple: (estadístico, grados de libertad)

    Raises:
        InsufficientSamplesError: Si no se puede formar ningún bin con esperado ≥ 5
    """
    filas = np.asarray(samples, dtype=np.int64).reshape(-1, P.L)
    N = filas.shape[0]
    if N == 0:
        raise InsufficientSamplesError("No hay muestras para la prueba chi-cuadrado.")

    observados = np.bincount(encode_rows(filas, P.V), minlength=P.num_states).astype(float)
    esperados = N * P.flat()

    grandes = esperados >= UMBRAL_AGRUPACION
    obs_bins = list(observados[grandes])
    esp_bins = list(esperados[grandes])
    obs_resto = float(observados[~grandes].sum())
    esp_resto = float(esperados[~grandes].sum())

    if obs_resto > 0 or esp_resto > 0:
        if esp_resto >= UMBRAL_AGRUPACION:
            obs_bins.append(obs_resto)
            esp_bins.append(esp_resto)
        elif esp_bins:
            menor = int(np.argmin(esp_bins))
            obs_bins[menor] += obs_resto
            esp_bins[menor] += esp_resto
        elif P.num_states > 1:
            raise InsufficientSamplesError(f"Con N={N} ningún bin alcanza un esperado ≥ {UMBRAL_AGRUPACION}.")
        else:
            obs_bins.append(obs_resto)
            esp_bins.append(esp_resto)

    obs_bins = np.asarray(obs_bins)
    esp_bins = np.asarray(esp_bins)
    if np.any((esp_bins == 0) & (obs_bins > 0)):
        return math.inf, max(len(obs_bins) - 1, 0)
    con_masa = esp_bins > 0
    estadistico = float((((obs_bins - esp_bins) ** 2)[con_masa] / esp_bins[con_masa]).sum())
    return estadistico, max(int(con_masa.sum()) - 1, 0)


def chi_square_gof(samples, P: JointDistribution) -> float:
    """
    p-valor bilateral de la prueba chi-cuadrado de bondad de ajuste contra P.

    p = min(1, 2·min(cola superior, cola inferior)); un espacio de un solo bin da p = 1.

    Raises:
        InsufficientSamplesError: Si no hay muestras suficientes
    """
    estadistico, grados = chi_square_statistic(samples, P)
    if grados == 0:
        return 1.0
    if math.isinf(estadistico):
        return 0.0
    superior = float(stats.chi2.sf(estadistico, grados))
    inferior = float(stats.chi2.cdf(estadistico, grados))
    p_valor = min(1.0, 2.0 * min(superior, inferior))
    logger.debug("chi2=%.4f gl=%d p=%.3e", estadistico, grados, p_valor)
    return p_valor
