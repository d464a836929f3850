"""
Instancias P* predefinidas para experimentos de escritorio.
Ubicación: core/base/presets.py

Presets:
- uniform:         P*(x) = V^{-L}
- point-mass:      P*(x*) = 1
- anti-correlated: uniforme sobre secuencias sin tokens vecinos iguales
                   (para V=2, L=2: P*(AB) = P*(BA) = 0.5)
- ising:           cadena 1D de Potts/Ising a baja temperatura,
                   P*(x) ∝ exp(β·Σ_k 1[x_k = x_{k+1}])
- random:          tabla Dirichlet(α) sembrada
"""

from itertools import product
from typing import Optional, Sequence

import numpy as np

from core.base.joint import DEFAULT_CAP, JointDistribution, check_cap
from core.base.rng import RngStream
from core.errors import InvalidInputError

PRESETS = ("uniform", "point-mass", "anti-correlated", "ising", "random")


def anti_correlated(V: int, L: int, cap: int = DEFAULT_CAP) -> JointDistribution:
    """Uniforme sobre las secuencias cuyos vecinos son siempre distintos."""
    if V < 2 and L > 1:
        raise InvalidInputError("El preset anti-correlated necesita V ≥ 2.")
    check_cap(V, L, cap)
    tensor = np.zeros((V,) * L)
    for x in product(range(V), repeat=L):
        if all(x[k] != x[k + 1] for k in range(L - 1)):
            tensor[x] = 1.0
    return JointDistribution(tensor, V, L, cap, renormalize=True)


def ising_chain(V: int, L: int, beta: float = 2.0, cap: int = DEFAULT_CAP) -> JointDistribution:
    """
    Cadena 1D con acoplamiento ferromagnético.

    Para V=2 coincide con Ising con J = β/2; β grande = baja temperatura.
    """
    check_cap(V, L, cap)
    tensor = np.zeros((V,) * L)
    for x in product(range(V), repeat=L):
        energia = sum(1 for k in range(L - 1) if x[k] == x[k + 1])
        tensor[x] = np.exp(beta * energia)
    return JointDistribution(tensor, V, L, cap, renormalize=True)


def random_instance(V: int, L: int, seed: int, alpha: float = 1.0,
                    cap: int = DEFAULT_CAP) -> JointDistribution:
    """Tabla Dirichlet(α, ..., α) sembrada; todas las entradas son positivas."""
    estados = check_cap(V, L, cap)
    rng = RngStream(seed)
    tabla = rng.generator.dirichlet(np.full(estados, float(alpha)))
    tabla = np.maximum(tabla, 1e-300)
    return JointDistribution(tabla, V, L, cap, renormalize=True)


def build_preset(name: str, V: int, L: int, seed: int = 0, point: Optional[Sequence[int]] = None,
                 beta: float = 2.0, alpha: float = 1.0, cap: int = DEFAULT_CAP) -> JointDistribution:
    """
    Construye el preset indicado.

    Args:
        name: Uno de PRESETS
        V, L: Alfabeto y longitud
        seed: Semilla (sólo "random")
        point: x* para "point-mass" (por defecto la secuencia de ceros)
        beta: Acoplamiento para "ising"
        alpha: Concentración Dirichlet para "random"
        cap: Tope de enumeración

    Raises:
        InvalidInputError: Si el preset no existe
    """
    if name == "uniform":
        return JointDistribution.uniform(V, L, cap)
    if name == "point-mass":
        x = tuple(point) if point is not None else (0,) * L
        return JointDistribution.point_mass(x, V, cap)
    if name == "anti-correlated":
        return anti_correlated(V, L, cap)
    if name == "ising":
        return ising_chain(V, L, beta, cap)
    if name == "random":
        return random_instance(V, L, seed, alpha, cap)
    raise InvalidInputError(f"Preset desconocido '{name}'. Opciones: {', '.join(PRESETS)}")
