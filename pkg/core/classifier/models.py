"""
Modelos denoiser: oráculo exacto, tabla de conteos y regresión logística.
Ubicación: core/classifier/models.py

Todos implementan predict(masked, t) -> DenoiserOutput, donde la entrada a
de ŷ estima P(Z_t = a | X_{t+1,-i_t} = x_{-i_t}, X_{t+1,i_t} = a), y
predict_batch(x_next, position, t) -> matriz (N, V) para muchas filas a la vez.

Persistencia JSON: {"kind": "tabular"|"logistic", "version": 1, ...}.
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from core.base.alphabet import MaskedSequence, encode_contexts
from core.base.joint import JointDistribution, check_cap
from core.base.noise import NoiseSequence
from core.base.schedule import ScanSchedule
from core.classifier.posterior import CLAMP_EPS, TrainBatch, bce_loss_array, check_invertible_noise
from core.errors import InvalidInputError, StepRangeError, UnsupportedConfigurationError
from core.forward.exact import forward_tensors
from core.utils.file_utils import escribir_json, leer_json

logger = logging.getLogger(__name__)

MODEL_VERSION = 1


@dataclass(frozen=True)
class DenoiserOutput:
    """Vector ŷ de longitud V, recortado por abajo a ε (ŷ_a = 1 se conserva: ruido puro)."""

    y_hat: np.ndarray

    def __post_init__(self):
        # Sin tope superior: ŷ_a = 1 debe dar score exactamente 0 en la inversión
        valores = np.clip(np.asarray(self.y_hat, dtype=float).ravel(), CLAMP_EPS, 1.0)
        valores.setflags(write=False)
        object.__setattr__(self, "y_hat", valores)

    def __len__(self):
        return int(self.y_hat.size)


def _fila_completa(masked: MaskedSequence) -> np.ndarray:
    # El token de la posición enmascarada no entra en ninguna predicción
    return np.array([masked.fill(0)], dtype=np.int64)


class DenoiserModel(ABC):
    """Interfaz común de los predictores de ŷ."""

    kind = "abstract"
    learned = True

    def __init__(self, V: int, L: int, horizon: int):
        if V < 1 or L < 1 or horizon < 1:
            raise InvalidInputError(f"Dimensiones inválidas V={V}, L={L}, T={horizon}.")
        self.V = int(V)
        self.L = int(L)
        self.horizon = int(horizon)

    def _validar_paso(self, t: int):
        if not 0 <= t < self.horizon:
            raise StepRangeError(f"Paso t={t} fuera de 0..{self.horizon - 1} para el modelo {self.kind}.")

    def predict(self, masked: MaskedSequence, t: int) -> DenoiserOutput:
        """ŷ para un contexto enmascarado en el paso t."""
        if masked.length != self.L:
            raise InvalidInputError(f"Secuencia de longitud {masked.length}, el modelo espera L={self.L}.")
        fila = self.predict_batch(_fila_completa(masked), masked.masked_position, t)
        return DenoiserOutput(fila[0])

    @abstractmethod
    def predict_batch(self, x_next: np.ndarray, position: int, t: int) -> np.ndarray:
        """Matriz (N, V) de ŷ para N secuencias con la misma posición enmascarada."""

    def update_batch(self, batch: TrainBatch) -> float:
        """Actualiza el modelo con un lote; devuelve la pérdida media antes de actualizar."""
        raise UnsupportedConfigurationError(f"El modelo {self.kind} no es entrenable.")

    def to_dict(self) -> dict:
        raise UnsupportedConfigurationError(f"El modelo {self.kind} no se persiste.")


class ExactOracle(DenoiserModel):
    """
    Predictor de Bayes exacto a partir de P* y la propagación forward exacta.

    Precalcula P_0, ..., P_{T-1}. Un contexto sin masa bajo P_t no es
    alcanzable; allí se devuelve ŷ = 0.5 (neutral) y se cuenta la consulta.

    Raises:
        DomainError: Si {Π_t} no admite la inversión cerrada exacta (ver check_invertible_noise)
    """

    kind = "oracle"
    learned = False

    def __init__(self, p_star: JointDistribution, schedule: ScanSchedule, noise_seq: NoiseSequence):
        super().__init__(p_star.V, p_star.L, schedule.horizon)
        if schedule.length != p_star.L:
            raise InvalidInputError(f"El barrido tiene L={schedule.length}, P* tiene L={p_star.L}.")
        check_invertible_noise(noise_seq)
        self.p_star = p_star
        self.schedule = schedule
        self.noise_seq = noise_seq
        self._tensores = forward_tensors(p_star, schedule, noise_seq, schedule.horizon - 1)
        self.unreachable_queries = 0

    def joint_at(self, t: int) -> np.ndarray:
        """Tensor P_t, 0 ≤ t < T."""
        self._validar_paso(t)
        return self._tensores[t]

    def predict_batch(self, x_next: np.ndarray, position: int, t: int) -> np.ndarray:
        self._validar_paso(t)
        x_next = np.asarray(x_next, dtype=np.int64)
        noise = self.noise_seq.at(t)

        tabla = np.moveaxis(self._tensores[t], position, -1).reshape(-1, self.V)
        contexto = tabla[encode_contexts(x_next, position, self.V)]
        marginal = contexto.sum(axis=1, keepdims=True)

        senal = noise.token_mass()[None, :] * marginal
        denominador = noise.stay_prob * contexto + senal
        q = np.divide(senal, denominador, out=np.ones_like(senal), where=denominador > 0)

        sin_masa = marginal[:, 0] <= 0
        if np.any(sin_masa):
            self.unreachable_queries += int(sin_masa.sum())
            logger.debug("t=%d: %d contextos sin masa; se devuelve ŷ=0.5", t, int(sin_masa.sum()))
            q[sin_masa] = 0.5
        return q


class TabularModel(DenoiserModel):
    """
    Conteos de eventos por (t, posición, contexto, a, etiqueta) con suavizado de Laplace.

    ŷ = (n₁ + α) / (n₀ + n₁ + 2α); un contexto nunca visto da 0.5.
    """

    kind = "tabular"

    def __init__(self, V: int, L: int, horizon: int, alpha: float = 1.0, counts: np.ndarray = None):
        super().__init__(V, L, horizon)
        check_cap(V, L)
        if alpha <= 0:
            raise InvalidInputError(f"El suavizado α={alpha} debe ser positivo.")
        self.alpha = float(alpha)
        forma = (self.horizon, self.L, self.V ** (self.L - 1), self.V, 2)
        if counts is None:
            self.counts = np.zeros(forma, dtype=np.int64)
        else:
            self.counts = np.asarray(counts, dtype=np.int64).reshape(forma)
            if np.any(self.counts < 0):
                raise InvalidInputError("Los conteos de la tabla deben ser no negativos.")

    def _estimar(self, n: np.ndarray) -> np.ndarray:
        return (n[..., 1] + self.alpha) / (n.sum(axis=-1) + 2.0 * self.alpha)

    def predict_batch(self, x_next: np.ndarray, position: int, t: int) -> np.ndarray:
        self._validar_paso(t)
        contextos = encode_contexts(x_next, position, self.V)
        return self._estimar(self.counts[t, position, contextos])

    def update_batch(self, batch: TrainBatch) -> float:
        if len(batch) == 0:
            return 0.0
        if batch.ts.max() >= self.horizon:
            raise StepRangeError(f"Lote con pasos ≥ T={self.horizon}.")
        contextos = batch.context_indices(self.V)
        claves = (batch.ts, batch.positions, contextos, batch.revealed)
        previo = self._estimar(self.counts[claves])
        perdida = float(bce_loss_array(previo, batch.labels).mean())
        np.add.at(self.counts, claves + (batch.labels,), 1)
        return perdida

    def total_events(self) -> int:
        return int(self.counts.sum())

    def to_dict(self) -> dict:
        plano = self.counts.reshape(-1)
        no_nulos = np.flatnonzero(plano)
        return {
            "kind": self.kind,
            "version": MODEL_VERSION,
            "V": self.V,
            "L": self.L,
            "T": self.horizon,
            "alpha": self.alpha,
            "counts": [[int(i), int(plano[i])] for i in no_nulos],
        }

    @classmethod
    def from_dict(cls, datos: dict) -> "TabularModel":
        modelo = cls(int(datos["V"]), int(datos["L"]), int(datos["T"]), float(datos["alpha"]))
        plano = modelo.counts.reshape(-1)
        for indice, valor in datos["counts"]:
            plano[int(indice)] = int(valor)
        return modelo


class LogisticModel(DenoiserModel):
    """
    Regresión logística: ŷ_a = σ(W_a · f(x_{-i}, t) + b_a).

    f concatena un one-hot (posición, token) por cada posición visible y un
    one-hot del bloque temporal ⌊t/L⌋.
    """

    kind = "logistic"

    def __init__(self, V: int, L: int, horizon: int, learning_rate: float = 0.1,
                 weights: np.ndarray = None, bias: np.ndarray = None):
        super().__init__(V, L, horizon)
        if learning_rate <= 0:
            raise InvalidInputError(f"learning_rate={learning_rate} debe ser positivo.")
        self.learning_rate = float(learning_rate)
        self.num_buckets = math.ceil(self.horizon / self.L)
        self.num_features = self.L * self.V + self.num_buckets
        self.weights = np.zeros((self.V, self.num_features)) if weights is None else np.array(weights, dtype=float)
        self.bias = np.zeros(self.V) if bias is None else np.array(bias, dtype=float)
        if self.weights.shape != (self.V, self.num_features) or self.bias.shape != (self.V,):
            raise InvalidInputError("Dimensiones de pesos incompatibles con (V, L, T).")

    def features(self, x_next: np.ndarray, positions, ts) -> np.ndarray:
        """Matriz de rasgos (N, D) binaria."""
        x_next = np.asarray(x_next, dtype=np.int64)
        N = x_next.shape[0]
        posiciones = np.broadcast_to(np.asarray(positions, dtype=np.int64), (N,))
        pasos = np.broadcast_to(np.asarray(ts, dtype=np.int64), (N,))
        filas = np.arange(N)

        F = np.zeros((N, self.num_features))
        for j in range(self.L):
            visibles = posiciones != j
            F[filas[visibles], j * self.V + x_next[visibles, j]] = 1.0
        F[filas, self.L * self.V + pasos // self.L] = 1.0
        return F

    def predict_batch(self, x_next: np.ndarray, position: int, t: int) -> np.ndarray:
        self._validar_paso(t)
        F = self.features(x_next, position, t)
        return expit(F @ self.weights.T + self.bias)

    def loss_and_gradient(self, batch: TrainBatch):
        """
        Pérdida BCE media del lote y su gradiente respecto de (W, b).

        Returns:
            tuple: (pérdida, grad_W (V, D), grad_b (V,))
        """
        N = len(batch)
        F = self.features(batch.x_next, batch.positions, batch.ts)
        a = batch.revealed
        y_hat = expit((F * self.weights[a]).sum(axis=1) + self.bias[a])
        perdida = float(bce_loss_array(y_hat, batch.labels).mean())

        error = (y_hat - batch.labels) / N
        grad_W = np.zeros_like(self.weights)
        np.add.at(grad_W, a, error[:, None] * F)
        grad_b = np.bincount(a, weights=error, minlength=self.V)
        return perdida, grad_W, grad_b

    def loss(self, batch: TrainBatch) -> float:
        return self.loss_and_gradient(batch)[0]

    def update_batch(self, batch: TrainBatch) -> float:
        if len(batch) == 0:
            return 0.0
        if batch.ts.max() >= self.horizon:
            raise StepRangeError(f"Lote con pasos ≥ T={self.horizon}.")
        perdida, grad_W, grad_b = self.loss_and_gradient(batch)
        self.weights -= self.learning_rate * grad_W
        self.bias -= self.learning_rate * grad_b
        return perdida

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "version": MODEL_VERSION,
            "V": self.V,
            "L": self.L,
            "T": self.horizon,
            "learning_rate": self.learning_rate,
            "weights": [[float(w) for w in fila] for fila in self.weights],
            "bias": [float(b) for b in self.bias],
        }

    @classmethod
    def from_dict(cls, datos: dict) -> "LogisticModel":
        return cls(int(datos["V"]), int(datos["L"]), int(datos["T"]), float(datos["learning_rate"]),
                   weights=datos["weights"], bias=datos["bias"])


MODEL_KINDS = {
    TabularModel.kind: TabularModel,
    LogisticModel.kind: LogisticModel,
}


def build_model(kind: str, V: int, L: int, horizon: int, learning_rate: float = 0.1) -> DenoiserModel:
    """Modelo entrenable recién inicializado."""
    if kind == TabularModel.kind:
        return TabularModel(V, L, horizon)
    if kind == LogisticModel.kind:
        return LogisticModel(V, L, horizon, learning_rate)
    raise UnsupportedConfigurationError(f"Tipo de modelo entrenable desconocido: {kind!r}.")


def model_from_dict(datos: dict) -> DenoiserModel:
    try:
        clase = MODEL_KINDS[datos["kind"]]
    except KeyError as e:
        raise InvalidInputError(f"Tipo de modelo no reconocido: {datos.get('kind')!r}.") from e
    if int(datos.get("version", -1)) != MODEL_VERSION:
        raise InvalidInputError(f"Versión de modelo {datos.get('version')} no soportada (se espera {MODEL_VERSION}).")
    return clase.from_dict(datos)


def save_model(model: DenoiserModel, ruta_salida: str, config: dict = None):
    """Persiste el modelo bajo la clave "model" de un JSON determinista."""
    escribir_json(ruta_salida, {"model": model.to_dict()}, config)


def load_model(ruta_archivo: str) -> DenoiserModel:
    datos = leer_json(ruta_archivo)
    if "model" not in datos:
        raise InvalidInputError(f"El archivo {ruta_archivo} no contiene un modelo.")
    return model_from_dict(datos["model"])
