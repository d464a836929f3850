"""
Configuración de experimentos: archivo JSON + flags de línea de comandos.
Ubicación: cli/config.py

Las flags ganan sobre el archivo. resolved() devuelve el dict que se embebe
en cada archivo de salida, de modo que un resultado identifica por completo
la configuración que lo produjo.
"""

import os
from dataclasses import asdict, dataclass, field, fields, replace
from typing import List, Optional

from core.base.joint import DEFAULT_CAP
from core.base.noise import NoiseDistribution, NoiseSequence, build_unigram_noise
from core.base.presets import PRESETS
from core.base.schedule import ScanSchedule
from core.classifier.posterior import check_invertible_noise
from core.errors import ConfigError, DomainError, GlauberError
from core.reverse.exact import theorem1_min_steps
from core.reverse.sampler import Prompt, SamplerConfig
from core.utils.file_utils import leer_json

MODEL_KINDS = ("oracle", "tabular", "logistic")


@dataclass
class ExperimentConfig:
    # Instancia
    V: Optional[int] = None
    L: Optional[int] = None
    preset: str = "random"
    point: Optional[List[int]] = None
    beta: float = 2.0
    dirichlet_alpha: float = 1.0
    cap: int = DEFAULT_CAP

    # Ruido y barrido (Π_t = Π para todo t, Π(φ) = 0.5)
    T: Optional[int] = None
    stay_prob: float = 0.5
    token_dist: str = "uniform"
    permutation: Optional[List[int]] = None
    delta: float = 0.05

    # Modelo y entrenamiento
    model_kind: str = "oracle"
    iterations: int = 1000
    batch_size: int = 1
    timesteps_per_example: int = 1
    learning_rate: float = 0.1

    # Muestreo
    seed: int = 0
    num_samples: int = 100
    top_p: float = 1.0
    temperature: float = 1.0
    temperature_fraction: float = 1.0
    normalize_scores: bool = True
    prompt: Optional[dict] = None
    infill_slice: Optional[List[int]] = None

    # Comparación
    sweeps: List[int] = field(default_factory=lambda: list(range(1, 9)))

    # Archivos
    instance: Optional[str] = None
    model: Optional[str] = None
    out: str = "salida"

    def __post_init__(self):
        errores = []
        if self.V is not None and self.V < 1:
            errores.append(f"V={self.V} debe ser ≥ 1")
        if self.L is not None and self.L < 1:
            errores.append(f"L={self.L} debe ser ≥ 1")
        if self.T is not None and self.T < 1:
            errores.append(f"T={self.T} debe ser ≥ 1")
        if not 0.0 < self.stay_prob < 1.0:
            errores.append(f"stay_prob={self.stay_prob} fuera de (0, 1)")
        if self.delta <= 0:
            errores.append(f"delta={self.delta} debe ser positivo")
        if self.model_kind not in MODEL_KINDS:
            errores.append(f"model_kind={self.model_kind!r} no es uno de {MODEL_KINDS}")
        if self.preset not in PRESETS:
            errores.append(f"preset={self.preset!r} no es uno de {PRESETS}")
        if self.iterations < 0 or self.num_samples < 0:
            errores.append("iterations y num_samples deben ser ≥ 0")
        if self.batch_size < 1 or self.timesteps_per_example < 1:
            errores.append("batch_size y timesteps_per_example deben ser ≥ 1")
        if any(int(k) < 0 for k in self.sweeps) or not self.sweeps:
            errores.append("sweeps debe ser una lista no vacía de enteros ≥ 0")
        if self.infill_slice is not None and len(self.infill_slice) != 2:
            errores.append("infill_slice debe ser [a, b]")
        if errores:
            raise ConfigError("Configuración inválida: " + "; ".join(errores) + ".")

    # ------------------------------------------------------------------
    # Objetos derivados
    # ------------------------------------------------------------------
    def for_instance(self, V: int, L: int) -> "ExperimentConfig":
        """Copia con (V, L) fijados por la instancia; un valor explícito distinto es error."""
        if self.V is not None and self.V != V:
            raise ConfigError(f"La configuración pide V={self.V} pero la instancia tiene V={V}.")
        if self.L is not None and self.L != L:
            raise ConfigError(f"La configuración pide L={self.L} pero la instancia tiene L={L}.")
        return replace(self, V=int(V), L=int(L))

    def _requerir_dimensiones(self):
        if self.V is None or self.L is None:
            raise ConfigError("V y L deben estar definidos (directamente o por la instancia).")

    def horizon(self) -> int:
        """T explícito o el mínimo del teorema para δ y p = 1 - Π(φ)."""
        self._requerir_dimensiones()
        if self.T is not None:
            return int(self.T)
        try:
            return max(1, theorem1_min_steps(self.L, 1.0 - self.stay_prob, self.delta))
        except GlauberError as e:
            raise ConfigError(f"No se puede resolver T por defecto: {e}") from e

    def noise(self) -> NoiseDistribution:
        self._requerir_dimensiones()
        try:
            if self.token_dist == "uniform":
                return NoiseDistribution.uniform(self.V, self.stay_prob)
            if not os.path.isfile(self.token_dist):
                raise ConfigError(f"El archivo de conteos unigrama no existe: {self.token_dist}")
            datos = leer_json(self.token_dist)
            conteos = datos["counts"] if isinstance(datos, dict) else datos
            if len(conteos) != self.V:
                raise ConfigError(f"El archivo de conteos tiene {len(conteos)} tokens; V={self.V}.")
            return build_unigram_noise(conteos, self.stay_prob)
        except (GlauberError, KeyError, ValueError) as e:
            if isinstance(e, ConfigError):
                raise
            raise ConfigError(f"Distribución de tokens inválida: {e}") from e

    def noise_sequence(self) -> NoiseSequence:
        """{Π_t} constante; se rechaza si la inversión cerrada no es exacta para algún token."""
        secuencia = NoiseSequence.constant(self.noise(), self.horizon())
        try:
            check_invertible_noise(secuencia)
        except DomainError as e:
            raise ConfigError(f"Ruido inválido para el muestreo inverso: {e}") from e
        return secuencia

    def schedule(self) -> ScanSchedule:
        try:
            return ScanSchedule.round_robin(self.L, self.horizon(), self.permutation)
        except GlauberError as e:
            raise ConfigError(f"Barrido inválido: {e}") from e

    def sampler_config(self) -> SamplerConfig:
        try:
            return SamplerConfig(self.top_p, self.temperature, self.temperature_fraction, self.normalize_scores)
        except GlauberError as e:
            raise ConfigError(str(e)) from e

    def prompt_spec(self) -> Optional[Prompt]:
        if self.prompt is None:
            return None
        try:
            return Prompt.from_dict(self.prompt)
        except GlauberError as e:
            raise ConfigError(f"Prompt inválido: {e}") from e

    def resolved(self) -> dict:
        """Configuración completa y serializable, con T resuelto si (V, L) se conocen."""
        datos = asdict(self)
        if self.V is not None and self.L is not None:
            datos["T"] = self.horizon()
        return datos


def load_config(ruta_config: Optional[str] = None, overrides: Optional[dict] = None) -> ExperimentConfig:
    """
    Construye la configuración desde un JSON opcional y flags; las flags no nulas ganan.

    Args:
        ruta_config: Ruta a un JSON con claves de ExperimentConfig
        overrides: Valores de la línea de comandos (None = no indicado)

    Raises:
        ConfigError: Si el archivo no existe, tiene claves desconocidas o valores inválidos
    """
    conocidas = {f.name for f in fields(ExperimentConfig)}
    valores = {}
    if ruta_config:
        if not os.path.isfile(ruta_config):
            raise ConfigError(f"El archivo de configuración no existe: {ruta_config}")
        try:
            datos = leer_json(ruta_config)
        except ValueError as e:
            raise ConfigError(f"JSON inválido en {ruta_config}: {e}") from e
        desconocidas = sorted(set(datos) - conocidas)
        if desconocidas:
            raise ConfigError(f"Claves desconocidas en la configuración: {', '.join(desconocidas)}")
        valores.update(datos)

    for clave, valor in (overrides or {}).items():
        if valor is not None:
            if clave not in conocidas:
                raise ConfigError(f"Flag sin campo de configuración: {clave}")
            valores[clave] = valor

    try:
        return ExperimentConfig(**valores)
    except TypeError as e:
        raise ConfigError(f"Configuración inválida: {e}") from e
