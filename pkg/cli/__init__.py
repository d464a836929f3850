"""
Paquete cli: configuración de experimentos, callbacks de consola y subcomandos.
"""

from .commands import build_parser, run
from .config import ExperimentConfig, load_config

__all__ = [
    'ExperimentConfig',
    'build_parser',
    'load_config',
    'run'
]
