"""
Paquete de controllers: un workflow por comando del CLI.
"""

from .instance_controller import generar_instancia
from .training_controller import entrenar_modelo
from .sampling_controller import generar_muestras, rellenar
from .certification_controller import certificar, comparar

__all__ = [
    'generar_instancia',
    'entrenar_modelo',
    'generar_muestras',
    'rellenar',
    'certificar',
    'comparar'
]
