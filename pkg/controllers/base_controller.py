"""
Piezas comunes de los controladores: log del comando, carga de insumos y resultados.
Ubicación: controllers/base_controller.py

Cada comando abre su log en <out>/logs/<comando>/, reporta a la interfaz
por log_gui_callback y devuelve un dict con 'exitoso', 'mensaje',
'ruta_log', 'duracion' y 'codigo_salida' (0 éxito, 2 configuración o
entrada, 3 certificación fallida, 1 error inesperado).
"""

import os
from datetime import datetime

from core.base.joint import JointDistribution
from core.errors import CertificationError, ConfigError, GlauberError
from core.utils.file_utils import crear_carpeta_salida, leer_json, validar_archivo_entrada
from core.utils.logger import (
    adjuntar_logging_modulos,
    crear_log_footer,
    crear_log_header,
    escribir_log,
    format_duration,
    generar_nombre_log_con_timestamp,
    liberar_logging_modulos,
    log_seccion,
    obtener_directorio_logs,
)

CODIGO_EXITO = 0
CODIGO_INESPERADO = 1
CODIGO_CONFIGURACION = 2
CODIGO_CERTIFICACION = 3


def notificar(log_gui_callback, mensaje, tipo="info"):
    if log_gui_callback:
        log_gui_callback(mensaje, tipo)


class EjecucionComando:
    """
    Contexto de un comando: crea la carpeta de salida y el log, y mide la duración.

    Example:
        with EjecucionComando(config, "train", "entrenamiento", "ENTRENAMIENTO") as ejecucion:
            ejecucion.log("Iteraciones: 1000")
    """

    def __init__(self, carpeta_salida, comando, prefijo, titulo, config_resuelta=None):
        self.carpeta_salida = crear_carpeta_salida(carpeta_salida)
        self.comando = comando
        carpeta_logs = obtener_directorio_logs(self.carpeta_salida, comando, crear=True)
        self.ruta_log = generar_nombre_log_con_timestamp(prefijo, carpeta_logs)
        self.titulo = titulo
        self.config_resuelta = config_resuelta
        self.inicio = None
        self._handler = None

    def __enter__(self):
        self.inicio = datetime.now()
        crear_log_header(self.ruta_log, self.titulo, self.config_resuelta)
        self._handler = adjuntar_logging_modulos(self.ruta_log)
        return self

    def __exit__(self, tipo, valor, traza):
        if self._handler is not None:
            liberar_logging_modulos(self._handler)
            self._handler = None
        return False

    def ruta(self, nombre_archivo):
        return os.path.join(self.carpeta_salida, nombre_archivo)

    def log(self, mensaje):
        escribir_log(self.ruta_log, mensaje)

    def seccion(self, titulo):
        log_seccion(self.ruta_log, titulo)

    def duracion(self):
        return format_duration((datetime.now() - self.inicio).total_seconds())

    def cerrar(self, estadisticas):
        duracion = self.duracion()
        crear_log_footer(self.ruta_log, estadisticas, duracion)
        return duracion

    def exito(self, mensaje, **extra):
        resultado = {
            'exitoso': True,
            'mensaje': mensaje,
            'ruta_log': self.ruta_log,
            'duracion': self.duracion(),
            'codigo_salida': CODIGO_EXITO,
        }
        resultado.update(extra)
        return resultado

    def fallo(self, error, log_gui_callback=None, **extra):
        """Registra el error y construye el resultado con el código de salida que le corresponde."""
        if isinstance(error, CertificationError):
            codigo, etiqueta = CODIGO_CERTIFICACION, "CERTIFICACIÓN FALLIDA"
        elif isinstance(error, (GlauberError, OSError)):
            codigo, etiqueta = CODIGO_CONFIGURACION, "ERROR"
        else:
            codigo, etiqueta = CODIGO_INESPERADO, "Error crítico"

        mensaje = f"{etiqueta}: {error}"
        self.log(mensaje)
        notificar(log_gui_callback, f"❌ {mensaje}", "error")
        resultado = {
            'exitoso': False,
            'mensaje': mensaje,
            'ruta_log': self.ruta_log,
            'duracion': self.duracion(),
            'codigo_salida': codigo,
        }
        resultado.update(extra)
        return resultado


def resultado_config_invalida(error, log_gui_callback=None):
    """Resultado para errores detectados antes de poder abrir el log del comando."""
    notificar(log_gui_callback, f"❌ {error}", "error")
    return {
        'exitoso': False,
        'mensaje': str(error),
        'ruta_log': '',
        'duracion': '0s',
        'codigo_salida': CODIGO_CONFIGURACION,
    }


def cargar_instancia(ruta_instancia, cap=None):
    """
    Lee una instancia P* escrita por el comando gen-instance.

    Raises:
        ConfigError: Si el archivo no existe o no contiene una instancia
    """
    es_valido, mensaje = validar_archivo_entrada(ruta_instancia, "archivo de instancia")
    if not es_valido:
        raise ConfigError(mensaje)
    datos = leer_json(ruta_instancia)
    if "instance" not in datos:
        raise ConfigError(f"{ruta_instancia} no contiene la clave 'instance'.")
    kwargs = {"cap": cap} if cap is not None else {}
    return JointDistribution.from_dict(datos["instance"], **kwargs)


def preparar_con_instancia(config):
    """
    Carga la instancia de config.instance y fija (V, L) en la configuración.

    Returns:
        tuple: (p_star, config, config_resuelta)

    Raises:
        ConfigError: Si la instancia no se puede leer o no coincide con la configuración
    """
    try:
        p_star = cargar_instancia(config.instance, config.cap)
    except ConfigError:
        raise
    except (GlauberError, OSError, ValueError) as e:
        raise ConfigError(f"Instancia ilegible ({config.instance}): {e}") from e
    config = config.for_instance(p_star.V, p_star.L)
    return p_star, config, config.resolved()
