"""
Sistema de logging para los comandos del motor Glauber.
Ubicación: core/utils/logger.py

Cada comando escribe su propio archivo de log dentro de la carpeta de salida:
    {salida}/logs/{comando}/{prefijo}_DD.MM.YYYY_HH.MM.SS.log

Los módulos de core/ registran con logging.getLogger(__name__); el handler
que agrega adjuntar_logging_modulos() vuelca esos registros al mismo archivo.
"""

import logging
from datetime import datetime
from pathlib import Path

SEPARADOR = "=" * 90


def obtener_directorio_logs(carpeta_salida, comando, crear=True):
    """
    Obtiene el directorio de logs de un comando dentro de la carpeta de salida.

    Args:
        carpeta_salida (str): Carpeta de salida del comando
        comando (str): "gen-instance", "train", "sample", ...
        crear (bool): Si True, crea el directorio si no existe

    Returns:
        str: Ruta al directorio de logs

    Example:
        >>> obtener_directorio_logs("/tmp/exp1", "train")
        '/tmp/exp1/logs/train'
    """
    logs_dir = Path(carpeta_salida) / "logs" / comando

    if crear:
        logs_dir.mkdir(parents=True, exist_ok=True)

    return str(logs_dir)


def generar_nombre_log_con_timestamp(prefijo, carpeta_logs):
    """
    Genera un nombre de archivo de log con timestamp.
    Formato: prefijo_DD.MM.YYYY_HH.MM.SS.log

    Args:
        prefijo (str): Prefijo del archivo (ej: "entrenamiento")
        carpeta_logs (str): Carpeta donde se guardará el log

    Returns:
        str: Ruta completa del archivo de log
    """
    timestamp = datetime.now().strftime("%d.%m.%Y_%H.%M.%S")
    return str(Path(carpeta_logs) / f"{prefijo}_{timestamp}.log")


def format_duration(seconds):
    """
    Formatea una duración en segundos a formato legible.

    Args:
        seconds (float): Duración en segundos

    Returns:
        str: Duración formateada

    Examples:
        >>> format_duration(0.42)
        '0.42s'
        >>> format_duration(125)
        '2m 5s'
        >>> format_duration(3725)
        '1h 2m 5s'
    """
    if seconds < 1:
        return f"{seconds:.2f}s"

    horas, resto = divmod(int(seconds), 3600)
    minutos, segs = divmod(resto, 60)

    partes = []
    if horas:
        partes.append(f"{horas}h")
    if minutos:
        partes.append(f"{minutos}m")
    if segs or not partes:
        partes.append(f"{segs}s")

    return " ".join(partes)


def escribir_log(ruta_log, mensaje):
    """
    Escribe una línea de texto en el archivo de log.

    Args:
        ruta_log (str): Ruta completa del archivo de log
        mensaje (str): Mensaje a escribir
    """
    try:
        with open(ruta_log, "a", encoding="utf-8") as log:
            log.write(mensaje + "\n")
    except OSError as e:
        logging.getLogger(__name__).warning("No se pudo escribir en el log %s: %s", ruta_log, e)


def crear_log_header(ruta_log, titulo, config=None):
    """
    Crea el encabezado inicial del archivo de log (sobrescribe si existe).

    Args:
        ruta_log (str): Ruta completa del archivo de log
        titulo (str): Título del comando
        config (dict): Configuración resuelta a registrar (opcional)
    """
    lineas = [
        SEPARADOR,
        titulo,
        f"Fecha de ejecución: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}",
        SEPARADOR,
    ]
    if config:
        lineas.append("Configuración resuelta:")
        for clave in sorted(config):
            lineas.append(f"  {clave}: {config[clave]}")
        lineas.append("")

    try:
        with open(ruta_log, "w", encoding="utf-8") as log:
            log.write("\n".join(lineas) + "\n\n")
    except OSError as e:
        logging.getLogger(__name__).warning("No se pudo crear el header del log: %s", e)


def crear_log_footer(ruta_log, estadisticas, duracion):
    """
    Crea el pie del archivo de log con las estadísticas finales del comando.

    Args:
        ruta_log (str): Ruta completa del archivo de log
        estadisticas (dict): Pares nombre → valor a reportar
        duracion (str): Duración ya formateada con format_duration

    Example:
        >>> crear_log_footer(ruta, {"TV": 0.012, "Resultado": "APROBADO"}, "3s")
    """
    escribir_log(ruta_log, "\n" + SEPARADOR)
    escribir_log(ruta_log, "RESUMEN FINAL")
    escribir_log(ruta_log, f"Fecha de finalización: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")
    for nombre, valor in estadisticas.items():
        escribir_log(ruta_log, f"{nombre}: {valor}")
    escribir_log(ruta_log, f"Duración: {duracion}")
    escribir_log(ruta_log, SEPARADOR)


def log_seccion(ruta_log, titulo):
    """
    Escribe un título de sección en el log.

    Args:
        ruta_log (str): Ruta completa del archivo de log
        titulo (str): Título de la sección
    """
    escribir_log(ruta_log, "")
    escribir_log(ruta_log, SEPARADOR)
    escribir_log(ruta_log, titulo)
    escribir_log(ruta_log, SEPARADOR)


def adjuntar_logging_modulos(ruta_log, nivel=logging.INFO):
    """
    Redirige los registros de los módulos core.* al archivo de log del comando.

    Args:
        ruta_log (str): Ruta completa del archivo de log
        nivel (int): Nivel mínimo a registrar

    Returns:
        logging.Handler: Handler agregado; pasarlo a liberar_logging_modulos()
    """
    handler = logging.FileHandler(ruta_log, encoding="utf-8")
    handler.setLevel(nivel)
    handler.setFormatter(logging.Formatter("%(levelname)s [%(name)s] %(message)s"))

    logger_core = logging.getLogger("core")
    logger_core.addHandler(handler)
    if logger_core.level == logging.NOTSET or logger_core.level > nivel:
        logger_core.setLevel(nivel)
    return handler


def liberar_logging_modulos(handler):
    """Quita y cierra el handler agregado por adjuntar_logging_modulos()."""
    logging.getLogger("core").removeHandler(handler)
    handler.close()
