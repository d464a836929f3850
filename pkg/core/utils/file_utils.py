"""
Utilidades para manejo de archivos de entrada y salida.
Ubicación: core/utils/file_utils.py

Todos los escritores producen bytes deterministas: mismas entradas ⇒ mismo
archivo, condición necesaria para que los comandos sean reproducibles.
"""

import json
import os

import pandas as pd

SCHEMA_VERSION = 1


def crear_carpeta_salida(carpeta_salida):
    """
    Crea la carpeta de salida de un comando si no existe.

    Args:
        carpeta_salida (str): Ruta de la carpeta

    Returns:
        str: Ruta absoluta de la carpeta creada
    """
    ruta = os.path.abspath(carpeta_salida)
    os.makedirs(ruta, exist_ok=True)
    return ruta


def validar_archivo_entrada(ruta_archivo, descripcion="archivo"):
    """
    Valida que la ruta exista y sea un archivo.

    Args:
        ruta_archivo (str): Ruta a validar
        descripcion (str): Nombre del archivo para el mensaje de error

    Returns:
        tuple: (es_valido: bool, mensaje: str)

    Example:
        >>> validar_archivo_entrada("/data/instancia.json", "instancia P*")
        (True, "instancia P* encontrado: /data/instancia.json")
    """
    if not ruta_archivo:
        return False, f"No se indicó la ruta del {descripcion}."
    if not os.path.isfile(ruta_archivo):
        return False, f"El {descripcion} no existe: {ruta_archivo}"
    return True, f"{descripcion} encontrado: {ruta_archivo}"


def leer_json(ruta_archivo):
    """Carga un archivo JSON en UTF-8."""
    with open(ruta_archivo, "r", encoding="utf-8") as f:
        return json.load(f)


def escribir_json(ruta_salida, datos, config=None):
    """
    Escribe un JSON con claves ordenadas, embebiendo versión de esquema y configuración.

    Args:
        ruta_salida (str): Ruta completa del archivo
        datos (dict): Contenido principal
        config (dict): Configuración resuelta del comando (opcional)

    Raises:
        OSError: Si no se puede escribir el archivo
    """
    documento = {"schema_version": SCHEMA_VERSION}
    if config is not None:
        documento["config"] = config
    documento.update(datos)

    with open(ruta_salida, "w", encoding="utf-8", newline="\n") as f:
        json.dump(documento, f, indent=2, sort_keys=True, ensure_ascii=False)
        f.write("\n")


def escribir_jsonl(ruta_salida, registros, config=None):
    """
    Escribe un archivo JSON lines: una línea de cabecera y luego un objeto por registro.

    La cabecera es {"type": "header", "schema_version": 1, "config": {...}}.

    Args:
        ruta_salida (str): Ruta completa del archivo
        registros (list): Lista de dicts (una generación por elemento)
        config (dict): Configuración resuelta del comando
    """
    cabecera = {"type": "header", "schema_version": SCHEMA_VERSION, "config": config or {}}
    with open(ruta_salida, "w", encoding="utf-8", newline="\n") as f:
        f.write(json.dumps(cabecera, sort_keys=True) + "\n")
        for registro in registros:
            f.write(json.dumps(registro, sort_keys=True) + "\n")


def leer_jsonl(ruta_archivo):
    """
    Lee un JSON lines escrito por escribir_jsonl().

    Returns:
        tuple: (cabecera: dict, registros: list)
    """
    cabecera = {}
    registros = []
    with open(ruta_archivo, "r", encoding="utf-8") as f:
        for linea in f:
            if not linea.strip():
                continue
            objeto = json.loads(linea)
            if objeto.get("type") == "header":
                cabecera = objeto
            else:
                registros.append(objeto)
    return cabecera, registros


def escribir_csv(ruta_salida, tabla, config=None):
    """
    Escribe un DataFrame como CSV precedido de una línea de comentario con la configuración.

    La primera línea es '# {"schema_version": 1, "config": {...}}'; se lee con
    pandas.read_csv(ruta, comment="#").

    Args:
        ruta_salida (str): Ruta completa del archivo
        tabla (pandas.DataFrame): Datos a escribir
        config (dict): Configuración resuelta del comando
    """
    meta = {"schema_version": SCHEMA_VERSION, "config": config or {}}
    with open(ruta_salida, "w", encoding="utf-8", newline="\n") as f:
        f.write("# " + json.dumps(meta, sort_keys=True) + "\n")
        tabla.to_csv(f, index=False, float_format="%.17g", lineterminator="\n")


def leer_csv(ruta_archivo):
    """Lee un CSV escrito por escribir_csv() ignorando la línea de metadatos."""
    return pd.read_csv(ruta_archivo, comment="#")
