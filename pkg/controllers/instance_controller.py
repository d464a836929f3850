"""
Controlador del comando gen-instance.
Ubicación: controllers/instance_controller.py

Genera una distribución objetivo P* (preset con nombre o aleatoria con
semilla) y la escribe en <out>/instance.json.
"""

from core.base.presets import build_preset
from core.errors import ConfigError
from core.utils.file_utils import escribir_json
from controllers.base_controller import EjecucionComando, notificar, resultado_config_invalida

NOMBRE_INSTANCIA = "instance.json"
V_POR_DEFECTO = 2
L_POR_DEFECTO = 2


def generar_instancia(config, progress_callback=None, log_gui_callback=None):
    """
    Genera y persiste P*.

    Args:
        config (ExperimentConfig): Configuración del experimento
        progress_callback (callable): progress_callback(current, total, message, percentage)
        log_gui_callback (callable): log_gui_callback(mensaje, tipo)

    Returns:
        dict: {
            'exitoso': bool,
            'mensaje': str,
            'ruta_instancia': str,
            'estados_soporte': int,
            'ruta_log': str,
            'duracion': str,
            'codigo_salida': int
        }
    """
    try:
        config = config.for_instance(config.V or V_POR_DEFECTO, config.L or L_POR_DEFECTO)
        config_resuelta = config.resolved()
    except ConfigError as e:
        return resultado_config_invalida(e, log_gui_callback)

    with EjecucionComando(config.out, "gen-instance", "instancia", "GENERACIÓN DE INSTANCIA P*",
                          config_resuelta) as ejecucion:
        try:
            notificar(log_gui_callback, f"🎲 Preset: {config.preset} (V={config.V}, L={config.L})", "info")
            if progress_callback:
                progress_callback(0, 1, "Construyendo la tabla", 0)

            p_star = build_preset(config.preset, config.V, config.L, seed=config.seed, point=config.point,
                                  beta=config.beta, alpha=config.dirichlet_alpha, cap=config.cap)
            soporte = int(p_star.support().size)

            ruta_instancia = ejecucion.ruta(NOMBRE_INSTANCIA)
            escribir_json(ruta_instancia, {"instance": p_star.to_dict(), "preset": config.preset},
                          config_resuelta)
            if progress_callback:
                progress_callback(1, 1, "Instancia escrita", 100)

            ejecucion.log(f"Instancia escrita en: {ruta_instancia}")
            ejecucion.cerrar({"Estados": p_star.num_states, "Estados con masa": soporte})
            notificar(log_gui_callback, f"✅ Instancia generada: {ruta_instancia}", "success")
            return ejecucion.exito(
                f"Instancia {config.preset} generada ({soporte}/{p_star.num_states} estados con masa)",
                ruta_instancia=ruta_instancia,
                estados_soporte=soporte,
            )
        except Exception as e:
            return ejecucion.fallo(e, log_gui_callback, ruta_instancia='', estados_soporte=0)
