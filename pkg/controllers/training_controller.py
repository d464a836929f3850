"""
Controlador del comando train.
Ubicación: controllers/training_controller.py

Entrena un TabularModel o LogisticModel sobre la instancia P* con la
reducción a clasificación binaria y persiste:
    model.json           modelo entrenado
    training_log.csv     iteration, loss, loss_ma
    train_summary.json   error máximo contra el oráculo exacto
"""

import pandas as pd

from core.base.rng import RngStream
from core.classifier.models import ExactOracle, build_model, save_model
from core.classifier.training import max_oracle_error, train
from core.errors import ConfigError
from core.utils.file_utils import escribir_csv, escribir_json
from controllers.base_controller import (
    EjecucionComando,
    notificar,
    preparar_con_instancia,
    resultado_config_invalida,
)

NOMBRE_MODELO = "model.json"
NOMBRE_LOG_ENTRENAMIENTO = "training_log.csv"
NOMBRE_RESUMEN = "train_summary.json"
VENTANA_MEDIA_MOVIL = 100
FILAS_LOG_MAXIMAS = 1000


def tabla_perdidas(perdidas):
    """
    Tabla iteration / loss / loss_ma submuestreada a lo sumo ~1000 filas (la última siempre).

    Args:
        perdidas (list): Pérdida media de cada iteración, en orden

    Returns:
        pandas.DataFrame
    """
    tabla = pd.DataFrame({
        "iteration": range(1, len(perdidas) + 1),
        "loss": pd.Series(perdidas, dtype=float),
    })
    tabla["loss_ma"] = tabla["loss"].rolling(VENTANA_MEDIA_MOVIL, min_periods=1).mean()
    if tabla.empty:
        return tabla
    paso = max(1, len(tabla) // FILAS_LOG_MAXIMAS)
    mascara = (tabla["iteration"] % paso == 0)
    mascara.iloc[-1] = True
    return tabla[mascara].reset_index(drop=True)


def entrenar_modelo(config, progress_callback=None, log_gui_callback=None):
    """
    Entrena y persiste un denoiser aprendido.

    Args:
        config (ExperimentConfig): Necesita instance y model_kind ∈ {tabular, logistic}
        progress_callback (callable): progress_callback(current, total, message, percentage)
        log_gui_callback (callable): log_gui_callback(mensaje, tipo)

    Returns:
        dict: {
            'exitoso': bool,
            'mensaje': str,
            'ruta_modelo': str,
            'max_oracle_error': float,
            'ruta_log': str,
            'duracion': str,
            'codigo_salida': int
        }
    """
    try:
        if config.model_kind == "oracle":
            raise ConfigError("El oráculo exacto no se entrena: usar model_kind tabular o logistic.")
        p_star, config, config_resuelta = preparar_con_instancia(config)
        if config.horizon() < 2:
            raise ConfigError(f"El entrenamiento necesita T ≥ 2 (T={config.horizon()}).")
        schedule = config.schedule()
        noise_seq = config.noise_sequence()
    except ConfigError as e:
        return resultado_config_invalida(e, log_gui_callback)

    with EjecucionComando(config.out, "train", "entrenamiento", "ENTRENAMIENTO DEL DENOISER",
                          config_resuelta) as ejecucion:
        try:
            T = schedule.horizon
            ejecucion.log(f"Modelo: {config.model_kind}  V={p_star.V}  L={p_star.L}  T={T}")
            ejecucion.log(f"Iteraciones: {config.iterations}  B={config.batch_size}  "
                          f"K={config.timesteps_per_example}")
            notificar(log_gui_callback, f"🎲 Entrenando {config.model_kind} ({config.iterations} iteraciones)",
                      "info")

            modelo = build_model(config.model_kind, p_star.V, p_star.L, T, config.learning_rate)
            perdidas = []
            train(modelo, p_star, schedule, noise_seq, config.iterations, RngStream(config.seed),
                  batch_size=config.batch_size, timesteps_per_example=config.timesteps_per_example,
                  loss_callback=lambda _, perdida: perdidas.append(perdida),
                  progress_callback=progress_callback)

            ejecucion.seccion("COMPARACIÓN CONTRA EL ORÁCULO EXACTO")
            error_maximo = max_oracle_error(modelo, ExactOracle(p_star, schedule, noise_seq))
            ejecucion.log(f"max |ŷ - oráculo| = {error_maximo:.6g}")

            ruta_modelo = ejecucion.ruta(NOMBRE_MODELO)
            save_model(modelo, ruta_modelo, config_resuelta)
            tabla = tabla_perdidas(perdidas)
            escribir_csv(ejecucion.ruta(NOMBRE_LOG_ENTRENAMIENTO), tabla, config_resuelta)

            perdida_final = float(tabla["loss_ma"].iloc[-1]) if not tabla.empty else None
            escribir_json(ejecucion.ruta(NOMBRE_RESUMEN), {
                "final_loss_ma": perdida_final,
                "iterations": config.iterations,
                "max_oracle_error": error_maximo,
                "model_kind": config.model_kind,
            }, config_resuelta)

            ejecucion.cerrar({
                "Iteraciones": config.iterations,
                "Pérdida final (media móvil)": perdida_final,
                "max |ŷ - oráculo|": f"{error_maximo:.6g}",
            })
            notificar(log_gui_callback, f"✅ Modelo guardado en {ruta_modelo}", "success")
            return ejecucion.exito(
                f"Modelo {config.model_kind} entrenado; max |ŷ - oráculo| = {error_maximo:.4g}",
                ruta_modelo=ruta_modelo,
                max_oracle_error=error_maximo,
            )
        except Exception as e:
            return ejecucion.fallo(e, log_gui_callback, ruta_modelo='', max_oracle_error=None)
