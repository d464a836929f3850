"""
Controlador de los comandos sample e infill.
Ubicación: controllers/sampling_controller.py

Cada cadena usa su propio sub-flujo main.fork(num_samples)[k], de modo que
la cadena k es la misma con o sin prompt vacío. Salidas:
    samples.jsonl / infill.jsonl         una generación por línea
    samples_summary.json / infill_summary.json
"""

from dataclasses import replace

import numpy as np

from core.analysis.metrics import AutoregressiveEvaluator, empirical_distribution, nll_and_ppl, tv_distance
from core.base.rng import RngStream
from core.classifier.models import ExactOracle, load_model
from core.errors import ConfigError, GlauberError
from core.reverse.sampler import Prompt, ReverseDiagnostics, conditional_sample
from core.utils.file_utils import escribir_json, escribir_jsonl, validar_archivo_entrada
from controllers.base_controller import (
    EjecucionComando,
    notificar,
    preparar_con_instancia,
    resultado_config_invalida,
)

PISO_EVALUADOR = 1e-12
EVALUADOR = "condicionales exactas de P* (sustituyen al modelo de lenguaje externo)"


def resolver_modelo(config, p_star):
    """
    Devuelve (modelo, config) con T fijado: el oráculo exacto o el modelo aprendido de config.model.

    Un modelo aprendido fija T si la configuración no lo indica; un T distinto es error.

    Raises:
        ConfigError: Si falta el archivo, no coincide con la instancia o con model_kind
    """
    if config.model_kind == "oracle":
        return ExactOracle(p_star, config.schedule(), config.noise_sequence()), config

    es_valido, mensaje = validar_archivo_entrada(config.model, "archivo de modelo")
    if not es_valido:
        raise ConfigError(mensaje)
    try:
        modelo = load_model(config.model)
    except (GlauberError, OSError, ValueError) as e:
        raise ConfigError(f"Modelo ilegible ({config.model}): {e}") from e

    if modelo.kind != config.model_kind:
        raise ConfigError(f"model_kind={config.model_kind} pero el archivo contiene un modelo {modelo.kind}.")
    if (modelo.V, modelo.L) != (p_star.V, p_star.L):
        raise ConfigError(f"El modelo es para V={modelo.V}, L={modelo.L}; la instancia tiene "
                          f"V={p_star.V}, L={p_star.L}.")
    if config.T is not None and config.T != modelo.horizon:
        raise ConfigError(f"T={config.T} no coincide con el horizonte del modelo ({modelo.horizon}).")
    return modelo, replace(config, T=modelo.horizon)


def distribucion_condicional(p_star, prompt):
    """P*(· | X_J = c) como tabla, o None si el prompt tiene probabilidad cero."""
    tensor = np.array(p_star.tensor())
    for posicion, token in zip(prompt.positions, prompt.tokens):
        mascara = np.zeros(p_star.V, dtype=bool)
        mascara[token] = True
        forma = [1] * p_star.L
        forma[posicion] = p_star.V
        tensor = tensor * mascara.reshape(forma)
    if tensor.sum() <= 0:
        return None
    return p_star.with_tensor(tensor)


def _correr_cadenas(modelo, config, prompt, semillas, diagnostics, progress_callback):
    schedule = config.schedule()
    noise_seq = config.noise_sequence()
    sampler = config.sampler_config()
    total = len(semillas)
    aviso_cada = max(1, total // 100)

    muestras = []
    for k, rng in enumerate(semillas):
        muestras.append(conditional_sample(modelo, schedule, noise_seq, sampler, prompt, rng, diagnostics))
        if progress_callback and ((k + 1) % aviso_cada == 0 or k + 1 == total):
            progress_callback(k + 1, total, f"Cadena {k + 1}/{total}", int((k + 1) / total * 100))
    return muestras


def _resumen_muestras(p_star, muestras, modelo, diagnostics):
    resumen = {
        "diagnostics": diagnostics.to_dict(),
        "evaluator": EVALUADOR,
        "num_samples": len(muestras),
    }
    if isinstance(modelo, ExactOracle):
        resumen["unreachable_queries"] = modelo.unreachable_queries
    if muestras:
        nll, ppl = nll_and_ppl(muestras, AutoregressiveEvaluator(p_star, floor=PISO_EVALUADOR))
        empirica = empirical_distribution(muestras, p_star.V, p_star.L, p_star.cap)
        resumen.update({"empirical_tv": tv_distance(empirica, p_star), "nll": nll, "ppl": ppl})
    return resumen


def _registros(config, muestras):
    T = config.horizon()
    return [
        {"chain": k, "seed": config.seed, "steps": T, "tokens": [int(v) for v in x]}
        for k, x in enumerate(muestras)
    ]


def generar_muestras(config, progress_callback=None, log_gui_callback=None):
    """
    Muestreo incondicional de num_samples cadenas.

    Returns:
        dict: {
            'exitoso': bool,
            'mensaje': str,
            'ruta_muestras': str,
            'resumen': dict,
            'ruta_log': str,
            'duracion': str,
            'codigo_salida': int
        }
    """
    return _ejecutar(config, "sample", None, progress_callback, log_gui_callback)


def rellenar(config, progress_callback=None, log_gui_callback=None):
    """
    Relleno condicional: config.prompt explícito o config.infill_slice [a, b] sobre X_0 ~ P*.

    Sin prompt ni tramo el relleno equivale a sample() con la misma semilla.

    Returns:
        dict: Igual que generar_muestras(), con 'ruta_muestras' apuntando a infill.jsonl
    """
    return _ejecutar(config, "infill", config.prompt_spec, progress_callback, log_gui_callback)


def _ejecutar(config, comando, obtener_prompt, progress_callback, log_gui_callback):
    try:
        if config.prompt is not None and config.infill_slice is not None and comando == "infill":
            raise ConfigError("Indicar prompt o infill_slice, no ambos.")
        p_star, config, _ = preparar_con_instancia(config)
        modelo, config = resolver_modelo(config, p_star)
        config_resuelta = config.resolved()
        config.sampler_config()
        config.noise_sequence()
        prompt = obtener_prompt() if obtener_prompt else None
    except ConfigError as e:
        return resultado_config_invalida(e, log_gui_callback)

    nombre = "samples" if comando == "sample" else "infill"
    titulo = "MUESTREO INVERSO" if comando == "sample" else "RELLENO CONDICIONAL"
    with EjecucionComando(config.out, comando, nombre, titulo, config_resuelta) as ejecucion:
        try:
            principal = RngStream(config.seed)
            semillas = principal.fork(config.num_samples)

            if comando == "infill" and config.infill_slice is not None:
                inicio, fin = (int(v) for v in config.infill_slice)
                x0 = p_star.sample_sequences(principal.fork(1)[0], 1)[0]
                prompt = Prompt.from_slice(x0, inicio, fin)
                ejecucion.log(f"Tramo [{inicio}, {fin}) sobre X_0 = {tuple(int(v) for v in x0)}")
            if prompt is not None:
                prompt.validate_for(p_star.V, p_star.L)
                ejecucion.log(f"Prompt: {prompt.to_dict()}")

            ejecucion.log(f"Modelo: {modelo.kind}  T={config.horizon()}  cadenas={config.num_samples}")
            notificar(log_gui_callback, f"🎲 {config.num_samples} cadenas con semilla {config.seed}", "info")

            diagnostics = ReverseDiagnostics()
            muestras = _correr_cadenas(modelo, config, prompt, semillas, diagnostics, progress_callback)

            resumen = _resumen_muestras(p_star, muestras, modelo, diagnostics)
            if comando == "infill":
                resumen["prompt"] = prompt.to_dict() if prompt is not None else Prompt().to_dict()
                condicional = distribucion_condicional(p_star, prompt or Prompt())
                if condicional is not None and muestras:
                    empirica = empirical_distribution(muestras, p_star.V, p_star.L, p_star.cap)
                    resumen["conditional_tv"] = tv_distance(empirica, condicional)
                else:
                    resumen["conditional_tv"] = None

            ruta_muestras = ejecucion.ruta(f"{nombre}.jsonl")
            escribir_jsonl(ruta_muestras, _registros(config, muestras), config_resuelta)
            escribir_json(ejecucion.ruta(f"{nombre}_summary.json"), resumen, config_resuelta)

            estadisticas = {"Cadenas": len(muestras), "max |Σscore-1|": diagnostics.max_score_deviation}
            if "empirical_tv" in resumen:
                estadisticas["TV empírica"] = f"{resumen['empirical_tv']:.4g}"
                estadisticas["PPL (P* exacta)"] = f"{resumen['ppl']:.4g}"
            ejecucion.cerrar(estadisticas)
            notificar(log_gui_callback, f"✅ {len(muestras)} muestras en {ruta_muestras}", "success")
            return ejecucion.exito(f"{len(muestras)} muestras generadas", ruta_muestras=ruta_muestras,
                                   resumen=resumen)
        except Exception as e:
            return ejecucion.fallo(e, log_gui_callback, ruta_muestras='', resumen={})
