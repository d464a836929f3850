"""
Controlador de los comandos certify y compare.
Ubicación: controllers/certification_controller.py

certify propaga exactamente el proceso forward y la dinámica inversa sobre
la instancia y contrasta cada TV con su cota. compare emite las curvas TV
vs barridos de GGM y Gibbs. Un chequeo incumplido termina con código 3.
"""

import pandas as pd

from core.analysis.curves import COLUMNAS, convergence_curve, curves_to_dataframe
from core.analysis.metrics import tv_distance
from core.base.joint import JointDistribution
from core.base.presets import build_preset
from core.classifier.models import ExactOracle
from core.errors import CertificationError, ConfigError, GlauberError
from core.forward.exact import forward_propagate_exact, forward_tv_curve, lemma1_bound
from core.reverse.exact import reverse_propagate_exact, theorem1_min_steps
from core.reverse.sampler import ReverseDiagnostics
from core.utils.file_utils import escribir_csv, escribir_json
from controllers.base_controller import (
    EjecucionComando,
    notificar,
    preparar_con_instancia,
    resultado_config_invalida,
)
from controllers.sampling_controller import resolver_modelo

TOLERANCIA_EXACTA = 1e-9
TOLERANCIA_COTA = 1e-12


def _chequeo(nombre, valor, limite, tolerancia=TOLERANCIA_COTA):
    return {"name": nombre, "value": valor, "limit": limite, "passed": bool(valor <= limite + tolerancia)}


def _tabla_forward(curva_forward, L):
    filas = [["forward", t // L, t, tv, cota] for t, tv, cota in curva_forward]
    return pd.DataFrame(filas, columns=COLUMNAS)


def certificar(config, progress_callback=None, log_gui_callback=None):
    """
    Certifica las cotas de convergencia sobre la instancia por propagación exacta.

    Chequeos:
        forward_lemma1:   TV(P_t, Π^⊗L) ≤ min(1, L·Π(φ)^⌊t/L⌋) en cada barrido completo
        reverse_from_P_T: TV(P̂_0, P*) ≤ 1e-9 partiendo de P_T exacta (sólo oráculo)
        theorem1_delta:   TV(P̂_0, P*) ≤ δ partiendo de Π^⊗L
        theorem1_bound:   la misma TV bajo min(1, L·Π(φ)^⌊T/L⌋) (sólo oráculo)
        ggm_envelope:     la curva GGM por barrido dentro de su cota (sólo oráculo)

    Returns:
        dict: {
            'exitoso': bool,
            'mensaje': str,
            'checks': list,
            'tv': float,
            'ruta_log': str,
            'duracion': str,
            'codigo_salida': int
        }
    """
    try:
        p_star, config, _ = preparar_con_instancia(config)
        modelo, config = resolver_modelo(config, p_star)
        config_resuelta = config.resolved()
        sampler = config.sampler_config()
        schedule = config.schedule()
        noise_seq = config.noise_sequence()
    except ConfigError as e:
        return resultado_config_invalida(e, log_gui_callback)

    with EjecucionComando(config.out, "certify", "certificacion", "CERTIFICACIÓN DE COTAS",
                          config_resuelta) as ejecucion:
        try:
            V, L, T = p_star.V, p_star.L, schedule.horizon
            p = 1.0 - config.stay_prob
            es_oraculo = isinstance(modelo, ExactOracle)
            presupuesto = theorem1_min_steps(L, p, config.delta)
            ejecucion.log(f"V={V}  L={L}  T={T}  Π(φ)={config.stay_prob}  δ={config.delta}  "
                          f"presupuesto={presupuesto}")
            total_fases = 4 if es_oraculo else 2
            checks = []

            def avanzar(fase, mensaje):
                if progress_callback:
                    progress_callback(fase, total_fases, mensaje, int(fase / total_fases * 100))

            ejecucion.seccion("PROCESO FORWARD")
            curva_forward = forward_tv_curve(p_star, schedule, noise_seq)
            for t, tv, cota in curva_forward:
                checks.append(_chequeo(f"forward_lemma1[t={t}]", tv, cota))
                ejecucion.log(f"t={t:>5}  TV(P_t, Π^⊗L)={tv:.6e}  cota={cota:.6e}")
            avanzar(1, "Forward exacto")

            inicial = JointDistribution.product(noise_seq.terminal().token_probs, L, p_star.cap)
            diagnostics = ReverseDiagnostics()

            if es_oraculo:
                ejecucion.seccion("INVERSA DESDE P_T EXACTA")
                P_T = forward_propagate_exact(p_star, T, schedule, noise_seq)
                tv_exacta = tv_distance(reverse_propagate_exact(modelo, schedule, noise_seq, P_T, sampler), p_star)
                checks.append(_chequeo("reverse_from_P_T", tv_exacta, TOLERANCIA_EXACTA, 0.0))
                ejecucion.log(f"TV(P̂_0, P*) = {tv_exacta:.3e}")
                avanzar(2, "Inversa desde P_T")

            ejecucion.seccion("INVERSA DESDE Π^⊗L")
            salida = reverse_propagate_exact(modelo, schedule, noise_seq, inicial, sampler, diagnostics)
            tv = tv_distance(salida, p_star)
            cota_T = lemma1_bound(L, p, T)
            checks.append(_chequeo("theorem1_delta", tv, config.delta))
            if es_oraculo:
                checks.append(_chequeo("theorem1_bound", tv, cota_T))
            ejecucion.log(f"TV(P̂_0, P*) = {tv:.6e}  δ={config.delta}  cota={cota_T:.6e}")
            avanzar(total_fases - 1 if es_oraculo else 2, "Inversa desde Π^⊗L")

            tablas = [_tabla_forward(curva_forward, L)]
            if es_oraculo:
                ejecucion.seccion("ENVOLVENTE GGM POR BARRIDO")
                curva = convergence_curve("ggm", p_star, range(0, T // L + 1), config.noise(),
                                          config.permutation)
                for punto in curva.points:
                    checks.append(_chequeo(f"ggm_envelope[K={punto.K}]", punto.tv, punto.bound))
                    ejecucion.log(f"K={punto.K:>3}  TV={punto.tv:.6e}  cota={punto.bound:.6e}")
                tablas.append(curva.to_dataframe())
                avanzar(total_fases, "Envolvente GGM")

            aprobado = all(c["passed"] for c in checks)
            fallidos = [c["name"] for c in checks if not c["passed"]]
            escribir_csv(ejecucion.ruta("certify_curve.csv"), pd.concat(tablas, ignore_index=True),
                         config_resuelta)
            escribir_json(ejecucion.ruta("certify.json"), {
                "checks": checks,
                "diagnostics": diagnostics.to_dict(),
                "lemma1_bound": cota_T,
                "model_kind": modelo.kind,
                "passed": aprobado,
                "theorem1_budget": presupuesto,
                "tv": tv,
            }, config_resuelta)

            ejecucion.cerrar({
                "TV(P̂_0, P*)": f"{tv:.6e}",
                "Presupuesto T": presupuesto,
                "Chequeos": f"{len(checks) - len(fallidos)}/{len(checks)}",
                "Resultado": "APROBADO" if aprobado else "RECHAZADO",
            })
            if not aprobado:
                raise CertificationError(f"Chequeos incumplidos: {', '.join(fallidos)}")

            notificar(log_gui_callback, f"✅ Certificado: TV = {tv:.3e} ≤ δ = {config.delta}", "success")
            return ejecucion.exito(f"Certificación aprobada (TV = {tv:.3e})", checks=checks, tv=tv)
        except Exception as e:
            return ejecucion.fallo(e, log_gui_callback, checks=[], tv=None)


def _instancia_para_comparar(config):
    if config.instance:
        p_star, config, _ = preparar_con_instancia(config)
        return p_star, config
    config = config.for_instance(config.V or 2, config.L or 2)
    try:
        p_star = build_preset(config.preset, config.V, config.L, seed=config.seed, point=config.point,
                              beta=config.beta, alpha=config.dirichlet_alpha, cap=config.cap)
    except GlauberError as e:
        raise ConfigError(f"Preset inválido: {e}") from e
    return p_star, config


def comparar(config, progress_callback=None, log_gui_callback=None):
    """
    Curvas TV vs K de GGM (oráculo exacto, T = K·L) y Gibbs (condicionales exactas).

    Usa config.instance si está indicado; si no, construye el preset en memoria.
    El único chequeo que decide el código de salida es la envolvente de GGM.

    Returns:
        dict: {
            'exitoso': bool,
            'mensaje': str,
            'ruta_curvas': str,
            'resumen': dict,
            'ruta_log': str,
            'duracion': str,
            'codigo_salida': int
        }
    """
    try:
        p_star, config = _instancia_para_comparar(config)
        config_resuelta = config.resolved()
        noise = config.noise_sequence().terminal()
    except ConfigError as e:
        return resultado_config_invalida(e, log_gui_callback)

    with EjecucionComando(config.out, "compare", "comparacion", "COMPARACIÓN GGM vs GIBBS",
                          config_resuelta) as ejecucion:
        try:
            L = p_star.L
            barridos = sorted(set(int(k) for k in config.sweeps))
            descriptor = {"V": p_star.V, "L": L, "preset": None if config.instance else config.preset}
            ejecucion.log(f"Barridos: {barridos}")

            curvas = []
            for fase, metodo in enumerate(("ggm", "gibbs"), start=1):
                curvas.append(convergence_curve(metodo, p_star, barridos, noise, config.permutation, descriptor))
                if progress_callback:
                    progress_callback(fase, 2, f"Curva {metodo}", fase * 50)
            ggm, gibbs = curvas

            ejecucion.seccion("CURVAS")
            for a, b in zip(ggm.points, gibbs.points):
                ejecucion.log(f"K={a.K:>3}  GGM={a.tv:.6e} (cota {a.bound:.3e})  Gibbs={b.tv:.6e}")

            presupuesto = theorem1_min_steps(L, noise.flip_prob, config.delta)
            K_delta = ggm.first_below(config.delta)
            resumen = {
                "first_K_below_delta": K_delta,
                "ggm_envelope_ok": ggm.within_envelope(),
                "ggm_fallback_queries": ggm.fallback_queries,
                "ggm_non_increasing": ggm.is_non_increasing(),
                "gibbs_fallbacks": gibbs.fallback_queries,
                "gibbs_tv_at_first_K": gibbs.tv_at(K_delta) if K_delta is not None else None,
                "theorem1_budget_steps": presupuesto,
                "theorem1_budget_sweeps": -(-presupuesto // L),
            }
            if gibbs.fallback_queries:
                notificar(log_gui_callback, f"⚠️ Gibbs usó Π(·|X) en {gibbs.fallback_queries} contextos sin masa",
                          "warning")

            ruta_curvas = ejecucion.ruta("compare_curves.csv")
            escribir_csv(ruta_curvas, curves_to_dataframe(curvas), config_resuelta)
            escribir_json(ejecucion.ruta("compare.json"), resumen, config_resuelta)

            ejecucion.cerrar({
                "Envolvente GGM": "OK" if resumen["ggm_envelope_ok"] else "VIOLADA",
                "Primer K con TV ≤ δ": K_delta,
                "TV Gibbs en ese K": resumen["gibbs_tv_at_first_K"],
            })
            if not resumen["ggm_envelope_ok"]:
                raise CertificationError("La curva GGM sale de su envolvente min(1, L·Π(φ)^K).")

            notificar(log_gui_callback, f"✅ Curvas escritas en {ruta_curvas}", "success")
            return ejecucion.exito("Curvas GGM y Gibbs generadas", ruta_curvas=ruta_curvas, resumen=resumen)
        except Exception as e:
            return ejecucion.fallo(e, log_gui_callback, ruta_curvas='', resumen={})
