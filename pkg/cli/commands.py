"""
Línea de comandos: subcomandos gen-instance, train, sample, infill, certify y compare.
Ubicación: cli/commands.py

Cada subcomando arma un ExperimentConfig (archivo --config + flags) y llama
a su controlador con callbacks de consola. El código de salida es el
'codigo_salida' del resultado: 0 éxito, 2 configuración, 3 certificación.
"""

import argparse
import json

from cli.config import MODEL_KINDS, load_config
from cli.console import ConsoleLog, ConsoleProgress
from controllers import certificar, comparar, entrenar_modelo, generar_instancia, generar_muestras, rellenar
from controllers.base_controller import CODIGO_CONFIGURACION
from core.base.presets import PRESETS
from core.errors import ConfigError

COMANDOS = {
    "gen-instance": (generar_instancia, "Generando instancia"),
    "train": (entrenar_modelo, "Entrenando"),
    "sample": (generar_muestras, "Muestreando"),
    "infill": (rellenar, "Rellenando"),
    "certify": (certificar, "Certificando"),
    "compare": (comparar, "Comparando"),
}


def _json(texto):
    try:
        return json.loads(texto)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"JSON inválido: {e}")


def _lista_enteros(texto):
    try:
        return [int(v) for v in texto.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"Lista de enteros inválida: {texto!r}")


def build_parser():
    """Parser con las flags comunes en cada subcomando; default None = no indicado."""
    comunes = argparse.ArgumentParser(add_help=False)
    comunes.add_argument("--config", default=None, help="JSON con claves de ExperimentConfig")
    comunes.add_argument("--seed", type=int, default=None)
    comunes.add_argument("--out", default=None, help="Carpeta de salida")
    comunes.add_argument("--steps", dest="T", type=int, default=None, help="Horizonte T")
    comunes.add_argument("--top-p", dest="top_p", type=float, default=None)
    comunes.add_argument("--temperature", type=float, default=None)
    comunes.add_argument("--temperature-fraction", dest="temperature_fraction", type=float, default=None)
    comunes.add_argument("--sweeps", type=int, default=None, help="Barridos K = 1..N")
    comunes.add_argument("--model-kind", dest="model_kind", choices=MODEL_KINDS, default=None)
    comunes.add_argument("--instance", default=None, help="Archivo instance.json")
    comunes.add_argument("--model", default=None, help="Archivo model.json")
    comunes.add_argument("--preset", choices=PRESETS, default=None)
    comunes.add_argument("-V", dest="V", type=int, default=None, help="Tamaño del alfabeto")
    comunes.add_argument("-L", dest="L", type=int, default=None, help="Longitud de secuencia")
    comunes.add_argument("--point", type=_lista_enteros, default=None, help="Secuencia x* del preset point-mass")
    comunes.add_argument("--stay-prob", dest="stay_prob", type=float, default=None, help="Π(φ)")
    comunes.add_argument("--token-dist", dest="token_dist", default=None, help="uniform o JSON de conteos")
    comunes.add_argument("--delta", type=float, default=None)
    comunes.add_argument("--iterations", type=int, default=None)
    comunes.add_argument("--batch-size", dest="batch_size", type=int, default=None)
    comunes.add_argument("--timesteps-per-example", dest="timesteps_per_example", type=int, default=None)
    comunes.add_argument("--learning-rate", dest="learning_rate", type=float, default=None)
    comunes.add_argument("--num-samples", dest="num_samples", type=int, default=None)
    comunes.add_argument("--prompt", type=_json, default=None, help='{"positions": [...], "tokens": [...]}')
    comunes.add_argument("--infill-slice", dest="infill_slice", type=_lista_enteros, default=None,
                         help="Tramo a,b a rellenar sobre X_0 ~ P*")
    comunes.add_argument("--quiet", action="store_true", help="Sin barra de progreso ni mensajes")

    parser = argparse.ArgumentParser(prog="glauber", description="Modelo generativo de Glauber a escala de escritorio")
    sub = parser.add_subparsers(dest="comando", required=True)
    for nombre in COMANDOS:
        sub.add_parser(nombre, parents=[comunes])
    return parser


def overrides_desde_args(args):
    """Valores de flags para load_config(); --sweeps N se expande a [1..N]."""
    valores = {k: v for k, v in vars(args).items() if k not in ("comando", "config", "quiet", "sweeps")}
    if args.sweeps is not None:
        if args.sweeps < 1:
            raise ConfigError(f"--sweeps={args.sweeps} debe ser ≥ 1.")
        valores["sweeps"] = list(range(1, args.sweeps + 1))
    return valores


def run(argv=None):
    """
    Ejecuta un subcomando y devuelve su código de salida.

    Args:
        argv (list): Argumentos sin el nombre del programa (None = sys.argv)

    Returns:
        int: 0 éxito, 2 error de configuración o entrada, 3 certificación fallida
    """
    args = build_parser().parse_args(argv)
    log = ConsoleLog(silencioso=args.quiet)
    try:
        config = load_config(args.config, overrides_desde_args(args))
    except ConfigError as e:
        log(f"❌ {e}", "error")
        return CODIGO_CONFIGURACION

    controlador, descripcion = COMANDOS[args.comando]
    progreso = ConsoleProgress(descripcion, habilitada=not args.quiet)
    try:
        resultado = controlador(config, progress_callback=progreso, log_gui_callback=log)
    finally:
        progreso.close()

    tipo = "success" if resultado['exitoso'] else "error"
    log(f"{resultado['mensaje']} ({resultado['duracion']})", tipo)
    if resultado.get('ruta_log'):
        log(f"📁 Log: {resultado['ruta_log']}", "info")
    return resultado['codigo_salida']
