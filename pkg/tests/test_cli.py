"""
Pruebas de la configuración y de los subcomandos de punta a punta.
"""

import json
import os

import pytest

from cli.commands import build_parser, overrides_desde_args, run
from cli.config import ExperimentConfig, load_config
from cli.console import ConsoleLog
from controllers.training_controller import tabla_perdidas
from core.errors import ConfigError
from core.utils.file_utils import leer_csv, leer_json, leer_jsonl


def leer_bytes(ruta):
    with open(ruta, "rb") as f:
        return f.read()


def instancia(tmp_path, *extra):
    carpeta = str(tmp_path / "inst")
    assert run(["gen-instance", "--quiet", "--out", carpeta, *extra]) == 0
    return os.path.join(carpeta, "instance.json")


# ----------------------------------------------------------------------
# Configuración
# ----------------------------------------------------------------------
def test_flags_override_config_file(tmp_path):
    ruta = tmp_path / "config.json"
    ruta.write_text(json.dumps({"seed": 3, "T": 8, "top_p": 0.9}), encoding="utf-8")
    config = load_config(str(ruta), {"seed": 5, "T": None})
    assert (config.seed, config.T, config.top_p) == (5, 8, 0.9)


def test_unknown_keys_are_config_errors(tmp_path):
    ruta = tmp_path / "config.json"
    ruta.write_text(json.dumps({"seeds": 3}), encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(str(ruta))
    with pytest.raises(ConfigError):
        load_config(None, {"bogus": 1})
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "no_existe.json"))


@pytest.mark.parametrize("kwargs", [{"stay_prob": 1.0}, {"stay_prob": 0.0}, {"model_kind": "transformer"},
                                    {"T": 0}, {"sweeps": []}, {"infill_slice": [1]}])
def test_invalid_values_are_config_errors(kwargs):
    with pytest.raises(ConfigError):
        ExperimentConfig(**kwargs)


def test_default_horizon_follows_step_budget():
    config = ExperimentConfig(V=2, L=2)
    assert config.horizon() == 11
    assert config.resolved()["T"] == 11
    with pytest.raises(ConfigError):
        ExperimentConfig(V=2).horizon()
    with pytest.raises(ConfigError):
        ExperimentConfig(V=2, L=2).for_instance(3, 2)


@pytest.mark.parametrize("conteos", [[0, 5], [1, 1e7]])
def test_unigram_noise_without_exact_inversion_is_rejected(tmp_path, conteos):
    ruta = tmp_path / "counts.json"
    ruta.write_text(json.dumps({"counts": conteos}), encoding="utf-8")
    config = ExperimentConfig(V=2, L=2, token_dist=str(ruta))
    assert config.noise().token_probs[0] < 1e-6
    with pytest.raises(ConfigError):
        config.noise_sequence()

    inst = instancia(tmp_path)
    for comando in ("sample", "certify"):
        assert run([comando, "--quiet", "--instance", inst, "--token-dist", str(ruta),
                    "--out", str(tmp_path / comando)]) == 2
    assert run(["compare", "--quiet", "--token-dist", str(ruta), "--out", str(tmp_path / "cmp")]) == 2


def test_sweeps_flag_expands_to_range():
    args = build_parser().parse_args(["compare", "--sweeps", "3", "--seed", "4"])
    valores = overrides_desde_args(args)
    assert valores["sweeps"] == [1, 2, 3]
    assert valores["seed"] == 4
    assert "quiet" not in valores


def test_loss_table_keeps_last_row():
    tabla = tabla_perdidas([1.0] * 2500)
    assert len(tabla) <= 1001
    assert tabla["iteration"].iloc[-1] == 2500
    assert tabla_perdidas([]).empty


def test_console_log_collects_messages():
    log = ConsoleLog(silencioso=True)
    log("uno", "info")
    log("dos", "error")
    assert log.text() == "uno\ndos"


# ----------------------------------------------------------------------
# Subcomandos
# ----------------------------------------------------------------------
def test_gen_instance_is_byte_identical(tmp_path):
    ruta = instancia(tmp_path, "--preset", "random", "-V", "2", "-L", "3", "--seed", "4")
    primero = leer_bytes(ruta)
    instancia(tmp_path, "--preset", "random", "-V", "2", "-L", "3", "--seed", "4")
    assert leer_bytes(ruta) == primero
    datos = leer_json(ruta)
    assert datos["preset"] == "random"
    assert (datos["instance"]["V"], datos["instance"]["L"]) == (2, 3)


def test_train_without_iterations_persists_model(tmp_path):
    ruta = instancia(tmp_path)
    out = str(tmp_path / "train")
    assert run(["train", "--quiet", "--instance", ruta, "--model-kind", "tabular", "--iterations", "0",
                "--out", out]) == 0
    modelo = os.path.join(out, "model.json")
    assert leer_json(modelo)["model"]["kind"] == "tabular"
    assert leer_json(os.path.join(out, "train_summary.json"))["iterations"] == 0

    muestras = str(tmp_path / "sample")
    assert run(["sample", "--quiet", "--instance", ruta, "--model-kind", "tabular", "--model", modelo,
                "--num-samples", "5", "--out", muestras]) == 0
    _, registros = leer_jsonl(os.path.join(muestras, "samples.jsonl"))
    assert len(registros) == 5


def test_train_writes_loss_log(tmp_path):
    ruta = instancia(tmp_path)
    out = str(tmp_path / "train")
    assert run(["train", "--quiet", "--instance", ruta, "--model-kind", "logistic", "--iterations", "50",
                "--out", out]) == 0
    tabla = leer_csv(os.path.join(out, "training_log.csv"))
    assert list(tabla.columns) == ["iteration", "loss", "loss_ma"]
    assert len(tabla) == 50


def test_train_rejects_oracle(tmp_path):
    ruta = instancia(tmp_path)
    assert run(["train", "--quiet", "--instance", ruta, "--out", str(tmp_path / "t")]) == 2


def test_sample_is_reproducible(tmp_path):
    ruta = instancia(tmp_path)
    out = str(tmp_path / "sample")
    argumentos = ["sample", "--quiet", "--instance", ruta, "--num-samples", "20", "--seed", "9", "--out", out]
    assert run(argumentos) == 0
    muestras = leer_bytes(os.path.join(out, "samples.jsonl"))
    resumen = leer_json(os.path.join(out, "samples_summary.json"))
    assert resumen["num_samples"] == 20
    assert resumen["unreachable_queries"] == 0
    assert run(argumentos) == 0
    assert leer_bytes(os.path.join(out, "samples.jsonl")) == muestras


def test_empty_infill_matches_sample(tmp_path):
    ruta = instancia(tmp_path, "-L", "3")
    comunes = ["--quiet", "--instance", ruta, "--num-samples", "15", "--seed", "2"]
    assert run(["sample", *comunes, "--out", str(tmp_path / "s")]) == 0
    assert run(["infill", *comunes, "--out", str(tmp_path / "i")]) == 0
    _, muestras = leer_jsonl(str(tmp_path / "s" / "samples.jsonl"))
    _, rellenos = leer_jsonl(str(tmp_path / "i" / "infill.jsonl"))
    assert muestras == rellenos


def test_full_prompt_infill_returns_prompt(tmp_path):
    ruta = instancia(tmp_path)
    out = str(tmp_path / "i")
    prompt = json.dumps({"positions": [0, 1], "tokens": [1, 0]})
    assert run(["infill", "--quiet", "--instance", ruta, "--num-samples", "10", "--prompt", prompt,
                "--out", out]) == 0
    _, registros = leer_jsonl(os.path.join(out, "infill.jsonl"))
    assert all(r["tokens"] == [1, 0] for r in registros)
    resumen = leer_json(os.path.join(out, "infill_summary.json"))
    assert resumen["prompt"] == {"positions": [0, 1], "tokens": [1, 0]}
    assert resumen["conditional_tv"] == 0.0


def test_infill_slice_keeps_outside_positions(tmp_path):
    ruta = instancia(tmp_path, "-L", "4")
    out = str(tmp_path / "i")
    assert run(["infill", "--quiet", "--instance", ruta, "--num-samples", "10", "--infill-slice", "1,3",
                "--out", out]) == 0
    resumen = leer_json(os.path.join(out, "infill_summary.json"))
    assert resumen["prompt"]["positions"] == [0, 3]
    _, registros = leer_jsonl(os.path.join(out, "infill.jsonl"))
    fijos = resumen["prompt"]["tokens"]
    assert all([r["tokens"][0], r["tokens"][3]] == fijos for r in registros)


def test_prompt_and_slice_together_are_rejected(tmp_path):
    ruta = instancia(tmp_path)
    assert run(["infill", "--quiet", "--instance", ruta, "--prompt", '{"positions": [0], "tokens": [1]}',
                "--infill-slice", "0,1", "--out", str(tmp_path / "i")]) == 2


def test_certify_passes_on_desk_instance(tmp_path):
    ruta = instancia(tmp_path, "--seed", "1")
    out = str(tmp_path / "cert")
    assert run(["certify", "--quiet", "--instance", ruta, "--out", out]) == 0
    reporte = leer_json(os.path.join(out, "certify.json"))
    assert reporte["passed"]
    assert reporte["tv"] <= 0.05
    nombres = [c["name"] for c in reporte["checks"]]
    assert "reverse_from_P_T" in nombres and "theorem1_delta" in nombres
    curva = leer_csv(os.path.join(out, "certify_curve.csv"))
    assert set(curva["method"]) == {"forward", "ggm"}


def test_certify_fails_with_too_few_steps(tmp_path):
    ruta = instancia(tmp_path, "--preset", "point-mass", "--point", "1,1")
    out = str(tmp_path / "cert")
    assert run(["certify", "--quiet", "--instance", ruta, "--steps", "1", "--out", out]) == 3
    assert not leer_json(os.path.join(out, "certify.json"))["passed"]


def test_compare_on_anti_correlated_preset(tmp_path):
    out = str(tmp_path / "cmp")
    assert run(["compare", "--quiet", "--preset", "anti-correlated", "--sweeps", "8", "--out", out]) == 0
    resumen = leer_json(os.path.join(out, "compare.json"))
    assert resumen["ggm_envelope_ok"]
    assert resumen["first_K_below_delta"] is not None
    assert resumen["theorem1_budget_steps"] == 11
    curvas = leer_csv(os.path.join(out, "compare_curves.csv"))
    assert len(curvas) == 16


def test_bad_configuration_exits_with_two(tmp_path):
    assert run(["sample", "--quiet", "--config", str(tmp_path / "no_existe.json")]) == 2
    assert run(["sample", "--quiet", "--stay-prob", "1.5", "--out", str(tmp_path / "s")]) == 2
    assert run(["sample", "--quiet", "--out", str(tmp_path / "s")]) == 2
    with pytest.raises(SystemExit) as salida:
        run(["sample", "--top-p", "mucho"])
    assert salida.value.code == 2


def test_train_is_reproducible(tmp_path):
    ruta = instancia(tmp_path)
    out = str(tmp_path / "train")
    argumentos = ["train", "--quiet", "--instance", ruta, "--model-kind", "tabular", "--iterations", "200",
                  "--batch-size", "4", "--seed", "3", "--out", out]
    assert run(argumentos) == 0
    modelo = leer_bytes(os.path.join(out, "model.json"))
    registro = leer_bytes(os.path.join(out, "training_log.csv"))
    assert run(argumentos) == 0
    assert leer_bytes(os.path.join(out, "model.json")) == modelo
    assert leer_bytes(os.path.join(out, "training_log.csv")) == registro
