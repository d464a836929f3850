"""
Pruebas de la reducción a clasificación: posteriores, inversión, modelos y entrenamiento.
"""

import itertools
import math

import numpy as np
import pytest

from conftest import instancias_sembradas, proceso
from core.base.alphabet import PHI, MaskedSequence
from core.base.joint import JointDistribution
from core.base.noise import NoiseDistribution, NoiseSequence, build_unigram_noise
from core.base.presets import build_preset, random_instance
from core.base.rng import RngStream
from core.base.schedule import ScanSchedule
from core.classifier.models import (
    DenoiserOutput,
    ExactOracle,
    LogisticModel,
    TabularModel,
    build_model,
    load_model,
    model_from_dict,
    save_model,
)
from core.classifier.posterior import (
    CLAMP_EPS,
    TrainBatch,
    bce_loss,
    bce_loss_array,
    check_invertible_noise,
    invert_posterior,
    make_train_batch,
    make_train_example,
    noise_posterior_from_posterior,
    oracle_noise_posterior,
)
from core.classifier.training import max_oracle_error, train
from core.errors import (
    DomainError,
    InvalidInputError,
    NumericGuardError,
    UndefinedConditionalError,
    UnsupportedConfigurationError,
)
from core.forward.exact import forward_propagate_exact
from core.forward.process import ForwardTriple, forward_sample_direct_batch
from core.reverse.exact import reverse_propagate_exact
from core.reverse.sampler import SamplerConfig, sample_batch
from core.analysis.metrics import empirical_distribution, tv_distance


# ----------------------------------------------------------------------
# Posteriores e inversión
# ----------------------------------------------------------------------
def test_worked_instance_noise_posterior(worked_instance, worked_process, half_noise):
    schedule, noise_seq = worked_process
    q = oracle_noise_posterior(worked_instance, 0, schedule, noise_seq, (0, 0))
    assert q == pytest.approx(3 / 7, abs=1e-15)

    score = invert_posterior([q, 0.5], half_noise)[0]
    assert score == pytest.approx(2 / 3, abs=1e-15)


def test_inversion_recovers_posterior_on_random_pairs():
    generador = np.random.default_rng(11)
    for _ in range(1000):
        V = int(generador.integers(2, 6))
        stay = float(generador.uniform(0.05, 0.95))
        tokens = generador.dirichlet(np.full(V, 2.0)) + 0.01
        ruido = NoiseDistribution(stay, tokens / tokens.sum())
        posterior = generador.dirichlet(np.ones(V))
        q = noise_posterior_from_posterior(posterior, ruido)
        np.testing.assert_allclose(invert_posterior(q, ruido), posterior, rtol=0, atol=1e-10)


def test_pure_noise_prediction_gives_zero_score(half_noise):
    assert invert_posterior([1.0, 0.5], half_noise)[0] == 0.0
    with pytest.raises(DomainError):
        invert_posterior([0.5, 0.5], NoiseDistribution.uniform(2, 0.0))


def test_denoiser_output_clamps_lower_end_only():
    salida = DenoiserOutput([0.0, 1.0, 0.5])
    np.testing.assert_array_equal(salida.y_hat, [CLAMP_EPS, 1.0, 0.5])
    assert len(salida) == 3


def test_noise_posterior_undefined_off_support():
    p_star = JointDistribution.point_mass((0, 0), 2)
    schedule, noise_seq = proceso(2, 2, 2)
    with pytest.raises(UndefinedConditionalError):
        oracle_noise_posterior(p_star, 0, schedule, noise_seq, (1, 1))


def test_bce_loss():
    assert round(bce_loss(0.8, 1), 5) == 0.22314
    assert bce_loss(0.8, 0) == pytest.approx(-math.log(0.2))
    for invalido in (0.0, 1.0, 1.2):
        with pytest.raises(NumericGuardError):
            bce_loss(invalido, 1)
    np.testing.assert_allclose(bce_loss_array([0.8, 0.8], [1, 0]), [-math.log(0.8), -math.log(0.2)])
    assert np.all(np.isfinite(bce_loss_array([0.0, 1.0], [1, 0])))


# ----------------------------------------------------------------------
# Ejemplos de entrenamiento
# ----------------------------------------------------------------------
def test_make_train_example_masks_visited_position():
    terna = ForwardTriple((0, 1), PHI, (0, 1), 1, 1)
    ejemplo = make_train_example(terna)
    assert ejemplo.masked.entries[0] == 0
    assert ejemplo.masked.masked_position == 1
    assert ejemplo.revealed == 1
    assert ejemplo.label == 0

    ruidoso = make_train_example(ForwardTriple((0, 1), 0, (0, 0), 3, 1))
    assert (ruidoso.revealed, ruidoso.label, ruidoso.t) == (0, 1, 3)


def test_train_batch_matches_individual_examples():
    schedule, _ = proceso(2, 3, 6)
    x_next = np.array([[0, 1, 1], [1, 1, 0], [0, 0, 0]])
    ts = np.array([0, 4, 2])
    z = np.array([PHI, 1, 0])
    lote = make_train_batch(x_next, z, ts, schedule)
    assert lote.positions.tolist() == [0, 1, 2]
    assert lote.revealed.tolist() == [0, 1, 0]
    assert lote.labels.tolist() == [0, 1, 1]

    reconstruido = TrainBatch.from_examples([lote.example(n) for n in range(len(lote))])
    np.testing.assert_array_equal(reconstruido.x_next, lote.x_next)
    np.testing.assert_array_equal(reconstruido.context_indices(2), lote.context_indices(2))


# ----------------------------------------------------------------------
# Oráculo exacto
# ----------------------------------------------------------------------
def test_oracle_matches_single_query_posterior(worked_instance, worked_process):
    schedule, noise_seq = worked_process
    oraculo = ExactOracle(worked_instance, schedule, noise_seq)
    for t in range(schedule.horizon):
        siguiente = forward_propagate_exact(worked_instance, t + 1, schedule, noise_seq)
        posicion = schedule.permutation[t % 2]
        for x in itertools.product(range(2), repeat=2):
            if siguiente.prob(x) <= 0:
                continue
            y_hat = oraculo.predict(MaskedSequence.from_sequence(x, posicion), t).y_hat
            esperado = oracle_noise_posterior(worked_instance, t, schedule, noise_seq, x)
            assert y_hat[x[posicion]] == pytest.approx(esperado, abs=1e-14)


def test_oracle_counts_unreachable_contexts():
    p_star = JointDistribution.point_mass((0, 0), 2)
    schedule, noise_seq = proceso(2, 2, 2)
    oraculo = ExactOracle(p_star, schedule, noise_seq)
    y_hat = oraculo.predict(MaskedSequence.from_sequence((1, 1), 0), 0).y_hat
    np.testing.assert_array_equal(y_hat, [0.5, 0.5])
    assert oraculo.unreachable_queries == 1
    assert not oraculo.learned


def test_oracle_scores_sum_to_one_on_reachable_sequences():
    for p_star in instancias_sembradas(8) + [JointDistribution.point_mass((1, 0, 1), 2)]:
        V, L = p_star.V, p_star.L
        schedule, noise_seq = proceso(V, L, 2 * L)
        oraculo = ExactOracle(p_star, schedule, noise_seq)
        todas = np.array(list(itertools.product(range(V), repeat=L)))
        for t in range(2 * L):
            siguiente = forward_propagate_exact(p_star, t + 1, schedule, noise_seq).flat()
            filas = todas[siguiente > 0]
            posicion = schedule.permutation[t % L]
            scores = invert_posterior(oraculo.predict_batch(filas, posicion, t), noise_seq.at(t))
            np.testing.assert_allclose(scores.sum(axis=1), 1.0, rtol=0, atol=1e-9)
        assert oraculo.unreachable_queries == 0


def test_labels_match_oracle_noise_posterior(worked_instance, worked_process):
    schedule, noise_seq = worked_process
    oraculo = ExactOracle(worked_instance, schedule, noise_seq)
    rng = RngStream(13)
    N, t = 80_000, 1
    ts = np.full(N, t)
    _, z, x_next = forward_sample_direct_batch(worked_instance.sample_sequences(rng, N), ts, schedule, noise_seq, rng)
    lote = make_train_batch(x_next, z, ts, schedule)
    posicion = schedule.permutation[t % 2]

    for x in itertools.product(range(2), repeat=2):
        filas = np.all(lote.x_next == x, axis=1)
        n = int(filas.sum())
        assert n >= 1000
        q = oraculo.predict_batch(np.array([x]), posicion, t)[0, x[posicion]]
        sigma = math.sqrt(q * (1 - q) / n)
        assert abs(float(lote.labels[filas].mean()) - q) <= 4 * sigma + 1e-12


@pytest.mark.parametrize("conteos", [[0, 5], [1, 1e7]])
def test_oracle_rejects_noise_that_breaks_inversion(worked_instance, conteos):
    ruido = NoiseSequence.constant(build_unigram_noise(conteos, 0.5), 8)
    with pytest.raises(DomainError):
        check_invertible_noise(ruido)
    with pytest.raises(DomainError):
        ExactOracle(worked_instance, ScanSchedule.round_robin(2, 8), ruido)


def test_unigram_noise_keeps_reverse_exact(worked_instance):
    schedule = ScanSchedule.round_robin(2, 8)
    ruido = NoiseSequence.constant(build_unigram_noise([1, 3], 0.5), 8)
    oraculo = ExactOracle(worked_instance, schedule, ruido)
    P_T = forward_propagate_exact(worked_instance, 8, schedule, ruido)
    assert tv_distance(reverse_propagate_exact(oraculo, schedule, ruido, P_T), worked_instance) <= 1e-9
    with pytest.raises(DomainError):
        check_invertible_noise(NoiseSequence.constant(NoiseDistribution.uniform(2, 0.0), 2))


# ----------------------------------------------------------------------
# Modelos aprendidos
# ----------------------------------------------------------------------
def test_tabular_model_laplace_estimate():
    schedule, _ = proceso(2, 2, 4)
    modelo = TabularModel(2, 2, 4)
    assert modelo.predict(MaskedSequence.from_sequence((0, 0), 0), 0).y_hat.tolist() == [0.5, 0.5]

    x_next = np.array([[0, 1]] * 3)
    lote = make_train_batch(x_next, np.array([0, PHI, PHI]), np.zeros(3, dtype=int), schedule)
    perdida_previa = modelo.update_batch(lote)
    assert perdida_previa == pytest.approx(math.log(2))
    assert modelo.total_events() == 3
    # un evento con etiqueta 1 y dos con 0: (1 + 1) / (3 + 2)
    assert modelo.predict_batch(x_next[:1], 0, 0)[0, 0] == pytest.approx(0.4)


def test_model_persistence_preserves_predictions(tmp_path):
    p_star = random_instance(2, 2, seed=3)
    schedule, noise_seq = proceso(2, 2, 6)
    filas = np.array(list(itertools.product(range(2), repeat=2)))
    for tipo in ("tabular", "logistic"):
        modelo = build_model(tipo, 2, 2, 6)
        train(modelo, p_star, schedule, noise_seq, 50, RngStream(1), batch_size=8, timesteps_per_example=2)
        ruta = tmp_path / f"{tipo}.json"
        save_model(modelo, str(ruta), {"seed": 1})
        cargado = load_model(str(ruta))
        assert cargado.kind == tipo
        for t in range(5):
            np.testing.assert_array_equal(cargado.predict_batch(filas, t % 2, t), modelo.predict_batch(filas, t % 2, t))


def test_model_from_dict_rejects_unknown_kind_and_version():
    with pytest.raises(InvalidInputError):
        model_from_dict({"kind": "transformer", "version": 1})
    datos = TabularModel(2, 2, 3).to_dict()
    datos["version"] = 99
    with pytest.raises(InvalidInputError):
        model_from_dict(datos)
    with pytest.raises(UnsupportedConfigurationError):
        build_model("oracle", 2, 2, 3)


def test_logistic_gradient_matches_finite_differences():
    V, L, T = 2, 3, 12
    schedule, _ = proceso(V, L, T)
    generador = np.random.default_rng(5)
    x_next = generador.integers(0, V, size=(100, L))
    ts = generador.integers(0, T - 1, size=100)
    posiciones = np.asarray(schedule.permutation)[ts % L]
    revelados = x_next[np.arange(100), posiciones]
    z = np.where(generador.random(100) < 0.5, revelados, PHI)
    lote = make_train_batch(x_next, z, ts, schedule)

    modelo = LogisticModel(V, L, T)
    modelo.weights = generador.normal(0.0, 0.5, size=modelo.weights.shape)
    modelo.bias = generador.normal(0.0, 0.5, size=V)
    _, grad_W, grad_b = modelo.loss_and_gradient(lote)

    h = 1e-5

    def diferencia_central(parametro, indice):
        original = parametro[indice]
        parametro[indice] = original + h
        arriba = modelo.loss(lote)
        parametro[indice] = original - h
        abajo = modelo.loss(lote)
        parametro[indice] = original
        return (arriba - abajo) / (2 * h)

    numerico_W = np.array([[diferencia_central(modelo.weights, (a, d)) for d in range(modelo.num_features)]
                           for a in range(V)])
    numerico_b = np.array([diferencia_central(modelo.bias, a) for a in range(V)])
    np.testing.assert_allclose(grad_W, numerico_W, rtol=1e-4, atol=1e-9)
    np.testing.assert_allclose(grad_b, numerico_b, rtol=1e-4, atol=1e-9)


def test_logistic_training_lowers_loss():
    p_star = build_preset("anti-correlated", 2, 2)
    schedule, noise_seq = proceso(2, 2, 4)
    modelo = LogisticModel(2, 2, 4, learning_rate=0.1)
    perdidas = []
    train(modelo, p_star, schedule, noise_seq, 2000, RngStream(8), batch_size=64,
          loss_callback=lambda _, perdida: perdidas.append(perdida))
    assert perdidas[0] == pytest.approx(math.log(2))
    assert np.mean(perdidas[-200:]) < 0.65


# ----------------------------------------------------------------------
# Entrenamiento
# ----------------------------------------------------------------------
def test_zero_iterations_leave_model_fresh(worked_instance, worked_process):
    schedule, noise_seq = worked_process
    modelo = train(TabularModel(2, 2, 4), worked_instance, schedule, noise_seq, 0, RngStream(0))
    assert modelo.total_events() == 0


def test_training_needs_two_steps(worked_instance):
    schedule, noise_seq = proceso(2, 2, 1)
    with pytest.raises(UnsupportedConfigurationError):
        train(TabularModel(2, 2, 1), worked_instance, schedule, noise_seq, 10, RngStream(0))


def test_training_is_deterministic(worked_instance, worked_process):
    schedule, noise_seq = worked_process
    modelos = [train(TabularModel(2, 2, 4), worked_instance, schedule, noise_seq, 200, RngStream(42),
                     batch_size=4, timesteps_per_example=2) for _ in range(2)]
    np.testing.assert_array_equal(modelos[0].counts, modelos[1].counts)
    assert modelos[0].total_events() == 200 * 4 * 2


def test_oracle_error_of_oracle_is_zero(worked_instance, worked_process):
    schedule, noise_seq = worked_process
    oraculo = ExactOracle(worked_instance, schedule, noise_seq)
    assert max_oracle_error(oraculo, oraculo) == 0.0
    assert max_oracle_error(TabularModel(2, 2, 4), oraculo) > 0.0


def test_tabular_error_shrinks_with_more_examples():
    p_star = random_instance(2, 2, seed=7, alpha=5.0)
    schedule, noise_seq = proceso(2, 2, 4)
    oraculo = ExactOracle(p_star, schedule, noise_seq)
    modelo = TabularModel(2, 2, 4)
    rng = RngStream(31)
    errores, vistos = [], 0
    for N in (1_000, 10_000, 100_000, 200_000):
        train(modelo, p_star, schedule, noise_seq, (N - vistos) // 100, rng, batch_size=100)
        vistos = N
        errores.append(max_oracle_error(modelo, oraculo))
    assert modelo.total_events() == 200_000
    # 10% de holgura estadística entre N consecutivos
    for previo, siguiente in zip(errores, errores[1:]):
        assert siguiente <= 1.1 * previo


def test_tabular_learning_converges_to_oracle():
    p_star = random_instance(2, 3, seed=7, alpha=5.0)
    schedule, noise_seq = proceso(2, 3, 12)
    modelo = train(TabularModel(2, 3, 12), p_star, schedule, noise_seq, 20_000, RngStream(2024),
                   batch_size=64, timesteps_per_example=8)
    assert max_oracle_error(modelo, ExactOracle(p_star, schedule, noise_seq)) <= 0.02

    muestras = sample_batch(modelo, schedule, noise_seq, SamplerConfig(), RngStream(99), 100_000)
    assert tv_distance(empirical_distribution(muestras, 2, 3), p_star) <= 0.05
