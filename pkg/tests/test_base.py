"""
Pruebas de los tipos base: alfabeto, ruido, barrido, tablas conjuntas, azar y presets.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from core.base.alphabet import (
    OMEGA,
    PHI,
    MaskedSequence,
    TokenAlphabet,
    as_sequence,
    decode_index,
    encode_contexts,
    encode_index,
    encode_rows,
)
from core.base.joint import JointDistribution, apply_coordinate_kernel, check_cap, context_rows
from core.base.noise import NoiseDistribution, NoiseSequence, build_unigram_noise
from core.base.presets import PRESETS, build_preset
from core.base.rng import RngStream
from core.base.schedule import ScanSchedule, schedule_position
from core.errors import InvalidInputError, ResourceLimitError, StepRangeError


# ----------------------------------------------------------------------
# Alfabeto
# ----------------------------------------------------------------------
def test_reserved_symbols_outside_alphabet():
    alfabeto = TokenAlphabet(4)
    assert not alfabeto.contains(PHI)
    assert not alfabeto.contains(OMEGA)
    assert alfabeto.contains(3)
    with pytest.raises(InvalidInputError):
        TokenAlphabet(0)


def test_as_sequence_rejects_out_of_range_token():
    assert as_sequence([0, 1, 1], 2, 3) == (0, 1, 1)
    with pytest.raises(InvalidInputError):
        as_sequence([0, 2], 2)
    with pytest.raises(InvalidInputError):
        as_sequence([0, 1], 2, 3)


def test_masked_sequence_has_single_omega():
    masked = MaskedSequence.from_sequence((0, 1), 1)
    assert masked.entries == (0, OMEGA)
    assert masked.context() == (0,)
    assert masked.fill(1) == (0, 1)
    with pytest.raises(InvalidInputError):
        MaskedSequence((OMEGA, OMEGA), 0)
    with pytest.raises(InvalidInputError):
        MaskedSequence.from_sequence((0, 1), 2)


@given(V=st.integers(1, 5), L=st.integers(1, 5), data=st.data())
def test_encode_decode_identity(V, L, data):
    indice = data.draw(st.integers(0, V ** L - 1))
    assert encode_index(decode_index(indice, V, L), V) == indice


def test_encode_rows_matches_row_major_order():
    filas = np.array([[0, 0, 1], [1, 0, 0], [1, 1, 1]])
    assert list(encode_rows(filas, 2)) == [1, 4, 7]
    assert list(encode_contexts(filas, 1, 2)) == [1, 2, 3]
    assert list(encode_contexts(filas, np.array([0, 2, 1]), 2)) == [1, 2, 3]


# ----------------------------------------------------------------------
# Ruido
# ----------------------------------------------------------------------
def test_unigram_noise_from_counts():
    ruido = build_unigram_noise([3, 1], 0.5)
    np.testing.assert_allclose(ruido.token_probs, [0.75, 0.25])
    np.testing.assert_allclose(ruido.token_mass(), [0.375, 0.125])
    np.testing.assert_allclose(ruido.outcome_probs(), [0.375, 0.125, 0.5])


@pytest.mark.parametrize("conteos", [[0, 0], [-1, 2], []])
def test_unigram_noise_rejects_bad_counts(conteos):
    with pytest.raises(InvalidInputError):
        build_unigram_noise(conteos, 0.5)


def test_noise_sequence_bounds():
    secuencia = NoiseSequence.constant(NoiseDistribution.uniform(3, 0.5), 4)
    assert secuencia.horizon == 4
    assert secuencia.is_token_constant()
    with pytest.raises(StepRangeError):
        secuencia.at(4)
    assert secuencia.truncated(2).horizon == 2


def test_noise_rejects_unnormalised_tokens():
    with pytest.raises(InvalidInputError):
        NoiseDistribution(0.5, np.array([0.5, 0.6]))
    with pytest.raises(InvalidInputError):
        NoiseDistribution(1.5, np.array([1.0]))


# ----------------------------------------------------------------------
# Barrido
# ----------------------------------------------------------------------
def test_schedule_position_example():
    assert schedule_position(ScanSchedule((2, 0, 1), 6), 1) == 0
    with pytest.raises(StepRangeError):
        schedule_position(ScanSchedule((2, 0, 1), 6), 6)


def test_schedule_rejects_non_permutation():
    with pytest.raises(InvalidInputError):
        ScanSchedule((0, 0, 1), 3)


@settings(max_examples=60)
@given(L=st.integers(1, 6), T=st.integers(1, 40), data=st.data())
def test_every_position_visited_floor_T_over_L_times(L, T, data):
    permutacion = data.draw(st.permutations(list(range(L))))
    schedule = ScanSchedule(tuple(permutacion), T)
    for j in range(L):
        visitas = schedule.visits(j, T)
        assert T // L <= len(visitas) <= -(-T // L)
        assert all(schedule_position(schedule, s) == j for s in visitas)


# ----------------------------------------------------------------------
# Tablas conjuntas
# ----------------------------------------------------------------------
def test_joint_validates_normalisation_and_cap():
    with pytest.raises(InvalidInputError):
        JointDistribution([0.5, 0.6], 2, 1)
    with pytest.raises(InvalidInputError):
        JointDistribution([1.5, -0.5], 2, 1)
    with pytest.raises(ResourceLimitError):
        check_cap(10, 8, cap=10 ** 7)
    assert check_cap(10, 7) == 10 ** 7


def test_product_and_point_mass():
    producto = JointDistribution.product([0.25, 0.75], 2)
    np.testing.assert_allclose(producto.flat(), [0.0625, 0.1875, 0.1875, 0.5625])
    punto = JointDistribution.point_mass((1, 0, 1), 2)
    assert punto.prob((1, 0, 1)) == 1.0
    assert punto.support().tolist() == [5]


def test_context_vector_of_worked_instance(worked_instance):
    contexto = worked_instance.context_vector(MaskedSequence.from_sequence((0, 0), 0))
    np.testing.assert_allclose(contexto, [0.5, 0.25])


def test_context_rows_enumerates_contexts():
    filas = context_rows(2, 3, 1)
    assert filas.shape == (4, 3)
    assert np.all(filas[:, 1] == 0)
    assert list(encode_contexts(filas, 1, 2)) == [0, 1, 2, 3]


def test_exact_conditional_kernel_leaves_table_unchanged(worked_instance):
    def copiar(filas):
        tabla = worked_instance.tensor()
        salida = tabla[:, filas[:, 1]].T
        return salida / salida.sum(axis=1, keepdims=True)

    nuevo = apply_coordinate_kernel(np.array(worked_instance.tensor()), 0, copiar)
    np.testing.assert_allclose(nuevo.reshape(-1), worked_instance.flat(), atol=1e-15)


# ----------------------------------------------------------------------
# Azar y presets
# ----------------------------------------------------------------------
def test_rng_is_deterministic_and_forks_are_distinct():
    a, b = RngStream(7), RngStream(7)
    np.testing.assert_array_equal(a.random(5), b.random(5))
    hijos = RngStream(7).fork(2)
    assert not np.array_equal(hijos[0].random(5), hijos[1].random(5))
    assert [h.spawn_key for h in hijos] == [(0,), (1,)]


def test_categorical_rows_respects_zero_mass():
    rng = RngStream(3)
    probs = np.tile([0.0, 1.0, 0.0], (1000, 1))
    assert np.all(rng.categorical_rows(probs) == 1)
    assert rng.categorical([0.0, 0.0, 1.0]) == 2


def test_presets():
    uniforme = build_preset("uniform", 3, 2)
    np.testing.assert_allclose(uniforme.flat(), np.full(9, 1 / 9))
    punto = build_preset("point-mass", 2, 3, point=[1, 1, 0])
    assert punto.prob((1, 1, 0)) == 1.0
    anti = build_preset("anti-correlated", 2, 2)
    np.testing.assert_allclose(anti.flat(), [0.0, 0.5, 0.5, 0.0])
    ising = build_preset("ising", 2, 3, beta=2.0)
    assert ising.prob((0, 0, 0)) > ising.prob((0, 1, 0))
    aleatoria = build_preset("random", 2, 3, seed=5)
    np.testing.assert_array_equal(aleatoria.flat(), build_preset("random", 2, 3, seed=5).flat())
    assert np.all(aleatoria.flat() > 0)
    assert set(PRESETS) == {"uniform", "point-mass", "anti-correlated", "ising", "random"}
    with pytest.raises(InvalidInputError):
        build_preset("nope", 2, 2)
