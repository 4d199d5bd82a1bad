from functools import reduce

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qpdf.statevector import (
    MAX_QUBITS,
    QuantumState,
    ResourceError,
    apply_controlled_unitary,
    apply_diffusion,
    apply_phase_oracle,
    apply_qft,
    apply_qft_inverse,
    basis_state,
    diffusion_op,
    measure_distribution,
    new_uniform,
    phase_flip_op,
    sample_measurement,
)

H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
I2 = np.eye(2)


def kron_all(mats):
    return reduce(np.kron, mats)


def random_state(rng, q):
    v = rng.normal(size=2**q) + 1j * rng.normal(size=2**q)
    return QuantumState(q, v / np.linalg.norm(v))


def dft_matrix(dim):
    j, k = np.meshgrid(np.arange(dim), np.arange(dim), indexing="ij")
    return np.exp(2j * np.pi * j * k / dim) / np.sqrt(dim)


def range_operator(op_small, q, lo, hi):
    """Dense operator acting as op_small on qubits lo..hi-1 (little-endian)."""
    # kron order is most-significant first
    return kron_all([np.eye(2 ** (q - hi)), op_small, np.eye(2**lo)])


@st.composite
def states(draw, min_q=1, max_q=6):
    q = draw(st.integers(min_q, max_q))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_state(np.random.default_rng(seed), q)


@st.composite
def state_and_range(draw, min_q=1, max_q=6):
    s = draw(states(min_q, max_q))
    lo = draw(st.integers(0, s.num_qubits - 1))
    hi = draw(st.integers(lo + 1, s.num_qubits))
    return s, (lo, hi)


class TestUniform:
    def test_one_qubit_is_hadamard_on_zero(self):
        np.testing.assert_allclose(new_uniform(1).amplitudes, H @ [1, 0], atol=1e-15)

    def test_three_qubits(self):
        s = new_uniform(3)
        np.testing.assert_allclose(s.amplitudes, np.full(8, 1 / np.sqrt(8)))
        assert abs(s.amplitudes[0] - 0.353553) < 1e-6

    def test_fifteen_qubit_database(self):
        s = new_uniform(15)
        assert len(s.amplitudes) == 32768
        np.testing.assert_allclose(s.amplitudes, 2 ** -7.5, rtol=1e-14)
        assert abs(s.norm() - 1) < 1e-10

    def test_cap_names_vector_size(self):
        with pytest.raises(ResourceError, match=str(2 ** (MAX_QUBITS + 1))):
            new_uniform(MAX_QUBITS + 1)

    def test_zero_qubits_rejected(self):
        with pytest.raises(ValueError):
            new_uniform(0)

    def test_amplitude_length_checked(self):
        with pytest.raises(ValueError):
            QuantumState(2, np.ones(3))


class TestPhaseOracle:
    def test_single_flip(self):
        out = apply_phase_oracle(new_uniform(2), [3])
        np.testing.assert_allclose(out.amplitudes, [0.5, 0.5, 0.5, -0.5])

    def test_empty_marking_is_identity(self):
        s = random_state(np.random.default_rng(0), 3)
        np.testing.assert_array_equal(apply_phase_oracle(s, []).amplitudes, s.amplitudes)

    def test_all_marked_is_global_phase(self):
        s = random_state(np.random.default_rng(1), 3)
        out = apply_phase_oracle(s, lambda x: np.ones_like(x, dtype=bool))
        np.testing.assert_allclose(out.amplitudes, -s.amplitudes)
        np.testing.assert_allclose(measure_distribution(out).probabilities,
                                   measure_distribution(s).probabilities)

    def test_predicate_mask_and_list_agree(self):
        s = new_uniform(4)
        a = apply_phase_oracle(s, lambda x: x % 3 == 0)
        b = apply_phase_oracle(s, np.arange(16) % 3 == 0)
        c = apply_phase_oracle(s, [0, 3, 6, 9, 12, 15])
        np.testing.assert_array_equal(a.amplitudes, b.amplitudes)
        np.testing.assert_array_equal(a.amplitudes, c.amplitudes)

    def test_out_of_range_index(self):
        with pytest.raises(ValueError):
            apply_phase_oracle(new_uniform(2), [4])


class TestDiffusion:
    def test_uniform_fixed_point(self):
        np.testing.assert_allclose(apply_diffusion(new_uniform(5)).amplitudes,
                                   new_uniform(5).amplitudes, atol=1e-15)

    def test_hand_computed(self):
        s = QuantumState(2, [0.5, 0.5, 0.5, -0.5])
        np.testing.assert_allclose(apply_diffusion(s).amplitudes, [0, 0, 0, 1], atol=1e-15)

    def test_matches_dense_reflection_on_subrange(self):
        rng = np.random.default_rng(2)
        s = random_state(rng, 5)
        lo, hi = 1, 4
        d = 2 ** (hi - lo)
        refl = 2 * np.full((d, d), 1 / d) - np.eye(d)
        expected = range_operator(refl, 5, lo, hi) @ s.amplitudes
        np.testing.assert_allclose(apply_diffusion(s, (lo, hi)).amplitudes, expected, atol=1e-12)

    @pytest.mark.parametrize("bad", [(2, 2), (-1, 2), (0, 6), (3, 1)])
    def test_invalid_range(self, bad):
        with pytest.raises(ValueError):
            apply_diffusion(new_uniform(5), bad)


class TestQFT:
    def test_uniform_maps_to_zero(self):
        out = apply_qft_inverse(new_uniform(4))
        np.testing.assert_allclose(np.abs(out.amplitudes), np.eye(16)[0], atol=1e-14)

    @pytest.mark.parametrize("k", [0, 1, 5, 7])
    def test_fourier_basis_vector(self, k):
        t = 3
        m = np.arange(2**t)
        s = QuantumState(t, np.exp(2j * np.pi * k * m / 2**t) / np.sqrt(2**t))
        out = apply_qft_inverse(s)
        np.testing.assert_allclose(out.amplitudes, np.eye(8)[k], atol=1e-14)

    def test_forward_matches_dft_matrix_on_subrange(self):
        rng = np.random.default_rng(3)
        s = random_state(rng, 5)
        expected = range_operator(dft_matrix(8), 5, 2, 5) @ s.amplitudes
        np.testing.assert_allclose(apply_qft(s, (2, 5)).amplitudes, expected, atol=1e-12)

    def test_inverse_matches_adjoint_dft(self):
        rng = np.random.default_rng(4)
        s = random_state(rng, 4)
        expected = range_operator(dft_matrix(4).conj().T, 4, 1, 3) @ s.amplitudes
        np.testing.assert_allclose(apply_qft_inverse(s, (1, 3)).amplitudes, expected, atol=1e-12)


class TestControlled:
    def test_power_zero_identity(self):
        s = random_state(np.random.default_rng(5), 3)
        out = apply_controlled_unitary(s, 2, diffusion_op, power=0)
        np.testing.assert_array_equal(out.amplitudes, s.amplitudes)

    def test_control_zero_component_untouched(self):
        s = random_state(np.random.default_rng(6), 4)
        out = apply_controlled_unitary(s, 3, diffusion_op, power=3, target=(0, 3))
        np.testing.assert_array_equal(out.amplitudes[:8], s.amplitudes[:8])

    def test_controlled_phase_flip_against_matrix(self):
        # target qubit 0, control qubit 1 in |+>, flip marked {0}
        s = QuantumState(2, np.kron(H @ [1, 0], [0.6, 0.8]))
        out = apply_controlled_unitary(s, 1, phase_flip_op(np.array([True, False])), power=1)
        flip = np.diag([-1.0, 1.0])
        cu = np.kron(np.diag([1, 0]), I2) + np.kron(np.diag([0, 1]), flip)
        np.testing.assert_allclose(out.amplitudes, cu @ s.amplitudes, atol=1e-15)

    def test_target_above_control(self):
        rng = np.random.default_rng(7)
        s = random_state(rng, 4)
        d = 4
        refl = 2 * np.full((d, d), 1 / d) - np.eye(d)
        # control qubit 0, target qubits 2..3, applied twice
        op2 = refl @ refl
        cu = (kron_all([op2, I2, np.diag([0, 1])]) + kron_all([np.eye(4), I2, np.diag([1, 0])]))
        out = apply_controlled_unitary(s, 0, diffusion_op, power=2, target=(2, 4))
        np.testing.assert_allclose(out.amplitudes, cu @ s.amplitudes, atol=1e-12)

    def test_control_inside_target(self):
        with pytest.raises(ValueError, match="inside target"):
            apply_controlled_unitary(new_uniform(3), 1, diffusion_op, target=(0, 3))

    def test_negative_power(self):
        with pytest.raises(ValueError):
            apply_controlled_unitary(new_uniform(3), 2, diffusion_op, power=-1)


class TestMeasure:
    def test_uniform(self):
        np.testing.assert_allclose(measure_distribution(new_uniform(3)).probabilities, 0.125)

    def test_basis_point_mass(self):
        p = measure_distribution(basis_state(3, 5)).probabilities
        np.testing.assert_array_equal(p, np.eye(8)[5])

    def test_one_grover_step_n4_m1(self):
        s = apply_diffusion(apply_phase_oracle(new_uniform(2), [1]))
        np.testing.assert_allclose(measure_distribution(s).probabilities, [0, 1, 0, 0], atol=1e-15)

    def test_subregister_marginal(self):
        # |x> with x = 0b110: qubits 1..2 read 3
        p = measure_distribution(basis_state(3, 6), (1, 3)).probabilities
        np.testing.assert_array_equal(p, [0, 0, 0, 1])

    def test_sampling_is_seeded(self):
        s = new_uniform(3)
        a = sample_measurement(s, 50, seed=11)
        b = sample_measurement(s, 50, seed=11)
        np.testing.assert_array_equal(a, b)
        assert a.min() >= 0 and a.max() < 8


def _ops(rng, q, rng_range):
    mask = rng.random(2 ** (rng_range[1] - rng_range[0])) < 0.5
    return [
        lambda s: apply_phase_oracle(s, mask, rng_range),
        lambda s: apply_diffusion(s, rng_range),
        lambda s: apply_qft(s, rng_range),
        lambda s: apply_qft_inverse(s, rng_range),
    ]


@settings(max_examples=60, deadline=None)
@given(state_and_range(), st.integers(0, 2**32 - 1))
def test_norm_preserved(sr, seed):
    s, r = sr
    for op in _ops(np.random.default_rng(seed), s.num_qubits, r):
        assert abs(op(s).norm() - 1) < 1e-10


@settings(max_examples=60, deadline=None)
@given(state_and_range(), st.integers(0, 2**32 - 1))
def test_involutions_and_inverse_pairs(sr, seed):
    s, r = sr
    mask = np.random.default_rng(seed).random(2 ** (r[1] - r[0])) < 0.5
    twice = apply_phase_oracle(apply_phase_oracle(s, mask, r), mask, r)
    np.testing.assert_allclose(twice.amplitudes, s.amplitudes, atol=1e-12)
    twice = apply_diffusion(apply_diffusion(s, r), r)
    np.testing.assert_allclose(twice.amplitudes, s.amplitudes, atol=1e-12)
    back = apply_qft_inverse(apply_qft(s, r), r)
    np.testing.assert_allclose(back.amplitudes, s.amplitudes, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1),
       st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False),
       st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False))
def test_linearity(q, seed, alpha, beta):
    rng = np.random.default_rng(seed)
    a, b = random_state(rng, q), random_state(rng, q)
    r = (0, q)
    combo = QuantumState(q, alpha * a.amplitudes + beta * b.amplitudes)
    for op in _ops(rng, q, r):
        lhs = op(combo).amplitudes
        rhs = alpha * op(a).amplitudes + beta * op(b).amplitudes
        np.testing.assert_allclose(lhs, rhs, atol=1e-10)


def test_operations_do_not_mutate_input():
    s = random_state(np.random.default_rng(8), 4)
    before = s.amplitudes.copy()
    apply_phase_oracle(s, [1, 2])
    apply_diffusion(s)
    apply_qft_inverse(s, (0, 2))
    apply_controlled_unitary(s, 3, diffusion_op, power=2)
    np.testing.assert_array_equal(s.amplitudes, before)
