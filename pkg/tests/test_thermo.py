import math

import numpy as np
import pytest

from adialab.errors import ValidationError
from adialab.interactions import (
    PAULI_X,
    PAULI_Z,
    Interaction,
    LocalTerm,
    one_site_term,
)
from adialab.lattice import Volume, local_hamiltonian
from adialab.models import ising_coupling, transverse_field_chain, xy_exchange
from adialab.thermo import (
    DensityMatrix,
    entropy,
    gibbs,
    maximally_mixed,
    pinsker_check,
    pressure,
    pressure_extrapolate,
    relative_entropy,
    trace_distance,
    variational_scan,
    weak_gibbs_residual,
)

from oracles import (
    enumeration_pressure,
    free_fermion_xy_pressure,
    spectral_entropy,
    spectral_relative_entropy,
    transfer_matrix_pressure,
)


def random_state(rng, dim, floor=1e-3):
    x = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    m = x @ x.conj().T + floor * np.eye(dim)
    return DensityMatrix(m / np.trace(m).real)


class TestDensityMatrix:
    def test_rejects_non_unit_trace(self):
        with pytest.raises(ValidationError):
            DensityMatrix(np.eye(2))

    def test_rejects_non_self_adjoint(self):
        m = np.array([[0.5, 0.5], [0.0, 0.5]])
        with pytest.raises(ValidationError):
            DensityMatrix(m)

    def test_maximally_mixed_entropy(self):
        for n in (1, 2, 3):
            state = maximally_mixed(2**n)
            assert entropy(state) == pytest.approx(n * math.log(2.0), rel=1e-13)

    def test_pure_state_entropy_zero(self):
        v = np.array([1.0, 1.0, 0.0, 0.0]) / math.sqrt(2.0)
        state = DensityMatrix(np.outer(v, v.conj()))
        assert entropy(state) == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_entropy_matches_spectral_oracle(self, seed):
        rng = np.random.default_rng(seed)
        state = random_state(rng, 8)
        assert entropy(state) == pytest.approx(spectral_entropy(state.matrix), abs=1e-11)


class TestGibbs:
    def test_zero_hamiltonian_is_mixed(self):
        state, log_z = gibbs(np.zeros((4, 4)), beta=1.0)
        assert np.allclose(state.matrix, np.eye(4) / 4.0)
        assert log_z == pytest.approx(math.log(4.0), rel=1e-14)

    def test_two_level_closed_form(self):
        beta = 1.7
        state, log_z = gibbs(PAULI_Z, beta)
        z = 2.0 * math.cosh(beta)
        assert log_z == pytest.approx(math.log(z), rel=1e-13)
        assert state.matrix[0, 0].real == pytest.approx(math.exp(-beta) / z, rel=1e-13)
        assert state.matrix[1, 1].real == pytest.approx(math.exp(beta) / z, rel=1e-13)

    def test_commutes_with_hamiltonian(self):
        rng = np.random.default_rng(5)
        raw = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
        h = 0.5 * (raw + raw.conj().T)
        state, _ = gibbs(h, 0.9)
        assert np.allclose(state.matrix @ h, h @ state.matrix, atol=1e-12)


class TestRelativeEntropy:
    def test_zero_iff_equal(self):
        rng = np.random.default_rng(0)
        nu = random_state(rng, 8)
        assert relative_entropy(nu, nu) == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("seed", [1, 2, 3, 4])
    def test_matches_log_matrix_oracle(self, seed):
        rng = np.random.default_rng(seed)
        nu = random_state(rng, 8)
        om = random_state(rng, 8)
        expected = spectral_relative_entropy(nu.matrix, om.matrix)
        assert relative_entropy(nu, om) == pytest.approx(expected, abs=1e-10)

    def test_nonnegative(self):
        rng = np.random.default_rng(9)
        for _ in range(20):
            nu, om = random_state(rng, 4), random_state(rng, 4)
            assert relative_entropy(nu, om) >= -1e-12

    def test_infinite_on_support_mismatch(self):
        # nu has weight outside the support of omega
        nu = maximally_mixed(2)
        om = DensityMatrix(np.diag([1.0, 0.0]))
        assert relative_entropy(nu, om) == math.inf

    def test_pure_states(self):
        v = np.array([1.0, 0.0])
        w = np.array([1.0, 1.0]) / math.sqrt(2.0)
        nu = DensityMatrix(np.outer(v, v))
        om = DensityMatrix(np.outer(w, w))
        assert relative_entropy(nu, om) == math.inf


class TestTraceDistance:
    def test_orthogonal_pure_states(self):
        nu = DensityMatrix(np.diag([1.0, 0.0]))
        om = DensityMatrix(np.diag([0.0, 1.0]))
        assert trace_distance(nu, om) == pytest.approx(2.0, rel=1e-14)

    def test_classical_reduction(self):
        # diagonal states: trace distance equals l1 distance of the diagonals
        p = np.array([0.5, 0.3, 0.2, 0.0])
        q = np.array([0.25, 0.25, 0.25, 0.25])
        nu, om = DensityMatrix(np.diag(p)), DensityMatrix(np.diag(q))
        assert trace_distance(nu, om) == pytest.approx(float(np.abs(p - q).sum()), rel=1e-13)

    @pytest.mark.parametrize("seed", [0, 1, 2, 3, 4, 5, 6, 7])
    def test_pinsker(self, seed):
        rng = np.random.default_rng(seed)
        nu, om = random_state(rng, 8), random_state(rng, 8)
        assert pinsker_check(nu, om)
        assert trace_distance(nu, om) ** 2 <= 2.0 * relative_entropy(nu, om) + 1e-12


class TestWeakGibbs:
    @pytest.mark.parametrize("length", [2, 3, 4])
    def test_residual_tiny(self, length):
        rng = np.random.default_rng(length)
        volume = Volume.chain(length)
        phi = transverse_field_chain(0.6, 0.4)
        nu = random_state(rng, volume.dim)
        assert abs(weak_gibbs_residual(nu, phi, volume, beta=1.0)) <= 1e-10

    def test_minimized_by_gibbs_state(self):
        volume = Volume.chain(3)
        phi = ising_coupling(1.0)
        omega, _ = gibbs(local_hamiltonian(phi, volume).matrix, 1.0)
        nu = DensityMatrix(omega.matrix.copy())
        # the identity holds AND the relative entropy itself vanishes
        assert abs(weak_gibbs_residual(nu, phi, volume, 1.0)) <= 1e-10
        assert relative_entropy(nu, omega) <= 1e-12


class TestPressure:
    @pytest.mark.parametrize("length", [2, 4, 7])
    def test_transfer_matrix_oracle(self, length):
        value = pressure(ising_coupling(1.0), Volume.chain(length), 1.0)
        assert value == pytest.approx(transfer_matrix_pressure(length, 1.0, 1.0), abs=1e-12)

    @pytest.mark.parametrize("beta", [0.5, 1.0, 2.3])
    def test_enumeration_oracle(self, beta):
        value = pressure(ising_coupling(0.7), Volume.chain(5), beta)
        assert value == pytest.approx(enumeration_pressure(5, beta, 0.7), abs=1e-12)

    @pytest.mark.parametrize("length,coupling,beta", [(4, 0.5, 1.0), (6, 1.0, 0.7), (8, 0.5, 1.3)])
    def test_free_fermion_oracle(self, length, coupling, beta):
        # dual route: dense eigensolve vs Jordan-Wigner free fermions
        value = pressure(xy_exchange(coupling), Volume.chain(length), beta)
        assert value == pytest.approx(free_fermion_xy_pressure(length, beta, coupling), abs=1e-11)

    def test_diagonal_and_dense_routes_agree(self):
        # the classical fast path must reproduce the generic dense route
        phi = ising_coupling(0.9)
        volume = Volume.chain(5)
        from adialab.lattice import hamiltonian_diagonal

        diag = hamiltonian_diagonal(phi, volume)
        assert diag is not None
        dense_h = local_hamiltonian(phi, volume).matrix
        beta = 1.1
        shift = (-beta * diag).max()
        log_z_diag = shift + math.log(np.exp(-beta * diag - shift).sum())
        state, log_z_dense = gibbs(dense_h, beta)
        assert log_z_diag / 5 == pytest.approx(log_z_dense / 5, rel=1e-13)
        assert pressure(phi, volume, beta) == pytest.approx(log_z_diag / 5, rel=1e-13)

    def test_periodic_close_to_free_for_large_l(self):
        phi = ising_coupling(1.0)
        free = pressure(phi, Volume.chain(10), 1.0, "free")
        per = pressure(phi, Volume.chain(10), 1.0, "periodic")
        assert abs(free - per) < 0.1


class TestPressureExtrapolate:
    def test_ising_thermodynamic_limit(self):
        volumes = [Volume.chain(L) for L in range(4, 13)]
        fit = pressure_extrapolate(ising_coupling(1.0), volumes, 1.0)
        assert fit.estimate == pytest.approx(math.log(2.0 * math.cosh(1.0)), abs=1e-9)

    def test_needs_three_volumes(self):
        with pytest.raises(ValidationError):
            pressure_extrapolate(ising_coupling(1.0), [Volume.chain(4), Volume.chain(5)], 1.0)

    def test_sizes_strictly_increasing(self):
        with pytest.raises(ValidationError):
            pressure_extrapolate(
                ising_coupling(1.0),
                [Volume.chain(4), Volume.chain(4), Volume.chain(5)],
                1.0,
            )


class TestVariational:
    def test_single_site_equality(self):
        # product states are exact for on-site interactions
        phi = Interaction(
            [one_site_term(np.array([[0.8, 0.3], [0.3, -0.6]], dtype=complex))],
            weight_r=1.0,
        )
        res = variational_scan(phi, Volume.chain(4), 1.0)
        assert res.gap == pytest.approx(0.0, abs=1e-8)

    def test_lower_bound_for_couplings(self):
        res = variational_scan(ising_coupling(1.0), Volume.chain(4), 1.0)
        assert res.value <= res.pressure + 1e-12
        assert res.gap > 1e-3

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_never_exceeds_pressure(self, seed):
        rng = np.random.default_rng(seed)
        raw = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        phi = Interaction(
            [
                one_site_term(PAULI_X * float(rng.normal())),
                LocalTerm([0, 1], 0.5 * (raw + raw.conj().T)),
            ],
            weight_r=1.0,
        )
        res = variational_scan(phi, Volume.chain(4), 1.0, radius_steps=4, sweeps=30)
        assert res.value <= res.pressure + 1e-12
