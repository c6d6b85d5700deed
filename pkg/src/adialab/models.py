"""Reference models and interaction builders used across the experiments.

Matrix models are small dense systems for the adiabatic checks; the
interaction builders assemble the standard chain interactions (Ising
coupling, transverse/longitudinal fields, XY exchange) and the driving
paths the scans exercise.
"""

from __future__ import annotations

import math

import numpy as np

from .adiabatic import MatrixModel
from .interactions import (
    IDENTITY_2,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    Interaction,
    InteractionPath,
    LocalTerm,
    combine,
    one_site_term,
    two_site_term,
)
from .lattice import Volume, local_hamiltonian


def ising_coupling(coupling: float = 1.0, weight_r: float = 1.0) -> Interaction:
    """Nearest-neighbor sigma_z sigma_z chain coupling."""
    return Interaction([two_site_term(PAULI_Z, PAULI_Z, coupling=coupling)], weight_r)


def transverse_field(strength: float = 1.0, weight_r: float = 1.0) -> Interaction:
    """On-site sigma_x field."""
    return Interaction([one_site_term(strength * PAULI_X)], weight_r)


def longitudinal_field(strength: float = 1.0, weight_r: float = 1.0) -> Interaction:
    """On-site sigma_z field."""
    return Interaction([one_site_term(strength * PAULI_Z)], weight_r)


def xy_exchange(coupling: float = 1.0, weight_r: float = 1.0) -> Interaction:
    """Nearest-neighbor XY exchange J (sx sx + sy sy)."""
    term = LocalTerm(
        [(0,), (1,)],
        coupling * (np.kron(PAULI_X, PAULI_X) + np.kron(PAULI_Y, PAULI_Y)).real
        + 0.0j * np.eye(4),
    )
    return Interaction([term], weight_r)


def transverse_field_chain(
    coupling: float = 1.0, field: float = 1.0, weight_r: float = 1.0
) -> Interaction:
    """Ising coupling plus a transverse field in one interaction."""
    return combine(
        ising_coupling(coupling, weight_r), transverse_field(field, weight_r), 1.0, 1.0
    )


def transverse_sweep_path(
    coupling: float = 1.0,
    field_start: float = 0.25,
    field_stop: float = 1.0,
    weight_r: float = 1.0,
) -> InteractionPath:
    """Linear ramp of the transverse field over a fixed Ising coupling.

    The field range keeps the Gibbs weights of an 8-site chain at beta = 1
    well above the eigenvalue clamp, so relative entropies stay finite.
    """
    phi0 = transverse_field_chain(coupling, field_start, weight_r)
    phi1 = transverse_field_chain(coupling, field_stop, weight_r)
    return InteractionPath.interpolation(phi0, phi1)


def commuting_sweep_path(
    coupling: float = 1.0, scale_stop: float = 2.0, weight_r: float = 1.0
) -> InteractionPath:
    """Ramp Psi_tau = (1 + tau (scale_stop - 1)) * Ising coupling.

    All instantaneous Hamiltonians commute, so the driven state never
    moves: the adiabatic theorem fails at every T and the relative entropy
    against the instantaneous Gibbs state has a classical closed form.
    """
    phi0 = ising_coupling(coupling, weight_r)
    phi1 = ising_coupling(scale_stop * coupling, weight_r)
    return InteractionPath.interpolation(phi0, phi1)


def quadratic_mix_path(weight_r: float = 1.0) -> InteractionPath:
    """Ising-to-transverse-mix interpolation with profile lam(tau) = tau^2."""
    phi0 = ising_coupling(1.0, weight_r)
    phi1 = combine(
        ising_coupling(0.4, weight_r), transverse_field(0.9, weight_r), 1.0, 1.0
    )
    return InteractionPath.interpolation(phi0, phi1, lam=(0.0, 0.0, 1.0))


def gapped_two_level(beta: float = 1.0) -> MatrixModel:
    """H = sigma_z with a linearly growing sigma_x tilt; gap >= 2 everywhere."""
    return MatrixModel(
        h0=PAULI_Z,
        v=lambda tau: tau * PAULI_X,
        vdot=lambda tau: PAULI_X,
        beta=beta,
        band=0,
        label="gapped-two-level",
    )


def degenerate_four_level(beta: float = 1.0) -> MatrixModel:
    """Two uncoupled copies of the gapped model; tracked band has rank 2."""
    h0 = np.kron(PAULI_Z, IDENTITY_2)
    tilt = np.kron(PAULI_X, IDENTITY_2)
    return MatrixModel(
        h0=h0,
        v=lambda tau: tau * tilt,
        vdot=lambda tau: tilt,
        beta=beta,
        band=(0, 1),
        label="degenerate-four-level",
    )


def _unit_vector(tau: float) -> np.ndarray:
    angle = 0.5 * math.pi * tau
    return np.array([math.sin(angle), 0.0, math.cos(angle)])


def _unit_vector_dot(tau: float) -> np.ndarray:
    angle = 0.5 * math.pi * tau
    return 0.5 * math.pi * np.array([math.cos(angle), 0.0, -math.sin(angle)])


def _dot_sigma(vec: np.ndarray) -> np.ndarray:
    return vec[0] * PAULI_X + vec[1] * PAULI_Y + vec[2] * PAULI_Z


def crossing_two_level(beta: float = 1.0) -> MatrixModel:
    """Exact eigenvalue crossing at tau = 1/2 on a rotating axis.

    H(tau) = (2 tau - 1) n(tau).sigma with n rotating from z to x; the
    smooth rank-1 family P(tau) = (1 + n(tau).sigma)/2 is a spectral
    projection at every tau and is supplied explicitly as the scan input.
    """

    def v(tau: float) -> np.ndarray:
        return (2.0 * tau - 1.0) * _dot_sigma(_unit_vector(tau))

    def vdot(tau: float) -> np.ndarray:
        return 2.0 * _dot_sigma(_unit_vector(tau)) + (2.0 * tau - 1.0) * _dot_sigma(
            _unit_vector_dot(tau)
        )

    def projection(tau: float) -> np.ndarray:
        return 0.5 * (np.eye(2, dtype=complex) + _dot_sigma(_unit_vector(tau)))

    return MatrixModel(
        h0=np.zeros((2, 2), dtype=complex),
        v=v,
        vdot=vdot,
        beta=beta,
        band=0,
        projection_rule=projection,
        label="crossing-two-level",
    )


def chain_balance_model(length: int = 4, beta: float = 1.0) -> MatrixModel:
    """Ising chain with a ramped transverse field, as a dense matrix model."""
    volume = Volume.chain(length)
    h0 = local_hamiltonian(ising_coupling(1.0), volume).matrix
    tilt = local_hamiltonian(transverse_field(0.7), volume).matrix
    return MatrixModel(
        h0=h0,
        v=lambda tau: tau * tilt,
        vdot=lambda tau: tilt,
        beta=beta,
        band=0,
        label=f"chain-{length}",
    )


# Parameters of the standard non-commuting Trotter check: the sweep
# H(tau) = (1 - tau) sigma_z + tau sigma_x run at a scale where the
# first-order error law is clean and error(N=256) sits below 1e-4.
TROTTER_CHECK_T = 0.025
TROTTER_CHECK_SPAN = (0.0, 1.0)


def standard_sweep_rule(tau: float) -> np.ndarray:
    """H(tau) = (1 - tau) sigma_z + tau sigma_x, the standard test sweep."""
    return (1.0 - tau) * PAULI_Z + tau * PAULI_X
