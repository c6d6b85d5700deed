"""Build lattice interactions and follow the pressure to its bulk limit.

An interaction assigns a self-adjoint matrix to each finite cluster of
sites.  Restricting it to a chain of length L gives a Hamiltonian whose
log partition function per site (the pressure) converges as L grows.
"""
import math

import numpy as np

from adialab.interactions import (
    PAULI_X,
    PAULI_Z,
    Interaction,
    energy_density,
    norm_r,
    one_site_term,
    two_site_term,
)
from adialab.lattice import Volume, local_hamiltonian
from adialab.models import ising_coupling, transverse_field_chain
from adialab.thermo import pressure, pressure_extrapolate


def main():
    # nearest-neighbour sigma^z sigma^z coupling plus a transverse field
    phi = Interaction(
        [two_site_term(PAULI_Z, PAULI_Z), one_site_term(0.5 * PAULI_X)],
        weight_r=1.0,
    )
    print("interaction with two representatives")
    print(f"  weighted norm          {norm_r(phi):.6f}")
    print(f"  energy density pieces  {len(energy_density(phi))}")

    volume = Volume.chain(6)
    h = local_hamiltonian(phi, volume)
    print(f"  chain of {volume.site_count} sites -> Hamiltonian of dim {h.matrix.shape[0]}")

    # classical couplings admit a closed form: p_L = log 2 + (1 - 1/L) log cosh(beta J)
    print("\nfree-boundary pressure of the classical coupling, beta = 1")
    for length in (4, 6, 8, 10):
        got = pressure(ising_coupling(1.0), Volume.chain(length), 1.0)
        want = math.log(2.0) + (1.0 - 1.0 / length) * math.log(math.cosh(1.0))
        print(f"  L = {length:2d}   p_L = {got:.10f}   closed form {want:.10f}")

    fit = pressure_extrapolate(ising_coupling(1.0), [Volume.chain(L) for L in range(4, 13)], 1.0)
    limit = math.log(2.0 * math.cosh(1.0))
    print(f"\nextrapolated bulk pressure {fit.estimate:.10f}")
    print(f"exact thermodynamic limit  {limit:.10f}")
    print(f"difference                 {abs(fit.estimate - limit):.2e}")

    # quantum case: the transverse-field chain has no classical fast path
    q = pressure(transverse_field_chain(1.0, 0.5), Volume.chain(8), 1.0)
    print(f"\ntransverse-field chain, L = 8: pressure {q:.10f}")


if __name__ == "__main__":
    main()
