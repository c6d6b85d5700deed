"""Gibbs states, entropies, pressure, and the finite-volume identities.

Conventions: natural logarithms everywhere (entropies in nats), inverse
temperature beta defaults to 1, and the relative entropy is
S(nu|omega) = Tr nu (log nu - log omega) >= 0 with S(nu|nu) = 0.

Eigenvalues below 1e-12 are treated as exact zeros before any logarithm
(0 log 0 = 0); a state putting more than 1e-12 overlap mass on that null
space of the reference yields the infinite-relative-entropy outcome
(float inf), not an exception.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import logsumexp

from .errors import ValidationError
from .interactions import Interaction, operator_norm, require_self_adjoint
from .lattice import DenseOperator, Volume, hamiltonian_diagonal, local_hamiltonian

EIGENVALUE_CLAMP = 1e-12
STATE_ATOL = 1e-12


def _as_matrix(op) -> np.ndarray:
    if isinstance(op, DenseOperator):
        return op.matrix
    if isinstance(op, DensityMatrix):
        return op.matrix
    return np.asarray(op, dtype=complex)


class DensityMatrix:
    """A positive unit-trace matrix with a cached eigendecomposition."""

    def __init__(self, matrix, eig: tuple[np.ndarray, np.ndarray] | None = None):
        mat = np.asarray(_as_matrix(matrix), dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValidationError(f"density matrix must be square, got {mat.shape}")
        require_self_adjoint(mat, "density matrix")
        tr = float(np.trace(mat).real)
        if abs(tr - 1.0) > STATE_ATOL:
            raise ValidationError(f"density matrix trace {tr} is not 1")
        self.matrix = mat
        self._eig = eig

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def eig(self) -> tuple[np.ndarray, np.ndarray]:
        """Eigenvalues (ascending) and eigenvectors; validated positive."""
        if self._eig is None:
            vals, vecs = np.linalg.eigh(self.matrix)
            if vals.min() < -STATE_ATOL:
                raise ValidationError(
                    f"density matrix has eigenvalue {vals.min():.3e} below 0"
                )
            self._eig = (vals, vecs)
        return self._eig

    def conjugated(self, unitary: np.ndarray) -> "DensityMatrix":
        """U rho U^dagger, reusing the cached spectrum (it is unchanged)."""
        vals, vecs = self.eig
        rotated = unitary @ vecs
        mat = (rotated * vals) @ rotated.conj().T
        return DensityMatrix(mat, eig=(vals, rotated))


def maximally_mixed(dim: int) -> DensityMatrix:
    return DensityMatrix(np.eye(dim) / dim)


def gibbs(h, beta: float = 1.0) -> tuple[DensityMatrix, float]:
    """Gibbs state e^{-beta H}/Z and log Z, via eigendecomposition.

    log Z uses the max-eigenvalue shift, so large spectra cannot overflow;
    the returned state carries its exact spectrum, including weights far
    below the dense-eigh noise floor.
    """
    if beta <= 0:
        raise ValidationError(f"beta must be positive, got {beta}")
    mat = _as_matrix(h)
    require_self_adjoint(mat, "hamiltonian")
    energies, vecs = np.linalg.eigh(mat)
    log_z = float(logsumexp(-beta * energies))
    probs = np.exp(-beta * energies - log_z)
    order = np.argsort(probs)
    probs, vecs = probs[order], vecs[:, order]
    rho = (vecs * probs) @ vecs.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(rho, eig=(probs, vecs)), log_z


def _plogp(probs: np.ndarray) -> float:
    kept = probs[probs > EIGENVALUE_CLAMP]
    return float(np.sum(kept * np.log(kept)))


def entropy(rho) -> float:
    """Von Neumann entropy -Tr rho log rho in nats."""
    state = rho if isinstance(rho, DensityMatrix) else DensityMatrix(rho)
    vals, _ = state.eig
    return -_plogp(vals)


def relative_entropy(nu, omega) -> float:
    """S(nu|omega) = Tr nu (log nu - log omega); inf on support violation.

    Evaluated in the eigenbases of both states: with overlaps
    O_ij = |<v_i|w_j>|^2 the value is sum_i p_i log p_i -
    sum_ij p_i O_ij log q_j, which needs no matrix logarithm.
    """
    nu = nu if isinstance(nu, DensityMatrix) else DensityMatrix(nu)
    omega = omega if isinstance(omega, DensityMatrix) else DensityMatrix(omega)
    if nu.dim != omega.dim:
        raise ValidationError("states live on different spaces")
    p, v = nu.eig
    q, w = omega.eig
    overlaps = np.abs(v.conj().T @ w) ** 2
    weights = p @ overlaps
    null = q <= EIGENVALUE_CLAMP
    if null.any() and float(weights[null].sum()) > 1e-12:
        return math.inf
    live = ~null
    cross = float(weights[live] @ np.log(q[live]))
    return _plogp(p) - cross


def trace_distance(nu, omega) -> float:
    """Trace norm ||nu - omega||_1 (sum of singular values; 2 max)."""
    diff = _as_matrix(nu) - _as_matrix(omega)
    return float(np.abs(np.linalg.eigvalsh(diff)).sum())


def pinsker_check(nu, omega, slack: float = 1e-12) -> bool:
    """Whether trace_distance^2 <= 2 * relative_entropy holds (with slack)."""
    s = relative_entropy(nu, omega)
    if math.isinf(s):
        return True
    return trace_distance(nu, omega) ** 2 <= 2.0 * s + slack


def pressure(
    phi: Interaction, volume: Volume, beta: float = 1.0, boundary: str = "free"
) -> float:
    """Finite-volume pressure log Tr e^{-beta H} / |volume|.

    Interactions whose terms are all diagonal take an O(2^n) path that
    never builds the dense Hamiltonian.
    """
    if beta <= 0:
        raise ValidationError(f"beta must be positive, got {beta}")
    diag = hamiltonian_diagonal(phi, volume, boundary)
    if diag is not None:
        energies = diag
    else:
        energies = np.linalg.eigvalsh(local_hamiltonian(phi, volume, boundary).matrix)
    return float(logsumexp(-beta * energies)) / volume.site_count


@dataclass(frozen=True)
class PressureFit:
    """Least-squares fit of P_L = P_inf + c / L over a family of volumes."""

    estimate: float
    coefficient: float
    sizes: tuple[int, ...]
    pressures: tuple[float, ...]
    residuals: tuple[float, ...]

    @property
    def rms_residual(self) -> float:
        return float(np.sqrt(np.mean(np.square(self.residuals))))


def pressure_extrapolate(
    phi: Interaction,
    volumes: Sequence[Volume],
    beta: float = 1.0,
    boundary: str = "free",
) -> PressureFit:
    """Extrapolate the per-site pressure to infinite volume with a 1/L fit."""
    if len(volumes) < 3:
        raise ValidationError("extrapolation needs at least three volumes")
    sizes = [v.site_count for v in volumes]
    if len(set(sizes)) != len(sizes) or sorted(sizes) != sizes:
        raise ValidationError("volumes must be strictly increasing in size")
    values = [pressure(phi, v, beta, boundary) for v in volumes]
    design = np.column_stack([np.ones(len(sizes)), 1.0 / np.array(sizes, dtype=float)])
    coeffs, *_ = np.linalg.lstsq(design, np.array(values), rcond=None)
    fitted = design @ coeffs
    residuals = tuple(float(x) for x in (np.array(values) - fitted))
    return PressureFit(
        estimate=float(coeffs[0]),
        coefficient=float(coeffs[1]),
        sizes=tuple(sizes),
        pressures=tuple(float(x) for x in values),
        residuals=residuals,
    )


def weak_gibbs_residual(
    nu, phi: Interaction, volume: Volume, beta: float = 1.0, boundary: str = "free"
) -> float:
    """Residual of the finite-volume identity
    S(nu|omega) = -S(nu) + beta Tr(nu H) + log Z, with omega = gibbs(H, beta).

    The identity is exact algebra at finite volume, so the residual is pure
    numerics and must vanish to 1e-10 for full-rank states.
    """
    nu = nu if isinstance(nu, DensityMatrix) else DensityMatrix(nu)
    h = local_hamiltonian(phi, volume, boundary)
    omega, log_z = gibbs(h, beta)
    lhs = relative_entropy(nu, omega)
    energy = float(np.trace(nu.matrix @ h.matrix).real)
    rhs = -entropy(nu) + beta * energy + log_z
    return lhs - rhs


def _bloch_state(bloch: np.ndarray) -> np.ndarray:
    bx, by, bz = bloch
    return 0.5 * np.array(
        [[1.0 + bz, bx - 1.0j * by], [bx + 1.0j * by, 1.0 - bz]], dtype=complex
    )


def _binary_entropy_from_radius(radius: float) -> float:
    up = 0.5 * (1.0 + radius)
    down = 0.5 * (1.0 - radius)
    total = 0.0
    for p in (up, down):
        if p > EIGENVALUE_CLAMP:
            total -= p * math.log(p)
    return total


@dataclass(frozen=True)
class VariationalResult:
    """Outcome of the product-state scan of the Gibbs variational functional."""

    value: float
    bloch: tuple[float, float, float]
    pressure: float

    @property
    def gap(self) -> float:
        return self.pressure - self.value


def variational_scan(
    phi: Interaction,
    volume: Volume,
    beta: float = 1.0,
    boundary: str = "free",
    radius_steps: int = 6,
    sweeps: int = 80,
) -> VariationalResult:
    """Maximize [S(nu) - beta Tr(nu H)]/|volume| over product states.

    The family is site-wise identical single-qubit states parameterized by
    a Bloch vector, scanned on a coarse grid and refined by coordinate
    ascent.  The result can never exceed the pressure (variational bound).
    """
    from .lattice import _free_placements, _periodic_placements

    if phi.terms and phi.lattice_dimension != volume.lattice_dimension:
        raise ValidationError("interaction and volume lattice dimensions differ")
    counts = []
    for term in phi.terms:
        if boundary == "free":
            n_places = sum(1 for _ in _free_placements(term, volume))
        else:
            n_places = sum(1 for _ in _periodic_placements(term, volume))
        counts.append((term, n_places))

    def functional(bloch: np.ndarray) -> float:
        radius = float(np.linalg.norm(bloch))
        if radius > 1.0:
            return -math.inf
        site = _bloch_state(bloch)
        energy = 0.0
        for term, n_places in counts:
            local = site
            for _ in range(term.size - 1):
                local = np.kron(local, site)
            energy += n_places * float(np.trace(term.matrix @ local).real)
        return _binary_entropy_from_radius(radius) - beta * energy / volume.site_count

    best_val = -math.inf
    best = np.zeros(3)
    radii = np.linspace(0.0, 1.0 - 1e-9, radius_steps)
    directions = [
        np.array(d, dtype=float)
        for d in [
            (0, 0, 1), (0, 0, -1), (0, 1, 0), (0, -1, 0), (1, 0, 0), (-1, 0, 0),
            (1, 1, 1), (1, 1, -1), (1, -1, 1), (-1, 1, 1),
            (-1, -1, 1), (-1, 1, -1), (1, -1, -1), (-1, -1, -1),
        ]
    ]
    for direction in directions:
        unit = direction / np.linalg.norm(direction)
        for radius in radii:
            candidate = radius * unit
            val = functional(candidate)
            if val > best_val:
                best_val, best = val, candidate.copy()

    golden = (math.sqrt(5.0) - 1.0) / 2.0
    for _ in range(sweeps):
        improved = 0.0
        for axis in range(3):
            others = best.copy()
            others[axis] = 0.0
            room = math.sqrt(max(1.0 - 1e-12 - float(others @ others), 0.0))
            lo, hi = -room, room

            def line(x: float, axis=axis, base=others) -> float:
                point = base.copy()
                point[axis] = x
                return functional(point)

            a, b = lo, hi
            c = b - golden * (b - a)
            d = a + golden * (b - a)
            fc, fd = line(c), line(d)
            while b - a > 1e-10:
                if fc >= fd:
                    b, d, fd = d, c, fc
                    c = b - golden * (b - a)
                    fc = line(c)
                else:
                    a, c, fc = c, d, fd
                    d = a + golden * (b - a)
                    fd = line(d)
            x = 0.5 * (a + b)
            val = line(x)
            if val > best_val:
                improved = max(improved, val - best_val)
                best_val = val
                best = others
                best[axis] = x
        if improved < 1e-14:
            break

    p_volume = pressure(phi, volume, beta, boundary)
    return VariationalResult(
        value=float(best_val),
        bloch=(float(best[0]), float(best[1]), float(best[2])),
        pressure=p_volume,
    )


@dataclass(frozen=True)
class ThermoReport:
    """Per-volume equilibrium summary used by the batch front end."""

    sites: int
    beta: float
    boundary: str
    log_partition: float
    pressure: float
    entropy_per_site: float
    energy_per_site: float
    weak_gibbs_residual: float

    CSV_HEADER = (
        "sites,beta,boundary,log_partition,pressure,"
        "entropy_per_site,energy_per_site,weak_gibbs_residual"
    )


def thermo_report(
    phi: Interaction, volume: Volume, beta: float = 1.0, boundary: str = "free"
) -> ThermoReport:
    """Equilibrium summary of the Gibbs state on one volume."""
    h = local_hamiltonian(phi, volume, boundary)
    omega, log_z = gibbs(h, beta)
    residual = weak_gibbs_residual(omega, phi, volume, beta, boundary)
    return ThermoReport(
        sites=volume.site_count,
        beta=beta,
        boundary=boundary,
        log_partition=log_z,
        pressure=log_z / volume.site_count,
        entropy_per_site=entropy(omega) / volume.site_count,
        energy_per_site=float(np.trace(omega.matrix @ h.matrix).real)
        / volume.site_count,
        weak_gibbs_residual=residual,
    )
