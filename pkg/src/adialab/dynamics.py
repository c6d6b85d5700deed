"""Unitary propagators for frozen and time-dependent generators.

All propagators are Schroedinger-picture unitaries U with
i dU/dtau = T H(tau) U; Heisenberg images are adjoint conjugations
A -> U^dagger A U.  The driving parameter tau lives in [0, 1] and T is
the adiabatic time scale, so the instantaneous generator is T * H(tau).

The default integrator is a fourth-order commutator-free exponential
scheme (two Gauss nodes per step, two exponentials); a midpoint
exponential rule of order two is available for cross-checks.  Fixed step
counts default to N = ceil(10 * T * max||H|| * |tau - sigma|); adaptive
mode keeps halving the step until successive refinements agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import NumericalToleranceError, ValidationError
from .interactions import (
    Interaction,
    InteractionPath,
    LocalTerm,
    norm_r,
    operator_norm,
    path_norm_r,
)
from .lattice import DenseOperator, Volume, derivation, embed, local_hamiltonian

SCHEMES = ("cf4", "midpoint")

# Gauss-Legendre nodes on [0, 1] and the commutator-free order-4 weights.
_CF4_C1 = 0.5 - math.sqrt(3.0) / 6.0
_CF4_C2 = 0.5 + math.sqrt(3.0) / 6.0
_CF4_F1 = (3.0 - 2.0 * math.sqrt(3.0)) / 12.0
_CF4_F2 = (3.0 + 2.0 * math.sqrt(3.0)) / 12.0

UNITARITY_TOL = 1e-9


@dataclass(frozen=True)
class IntegratorConfig:
    """Scheme and step control for non-autonomous propagation.

    ``steps`` fixes the count per propagation call; ``tolerance`` switches
    to adaptive mode, which doubles the count until two refinements agree
    to the tolerance or ``max_steps`` is exhausted.
    """

    scheme: str = "cf4"
    steps: int | None = None
    tolerance: float | None = None
    max_steps: int = 1 << 20

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValidationError(f"unknown integrator scheme '{self.scheme}'")
        if self.steps is not None and self.steps < 1:
            raise ValidationError("step count must be at least 1")
        if self.tolerance is not None and not self.tolerance > 0:
            raise ValidationError("integrator tolerance must be positive")
        if self.max_steps < 1:
            raise ValidationError("max_steps must be at least 1")


def unitary_exp(hermitian: np.ndarray, factor: float = 1.0) -> np.ndarray:
    """exp(-1j * factor * hermitian) through the eigendecomposition."""
    vals, vecs = np.linalg.eigh(hermitian)
    phases = np.exp(-1j * factor * vals)
    return (vecs * phases) @ vecs.conj().T


def unitarity_drift(u: np.ndarray) -> float:
    """Frobenius norm of U^dagger U - I."""
    return float(np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0])))


def polar_project(u: np.ndarray) -> np.ndarray:
    """Nearest unitary in Frobenius distance (polar factor via SVD)."""
    w, _, vh = np.linalg.svd(u)
    return w @ vh


def frozen_evolve(h, t: float) -> np.ndarray:
    """Autonomous unitary e^{-itH}."""
    mat = h.matrix if isinstance(h, DenseOperator) else np.asarray(h, dtype=complex)
    return unitary_exp(mat, float(t))


GeneratorRule = Callable[[float], np.ndarray]


def _generator_rule(path, volume: Volume | None, boundary: str) -> GeneratorRule:
    """Turn a path or matrix rule into a callable tau -> dense H(tau)."""
    if isinstance(path, InteractionPath):
        if volume is None:
            raise ValidationError("an interaction path needs a volume")
        decomposition = path.decomposition()
        if decomposition is not None:
            basis, coeffs = decomposition
            mats = [local_hamiltonian(phi, volume, boundary).matrix for phi in basis]

            def rule(tau: float) -> np.ndarray:
                cs = coeffs(tau)
                total = cs[0] * mats[0]
                for c, m in zip(cs[1:], mats[1:]):
                    if c != 0.0:
                        total = total + c * m
                return total

            return rule
        return lambda tau: local_hamiltonian(path.at(tau), volume, boundary).matrix
    if callable(path):
        return lambda tau: np.asarray(path(tau), dtype=complex)
    raise ValidationError("path must be an InteractionPath or a matrix rule")


def _norm_estimate(rule: GeneratorRule, lo: float, hi: float, probes: int = 9) -> float:
    worst = 0.0
    for tau in np.linspace(lo, hi, probes):
        worst = max(worst, float(np.abs(np.linalg.eigvalsh(rule(tau))).max()))
    return worst


def default_step_count(T: float, norm_max: float, span: float) -> int:
    """N = ceil(10 * T * max||H|| * span), at least 1."""
    return max(1, math.ceil(10.0 * T * norm_max * abs(span)))


def _run_steps(
    rule: GeneratorRule, T: float, a: float, b: float, n: int, scheme: str
) -> np.ndarray:
    h = (b - a) / n
    u = None
    for k in range(n):
        t0 = a + k * h
        if scheme == "midpoint":
            step = unitary_exp(rule(t0 + 0.5 * h), T * h)
        else:
            h1 = rule(t0 + _CF4_C1 * h)
            h2 = rule(t0 + _CF4_C2 * h)
            step = unitary_exp(
                _CF4_F1 * h1 + _CF4_F2 * h2, T * h
            ) @ unitary_exp(_CF4_F2 * h1 + _CF4_F1 * h2, T * h)
        u = step if u is None else step @ u
    return u


def _segment_unitary(
    rule: GeneratorRule,
    T: float,
    a: float,
    b: float,
    cfg: IntegratorConfig,
    norm_hint: float | None,
) -> tuple[np.ndarray, int]:
    """Unitary for one segment plus the accepted step count."""
    if a == b or T == 0.0:
        dim = rule(a).shape[0]
        return np.eye(dim, dtype=complex), 0
    if cfg.steps is not None:
        n = cfg.steps
    else:
        norm_max = norm_hint if norm_hint is not None else _norm_estimate(rule, a, b)
        n = default_step_count(T, norm_max, b - a)
    if cfg.tolerance is None:
        return _run_steps(rule, T, a, b, n, cfg.scheme), n
    u = _run_steps(rule, T, a, b, n, cfg.scheme)
    while True:
        if 2 * n > cfg.max_steps:
            raise NumericalToleranceError(
                f"step budget exhausted: {2 * n} steps exceed max_steps "
                f"{cfg.max_steps} before reaching tolerance {cfg.tolerance}"
            )
        finer = _run_steps(rule, T, a, b, 2 * n, cfg.scheme)
        if operator_norm(finer - u) <= cfg.tolerance:
            return finer, 2 * n
        u, n = finer, 2 * n


class Propagator:
    """Two-parameter family of unitaries for one rescaled generator.

    Caches U^{anchor -> tau} on demand; entries are write-once, and every
    cached unitary is polar-projected if its unitarity drift exceeds
    1e-12, so conjugation by a cached unitary preserves spectra.
    """

    def __init__(
        self,
        path,
        volume: Volume | None,
        T: float,
        cfg: IntegratorConfig | None = None,
        boundary: str = "free",
        anchor: float = 0.0,
    ):
        if T < 0:
            raise ValidationError(f"adiabatic time T must be >= 0, got {T}")
        self.rule = _generator_rule(path, volume, boundary)
        self.T = float(T)
        self.cfg = cfg if cfg is not None else IntegratorConfig()
        self.anchor = float(anchor)
        self.steps_taken = 0
        dim = self.rule(self.anchor).shape[0]
        self._cache: dict[float, np.ndarray] = {self.anchor: np.eye(dim, dtype=complex)}
        self._frontier = self.anchor
        self._norm_hint: float | None = None

    def _ensure_norm_hint(self, lo: float, hi: float) -> float:
        if self._norm_hint is None:
            self._norm_hint = _norm_estimate(self.rule, min(lo, 0.0), max(hi, 1.0))
        return self._norm_hint

    def to(self, tau: float) -> np.ndarray:
        """U^{anchor -> tau}, continuing from the furthest cached point."""
        tau = float(tau)
        if tau in self._cache:
            return self._cache[tau]
        hint = self._ensure_norm_hint(self.anchor, tau)
        # Continue from the cached frontier when moving monotonically,
        # otherwise integrate the missing span from the nearest anchor side.
        start = self._frontier if (tau - self._frontier) * (
            self._frontier - self.anchor
        ) >= 0 else self.anchor
        segment, n_steps = _segment_unitary(self.rule, self.T, start, tau, self.cfg, hint)
        self.steps_taken += n_steps
        u = segment @ self._cache[start]
        if unitarity_drift(u) > 1e-12:
            u = polar_project(u)
        self._cache[tau] = u
        if abs(tau - self.anchor) > abs(self._frontier - self.anchor):
            self._frontier = tau
        return u

    def between(self, sigma: float, tau: float) -> np.ndarray:
        """U^{sigma -> tau} = U^{anchor -> tau} (U^{anchor -> sigma})^dagger."""
        return self.to(tau) @ self.to(sigma).conj().T


def propagate(
    path,
    volume: Volume | None,
    T: float,
    sigma: float,
    tau: float,
    cfg: IntegratorConfig | None = None,
    boundary: str = "free",
) -> np.ndarray:
    """Unitary solving i dU/ds = T H(s) U from sigma to tau, U(sigma) = I."""
    if T < 0:
        raise ValidationError(f"adiabatic time T must be >= 0, got {T}")
    rule = _generator_rule(path, volume, boundary)
    cfg = cfg if cfg is not None else IntegratorConfig()
    u, _ = _segment_unitary(rule, float(T), float(sigma), float(tau), cfg, None)
    drift = unitarity_drift(u)
    if drift > 1e-12:
        u = polar_project(u)
    if unitarity_drift(u) > UNITARITY_TOL:
        raise NumericalToleranceError(
            f"propagator lost unitarity beyond repair (drift {drift:.3e})"
        )
    return u


def propagate_grid(
    path,
    volume: Volume | None,
    T: float,
    taus: Sequence[float],
    cfg: IntegratorConfig | None = None,
    boundary: str = "free",
) -> list[np.ndarray]:
    """Cumulative unitaries U^{taus[0] -> tau_k} along a monotone grid."""
    taus = [float(t) for t in taus]
    if len(taus) < 1:
        raise ValidationError("propagation grid must be non-empty")
    prop = Propagator(path, volume, T, cfg, boundary, anchor=taus[0])
    return [prop.to(t) for t in taus]


def trotter_product(
    path,
    volume: Volume | None,
    T: float,
    sigma: float,
    tau: float,
    n_steps: int,
    boundary: str = "free",
) -> np.ndarray:
    """Product of frozen evolutions over the left-endpoint grid.

    With xi = (tau - sigma)/N and upsilon_k = sigma + k xi, the factor for
    upsilon_0 acts first: U = e^{-i xi T H(ups_{N-1})} ... e^{-i xi T H(ups_0)}.
    """
    if n_steps < 1:
        raise ValidationError("trotter_product needs at least one step")
    rule = _generator_rule(path, volume, boundary)
    xi = (float(tau) - float(sigma)) / n_steps
    dim = rule(sigma).shape[0]
    u = np.eye(dim, dtype=complex)
    for k in range(n_steps):
        u = unitary_exp(rule(sigma + k * xi), T * xi) @ u
    return u


_GAUSS8_NODES, _GAUSS8_WEIGHTS = np.polynomial.legendre.leggauss(8)

DYSON_MAX_ORDER = 6


def dyson_radius(path, grid: Sequence[float] | None = None) -> float:
    """Convergence radius r / (2 ||Phi||_r) of the iterated-integral series."""
    if isinstance(path, InteractionPath):
        taus = grid if grid is not None else np.linspace(0.0, 1.0, 21)
        total = path_norm_r(path, taus)
        r = path.weight_r
    elif isinstance(path, Interaction):
        total = norm_r(path)
        r = path.weight_r
    else:
        raise ValidationError("dyson series needs an Interaction or a path")
    if total == 0.0:
        return math.inf
    return r / (2.0 * total)


def dyson_partial_sum(
    path,
    volume: Volume,
    sigma: float,
    tau: float,
    order: int,
    a,
    boundary: str = "free",
) -> np.ndarray:
    """Partial sum of the Heisenberg Dyson series for alpha^{sigma->tau}(a).

    Term m is the iterated integral over the ordered simplex
    sigma <= u_1 <= ... <= u_m <= tau of delta_{u_1}(...delta_{u_m}(a)),
    with the later-time derivation applied to ``a`` first, evaluated by a
    per-level 8-point Gauss rule (cost 8^order).  Orders above 6 and spans
    at or beyond the convergence radius are refused.
    """
    if order < 0:
        raise ValidationError("dyson order must be >= 0")
    if order > DYSON_MAX_ORDER:
        raise ValidationError(
            f"dyson order {order} refused: cost grows as 8^n, ceiling is "
            f"{DYSON_MAX_ORDER}"
        )
    radius = dyson_radius(path)
    span = abs(float(tau) - float(sigma))
    if span >= radius:
        raise ValidationError(
            f"span {span:.4g} is outside the series convergence radius "
            f"{radius:.4g} = r / (2 ||Phi||_r)"
        )
    if isinstance(path, Interaction):
        path = InteractionPath.constant(path)
    rule = _generator_rule(path, volume, boundary)
    a_mat = a.matrix if isinstance(a, DenseOperator) else np.asarray(a, dtype=complex)

    def delta(t: float, m: np.ndarray) -> np.ndarray:
        h = rule(t)
        return 1j * (h @ m - m @ h)

    def level(k: int, lo: float) -> np.ndarray:
        # J_k(lo) = integral_lo^tau delta_u(J_{k-1}(u)) du, J_0 = a.
        if k == 0:
            return a_mat
        half = 0.5 * (float(tau) - lo)
        mid = lo + half
        out = np.zeros_like(a_mat)
        for node, weight in zip(_GAUSS8_NODES, _GAUSS8_WEIGHTS):
            u = mid + half * node
            out = out + (weight * half) * delta(u, level(k - 1, u))
        return out

    total = a_mat.copy()
    for m in range(1, order + 1):
        total = total + level(m, float(sigma))
    return total


@dataclass(frozen=True)
class BoundCheck:
    """Measured iterated-derivation norm against its a-priori bound."""

    measured: float
    bound: float
    order: int
    volume_sites: int

    @property
    def ok(self) -> bool:
        return self.measured <= self.bound * (1.0 + 1e-12) + 1e-300


def derivation_bound_check(
    phi,
    a: LocalTerm,
    order: int,
    samples: int = 3,
    seed: int = 0,
    max_sites: int = 12,
) -> BoundCheck:
    """Check ||delta_{tau_1} ... delta_{tau_n}(a)|| against
    ||a|| e^{r |supp a|} (2 ||Phi||_r / r)^n n!.

    The sums are evaluated in support-touching mode inside an auto-sized
    volume with an n * range margin around supp(a), so no translate that
    should contribute is cut off by a boundary.  For a time-dependent path
    the supremum is sampled over random tau tuples.
    """
    if not 0 <= order <= 4:
        raise ValidationError("derivation bound check supports orders 0..4")
    if isinstance(phi, InteractionPath):
        is_path = True
        weight = phi.weight_r
        grid = np.linspace(0.0, 1.0, 21)
        total_norm = path_norm_r(phi, grid)
        reach = max(phi.at(float(t)).range for t in grid)
    elif isinstance(phi, Interaction):
        is_path = False
        weight = phi.weight_r
        total_norm = norm_r(phi)
        reach = phi.range
    else:
        raise ValidationError("bound check needs an Interaction or a path")
    coords = np.array(a.support)
    lo = coords.min(axis=0)
    hi = coords.max(axis=0)
    pad = order * reach
    extents = tuple(int(h - l + 1 + 2 * pad) for l, h in zip(lo, hi))
    volume = Volume(extents, max_sites=max_sites)
    shift = tuple(int(pad - l) for l in lo)
    seed_op = embed(a.translated(shift), (0,) * len(shift), volume)

    a_norm = operator_norm(a.matrix)
    bound = (
        a_norm
        * math.exp(weight * a.size)
        * (2.0 * total_norm / weight) ** order
        * math.factorial(order)
    )

    rng = np.random.default_rng(seed)
    tuples = rng.uniform(0.0, 1.0, size=(samples if is_path else 1, order))
    measured = 0.0
    for taus in tuples:
        op = seed_op
        for t in taus:
            inst = phi.at(float(t)) if is_path else phi
            op = derivation(inst, op, volume, mode="support-touching")
        measured = max(measured, operator_norm(op.matrix))
    return BoundCheck(
        measured=measured, bound=bound, order=order, volume_sites=volume.site_count
    )


def cesaro_average(omega, h, a, horizon: float, samples: int = 64) -> float:
    """Quadrature estimate of (1/T) integral_0^T Tr(omega e^{itH} a e^{-itH}) dt.

    Evaluated in the eigenbasis of H, where the integrand is a finite sum
    of phases; the quadrature is Gauss-Legendre with ``samples`` nodes.
    """
    if horizon <= 0:
        raise ValidationError("cesaro horizon must be positive")
    if samples < 1:
        raise ValidationError("cesaro quadrature needs at least one sample")
    coeff, gaps = _phase_decomposition(omega, h, a)
    nodes, weights = np.polynomial.legendre.leggauss(samples)
    times = 0.5 * horizon * (nodes + 1.0)
    total = 0.0
    for t, w in zip(times, weights):
        total += w * float((coeff * np.exp(1j * t * gaps)).sum().real)
    return 0.5 * total


def dephasing_average(omega, h, a, degeneracy_tol: float = 1e-10) -> float:
    """Exact infinite-horizon limit sum_k Tr(P_k omega P_k a) over spectral
    projections P_k of H (eigenvalues grouped within degeneracy_tol)."""
    coeff, gaps = _phase_decomposition(omega, h, a)
    keep = np.abs(gaps) <= degeneracy_tol
    return float(coeff[keep].sum().real)


def _phase_decomposition(omega, h, a) -> tuple[np.ndarray, np.ndarray]:
    from .thermo import DensityMatrix

    h_mat = h.matrix if isinstance(h, DenseOperator) else np.asarray(h, dtype=complex)
    o_mat = omega.matrix if isinstance(omega, DensityMatrix) else np.asarray(omega, dtype=complex)
    a_mat = a.matrix if isinstance(a, DenseOperator) else np.asarray(a, dtype=complex)
    energies, vecs = np.linalg.eigh(h_mat)
    w = vecs.conj().T @ o_mat @ vecs
    b = vecs.conj().T @ a_mat @ vecs
    coeff = w * b.T
    gaps = energies[None, :] - energies[:, None]
    return coeff.reshape(-1), gaps.reshape(-1)
