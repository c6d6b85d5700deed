"""Experiment drivers: adiabatic scans, entropy balance, factorization
checks, pressure-derivative identities, and entropy comparisons.

Conventions shared by all drivers: the driving parameter tau runs over
[0, 1]; T is the adiabatic time scale; "sup over tau" always means the
maximum over the supplied tau grid (a lower bound to the true supremum);
the instantaneous equilibrium at finite volume is the Gibbs state of the
instantaneous local Hamiltonian, standing in for the infinite-volume
equilibrium states of the underlying theory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import NumericalToleranceError, ValidationError
from .interactions import (
    Interaction,
    InteractionPath,
    energy_density,
    require_self_adjoint,
)
from .lattice import Volume, embed, local_hamiltonian
from .dynamics import (
    IntegratorConfig,
    Propagator,
    frozen_evolve,
    propagate,
    unitarity_drift,
)
from .parallel import ordered_map
from .thermo import (
    DensityMatrix,
    entropy,
    gibbs,
    pressure,
    relative_entropy,
    trace_distance,
)

DEFAULT_TAU_GRID = tuple(np.linspace(0.0, 1.0, 101))

GAP_THRESHOLD = 1e-8


@dataclass(frozen=True, eq=False)
class MatrixModel:
    """A driven finite system H(tau) = H + V(tau) with derivative rule.

    ``band`` selects the tracked spectral band by sorted eigenvalue index
    (an int) or inclusive index range (a pair).  Gapless models must also
    supply ``projection_rule``, an explicit smooth family of spectral
    projections, since tracking through a crossing cannot be inferred.
    """

    h0: np.ndarray
    v: Callable[[float], np.ndarray]
    vdot: Callable[[float], np.ndarray]
    beta: float = 1.0
    band: int | tuple[int, int] = 0
    projection_rule: Callable[[float], np.ndarray] | None = None
    label: str = "model"

    def __post_init__(self):
        h = np.asarray(self.h0, dtype=complex)
        require_self_adjoint(h, "model base hamiltonian")
        object.__setattr__(self, "h0", h)
        if self.beta <= 0:
            raise ValidationError("model beta must be positive")
        for probe in (0.0, 0.37, 1.0):
            require_self_adjoint(np.asarray(self.v(probe)), f"V({probe})")
            require_self_adjoint(np.asarray(self.vdot(probe)), f"Vdot({probe})")

    @property
    def dim(self) -> int:
        return self.h0.shape[0]

    def hamiltonian(self, tau: float) -> np.ndarray:
        return self.h0 + np.asarray(self.v(tau), dtype=complex)

    def band_indices(self) -> list[int]:
        if isinstance(self.band, int):
            return [self.band]
        lo, hi = self.band
        return list(range(lo, hi + 1))


@dataclass(frozen=True)
class ScanRecord:
    """One (T, tau) cell of a many-body scan."""

    T: float
    tau: float
    relative_entropy: float
    trace_distance: float
    pairing_driven: float
    pairing_instant: float
    entropy: float
    entropy_drift: float
    steps: int

    CSV_HEADER = (
        "T,tau,relative_entropy_per_site,trace_distance_per_site,"
        "pairing_driven,pairing_instant,entropy_per_site,entropy_drift,steps"
    )


def _tracked_frames(
    model: MatrixModel, taus: Sequence[float], gap_threshold: float
) -> tuple[list[np.ndarray], float]:
    """Eigenframes of the tracked band continued along tau by max overlap.

    Returns one dim x k isometry per grid point plus the smallest observed
    spectral gap between the band and its complement.
    """
    indices = model.band_indices()
    frames: list[np.ndarray] = []
    min_gap = math.inf
    prev: np.ndarray | None = None
    for tau in taus:
        vals, vecs = np.linalg.eigh(model.hamiltonian(tau))
        if prev is None:
            chosen = list(indices)
        else:
            overlaps = np.abs(prev.conj().T @ vecs) ** 2
            chosen = []
            taken = set()
            for row in range(overlaps.shape[0]):
                order = np.argsort(-overlaps[row])
                pick = next(int(c) for c in order if int(c) not in taken)
                taken.add(pick)
                chosen.append(pick)
        others = [i for i in range(model.dim) if i not in set(chosen)]
        if others:
            band_vals = vals[np.array(chosen)]
            other_vals = vals[np.array(others)]
            gap = float(np.abs(band_vals[:, None] - other_vals[None, :]).min())
            min_gap = min(min_gap, gap)
            if gap < gap_threshold:
                raise NumericalToleranceError(
                    f"gap closed at tau={tau:.4f} (gap {gap:.3e} below "
                    f"{gap_threshold:.0e}); use the gapless scan with an "
                    "explicit projection rule"
                )
        frame = vecs[:, chosen]
        if prev is not None:
            # Fix phases for a continuous frame: rotate each column so its
            # overlap with the previous frame column is positive real.
            for col in range(frame.shape[1]):
                inner = complex(prev[:, col].conj() @ frame[:, col])
                if abs(inner) > 1e-12:
                    frame[:, col] = frame[:, col] * (inner.conjugate() / abs(inner))
        frames.append(frame)
        prev = frame
    return frames, min_gap


def _band_deviation(u: np.ndarray, frame0: np.ndarray, frame_tau: np.ndarray) -> float:
    """||(1 - P(tau)) U P(0)|| with P given by isometry frames."""
    image = u @ frame0
    residue = image - frame_tau @ (frame_tau.conj().T @ image)
    return float(np.linalg.norm(residue, 2))


@dataclass(frozen=True)
class AdiabaticScan:
    """Deviation-versus-T table for a tracked spectral band."""

    points: tuple[tuple[float, float], ...]
    slope: float
    min_gap: float

    CSV_HEADER = "T,deviation,slope,min_gap"


def kato_scan(
    model: MatrixModel,
    T_grid: Sequence[float],
    tau_grid: Sequence[float] | None = None,
    cfg: IntegratorConfig | None = None,
    gap_threshold: float = GAP_THRESHOLD,
) -> AdiabaticScan:
    """Adiabatic deviation d(T) = max_tau ||(1-P(tau)) U_T^{0->tau} P(0)||
    for a gapped tracked band, with the log-log slope of d against T.

    The projection family is continued along the tau grid by maximal
    overlap; a spectral gap below ``gap_threshold`` is refused.
    """
    taus = list(tau_grid) if tau_grid is not None else list(DEFAULT_TAU_GRID)
    T_values = [float(t) for t in T_grid]
    if not T_values or not taus:
        raise ValidationError("kato scan needs non-empty T and tau grids")
    frames, min_gap = _tracked_frames(model, taus, gap_threshold)

    def deviation(T: float) -> float:
        prop = Propagator(model.hamiltonian, None, T, cfg)
        worst = 0.0
        for k, tau in enumerate(taus):
            u = prop.to(tau)
            worst = max(worst, _band_deviation(u, frames[0], frames[k]))
        return worst

    deviations = ordered_map(deviation, T_values)
    points = tuple(zip(T_values, deviations))
    if len(points) >= 2 and all(d > 0 for _, d in points):
        slope = float(
            np.polyfit(np.log(np.array(T_values)), np.log(np.array(deviations)), 1)[0]
        )
    else:
        slope = math.nan
    return AdiabaticScan(points=points, slope=slope, min_gap=min_gap)


def gapless_scan(
    model: MatrixModel,
    T_grid: Sequence[float],
    tau_grid: Sequence[float] | None = None,
    cfg: IntegratorConfig | None = None,
    assert_decrease: bool = True,
) -> AdiabaticScan:
    """Deviation scan for a model shipping its own smooth projection family.

    No rate is asserted; optionally checks the weak trend
    d(T_max) < d(T_min) and raises a tolerance error if it fails.
    """
    if model.projection_rule is None:
        raise ValidationError(
            "gapless scan needs a model with an explicit projection rule"
        )
    taus = list(tau_grid) if tau_grid is not None else list(DEFAULT_TAU_GRID)
    T_values = [float(t) for t in T_grid]
    if not T_values or not taus:
        raise ValidationError("gapless scan needs non-empty T and tau grids")
    projections = []
    for tau in taus:
        p = np.asarray(model.projection_rule(tau), dtype=complex)
        require_self_adjoint(p, f"projection P({tau})")
        if float(np.linalg.norm(p @ p - p, 2)) > 1e-9:
            raise ValidationError(f"supplied P({tau:.4f}) is not a projection")
        projections.append(p)

    def deviation(T: float) -> float:
        prop = Propagator(model.hamiltonian, None, T, cfg)
        worst = 0.0
        for k, tau in enumerate(taus):
            u = prop.to(tau)
            m = (u @ projections[0]) - projections[k] @ (u @ projections[0])
            worst = max(worst, float(np.linalg.norm(m, 2)))
        return worst

    deviations = ordered_map(deviation, T_values)
    points = tuple(zip(T_values, deviations))
    if assert_decrease and points[-1][1] >= points[0][1]:
        raise NumericalToleranceError(
            f"deviation failed to decrease: d({points[0][0]:g}) = "
            f"{points[0][1]:.3e} vs d({points[-1][0]:g}) = {points[-1][1]:.3e}"
        )
    return AdiabaticScan(points=points, slope=math.nan, min_gap=0.0)


@dataclass(frozen=True)
class BalanceCheck:
    """Entropy balance lhs/rhs along the grid and the worst residual."""

    T: float
    taus: tuple[float, ...]
    lhs: tuple[float, ...]
    rhs: tuple[float, ...]

    @property
    def residual(self) -> float:
        return max(abs(a - b) for a, b in zip(self.lhs, self.rhs))

    CSV_HEADER = "T,tau,lhs,rhs,residual"


_BAL_NODES, _BAL_WEIGHTS = np.polynomial.legendre.leggauss(6)


def entropy_balance_check(
    model: MatrixModel,
    T: float,
    tau_grid: Sequence[float] | None = None,
    cfg: IntegratorConfig | None = None,
) -> BalanceCheck:
    """Check S(rho_T(tau) | omega_tau) = beta * integral_0^tau of
    [Tr(rho_T(s) Vdot(s)) - Tr(omega_s Vdot(s))] ds on the tau grid.

    The left side is a relative entropy of the propagated initial Gibbs
    state; the right side is composite Gauss quadrature of the pairing.
    The identity is exact in finite dimension, so the residual measures
    integrator plus quadrature error only.
    """
    taus = sorted(tau_grid) if tau_grid is not None else list(np.linspace(0, 1, 21))
    if not taus or taus[0] < 0 or taus[-1] > 1:
        raise ValidationError("balance check needs a tau grid inside [0, 1]")
    if abs(taus[0]) > 1e-12:
        taus = [0.0] + taus
    cfg = cfg if cfg is not None else IntegratorConfig(tolerance=1e-9)
    beta = model.beta
    omega0, _ = gibbs(model.hamiltonian(taus[0]), beta)
    prop = Propagator(model.hamiltonian, None, T, cfg, anchor=taus[0])

    def pairing(s: float) -> float:
        vdot = np.asarray(model.vdot(s), dtype=complex)
        u = prop.to(s)
        driven = u @ omega0.matrix @ u.conj().T
        inst, _ = gibbs(model.hamiltonian(s), beta)
        return float(np.trace((driven - inst.matrix) @ vdot).real)

    lhs_values = [0.0]
    rhs_values = [0.0]
    running = 0.0
    for lo, hi in zip(taus, taus[1:]):
        half = 0.5 * (hi - lo)
        mid = lo + half
        # Evaluate quadrature nodes in increasing order so the propagator
        # extends its cached frontier monotonically.
        for node, weight in sorted(zip(_BAL_NODES, _BAL_WEIGHTS)):
            running += beta * weight * half * pairing(mid + half * node)
        u = prop.to(hi)
        driven = DensityMatrix(u @ omega0.matrix @ u.conj().T)
        inst, _ = gibbs(model.hamiltonian(hi), beta)
        lhs_values.append(relative_entropy(driven, inst))
        rhs_values.append(running)
    return BalanceCheck(
        T=float(T),
        taus=tuple(taus),
        lhs=tuple(lhs_values),
        rhs=tuple(rhs_values),
    )


@dataclass(frozen=True)
class GammaCheck:
    """Factorization defect and the generator identity residual."""

    T: float
    s: float
    t: float
    defect: float
    identity_residual: float
    gamma_drift: float

    CSV_HEADER = "T,s,t,defect,identity_residual,gamma_drift"


def _twiddle_generator(
    model: MatrixModel, s: float, T: float
) -> Callable[[float], np.ndarray]:
    """Rule t -> H-tilde_t = T integral_s^t of the frozen-evolved Vdot(t).

    Evaluated exactly in the eigenbasis of H(t): entry (j, k) picks up the
    factor (e^{i theta Delta} - 1)/(i Delta) with theta = (t - s) T and
    Delta the eigenvalue difference (theta on the diagonal).
    """

    def rule(t: float) -> np.ndarray:
        theta = (t - s) * T
        energies, vecs = np.linalg.eigh(model.hamiltonian(t))
        m = vecs.conj().T @ np.asarray(model.vdot(t), dtype=complex) @ vecs
        delta = energies[:, None] - energies[None, :]
        small = np.abs(delta) < 1e-12
        safe = np.where(small, 1.0, delta)
        phase = (np.exp(1j * theta * safe) - 1.0) / (1j * safe)
        phase[small] = theta
        twiddle = vecs @ (m * phase) @ vecs.conj().T
        return 0.5 * (twiddle + twiddle.conj().T)

    return rule


def gamma_factorization_check(
    model: MatrixModel,
    T: float,
    s: float = 0.0,
    t: float = 1.0,
    cfg: IntegratorConfig | None = None,
) -> GammaCheck:
    """Verify U_T^{s->t} = e^{-i (t-s) T H(t)} Gamma, with Gamma solving
    i dGamma/dt = -H-tilde_t Gamma from Gamma(s) = 1, and the matrix
    identity i[H(t), H-tilde_t] = e^{i theta H} Vdot e^{-i theta H} - Vdot.
    """
    cfg = cfg if cfg is not None else IntegratorConfig(tolerance=1e-9)
    u_full = propagate(model.hamiltonian, None, T, s, t, cfg)
    twiddle_rule = _twiddle_generator(model, s, T)
    gamma = propagate(lambda u: -twiddle_rule(u), None, 1.0, s, t, cfg)
    theta = (t - s) * T
    frozen = frozen_evolve(model.hamiltonian(t), theta)
    defect = float(np.linalg.norm(u_full - frozen @ gamma, 2))

    h_t = model.hamiltonian(t)
    twiddle = twiddle_rule(t)
    lhs = 1j * (h_t @ twiddle - twiddle @ h_t)
    vdot = np.asarray(model.vdot(t), dtype=complex)
    rhs = frozen.conj().T @ vdot @ frozen - vdot
    identity_residual = float(np.linalg.norm(lhs - rhs, 2))
    return GammaCheck(
        T=float(T),
        s=float(s),
        t=float(t),
        defect=defect,
        identity_residual=identity_residual,
        gamma_drift=unitarity_drift(gamma),
    )


@dataclass(frozen=True)
class IsothermalRow:
    """Sup-over-tau diagnostics of one T in the equivalence scan."""

    T: float
    sup_trace_distance: float
    sup_relative_entropy: float
    sup_pairing_defect: float

    CSV_HEADER = "T,sup_trace_distance,sup_relative_entropy,sup_pairing_defect"

    @property
    def pinsker_ok(self) -> bool:
        return self.sup_trace_distance**2 <= 2.0 * self.sup_relative_entropy + 1e-12


def isothermal_equivalence_scan(
    model: MatrixModel,
    T_grid: Sequence[float],
    tau_grid: Sequence[float] | None = None,
    cfg: IntegratorConfig | None = None,
) -> list[IsothermalRow]:
    """Per T: sup-tau trace distance, relative entropy, and pairing defect
    between the driven state and the instantaneous Gibbs state.

    The three diagnostics vanish together in the isothermal regime; each
    row also satisfies the Pinsker ordering by construction.
    """
    taus = list(tau_grid) if tau_grid is not None else list(np.linspace(0, 1, 41))
    T_values = [float(t) for t in T_grid]
    if not T_values or not taus:
        raise ValidationError("isothermal scan needs non-empty grids")
    beta = model.beta
    omega0, _ = gibbs(model.hamiltonian(taus[0]), beta)
    instants = [gibbs(model.hamiltonian(tau), beta)[0] for tau in taus]
    vdots = [np.asarray(model.vdot(tau), dtype=complex) for tau in taus]

    def row(T: float) -> IsothermalRow:
        prop = Propagator(model.hamiltonian, None, T, cfg, anchor=taus[0])
        sup_td = sup_re = sup_pair = 0.0
        for k, tau in enumerate(taus):
            u = prop.to(tau)
            driven = DensityMatrix(u @ omega0.matrix @ u.conj().T)
            sup_td = max(sup_td, trace_distance(driven, instants[k]))
            sup_re = max(sup_re, relative_entropy(driven, instants[k]))
            pair = np.trace((driven.matrix - instants[k].matrix) @ vdots[k]).real
            sup_pair = max(sup_pair, abs(float(pair)))
        return IsothermalRow(
            T=T,
            sup_trace_distance=sup_td,
            sup_relative_entropy=sup_re,
            sup_pairing_defect=sup_pair,
        )

    return ordered_map(row, T_values)


def _bulk_energy_derivative(
    path: InteractionPath, volume: Volume, tau: float
) -> np.ndarray:
    """Embedded, bulk-averaged energy-density observable of the derivative
    interaction at tau; placements keep a full interaction-range margin."""
    derivative = path.derivative_at(tau)
    terms = energy_density(derivative)
    margin = path.at(tau).range
    placements = volume.interior(margin)
    if not placements:
        raise ValidationError(
            f"volume too small for a bulk pairing observable with margin {margin}"
        )
    total = np.zeros((volume.dim, volume.dim), dtype=complex)
    for site in placements:
        for term in terms:
            total += embed(term, site, volume).matrix
    return total / len(placements)


def many_body_scan(
    path: InteractionPath,
    volume: Volume,
    T_grid: Sequence[float],
    tau_grid: Sequence[float] | None = None,
    beta: float = 1.0,
    cfg: IntegratorConfig | None = None,
    boundary: str = "free",
) -> list[ScanRecord]:
    """Drive the initial Gibbs state along the path and compare it per
    (T, tau) cell against the instantaneous Gibbs state.

    Records per-site relative entropy and trace distance, the driven and
    instantaneous expectations of the bulk-averaged energy-density
    derivative, and the driven state's per-site entropy together with its
    drift from tau = 0 (which unitarity pins to zero).
    """
    taus = list(tau_grid) if tau_grid is not None else list(np.linspace(0, 1, 21))
    T_values = [float(t) for t in T_grid]
    if not T_values or not taus:
        raise ValidationError("many-body scan needs non-empty grids")
    sites = volume.site_count
    h0 = local_hamiltonian(path.at(taus[0]), volume, boundary)
    nu0, _ = gibbs(h0, beta)
    instants = []
    pair_obs = []
    for tau in taus:
        instants.append(gibbs(local_hamiltonian(path.at(tau), volume, boundary), beta)[0])
        pair_obs.append(
            _bulk_energy_derivative(path, volume, tau) if path.has_derivative else None
        )

    def cells(T: float) -> list[ScanRecord]:
        prop = Propagator(path, volume, T, cfg, boundary, anchor=taus[0])
        base_entropy: float | None = None
        records = []
        for k, tau in enumerate(taus):
            u = prop.to(tau)
            driven = DensityMatrix(u @ nu0.matrix @ u.conj().T)
            s_global = entropy(driven)
            if base_entropy is None:
                base_entropy = s_global
            obs = pair_obs[k]
            pair_driven = (
                float(np.trace(driven.matrix @ obs).real) if obs is not None else math.nan
            )
            pair_inst = (
                float(np.trace(instants[k].matrix @ obs).real)
                if obs is not None
                else math.nan
            )
            records.append(
                ScanRecord(
                    T=T,
                    tau=float(tau),
                    relative_entropy=relative_entropy(driven, instants[k]) / sites,
                    trace_distance=trace_distance(driven, instants[k]) / sites,
                    pairing_driven=pair_driven,
                    pairing_instant=pair_inst,
                    entropy=s_global / sites,
                    entropy_drift=abs(s_global - base_entropy),
                    steps=prop.steps_taken,
                )
            )
        return records

    nested = ordered_map(cells, T_values)
    return [record for batch in nested for record in batch]


@dataclass(frozen=True)
class PressureDerivativeCheck:
    """Finite-difference pressure slope against the Gibbs pairing."""

    taus: tuple[float, ...]
    fd_slope: tuple[float, ...]
    expectation: tuple[float, ...]
    step: float
    refined: bool

    @property
    def residuals(self) -> tuple[float, ...]:
        return tuple(abs(a - b) for a, b in zip(self.fd_slope, self.expectation))

    @property
    def max_residual(self) -> float:
        return max(self.residuals)

    CSV_HEADER = "tau,fd_slope,expectation,residual"


def pressure_derivative_check(
    path: InteractionPath,
    volume: Volume,
    tau_grid: Sequence[float] | None = None,
    step: float = 1e-4,
    beta: float = 1.0,
    boundary: str = "free",
    tolerance: float = 1e-6,
) -> PressureDerivativeCheck:
    """Check d/dtau P(Psi_tau) = -beta Tr(omega_tau H(dPsi_tau)) / |volume|
    by central differences of the pressure; refines the step once if the
    first pass misses the tolerance.
    """
    if not path.has_derivative:
        raise ValidationError("pressure derivative check needs a C1 path")
    taus = list(tau_grid) if tau_grid is not None else list(np.linspace(0.05, 0.95, 19))

    def evaluate(h: float) -> tuple[list[float], list[float], list[float]]:
        kept, fd, expectation = [], [], []
        for tau in taus:
            if tau < h or tau > 1.0 - h:
                continue
            kept.append(float(tau))
            up = pressure(path.at(tau + h), volume, beta, boundary)
            down = pressure(path.at(tau - h), volume, beta, boundary)
            fd.append((up - down) / (2.0 * h))
            omega, _ = gibbs(local_hamiltonian(path.at(tau), volume, boundary), beta)
            dh = local_hamiltonian(path.derivative_at(tau), volume, boundary)
            expectation.append(
                -beta * float(np.trace(omega.matrix @ dh.matrix).real)
                / volume.site_count
            )
        if not kept:
            raise ValidationError("no tau grid point admits the requested FD step")
        return kept, fd, expectation

    kept, fd, expectation = evaluate(step)
    refined = False
    worst = max(abs(a - b) for a, b in zip(fd, expectation))
    if worst > tolerance:
        refined = True
        step = 0.5 * step
        kept, fd, expectation = evaluate(step)
    return PressureDerivativeCheck(
        taus=tuple(kept),
        fd_slope=tuple(fd),
        expectation=tuple(expectation),
        step=step,
        refined=refined,
    )


@dataclass(frozen=True)
class DichotomyRow:
    kind: str
    horizon: float
    entropy_per_site: float

    CSV_HEADER = "kind,horizon,entropy_per_site"


@dataclass(frozen=True)
class DichotomyReport:
    """Per-site entropies of the initial state, its finite-horizon Cesaro
    averages, the dephased (infinite-horizon) state, and the driven
    endpoint, whose entropy is exactly conserved."""

    rows: tuple[DichotomyRow, ...]

    @property
    def entropy_nondecreasing(self) -> bool:
        base = self.rows[0].entropy_per_site
        return all(r.entropy_per_site >= base - 1e-12 for r in self.rows)


def entropy_dichotomy_report(
    nu0: DensityMatrix,
    phi1: Interaction,
    volume: Volume,
    horizons: Sequence[float],
    boundary: str = "free",
) -> DichotomyReport:
    """Compare the conserved driven entropy with Cesaro-averaged entropies.

    Averaged states are computed exactly in the eigenbasis of H(phi1):
    the off-diagonal entry (j, k) of the average over [0, T] picks up the
    factor (1 - e^{-i T Delta})/(i T Delta).  Averaging is doubly
    stochastic, so these entropies can only exceed the initial one.
    """
    h = local_hamiltonian(phi1, volume, boundary).matrix
    energies, vecs = np.linalg.eigh(h)
    w = vecs.conj().T @ nu0.matrix @ vecs
    delta = energies[:, None] - energies[None, :]
    sites = volume.site_count
    rows = [DichotomyRow("initial", 0.0, entropy(nu0) / sites)]
    for horizon in horizons:
        if horizon <= 0:
            raise ValidationError("cesaro horizons must be positive")
        small = np.abs(delta * horizon) < 1e-12
        safe = np.where(small, 1.0, delta)
        mult = (1.0 - np.exp(-1j * horizon * safe)) / (1j * horizon * safe)
        mult[small] = 1.0
        averaged = vecs @ (w * mult) @ vecs.conj().T
        averaged = 0.5 * (averaged + averaged.conj().T)
        rows.append(
            DichotomyRow("cesaro", float(horizon), entropy(DensityMatrix(averaged)) / sites)
        )
    dephased = np.where(np.abs(delta) < 1e-10, w, 0.0)
    rows.append(
        DichotomyRow(
            "dephased",
            math.inf,
            entropy(DensityMatrix(vecs @ dephased @ vecs.conj().T)) / sites,
        )
    )
    rows.append(DichotomyRow("driven", math.inf, entropy(nu0) / sites))
    return DichotomyReport(rows=tuple(rows))
