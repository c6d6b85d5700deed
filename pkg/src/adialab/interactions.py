"""Translation-invariant interactions on a spin lattice and paths of them.

An interaction assigns a self-adjoint matrix to each finite set of sites,
invariantly under lattice translations.  It is stored by one representative
term per translation class, anchored so that the lexicographically minimal
site of the support is the origin.  The full family is regenerated lazily
when a Hamiltonian is assembled on a concrete volume.

Sites are integer tuples; on a chain (d = 1) plain integers are accepted
and normalized to 1-tuples.  Per-site Hilbert space dimension is 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import ValidationError

Site = tuple[int, ...]

SELF_ADJOINT_RTOL = 1e-12

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)

for _m in (PAULI_X, PAULI_Y, PAULI_Z, IDENTITY_2):
    _m.setflags(write=False)


def as_site(site: int | Sequence[int]) -> Site:
    """Normalize a site label to an integer tuple."""
    if isinstance(site, (int, np.integer)):
        return (int(site),)
    out = tuple(int(c) for c in site)
    if not out:
        raise ValidationError("a site needs at least one coordinate")
    return out


def operator_norm(matrix: np.ndarray) -> float:
    """Largest singular value; exact at these matrix sizes."""
    if matrix.size == 0:
        return 0.0
    return float(np.linalg.norm(matrix, 2))


def require_self_adjoint(matrix: np.ndarray, what: str) -> None:
    """Raise unless ``matrix`` is self-adjoint to the package tolerance."""
    scale = operator_norm(matrix)
    drift = operator_norm(matrix - matrix.conj().T)
    if drift > SELF_ADJOINT_RTOL * max(scale, 1.0):
        raise ValidationError(
            f"{what} is not self-adjoint: defect {drift:.3e} at scale {scale:.3e}"
        )


def _sorted_support(
    support: Sequence[Site], matrix: np.ndarray
) -> tuple[tuple[Site, ...], np.ndarray]:
    """Sort the support lexicographically, permuting matrix factors to match."""
    order = sorted(range(len(support)), key=lambda i: support[i])
    if order == list(range(len(support))):
        return tuple(support), matrix
    k = len(support)
    tensor = matrix.reshape((2,) * (2 * k))
    axes = order + [k + i for i in order]
    permuted = tensor.transpose(axes).reshape(matrix.shape)
    return tuple(support[i] for i in order), permuted


@dataclass(frozen=True, eq=False)
class LocalTerm:
    """A self-adjoint matrix acting on a finite ordered set of sites.

    The support is kept sorted lexicographically; the matrix tensor
    factors follow that order, first site = leftmost Kronecker factor.
    """

    support: tuple[Site, ...]
    matrix: np.ndarray

    def __init__(self, support: Iterable[int | Sequence[int]], matrix: np.ndarray):
        sites = [as_site(s) for s in support]
        if not sites:
            raise ValidationError("term support must be non-empty")
        if len(set(sites)) != len(sites):
            raise ValidationError(f"term support has duplicate sites: {sites}")
        dims = {len(s) for s in sites}
        if len(dims) != 1:
            raise ValidationError(f"mixed site dimensionality in support: {sites}")
        mat = np.asarray(matrix, dtype=complex)
        want = 2 ** len(sites)
        if mat.shape != (want, want):
            raise ValidationError(
                f"matrix shape {mat.shape} does not match 2^{len(sites)} sites"
            )
        require_self_adjoint(mat, "local term matrix")
        ordered, mat = _sorted_support(sites, mat)
        mat = np.array(mat, dtype=complex)
        mat.setflags(write=False)
        object.__setattr__(self, "support", ordered)
        object.__setattr__(self, "matrix", mat)

    @property
    def lattice_dimension(self) -> int:
        return len(self.support[0])

    @property
    def size(self) -> int:
        return len(self.support)

    @property
    def span(self) -> int:
        """Largest per-axis extent of the support (0 for one site)."""
        coords = np.array(self.support)
        return int((coords.max(axis=0) - coords.min(axis=0)).max())

    def translated(self, shift: int | Sequence[int]) -> "LocalTerm":
        x = as_site(shift)
        if len(x) != self.lattice_dimension:
            raise ValidationError("shift dimensionality does not match support")
        moved = [tuple(c + d for c, d in zip(s, x)) for s in self.support]
        return LocalTerm(moved, self.matrix)

    def scaled(self, factor: float) -> "LocalTerm":
        return LocalTerm(self.support, float(factor) * self.matrix)


def one_site_term(matrix: np.ndarray, site: int | Sequence[int] = 0) -> LocalTerm:
    """Convenience builder for a single-site term."""
    return LocalTerm([site], matrix)


def two_site_term(
    left: np.ndarray,
    right: np.ndarray,
    sites: tuple[int | Sequence[int], int | Sequence[int]] = (0, 1),
    coupling: float = 1.0,
) -> LocalTerm:
    """Convenience builder for ``coupling * left (x) right`` on two sites."""
    return LocalTerm(list(sites), coupling * np.kron(left, right))


def _merge_terms(terms: Iterable[LocalTerm]) -> tuple[LocalTerm, ...]:
    """Sum terms that share a support, dropping exact zeros."""
    by_support: dict[tuple[Site, ...], np.ndarray] = {}
    for term in terms:
        if term.support in by_support:
            by_support[term.support] = by_support[term.support] + term.matrix
        else:
            by_support[term.support] = term.matrix
    kept = [
        LocalTerm(support, mat)
        for support, mat in by_support.items()
        if np.abs(mat).max() != 0.0
    ]
    kept.sort(key=lambda t: (t.size, t.support))
    return tuple(kept)


@dataclass(frozen=True, eq=False)
class Interaction:
    """Translation-invariant interaction with decay weight ``r``.

    Terms are representatives, one per translation class, re-anchored on
    construction so that the minimal site of each support is the origin.
    """

    terms: tuple[LocalTerm, ...]
    weight_r: float

    def __init__(self, terms: Iterable[LocalTerm], weight_r: float):
        r = float(weight_r)
        if not r > 0.0:
            raise ValidationError(f"weight_r must be positive, got {r}")
        anchored = []
        for term in terms:
            origin = term.support[0]
            anchored.append(term.translated(tuple(-c for c in origin)))
        merged = _merge_terms(anchored)
        dims = {t.lattice_dimension for t in merged}
        if len(dims) > 1:
            raise ValidationError("terms live on lattices of different dimension")
        object.__setattr__(self, "terms", merged)
        object.__setattr__(self, "weight_r", r)

    @property
    def lattice_dimension(self) -> int | None:
        """Lattice dimension, or None for the zero interaction."""
        return self.terms[0].lattice_dimension if self.terms else None

    @property
    def range(self) -> int:
        """Largest per-axis support extent over all terms."""
        return max((t.span for t in self.terms), default=0)

    def scaled(self, factor: float) -> "Interaction":
        return Interaction([t.scaled(factor) for t in self.terms], self.weight_r)


def zero_interaction(weight_r: float = 1.0) -> Interaction:
    return Interaction([], weight_r)


def norm_r(phi: Interaction) -> float:
    """Weighted norm sum_{X containing 0} e^{r(|X|-1)} ||Phi(X)||.

    A representative with support S contributes once per site of S, since
    exactly the |S| translates X = S - s contain the origin, each with the
    same size and matrix norm.
    """
    r = phi.weight_r
    total = 0.0
    for term in phi.terms:
        total += term.size * math.exp(r * (term.size - 1)) * operator_norm(term.matrix)
    return total


def energy_density(phi: Interaction) -> tuple[LocalTerm, ...]:
    """Energy-density observable sum_{X containing 0} |X|^{-1} Phi(X).

    Returned as a finite list of weighted local terms positioned around
    the origin, ready to be embedded into a volume.
    """
    pieces = []
    for term in phi.terms:
        weight = 1.0 / term.size
        for s in term.support:
            pieces.append(term.translated(tuple(-c for c in s)).scaled(weight))
    return _merge_terms(pieces)


def combine(phi0: Interaction, phi1: Interaction, a: float, b: float) -> Interaction:
    """Termwise linear combination a*phi0 + b*phi1."""
    if phi0.weight_r != phi1.weight_r:
        raise ValidationError(
            f"cannot combine interactions with different weights "
            f"{phi0.weight_r} and {phi1.weight_r}"
        )
    terms = [t.scaled(a) for t in phi0.terms] + [t.scaled(b) for t in phi1.terms]
    return Interaction(terms, phi0.weight_r)


def equivalence_residual(phi: Interaction, psi: Interaction, a, volume) -> float:
    """Norm of the difference of the two local derivations applied to ``a``.

    Computes ||i[H(phi), a] - i[H(psi), a]|| on the given volume.  A zero
    value is necessary evidence that the interactions generate the same
    dynamics on this observable.  The observable support plus both
    interaction ranges must fit strictly inside the volume.
    """
    from .lattice import derivation  # deferred: lattice imports this module

    if a.support is None:
        raise ValidationError("equivalence probe needs an observable with support")
    margin = max(phi.range, psi.range)
    for site in a.support:
        for axis, coord in enumerate(site):
            if coord - margin < 0 or coord + margin >= volume.extents[axis]:
                raise ValidationError(
                    "observable support is too close to the boundary for the "
                    f"interaction range {margin}"
                )
    delta = derivation(phi, a, volume).matrix - derivation(psi, a, volume).matrix
    return operator_norm(delta)


class InteractionPath:
    """A continuous map tau -> Interaction on [0, 1], optionally with derivative.

    Three kinds are supported: a constant path, the interpolation
    Psi_tau = phi0 + lam(tau) * (phi1 - phi0) with a scalar profile lam,
    and piecewise-linear interpolation of sampled interactions.
    """

    def __init__(
        self,
        kind: str,
        weight_r: float,
        at_rule: Callable[[float], Interaction],
        derivative_rule: Callable[[float], Interaction] | None,
        describe: str,
        basis: Sequence[Interaction] | None = None,
        coefficients: Callable[[float], Sequence[float]] | None = None,
    ):
        self.kind = kind
        self.weight_r = weight_r
        self._at = at_rule
        self._derivative = derivative_rule
        self.describe = describe
        self._basis = tuple(basis) if basis is not None else None
        self._coefficients = coefficients
        # Serialization metadata, filled in by the structured constructors.
        self.lam_coefficients: tuple[float, ...] | None = None
        self.sample_points: tuple[tuple[float, Interaction], ...] | None = None

    def decomposition(
        self,
    ) -> tuple[tuple[Interaction, ...], Callable[[float], Sequence[float]]] | None:
        """Fixed basis interactions and scalar coefficients c(tau) with
        Psi_tau = sum_i c_i(tau) * basis_i, when the path affords one.

        Integrators use this to pre-assemble one Hamiltonian per basis
        element instead of one per quadrature node.
        """
        if self._basis is None or self._coefficients is None:
            return None
        return self._basis, self._coefficients

    @staticmethod
    def _check_tau(tau: float) -> float:
        t = float(tau)
        if not -1e-9 <= t <= 1.0 + 1e-9:
            raise ValidationError(f"path parameter tau={t} outside [0, 1]")
        return min(max(t, 0.0), 1.0)

    def at(self, tau: float) -> Interaction:
        return self._at(self._check_tau(tau))

    @property
    def has_derivative(self) -> bool:
        return self._derivative is not None

    def derivative_at(self, tau: float) -> Interaction:
        if self._derivative is None:
            raise ValidationError(f"path '{self.describe}' has no derivative rule")
        return self._derivative(self._check_tau(tau))

    @classmethod
    def constant(cls, phi: Interaction) -> "InteractionPath":
        zero = zero_interaction(phi.weight_r)
        return cls(
            "constant", phi.weight_r, lambda tau: phi, lambda tau: zero,
            "constant path", basis=[phi], coefficients=lambda tau: (1.0,),
        )

    @classmethod
    def interpolation(
        cls,
        phi0: Interaction,
        phi1: Interaction,
        lam: Callable[[float], float] | Sequence[float] | None = None,
        lam_dot: Callable[[float], float] | None = None,
    ) -> "InteractionPath":
        """Path phi0 + lam(tau) * (phi1 - phi0).

        ``lam`` may be a callable (then ``lam_dot`` is needed for the
        derivative rule) or polynomial coefficients c0 + c1 t + c2 t^2 ...
        (derivative computed symbolically).  Default is lam(tau) = tau.
        """
        if phi0.weight_r != phi1.weight_r:
            raise ValidationError("path endpoints must share weight_r")
        diff = combine(phi1, phi0, 1.0, -1.0)
        if lam is None:
            lam = (0.0, 1.0)
        if callable(lam):
            lam_fn, dot_fn = lam, lam_dot
            label = "interpolation with callable profile"
        else:
            poly = np.polynomial.Polynomial(list(lam))
            dpoly = poly.deriv()
            lam_fn = lambda t: float(poly(t))  # noqa: E731
            dot_fn = lambda t: float(dpoly(t))  # noqa: E731
            label = f"interpolation with polynomial profile {list(lam)}"

        def at_rule(tau: float) -> Interaction:
            return combine(phi0, diff, 1.0, lam_fn(tau))

        derivative_rule = None
        if dot_fn is not None:
            derivative_rule = lambda tau: diff.scaled(dot_fn(tau))  # noqa: E731
        path = cls(
            "interpolation", phi0.weight_r, at_rule, derivative_rule, label,
            basis=[phi0, diff], coefficients=lambda tau: (1.0, lam_fn(tau)),
        )
        if not callable(lam):
            path.lam_coefficients = tuple(float(c) for c in lam)
        return path

    @classmethod
    def from_samples(
        cls, samples: Sequence[tuple[float, Interaction]]
    ) -> "InteractionPath":
        """Piecewise-linear path through (tau, Interaction) samples.

        The derivative rule defaults to the piecewise slope, evaluated on
        the segment containing tau (right-continuous at the breakpoints).
        """
        pts = sorted(((float(t), phi) for t, phi in samples), key=lambda p: p[0])
        if len(pts) < 2:
            raise ValidationError("a sampled path needs at least two samples")
        if abs(pts[0][0]) > 1e-12 or abs(pts[-1][0] - 1.0) > 1e-12:
            raise ValidationError("sampled paths must cover tau = 0 and tau = 1")
        weights = {phi.weight_r for _, phi in pts}
        if len(weights) != 1:
            raise ValidationError("all samples must share weight_r")
        taus = [t for t, _ in pts]
        if any(b - a <= 1e-12 for a, b in zip(taus, taus[1:])):
            raise ValidationError("sample points must be strictly increasing")

        def segment(tau: float) -> tuple[int, float, float]:
            hi = min(
                max(1, int(np.searchsorted(np.array(taus), tau, side="right"))),
                len(pts) - 1,
            )
            lo = hi - 1
            width = taus[hi] - taus[lo]
            return lo, (tau - taus[lo]) / width, width

        def at_rule(tau: float) -> Interaction:
            lo, w, _ = segment(tau)
            return combine(pts[lo][1], pts[lo + 1][1], 1.0 - w, w)

        def derivative_rule(tau: float) -> Interaction:
            lo, _, width = segment(tau)
            return combine(pts[lo + 1][1], pts[lo][1], 1.0 / width, -1.0 / width)

        def hat_coefficients(tau: float) -> Sequence[float]:
            lo, w, _ = segment(tau)
            out = [0.0] * len(pts)
            out[lo] = 1.0 - w
            out[lo + 1] = w
            return out

        path = cls(
            "samples", pts[0][1].weight_r, at_rule, derivative_rule,
            f"piecewise-linear path through {len(pts)} samples",
            basis=[phi for _, phi in pts], coefficients=hat_coefficients,
        )
        path.sample_points = tuple(pts)
        return path

    def derivative_residual(
        self, probes: Sequence[float] = (0.211, 0.5, 0.877), step: float = 1e-6
    ) -> float:
        """Max norm_r difference between the derivative rule and central FD.

        Probe points must be interior so that tau +/- step stays in [0, 1].
        """
        worst = 0.0
        for tau in probes:
            if not step <= tau <= 1.0 - step:
                raise ValidationError("derivative probes must be interior points")
            fd = combine(
                self.at(tau + step), self.at(tau - step), 0.5 / step, -0.5 / step
            )
            gap = combine(fd, self.derivative_at(tau), 1.0, -1.0)
            worst = max(worst, norm_r(gap))
        return worst


def path_norm_r(psi: InteractionPath, grid: Sequence[float]) -> float:
    """Grid lower bound for sup over tau of norm_r(Psi_tau)."""
    taus = list(grid)
    if not taus:
        raise ValidationError("path norm needs a non-empty tau grid")
    return max(norm_r(psi.at(tau)) for tau in taus)
