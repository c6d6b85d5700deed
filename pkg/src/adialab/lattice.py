"""Finite volumes and the embedding of local terms into dense matrices.

A volume is a finite box of lattice sites with a fixed tensor-factor
layout: sites are ordered lexicographically by coordinates, and the first
site is the leftmost (most significant) Kronecker factor.  With that
convention ``sigma_z`` embedded at site 0 of a 2-site chain is
diag(1, 1, -1, -1) and at site 1 it is diag(1, -1, 1, -1).

Everything is dense; a configurable site ceiling (default 12, dimension
4096) guards against accidental exponential blowups.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ResourceLimitError, ValidationError
from .interactions import Interaction, LocalTerm, Site, as_site

DEFAULT_SITE_CEILING = 12

BOUNDARY_KINDS = ("free", "periodic")


@dataclass(frozen=True, eq=False)
class Volume:
    """A finite box of spin-1/2 sites with documented tensor ordering."""

    extents: tuple[int, ...]
    sites: tuple[Site, ...]

    def __init__(self, extents: int | Sequence[int], max_sites: int = DEFAULT_SITE_CEILING):
        ext = (int(extents),) if isinstance(extents, (int, np.integer)) else tuple(
            int(e) for e in extents
        )
        if not ext or any(e < 1 for e in ext):
            raise ValidationError(f"volume extents must be positive, got {ext}")
        count = int(np.prod(ext))
        if count > max_sites:
            raise ResourceLimitError(
                f"volume with {count} sites exceeds the dense ceiling of "
                f"{max_sites}; pass max_sites to override"
            )
        sites = tuple(itertools.product(*(range(e) for e in ext)))
        object.__setattr__(self, "extents", ext)
        object.__setattr__(self, "sites", sites)

    @classmethod
    def chain(cls, length: int, max_sites: int = DEFAULT_SITE_CEILING) -> "Volume":
        return cls((length,), max_sites=max_sites)

    @property
    def lattice_dimension(self) -> int:
        return len(self.extents)

    @property
    def site_count(self) -> int:
        return len(self.sites)

    @property
    def dim(self) -> int:
        return 2 ** self.site_count

    def index(self, site: Site) -> int:
        return self.sites.index(site)

    def contains(self, site: Site) -> bool:
        return all(0 <= c < e for c, e in zip(site, self.extents))

    def interior(self, margin: int) -> tuple[Site, ...]:
        """Sites at distance >= margin from every face of the box."""
        return tuple(
            s
            for s in self.sites
            if all(margin <= c < e - margin for c, e in zip(s, self.extents))
        )


@dataclass(frozen=True, eq=False)
class DenseOperator:
    """A matrix on the full volume, optionally with a declared support."""

    matrix: np.ndarray
    support: tuple[Site, ...] | None

    def __init__(self, matrix: np.ndarray, support: Iterable[int | Sequence[int]] | None = None):
        mat = np.asarray(matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValidationError(f"operator matrix must be square, got {mat.shape}")
        sup = None
        if support is not None:
            sup = tuple(sorted({as_site(s) for s in support}))
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "support", sup)


def _axis_order(volume: Volume, front: Sequence[Site]) -> list[int]:
    """Permutation taking [front..., rest...] tensor axes to volume order."""
    rest = [s for s in volume.sites if s not in set(front)]
    current = list(front) + rest
    position = {site: k for k, site in enumerate(current)}
    return [position[site] for site in volume.sites]


def _embed_sites(matrix: np.ndarray, sites: Sequence[Site], volume: Volume) -> np.ndarray:
    """Embed a matrix acting on the given (distinct, in-volume) sites."""
    n = volume.site_count
    k = len(sites)
    if k == n and list(sites) == list(volume.sites):
        return np.array(matrix, dtype=complex)
    full = np.kron(np.asarray(matrix, dtype=complex), np.eye(2 ** (n - k)))
    perm = _axis_order(volume, sites)
    tensor = full.reshape((2,) * (2 * n))
    axes = perm + [n + p for p in perm]
    return np.ascontiguousarray(tensor.transpose(axes).reshape(volume.dim, volume.dim))


def embed(term: LocalTerm, placement: int | Sequence[int], volume: Volume) -> DenseOperator:
    """Place a local term at ``support + placement`` inside the volume."""
    shift = as_site(placement)
    if len(shift) != volume.lattice_dimension:
        raise ValidationError("placement dimensionality does not match the volume")
    moved = term.translated(shift)
    for site in moved.support:
        if not volume.contains(site):
            raise ValidationError(
                f"embedded support site {site} falls outside extents {volume.extents}"
            )
    return DenseOperator(_embed_sites(moved.matrix, moved.support, volume), moved.support)


def _free_placements(term: LocalTerm, volume: Volume) -> Iterable[Site]:
    """All shifts x with support + x inside the box (free boundary)."""
    coords = np.array(term.support)
    lo = coords.min(axis=0)
    hi = coords.max(axis=0)
    spans = [
        range(-int(lo[a]), volume.extents[a] - int(hi[a]))
        for a in range(volume.lattice_dimension)
    ]
    return itertools.product(*spans)


def _periodic_placements(term: LocalTerm, volume: Volume) -> Iterable[tuple[Site, ...]]:
    """Wrapped supports for every translate on the torus."""
    if term.span >= min(volume.extents):
        raise ValidationError(
            f"term span {term.span} does not fit on periodic extents {volume.extents}"
        )
    for x in itertools.product(*(range(e) for e in volume.extents)):
        yield tuple(
            tuple((c + d) % e for c, d, e in zip(s, x, volume.extents))
            for s in term.support
        )


def _check_boundary(boundary: str) -> None:
    if boundary not in BOUNDARY_KINDS:
        raise ValidationError(f"unknown boundary kind '{boundary}'")


def local_hamiltonian(
    phi: Interaction, volume: Volume, boundary: str = "free"
) -> DenseOperator:
    """Sum of all interaction terms supported inside the volume.

    Free boundary sums translates whose support lies in the box; the
    periodic option wraps translates around the torus (an accelerant for
    pressure convergence, flagged in all outputs that use it).
    """
    _check_boundary(boundary)
    if phi.terms and phi.lattice_dimension != volume.lattice_dimension:
        raise ValidationError("interaction and volume lattice dimensions differ")
    total = np.zeros((volume.dim, volume.dim), dtype=complex)
    for term in phi.terms:
        if boundary == "free":
            for x in _free_placements(term, volume):
                moved = term.translated(x)
                total += _embed_sites(moved.matrix, moved.support, volume)
        else:
            for wrapped in _periodic_placements(term, volume):
                ordered, mat = _wrap_sort(wrapped, term.matrix)
                total += _embed_sites(mat, ordered, volume)
    return DenseOperator(total, volume.sites)


def _wrap_sort(sites: tuple[Site, ...], matrix: np.ndarray) -> tuple[tuple[Site, ...], np.ndarray]:
    """Sort wrapped support sites, permuting matrix factors to match."""
    order = sorted(range(len(sites)), key=lambda i: sites[i])
    if order == list(range(len(sites))):
        return sites, matrix
    k = len(sites)
    tensor = matrix.reshape((2,) * (2 * k))
    axes = order + [k + i for i in order]
    return (
        tuple(sites[i] for i in order),
        tensor.transpose(axes).reshape(matrix.shape),
    )


def hamiltonian_diagonal(
    phi: Interaction, volume: Volume, boundary: str = "free"
) -> np.ndarray | None:
    """Diagonal of H as a vector when every term matrix is diagonal, else None.

    Classical interactions (for example pure sigma_z couplings) assemble in
    O(2^n) instead of O(4^n) this way, which is what makes 12-site pressure
    sweeps cheap.
    """
    _check_boundary(boundary)
    for term in phi.terms:
        off = term.matrix - np.diag(np.diag(term.matrix))
        if np.abs(off).max() != 0.0:
            return None
    if phi.terms and phi.lattice_dimension != volume.lattice_dimension:
        raise ValidationError("interaction and volume lattice dimensions differ")
    n = volume.site_count
    total = np.zeros(volume.dim)

    def add(diag_local: np.ndarray, sites: tuple[Site, ...]) -> None:
        k = len(sites)
        full = np.kron(diag_local, np.ones(2 ** (n - k)))
        perm = _axis_order(volume, sites)
        total_view = full.reshape((2,) * n).transpose(perm).reshape(volume.dim)
        np.add(total, total_view, out=total)

    for term in phi.terms:
        local = np.diag(term.matrix).real
        if boundary == "free":
            for x in _free_placements(term, volume):
                add(local, term.translated(x).support)
        else:
            for wrapped in _periodic_placements(term, volume):
                ordered, mat = _wrap_sort(wrapped, np.diag(local))
                add(np.diag(mat).real, ordered)
    return total


def translate(a: DenseOperator, shift: int | Sequence[int], volume: Volume) -> DenseOperator:
    """Shift an operator with declared support by a lattice vector.

    Realized as conjugation by the cyclic shift permutation of the box;
    valid exactly when the shifted support stays inside (checked), since
    the operator acts as the identity on every site that wraps.
    """
    if a.support is None:
        raise ValidationError("translate needs an operator with declared support")
    x = as_site(shift)
    if len(x) != volume.lattice_dimension:
        raise ValidationError("shift dimensionality does not match the volume")
    moved = []
    for site in a.support:
        target = tuple(c + d for c, d in zip(site, x))
        if not volume.contains(target):
            raise ValidationError(f"shifted support site {target} leaves the volume")
        moved.append(target)
    if a.matrix.shape[0] != volume.dim:
        raise ValidationError("operator dimension does not match the volume")
    n = volume.site_count
    shifted_pos = np.empty(n, dtype=int)
    for t, site in enumerate(volume.sites):
        target = tuple((c + d) % e for c, d, e in zip(site, x, volume.extents))
        shifted_pos[t] = volume.index(target)
    idx = np.arange(volume.dim)
    bits = (idx[:, None] >> (n - 1 - np.arange(n))[None, :]) & 1
    p = (bits << (n - 1 - shifted_pos)[None, :]).sum(axis=1)
    inv = np.argsort(p)
    return DenseOperator(a.matrix[np.ix_(inv, inv)], moved)


DERIVATION_MODES = ("full-volume", "support-touching")


def derivation(
    phi: Interaction,
    a: DenseOperator,
    volume: Volume,
    mode: str = "full-volume",
) -> DenseOperator:
    """Local derivation i[H, a], either against the full volume Hamiltonian
    or restricted to interaction translates that touch the declared support.

    In support-touching mode the result's declared support is the union of
    supp(a) with every touching translate, so repeated applications track
    the light-cone growth of the observable.
    """
    if mode not in DERIVATION_MODES:
        raise ValidationError(f"unknown derivation mode '{mode}'")
    if a.matrix.shape[0] != volume.dim:
        raise ValidationError("observable dimension does not match the volume")
    if mode == "full-volume":
        h = local_hamiltonian(phi, volume).matrix
        return DenseOperator(1j * (h @ a.matrix - a.matrix @ h), a.support)
    if a.support is None:
        raise ValidationError("support-touching mode needs a declared support")
    target = set(a.support)
    grown = set(a.support)
    out = np.zeros_like(a.matrix)
    for term in phi.terms:
        for x in _free_placements(term, volume):
            moved = term.translated(x)
            if target.isdisjoint(moved.support):
                continue
            h = _embed_sites(moved.matrix, moved.support, volume)
            out += 1j * (h @ a.matrix - a.matrix @ h)
            grown.update(moved.support)
    return DenseOperator(out, tuple(sorted(grown)))
