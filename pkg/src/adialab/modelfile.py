"""Plain-text model files for interactions and interaction paths.

The format is line oriented; ``#`` starts a comment and blank lines are
ignored.  An interaction file looks like::

    type = interaction
    weight_r = 1.0
    begin term
    support = 0 ; 1
    row = 1 0   0 0   0 0   0 0
    row = 0 0  -1 0   0 0   0 0
    row = 0 0   0 0  -1 0   0 0
    row = 0 0   0 0   0 0   1 0
    end term

Each ``support`` entry lists sites separated by ``;`` with coordinates
separated by spaces; a term on k sites needs exactly 2^k ``row`` lines of
2^k (real, imaginary) pairs.  A path file sets ``type = path`` plus a
``kind`` of ``constant``, ``interpolation`` (optionally with ``lambda``
as polynomial coefficients ``c0 c1 ...``), or ``samples`` (each nested
interaction block carries a ``tau = ...`` line); the interactions follow
as ``begin interaction`` ... ``end interaction`` blocks.  Non-self-adjoint
term matrices are rejected.
"""

from __future__ import annotations

import hashlib
from typing import Iterator

import numpy as np

from .errors import ValidationError
from .interactions import Interaction, InteractionPath, LocalTerm, combine

FORMAT_TYPES = ("interaction", "path")
PATH_KINDS = ("constant", "interpolation", "samples")


class _Lines:
    """Comment-stripped, line-number-tracking reader."""

    def __init__(self, text: str):
        self.rows: list[tuple[int, str]] = []
        for k, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if line:
                self.rows.append((k, line))
        self.pos = 0

    def peek(self) -> tuple[int, str] | None:
        return self.rows[self.pos] if self.pos < len(self.rows) else None

    def take(self) -> tuple[int, str]:
        row = self.peek()
        if row is None:
            raise ValidationError("model file ended unexpectedly")
        self.pos += 1
        return row


def _fail(lineno: int, message: str) -> ValidationError:
    return ValidationError(f"model file line {lineno}: {message}")


def _assignment(lineno: int, line: str) -> tuple[str, str]:
    if "=" not in line:
        raise _fail(lineno, f"expected 'key = value', got {line!r}")
    key, value = line.split("=", 1)
    return key.strip(), value.strip()


def _parse_floats(lineno: int, text: str, what: str) -> list[float]:
    try:
        return [float(x) for x in text.split()]
    except ValueError as exc:
        raise _fail(lineno, f"bad {what}: {exc}") from None


def _parse_term(lines: _Lines) -> LocalTerm:
    support: list[tuple[int, ...]] | None = None
    rows: list[list[complex]] = []
    while True:
        lineno, line = lines.take()
        if line == "end term":
            break
        key, value = _assignment(lineno, line)
        if key == "support":
            sites = []
            for chunk in value.split(";"):
                coords = chunk.split()
                if not coords:
                    raise _fail(lineno, "empty site in support")
                try:
                    sites.append(tuple(int(c) for c in coords))
                except ValueError:
                    raise _fail(lineno, f"non-integer site coordinate in {chunk!r}")
            support = sites
        elif key == "row":
            numbers = _parse_floats(lineno, value, "matrix row")
            if len(numbers) % 2 != 0:
                raise _fail(lineno, "matrix rows need (real, imaginary) pairs")
            rows.append(
                [complex(a, b) for a, b in zip(numbers[0::2], numbers[1::2])]
            )
        else:
            raise _fail(lineno, f"unknown term key {key!r}")
    if support is None:
        raise ValidationError("term block is missing its support")
    dim = 2 ** len(support)
    if len(rows) != dim or any(len(r) != dim for r in rows):
        raise ValidationError(
            f"term on {len(support)} site(s) needs a {dim} x {dim} matrix, "
            f"got {len(rows)} row(s)"
        )
    return LocalTerm(support, np.array(rows, dtype=complex))


def _parse_interaction_block(
    lines: _Lines, weight_r: float, allow_tau: bool
) -> tuple[Interaction, float | None]:
    tau: float | None = None
    terms: list[LocalTerm] = []
    while True:
        row = lines.peek()
        if row is None:
            raise ValidationError("unterminated interaction block")
        lineno, line = row
        if line == "end interaction":
            lines.take()
            break
        if line == "begin term":
            lines.take()
            terms.append(_parse_term(lines))
            continue
        lines.take()
        key, value = _assignment(lineno, line)
        if key == "tau" and allow_tau:
            tau = float(value)
        else:
            raise _fail(lineno, f"unknown interaction key {key!r}")
    return Interaction(terms, weight_r=weight_r), tau


def load_model_text(text: str) -> Interaction | InteractionPath:
    """Parse a model file into an Interaction or InteractionPath."""
    lines = _Lines(text)
    header: dict[str, str] = {}
    top_terms: list[LocalTerm] = []
    blocks: list[tuple[Interaction, float | None]] = []

    while lines.peek() is not None:
        lineno, line = lines.peek()
        if line == "begin term":
            lines.take()
            top_terms.append(_parse_term(lines))
            continue
        if line == "begin interaction":
            lines.take()
            if "weight_r" not in header:
                raise _fail(lineno, "weight_r must appear before interaction blocks")
            blocks.append(
                _parse_interaction_block(
                    lines,
                    float(header["weight_r"]),
                    allow_tau=header.get("kind") == "samples",
                )
            )
            continue
        lines.take()
        key, value = _assignment(lineno, line)
        if key in header:
            raise _fail(lineno, f"duplicate key {key!r}")
        header[key] = value

    kind_of_file = header.pop("type", None)
    if kind_of_file not in FORMAT_TYPES:
        raise ValidationError(
            f"model file must set type to one of {FORMAT_TYPES}, got {kind_of_file!r}"
        )
    if "weight_r" not in header:
        raise ValidationError("model file must set weight_r")
    weight_r = float(header.pop("weight_r"))

    if kind_of_file == "interaction":
        for key in header:
            raise ValidationError(f"unknown interaction-file key {key!r}")
        if blocks:
            raise ValidationError(
                "interaction files take bare term blocks, not interaction blocks"
            )
        return Interaction(top_terms, weight_r=weight_r)

    if top_terms:
        raise ValidationError("path files need terms inside interaction blocks")
    path_kind = header.pop("kind", None)
    if path_kind not in PATH_KINDS:
        raise ValidationError(
            f"path files must set kind to one of {PATH_KINDS}, got {path_kind!r}"
        )
    lam_text = header.pop("lambda", None)
    for key in header:
        raise ValidationError(f"unknown path-file key {key!r}")

    if path_kind == "constant":
        if lam_text is not None:
            raise ValidationError("constant paths take no lambda")
        if len(blocks) != 1:
            raise ValidationError("constant paths need exactly one interaction block")
        return InteractionPath.constant(blocks[0][0])

    if path_kind == "interpolation":
        if len(blocks) != 2:
            raise ValidationError(
                "interpolation paths need exactly two interaction blocks"
            )
        lam = None
        if lam_text is not None:
            lam = tuple(_parse_floats(0, lam_text, "lambda coefficients"))
        return InteractionPath.interpolation(blocks[0][0], blocks[1][0], lam=lam)

    if lam_text is not None:
        raise ValidationError("sampled paths take no lambda")
    if any(tau is None for _, tau in blocks):
        raise ValidationError("every sampled interaction block needs a tau")
    samples = [(float(tau), phi) for phi, tau in blocks]
    return InteractionPath.from_samples(samples)


def load_model(path: str) -> Interaction | InteractionPath:
    """Read and parse a model file from disk."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ValidationError(f"cannot read model file {path}: {exc}") from None
    return load_model_text(text)


def _format_float(x: float) -> str:
    return f"{x:.17g}"


def _term_lines(term: LocalTerm) -> Iterator[str]:
    yield "begin term"
    yield "support = " + " ; ".join(
        " ".join(str(c) for c in site) for site in term.support
    )
    for row in term.matrix:
        yield "row = " + "  ".join(
            f"{_format_float(z.real)} {_format_float(z.imag)}" for z in row
        )
    yield "end term"


def dump_interaction(phi: Interaction) -> str:
    """Serialize an interaction in the model-file format."""
    lines = ["type = interaction", f"weight_r = {_format_float(phi.weight_r)}"]
    for term in phi.terms:
        lines.extend(_term_lines(term))
    return "\n".join(lines) + "\n"


def _interaction_block(phi: Interaction, tau: float | None) -> Iterator[str]:
    yield "begin interaction"
    if tau is not None:
        yield f"tau = {_format_float(tau)}"
    for term in phi.terms:
        yield from _term_lines(term)
    yield "end interaction"


def dump_path(path: InteractionPath) -> str:
    """Serialize an interaction path; only structured kinds are writable."""
    lines = ["type = path", f"kind = {path.kind}", f"weight_r = {_format_float(path.weight_r)}"]
    if path.kind == "constant":
        lines.extend(_interaction_block(path.at(0.0), None))
    elif path.kind == "interpolation":
        if path.lam_coefficients is None:
            raise ValidationError(
                "interpolation paths with callable profiles cannot be serialized"
            )
        lines.insert(
            2,
            "lambda = " + " ".join(_format_float(c) for c in path.lam_coefficients),
        )
        basis, _ = path.decomposition()
        phi0 = basis[0]
        phi1 = combine(phi0, basis[1], 1.0, 1.0)
        lines.extend(_interaction_block(phi0, None))
        lines.extend(_interaction_block(phi1, None))
    elif path.kind == "samples":
        if path.sample_points is None:
            raise ValidationError("sampled path is missing its sample metadata")
        for tau, phi in path.sample_points:
            lines.extend(_interaction_block(phi, tau))
    else:
        raise ValidationError(f"cannot serialize a path of kind {path.kind!r}")
    return "\n".join(lines) + "\n"


def save_model(obj: Interaction | InteractionPath, path: str) -> None:
    """Write an interaction or path to disk in the model-file format."""
    if isinstance(obj, Interaction):
        text = dump_interaction(obj)
    elif isinstance(obj, InteractionPath):
        text = dump_path(obj)
    else:
        raise ValidationError("save_model takes an Interaction or InteractionPath")
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(text)


def model_digest(path: str) -> str:
    """Stable content hash of a model file, for run manifests."""
    with open(path, "rb") as handle:
        return hashlib.sha256(handle.read()).hexdigest()
