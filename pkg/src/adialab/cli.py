"""Batch command line front end.

``adialab run <config>`` executes one experiment described by an INI-style
config and writes plot-ready CSV plus an append-only JSONL manifest into
the configured output directory.  ``adialab list-experiments`` prints the
experiment kinds with their config keys.  ``adialab verify [--fast]``
runs the bundled acceptance checks and prints a pass/fail table.

Exit codes: 0 success, 2 validation failure, 3 numerical-tolerance
failure, 4 resource ceiling.  One run at a time per output directory,
enforced with a lock file.  The environment variable ``ADIALAB_THREADS``
overrides the scan worker count.
"""

from __future__ import annotations

import argparse
import configparser
import contextlib
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import __version__
from .errors import AdialabError, NumericalToleranceError, ValidationError
from .interactions import Interaction, InteractionPath, one_site_term, two_site_term
from .lattice import Volume, hamiltonian_diagonal, local_hamiltonian
from .thermo import (
    DensityMatrix,
    gibbs,
    pressure,
    pressure_extrapolate,
    variational_scan,
    weak_gibbs_residual,
)
from .dynamics import (
    IntegratorConfig,
    derivation_bound_check,
    propagate,
    trotter_product,
)
from .adiabatic import (
    MatrixModel,
    entropy_balance_check,
    entropy_dichotomy_report,
    gamma_factorization_check,
    gapless_scan,
    isothermal_equivalence_scan,
    kato_scan,
    many_body_scan,
    pressure_derivative_check,
)
from .modelfile import load_model, model_digest
from . import models as builtin_models

LOCK_NAME = ".lock"
MANIFEST_NAME = "manifest.jsonl"


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


# ---------------------------------------------------------------------------
# experiment registry

EXPERIMENT_KINDS = (
    "pressure",
    "variational",
    "kato",
    "gapless",
    "entropy-balance",
    "gamma-check",
    "isothermal",
    "many-body",
    "pressure-derivative",
    "dichotomy",
)

# required / optional config keys per kind, as section.key names
KIND_SPECS: dict[str, dict[str, tuple[str, ...]]] = {
    "pressure": {
        "required": ("model.file|builtin", "volume.lengths"),
        "optional": ("volume.boundary",),
    },
    "variational": {
        "required": ("model.file|builtin", "volume.length"),
        "optional": ("volume.boundary",),
    },
    "kato": {
        "required": ("model.builtin", "grids.T"),
        "optional": ("grids.tau", "integrator.*"),
    },
    "gapless": {
        "required": ("model.builtin", "grids.T"),
        "optional": ("grids.tau", "integrator.*"),
    },
    "entropy-balance": {
        "required": ("model.builtin", "grids.T"),
        "optional": ("grids.tau", "integrator.*"),
    },
    "gamma-check": {
        "required": ("model.builtin", "grids.T"),
        "optional": ("integrator.*",),
    },
    "isothermal": {
        "required": ("model.builtin", "grids.T"),
        "optional": ("grids.tau", "integrator.*"),
    },
    "many-body": {
        "required": ("model.file|builtin", "volume.length", "grids.T", "grids.tau"),
        "optional": ("volume.boundary", "integrator.*"),
    },
    "pressure-derivative": {
        "required": ("model.file|builtin", "volume.length"),
        "optional": ("grids.tau", "volume.boundary"),
    },
    "dichotomy": {
        "required": ("model.file|builtin", "volume.length", "grids.horizons"),
        "optional": ("volume.boundary",),
    },
}

_SECTION_KEYS = {
    "experiment": {"kind", "seed", "output"},
    "model": {"file", "builtin", "beta"},
    "volume": {"length", "lengths", "boundary", "max_sites"},
    "grids": {"T", "tau", "horizons"},
    "integrator": {"scheme", "steps", "tolerance", "max_steps"},
}

BUILTIN_INTERACTIONS: dict[str, Callable[[], Interaction]] = {
    "ising": lambda: builtin_models.ising_coupling(1.0),
    "transverse-chain": lambda: builtin_models.transverse_field_chain(1.0, 0.5),
}

BUILTIN_PATHS: dict[str, Callable[[], InteractionPath]] = {
    "transverse-sweep": builtin_models.transverse_sweep_path,
    "commuting-sweep": builtin_models.commuting_sweep_path,
    "quadratic-mix": builtin_models.quadratic_mix_path,
}

BUILTIN_MATRIX_MODELS: dict[str, Callable[[float, int], MatrixModel]] = {
    "gapped-two-level": lambda beta, length: builtin_models.gapped_two_level(beta),
    "degenerate-four-level": lambda beta, length: builtin_models.degenerate_four_level(beta),
    "crossing-two-level": lambda beta, length: builtin_models.crossing_two_level(beta),
    "chain-balance": lambda beta, length: builtin_models.chain_balance_model(length, beta),
}


@dataclass
class RunContext:
    """Everything one experiment needs, parsed and validated."""

    kind: str
    seed: int
    output: str
    beta: float
    boundary: str
    model: Interaction | InteractionPath | MatrixModel | None
    digest: str
    length: int | None
    lengths: tuple[int, ...] | None
    max_sites: int
    grids: dict[str, tuple[float, ...]] = field(default_factory=dict)
    integrator: IntegratorConfig | None = None


def _parse_grid(text: str, name: str) -> tuple[float, ...]:
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValidationError(f"grid {name} wants start:stop:num, got {text!r}")
        try:
            start, stop, num = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise ValidationError(f"bad grid spec for {name}: {text!r}") from None
        if num < 1:
            raise ValidationError(f"grid {name} needs at least one point")
        return tuple(float(v) for v in np.linspace(start, stop, num))
    try:
        values = tuple(float(v) for v in text.replace(",", " ").split())
    except ValueError:
        raise ValidationError(f"bad grid values for {name}: {text!r}") from None
    if not values:
        raise ValidationError(f"grid {name} is empty")
    return values


def _read_config(path: str) -> configparser.ConfigParser:
    parser = configparser.ConfigParser(
        interpolation=None, delimiters=("=",), inline_comment_prefixes=("#",)
    )
    parser.optionxform = str
    try:
        with open(path, "r", encoding="utf-8") as handle:
            parser.read_file(handle)
    except OSError as exc:
        raise ValidationError(f"cannot read config {path}: {exc}") from None
    except configparser.Error as exc:
        raise ValidationError(f"malformed config {path}: {exc}") from None
    return parser


def _config_snapshot(parser: configparser.ConfigParser) -> dict[str, dict[str, str]]:
    return {section: dict(parser.items(section)) for section in parser.sections()}


def _parse_context(parser: configparser.ConfigParser) -> RunContext:
    for section in parser.sections():
        if section not in _SECTION_KEYS:
            raise ValidationError(f"unknown config section [{section}]")
        for key in parser[section]:
            if key not in _SECTION_KEYS[section]:
                raise ValidationError(f"unknown config key {section}.{key}")
    if "experiment" not in parser:
        raise ValidationError("config needs an [experiment] section")
    exp = parser["experiment"]
    kind = exp.get("kind")
    if kind not in EXPERIMENT_KINDS:
        raise ValidationError(
            f"unknown experiment kind {kind!r}; see list-experiments"
        )
    output = exp.get("output")
    if not output:
        raise ValidationError("experiment.output is required")
    try:
        seed = int(exp.get("seed", "0"))
    except ValueError:
        raise ValidationError("experiment.seed must be an integer") from None

    model_section = parser["model"] if "model" in parser else {}
    beta = 1.0
    if "beta" in model_section:
        beta = float(model_section["beta"])
        if beta <= 0:
            raise ValidationError("model.beta must be positive")

    vol = parser["volume"] if "volume" in parser else {}
    boundary = vol.get("boundary", "free")
    max_sites = int(vol.get("max_sites", "12"))
    length = int(vol["length"]) if "length" in vol else None
    lengths = None
    if "lengths" in vol:
        try:
            lengths = tuple(int(v) for v in vol["lengths"].replace(",", " ").split())
        except ValueError:
            raise ValidationError("volume.lengths must be integers") from None

    grids: dict[str, tuple[float, ...]] = {}
    if "grids" in parser:
        for key in parser["grids"]:
            grids[key] = _parse_grid(parser["grids"][key], key)

    integrator = None
    if "integrator" in parser:
        integ = parser["integrator"]
        kwargs: dict = {}
        if "scheme" in integ:
            kwargs["scheme"] = integ["scheme"]
        if "steps" in integ:
            kwargs["steps"] = int(integ["steps"])
        if "tolerance" in integ:
            kwargs["tolerance"] = float(integ["tolerance"])
        if "max_steps" in integ:
            kwargs["max_steps"] = int(integ["max_steps"])
        integrator = IntegratorConfig(**kwargs)

    model, digest = _resolve_model(kind, dict(model_section), beta, length)
    ctx = RunContext(
        kind=kind,
        seed=seed,
        output=output,
        beta=beta,
        boundary=boundary,
        model=model,
        digest=digest,
        length=length,
        lengths=lengths,
        max_sites=max_sites,
        grids=grids,
        integrator=integrator,
    )
    _check_requirements(ctx)
    return ctx


_MATRIX_KINDS = {"kato", "gapless", "entropy-balance", "gamma-check", "isothermal"}
_PATH_KINDS_CLI = {"many-body", "pressure-derivative", "dichotomy"}
_INTERACTION_KINDS = {"pressure", "variational"}


def _resolve_model(
    kind: str, model_section: dict, beta: float, length: int | None
) -> tuple[Interaction | InteractionPath | MatrixModel, str]:
    has_file = "file" in model_section
    has_builtin = "builtin" in model_section
    if has_file == has_builtin:
        raise ValidationError("section [model] needs exactly one of file or builtin")
    if has_file:
        if kind in _MATRIX_KINDS:
            raise ValidationError(
                f"experiment {kind} uses builtin matrix models, not model files"
            )
        path = model_section["file"]
        obj = load_model(path)
        digest = f"sha256:{model_digest(path)}"
    else:
        name = model_section["builtin"]
        digest = f"builtin:{name}"
        if kind in _MATRIX_KINDS:
            if name not in BUILTIN_MATRIX_MODELS:
                raise ValidationError(
                    f"unknown builtin matrix model {name!r}; choose from "
                    f"{sorted(BUILTIN_MATRIX_MODELS)}"
                )
            obj = BUILTIN_MATRIX_MODELS[name](beta, length if length else 4)
        elif name in BUILTIN_INTERACTIONS:
            obj = BUILTIN_INTERACTIONS[name]()
        elif name in BUILTIN_PATHS:
            obj = BUILTIN_PATHS[name]()
        else:
            raise ValidationError(
                f"unknown builtin model {name!r}; choose from "
                f"{sorted(BUILTIN_INTERACTIONS) + sorted(BUILTIN_PATHS)}"
            )
    if kind in _INTERACTION_KINDS and not isinstance(obj, Interaction):
        raise ValidationError(f"experiment {kind} needs a static interaction model")
    if kind in _PATH_KINDS_CLI and not isinstance(obj, InteractionPath):
        raise ValidationError(f"experiment {kind} needs an interaction path model")
    return obj, digest


def _check_requirements(ctx: RunContext) -> None:
    need = {
        "pressure": ctx.lengths is not None,
        "variational": ctx.length is not None,
        "kato": "T" in ctx.grids,
        "gapless": "T" in ctx.grids,
        "entropy-balance": "T" in ctx.grids,
        "gamma-check": "T" in ctx.grids,
        "isothermal": "T" in ctx.grids,
        "many-body": ctx.length is not None
        and "T" in ctx.grids
        and "tau" in ctx.grids,
        "pressure-derivative": ctx.length is not None,
        "dichotomy": ctx.length is not None and "horizons" in ctx.grids,
    }
    if not need[ctx.kind]:
        spec = KIND_SPECS[ctx.kind]["required"]
        raise ValidationError(
            f"experiment {ctx.kind} needs config keys: {', '.join(spec)}"
        )


# ---------------------------------------------------------------------------
# experiment runners


@dataclass
class ExperimentResult:
    header: str
    rows: list[list[str]]
    tolerances: dict


def _run_pressure(ctx: RunContext) -> ExperimentResult:
    if len(ctx.lengths) < 3:
        raise ValidationError("pressure extrapolation needs at least three lengths")
    volumes = [Volume.chain(L, max_sites=ctx.max_sites) for L in ctx.lengths]
    fit = pressure_extrapolate(ctx.model, volumes, ctx.beta, ctx.boundary)
    rows = [
        [str(L), _fmt(ctx.beta), _fmt(p), _fmt(fit.estimate), _fmt(res)]
        for L, p, res in zip(fit.sizes, fit.pressures, fit.residuals)
    ]
    return ExperimentResult(
        header="L,beta,pressure,extrapolated,residual",
        rows=rows,
        tolerances={"extrapolation_rms": fit.rms_residual},
    )


def _run_variational(ctx: RunContext) -> ExperimentResult:
    volume = Volume.chain(ctx.length, max_sites=ctx.max_sites)
    res = variational_scan(ctx.model, volume, ctx.beta, ctx.boundary)
    row = [
        _fmt(res.value),
        _fmt(res.pressure),
        _fmt(res.gap),
        _fmt(res.bloch[0]),
        _fmt(res.bloch[1]),
        _fmt(res.bloch[2]),
    ]
    return ExperimentResult(
        header="value,pressure,gap,bloch_x,bloch_y,bloch_z",
        rows=[row],
        tolerances={"gap": res.gap, "bound_ok": bool(res.value <= res.pressure + 1e-12)},
    )


def _run_kato(ctx: RunContext) -> ExperimentResult:
    taus = ctx.grids.get("tau")
    scan = kato_scan(ctx.model, ctx.grids["T"], taus, ctx.integrator)
    rows = [
        [_fmt(T), _fmt(d), _fmt(scan.slope), _fmt(scan.min_gap)]
        for T, d in scan.points
    ]
    return ExperimentResult(
        header="T,deviation,slope,min_gap",
        rows=rows,
        tolerances={"slope": scan.slope, "min_gap": scan.min_gap},
    )


def _run_gapless(ctx: RunContext) -> ExperimentResult:
    taus = ctx.grids.get("tau")
    scan = gapless_scan(ctx.model, ctx.grids["T"], taus, ctx.integrator)
    rows = [[_fmt(T), _fmt(d)] for T, d in scan.points]
    decreased = scan.points[-1][1] < scan.points[0][1]
    return ExperimentResult(
        header="T,deviation",
        rows=rows,
        tolerances={"deviation_decreased": bool(decreased)},
    )


def _run_entropy_balance(ctx: RunContext) -> ExperimentResult:
    taus = ctx.grids.get("tau")
    rows = []
    worst = 0.0
    for T in ctx.grids["T"]:
        check = entropy_balance_check(ctx.model, T, taus, ctx.integrator)
        worst = max(worst, check.residual)
        for tau, lhs, rhs in zip(check.taus, check.lhs, check.rhs):
            rows.append([_fmt(T), _fmt(tau), _fmt(lhs), _fmt(rhs), _fmt(abs(lhs - rhs))])
    return ExperimentResult(
        header="T,tau,lhs,rhs,residual",
        rows=rows,
        tolerances={"max_residual": worst},
    )


def _run_gamma_check(ctx: RunContext) -> ExperimentResult:
    rows = []
    worst_defect = worst_identity = 0.0
    for T in ctx.grids["T"]:
        check = gamma_factorization_check(ctx.model, T, cfg=ctx.integrator)
        worst_defect = max(worst_defect, check.defect)
        worst_identity = max(worst_identity, check.identity_residual)
        rows.append(
            [
                _fmt(T),
                _fmt(check.s),
                _fmt(check.t),
                _fmt(check.defect),
                _fmt(check.identity_residual),
                _fmt(check.gamma_drift),
            ]
        )
    return ExperimentResult(
        header="T,s,t,defect,identity_residual,gamma_drift",
        rows=rows,
        tolerances={"max_defect": worst_defect, "max_identity_residual": worst_identity},
    )


def _run_isothermal(ctx: RunContext) -> ExperimentResult:
    taus = ctx.grids.get("tau")
    out = isothermal_equivalence_scan(ctx.model, ctx.grids["T"], taus, ctx.integrator)
    rows = [
        [
            _fmt(r.T),
            _fmt(r.sup_trace_distance),
            _fmt(r.sup_relative_entropy),
            _fmt(r.sup_pairing_defect),
        ]
        for r in out
    ]
    return ExperimentResult(
        header="T,sup_trace_distance,sup_relative_entropy,sup_pairing_defect",
        rows=rows,
        tolerances={"pinsker_all_rows": bool(all(r.pinsker_ok for r in out))},
    )


def _run_many_body(ctx: RunContext) -> ExperimentResult:
    volume = Volume.chain(ctx.length, max_sites=ctx.max_sites)
    records = many_body_scan(
        ctx.model,
        volume,
        ctx.grids["T"],
        ctx.grids["tau"],
        ctx.beta,
        ctx.integrator,
        ctx.boundary,
    )
    rows = [
        [
            _fmt(r.T),
            _fmt(r.tau),
            _fmt(r.relative_entropy),
            _fmt(r.trace_distance),
            _fmt(r.pairing_driven),
            _fmt(r.pairing_instant),
            _fmt(r.entropy),
            _fmt(r.entropy_drift),
            str(r.steps),
        ]
        for r in records
    ]
    pinsker = all(
        r.trace_distance**2 <= 2.0 * r.relative_entropy + 1e-12 for r in records
    )
    return ExperimentResult(
        header=(
            "T,tau,relative_entropy_per_site,trace_distance_per_site,"
            "pairing_driven,pairing_instant,entropy_per_site,entropy_drift,steps"
        ),
        rows=rows,
        tolerances={
            "pinsker_all_rows": bool(pinsker),
            "max_entropy_drift": max(r.entropy_drift for r in records),
        },
    )


def _run_pressure_derivative(ctx: RunContext) -> ExperimentResult:
    volume = Volume.chain(ctx.length, max_sites=ctx.max_sites)
    taus = ctx.grids.get("tau")
    check = pressure_derivative_check(
        ctx.model, volume, taus, beta=ctx.beta, boundary=ctx.boundary
    )
    rows = [
        [_fmt(tau), _fmt(fd), _fmt(exp), _fmt(res)]
        for tau, fd, exp, res in zip(
            check.taus, check.fd_slope, check.expectation, check.residuals
        )
    ]
    return ExperimentResult(
        header="tau,fd_slope,expectation,residual",
        rows=rows,
        tolerances={"max_residual": check.max_residual, "refined": check.refined},
    )


def _run_dichotomy(ctx: RunContext) -> ExperimentResult:
    volume = Volume.chain(ctx.length, max_sites=ctx.max_sites)
    nu0, _ = gibbs(
        local_hamiltonian(ctx.model.at(0.0), volume, ctx.boundary), ctx.beta
    )
    report = entropy_dichotomy_report(
        nu0, ctx.model.at(1.0), volume, ctx.grids["horizons"], ctx.boundary
    )
    rows = [
        [r.kind, "inf" if math.isinf(r.horizon) else _fmt(r.horizon), _fmt(r.entropy_per_site)]
        for r in report.rows
    ]
    return ExperimentResult(
        header="kind,horizon,entropy_per_site",
        rows=rows,
        tolerances={"entropy_nondecreasing": bool(report.entropy_nondecreasing)},
    )


RUNNERS: dict[str, Callable[[RunContext], ExperimentResult]] = {
    "pressure": _run_pressure,
    "variational": _run_variational,
    "kato": _run_kato,
    "gapless": _run_gapless,
    "entropy-balance": _run_entropy_balance,
    "gamma-check": _run_gamma_check,
    "isothermal": _run_isothermal,
    "many-body": _run_many_body,
    "pressure-derivative": _run_pressure_derivative,
    "dichotomy": _run_dichotomy,
}


# ---------------------------------------------------------------------------
# persistence


@contextlib.contextmanager
def _directory_lock(output: str):
    """One run at a time per output directory."""
    path = os.path.join(output, LOCK_NAME)
    try:
        handle = os.open(path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise ValidationError(
            f"output directory {output} is locked by another run "
            f"(remove {path} if that run is dead)"
        ) from None
    try:
        os.write(handle, str(os.getpid()).encode())
        os.close(handle)
        yield
    finally:
        with contextlib.suppress(OSError):
            os.remove(path)


def _append_manifest(output: str, entry: dict) -> None:
    line = json.dumps(entry, sort_keys=True)
    with open(os.path.join(output, MANIFEST_NAME), "a", encoding="utf-8") as handle:
        handle.write(line + "\n")


def _write_csv(output: str, kind: str, result: ExperimentResult) -> str:
    path = os.path.join(output, f"{kind}.csv")
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(result.header + "\n")
        for row in result.rows:
            handle.write(",".join(row) + "\n")
    return path


def run_config(config_path: str) -> int:
    """Execute one experiment config; returns the process exit code."""
    try:
        parser = _read_config(config_path)
    except AdialabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    output = parser.get("experiment", "output", fallback=None)
    if not output:
        print("error: experiment.output is required", file=sys.stderr)
        return 2
    os.makedirs(output, exist_ok=True)
    kind = parser.get("experiment", "kind", fallback="unknown")
    entry: dict = {
        "experiment": kind,
        "config": _config_snapshot(parser),
        "version": __version__,
        "status": "failed",
        "error": None,
        "outputs": [],
        "tolerances": {},
        "model": None,
        "seed": None,
    }
    code = 0
    started = time.perf_counter()
    try:
        with _directory_lock(output):
            try:
                ctx = _parse_context(parser)
                entry["seed"] = ctx.seed
                entry["model"] = ctx.digest
                result = RUNNERS[ctx.kind](ctx)
                csv_path = _write_csv(output, ctx.kind, result)
                entry["outputs"] = [csv_path]
                entry["tolerances"] = result.tolerances
                entry["status"] = "ok"
            except AdialabError as exc:
                entry["error"] = {"type": type(exc).__name__, "message": str(exc)}
                code = exc.exit_code
                print(f"error: {exc}", file=sys.stderr)
            finally:
                entry["wall_time_s"] = time.perf_counter() - started
                _append_manifest(output, entry)
    except AdialabError as exc:
        # Lock acquisition failed; nothing of ours to record safely.
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    return code


# ---------------------------------------------------------------------------
# bundled verification checks


def _check_weak_gibbs(fast: bool) -> tuple[bool, str]:
    draws = 60 if fast else 200
    rng = np.random.default_rng(2024)
    worst = 0.0
    for k in range(draws):
        L = 2 + k % 3
        volume = Volume.chain(L)
        herm = rng.normal(scale=0.4, size=(2, 2)) + 1j * rng.normal(
            scale=0.4, size=(2, 2)
        )
        pair = rng.normal(scale=0.4, size=(4, 4)) + 1j * rng.normal(
            scale=0.4, size=(4, 4)
        )
        phi = Interaction(
            [one_site_term(0.5 * (herm + herm.conj().T)), _pair_term(pair)],
            weight_r=1.0,
        )
        x = rng.normal(size=(volume.dim, volume.dim)) + 1j * rng.normal(
            size=(volume.dim, volume.dim)
        )
        m = x @ x.conj().T + 1e-3 * np.eye(volume.dim)
        nu = DensityMatrix(m / np.trace(m).real)
        worst = max(worst, weak_gibbs_residual(nu, phi, volume, beta=1.0))
    return worst <= 1e-10, f"max residual {worst:.3e} over {draws} draws (tol 1e-10)"


def _pair_term(raw: np.ndarray):
    from .interactions import LocalTerm

    return LocalTerm([0, 1], 0.5 * (raw + raw.conj().T))


def _check_ising_pressure(fast: bool) -> tuple[bool, str]:
    phi = builtin_models.ising_coupling(1.0)
    sizes = range(4, 13)
    volumes = [Volume.chain(L) for L in sizes]
    worst = 0.0
    for L, volume in zip(sizes, volumes):
        exact = math.log(2.0) + (1.0 - 1.0 / L) * math.log(math.cosh(1.0))
        worst = max(worst, abs(pressure(phi, volume, 1.0) - exact))
    fit = pressure_extrapolate(phi, volumes, 1.0)
    target = math.log(2.0 * math.cosh(1.0))
    extrap_err = abs(fit.estimate - target)
    ok = worst <= 1e-10 and extrap_err <= 1e-6
    return ok, f"finite-L residual {worst:.3e} (tol 1e-10), extrapolation error {extrap_err:.3e} (tol 1e-6)"


def _check_adiabatic_rate(fast: bool) -> tuple[bool, str]:
    T_grid = (10.0, 100.0, 1000.0) if fast else (10.0, 30.0, 100.0, 300.0, 1000.0)
    scan = kato_scan(builtin_models.gapped_two_level(), T_grid)
    ok = -1.3 <= scan.slope <= -0.7
    return ok, f"log-log slope {scan.slope:.4f} (want [-1.3, -0.7])"


def _check_crossing_decrease(fast: bool) -> tuple[bool, str]:
    try:
        scan = gapless_scan(
            builtin_models.crossing_two_level(), (10.0, 1000.0), assert_decrease=True
        )
    except NumericalToleranceError as exc:
        return False, str(exc)
    d10, d1000 = scan.points[0][1], scan.points[-1][1]
    return True, f"d(10) = {d10:.3e} > d(1000) = {d1000:.3e}"


def _check_entropy_balance(fast: bool) -> tuple[bool, str]:
    T_values = (0.5, 1.0) if fast else (0.5, 1.0, 2.0)
    worst = 0.0
    for model in (builtin_models.gapped_two_level(), builtin_models.chain_balance_model(4)):
        for T in T_values:
            worst = max(worst, entropy_balance_check(model, T).residual)
    return worst <= 1e-6, f"max balance residual {worst:.3e} (tol 1e-6)"


def _check_gamma_factorization(fast: bool) -> tuple[bool, str]:
    worst_defect = worst_identity = 0.0
    for T in (0.5, 2.0, 10.0):
        chk = gamma_factorization_check(builtin_models.gapped_two_level(), T)
        worst_defect = max(worst_defect, chk.defect)
        worst_identity = max(worst_identity, chk.identity_residual)
    ok = worst_defect <= 1e-7 and worst_identity <= 1e-8
    return ok, f"defect {worst_defect:.3e} (tol 1e-7), identity {worst_identity:.3e} (tol 1e-8)"


def _check_trotter(fast: bool) -> tuple[bool, str]:
    T = builtin_models.TROTTER_CHECK_T
    lo, hi = builtin_models.TROTTER_CHECK_SPAN
    rule = builtin_models.standard_sweep_rule
    ref = propagate(rule, None, T, lo, hi, IntegratorConfig(tolerance=1e-12))
    errors = {
        n: float(np.linalg.norm(trotter_product(rule, None, T, lo, hi, n) - ref, 2))
        for n in (8, 16, 32, 64, 256)
    }
    ratios = [errors[2 * n] / errors[n] for n in (8, 16, 32)]
    ok = all(0.35 <= r <= 0.65 for r in ratios) and errors[256] <= 1e-4
    return ok, (
        "halving ratios "
        + ", ".join(f"{r:.3f}" for r in ratios)
        + f" (want [0.35, 0.65]); error(256) = {errors[256]:.3e} (tol 1e-4)"
    )


def _check_pressure_derivative(fast: bool) -> tuple[bool, str]:
    chk = pressure_derivative_check(builtin_models.quadratic_mix_path(), Volume.chain(4))
    return chk.max_residual <= 1e-6, f"max residual {chk.max_residual:.3e} (tol 1e-6)"


def _check_derivation_bound(fast: bool) -> tuple[bool, str]:
    triples = 150 if fast else 500
    rng = np.random.default_rng(11)
    from .interactions import PAULI_X, PAULI_Y, PAULI_Z

    singles = (PAULI_X, PAULI_Y, PAULI_Z)
    violations = 0
    worst_margin = math.inf
    for k in range(triples):
        coupling = float(rng.uniform(0.2, 1.2))
        tilt = float(rng.uniform(0.0, 1.0))
        weight = float(rng.uniform(0.5, 1.5))
        phi = builtin_models.transverse_field_chain(coupling, tilt, weight_r=weight)
        if rng.uniform() < 0.5:
            obs = one_site_term(singles[int(rng.integers(3))])
        else:
            a, b = rng.integers(3, size=2)
            obs = two_site_term(singles[int(a)], singles[int(b)])
        order = int(rng.integers(0, 4))
        chk = derivation_bound_check(
            phi, obs, order, samples=1, seed=int(rng.integers(1 << 30))
        )
        if not chk.ok:
            violations += 1
        if chk.bound > 0:
            worst_margin = min(worst_margin, chk.bound / max(chk.measured, 1e-300))
    ok = violations == 0
    return ok, (
        f"{violations} violations in {triples} triples; "
        f"smallest bound/measured ratio {worst_margin:.3g}"
    )


def _check_variational(fast: bool) -> tuple[bool, str]:
    volume = Volume.chain(4)
    single = Interaction(
        [one_site_term(np.array([[0.8, 0.3], [0.3, -0.6]], dtype=complex))],
        weight_r=1.0,
    )
    res_single = variational_scan(single, volume, 1.0)
    res_ising = variational_scan(builtin_models.ising_coupling(1.0), volume, 1.0)
    ok = (
        res_single.gap >= -1e-12
        and res_single.gap <= 1e-8
        and res_ising.gap > 1e-3
        and res_ising.value <= res_ising.pressure + 1e-12
    )
    return ok, (
        f"single-site gap {res_single.gap:.3e} (tol 1e-8); "
        f"ising gap {res_ising.gap:.4f} (want > 0)"
    )


def _commuting_static_relative_entropy(
    path: InteractionPath, volume: Volume, tau: float, beta: float
) -> float:
    """Closed-form S(nu_0 | omega_tau) for diagonal commuting driving."""
    d0 = hamiltonian_diagonal(path.at(0.0), volume)
    dt = hamiltonian_diagonal(path.at(tau), volume)
    if d0 is None or dt is None:
        raise ValidationError("commuting closed form needs diagonal interactions")

    def log_probs(diag: np.ndarray) -> np.ndarray:
        w = -beta * diag
        shift = w.max()
        log_z = shift + math.log(np.exp(w - shift).sum())
        return w - log_z

    lp = log_probs(d0)
    lq = log_probs(dt)
    p = np.exp(lp)
    return float((p * (lp - lq)).sum())


def _check_many_body_reduced(fast: bool) -> tuple[bool, str]:
    taus = tuple(np.linspace(0.0, 1.0, 11))
    cfg = IntegratorConfig(steps=30)
    volume = Volume.chain(6)
    records = many_body_scan(
        builtin_models.transverse_sweep_path(), volume, (1.0, 10.0), taus, 1.0, cfg
    )
    pinsker = all(
        r.trace_distance**2 <= 2.0 * r.relative_entropy + 1e-12 for r in records
    )
    tau0 = max(
        r.relative_entropy + r.trace_distance for r in records if r.tau == 0.0
    )
    drift = max(r.entropy_drift for r in records)

    commuting = builtin_models.commuting_sweep_path()
    com_records = many_body_scan(commuting, volume, (1.0, 10.0), taus, 1.0, cfg)
    com_err = max(
        abs(
            r.relative_entropy * volume.site_count
            - _commuting_static_relative_entropy(commuting, volume, r.tau, 1.0)
        )
        for r in com_records
    )
    ok = pinsker and tau0 <= 1e-10 and drift <= 1e-10 and com_err <= 1e-8
    return ok, (
        f"pinsker {'ok' if pinsker else 'VIOLATED'}; tau0 residual {tau0:.3e} "
        f"(tol 1e-10); entropy drift {drift:.3e} (tol 1e-10); "
        f"commuting closed-form error {com_err:.3e} (tol 1e-8)"
    )


# name, fast-subset membership, callable
VERIFY_CHECKS: list[tuple[str, bool, Callable[[bool], tuple[bool, str]]]] = [
    ("weak-gibbs-identity", True, _check_weak_gibbs),
    ("ising-pressure-oracle", True, _check_ising_pressure),
    ("adiabatic-rate-gapped", True, _check_adiabatic_rate),
    ("crossing-deviation-decrease", True, _check_crossing_decrease),
    ("entropy-balance-residual", True, _check_entropy_balance),
    ("gamma-factorization", True, _check_gamma_factorization),
    ("trotter-halving", True, _check_trotter),
    ("pressure-derivative-identity", True, _check_pressure_derivative),
    ("derivation-bound", True, _check_derivation_bound),
    ("variational-bound", True, _check_variational),
    ("many-body-integrity-reduced", False, _check_many_body_reduced),
]


def run_verify(fast: bool, output: str) -> int:
    """Run the bundled acceptance checks; exit 0 iff all pass."""
    os.makedirs(output, exist_ok=True)
    entry: dict = {
        "experiment": "verify",
        "config": {"fast": fast},
        "version": __version__,
        "status": "failed",
        "error": None,
        "outputs": [],
        "tolerances": {},
        "model": None,
        "seed": None,
    }
    started = time.perf_counter()
    all_ok = True
    with _directory_lock(output):
        try:
            width = max(len(name) for name, _, _ in VERIFY_CHECKS)
            for name, in_fast, fn in VERIFY_CHECKS:
                if fast and not in_fast:
                    continue
                t0 = time.perf_counter()
                try:
                    ok, detail = fn(fast)
                except AdialabError as exc:
                    ok, detail = False, f"{type(exc).__name__}: {exc}"
                dt = time.perf_counter() - t0
                all_ok = all_ok and ok
                entry["tolerances"][name] = {"ok": bool(ok), "detail": detail}
                print(f"{'PASS' if ok else 'FAIL'}  {name:<{width}}  [{dt:6.1f}s]  {detail}")
            entry["status"] = "ok" if all_ok else "failed"
        finally:
            entry["wall_time_s"] = time.perf_counter() - started
            _append_manifest(output, entry)
    print("all checks passed" if all_ok else "SOME CHECKS FAILED")
    return 0 if all_ok else 3


def list_experiments() -> str:
    """Deterministic table of experiment kinds and their config keys."""
    lines = ["kind                 required                                        optional"]
    for kind in EXPERIMENT_KINDS:
        spec = KIND_SPECS[kind]
        req = ", ".join(("experiment.output",) + spec["required"])
        opt = ", ".join(spec["optional"] + ("model.beta", "experiment.seed"))
        lines.append(f"{kind:<20} {req:<47} {opt}")
    return "\n".join(lines) + "\n"


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="adialab",
        description="spin-chain thermodynamics and driven-dynamics experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run_p = sub.add_parser("run", help="execute one experiment config")
    run_p.add_argument("config", help="path to an INI experiment config")
    sub.add_parser("list-experiments", help="list experiment kinds and config keys")
    verify_p = sub.add_parser("verify", help="run the bundled acceptance checks")
    verify_p.add_argument("--fast", action="store_true", help="skip the slow checks")
    verify_p.add_argument(
        "--output", default="verify-output", help="directory for the run manifest"
    )
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return run_config(args.config)
        if args.command == "list-experiments":
            sys.stdout.write(list_experiments())
            return 0
        return run_verify(args.fast, args.output)
    except AdialabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
