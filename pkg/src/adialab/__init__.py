"""Numerical laboratory for finite-volume spin-chain thermodynamics and
slowly driven dynamics.

The library builds finite-range interactions on hypercubic lattices,
assembles dense local Hamiltonians on finite boxes, evaluates Gibbs
states, pressures, and relative entropies, integrates rescaled
non-autonomous Schroedinger propagators, and packages a set of repeatable
scan experiments (adiabatic deviation, entropy balance, isothermal
comparison, entropy production identities) behind both a Python API and a
small command line tool.
"""

from .errors import (
    AdialabError,
    NumericalToleranceError,
    ResourceLimitError,
    ValidationError,
)
from .interactions import (
    IDENTITY_2,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    Interaction,
    InteractionPath,
    LocalTerm,
    combine,
    energy_density,
    equivalence_residual,
    norm_r,
    one_site_term,
    operator_norm,
    path_norm_r,
    two_site_term,
    zero_interaction,
)
from .lattice import (
    DenseOperator,
    Volume,
    derivation,
    embed,
    hamiltonian_diagonal,
    local_hamiltonian,
    translate,
)
from .thermo import (
    DensityMatrix,
    PressureFit,
    ThermoReport,
    VariationalResult,
    entropy,
    gibbs,
    maximally_mixed,
    pinsker_check,
    pressure,
    pressure_extrapolate,
    relative_entropy,
    thermo_report,
    trace_distance,
    variational_scan,
    weak_gibbs_residual,
)
from .dynamics import (
    BoundCheck,
    IntegratorConfig,
    Propagator,
    cesaro_average,
    dephasing_average,
    derivation_bound_check,
    dyson_partial_sum,
    dyson_radius,
    frozen_evolve,
    polar_project,
    propagate,
    propagate_grid,
    trotter_product,
    unitarity_drift,
    unitary_exp,
)
from .adiabatic import (
    AdiabaticScan,
    BalanceCheck,
    DichotomyReport,
    GammaCheck,
    IsothermalRow,
    MatrixModel,
    PressureDerivativeCheck,
    ScanRecord,
    entropy_balance_check,
    entropy_dichotomy_report,
    gamma_factorization_check,
    gapless_scan,
    isothermal_equivalence_scan,
    kato_scan,
    many_body_scan,
    pressure_derivative_check,
)
from . import models

__version__ = "0.1.0"

__all__ = [
    "AdialabError",
    "NumericalToleranceError",
    "ResourceLimitError",
    "ValidationError",
    "IDENTITY_2",
    "PAULI_X",
    "PAULI_Y",
    "PAULI_Z",
    "Interaction",
    "InteractionPath",
    "LocalTerm",
    "combine",
    "energy_density",
    "equivalence_residual",
    "norm_r",
    "one_site_term",
    "operator_norm",
    "path_norm_r",
    "two_site_term",
    "zero_interaction",
    "DenseOperator",
    "Volume",
    "derivation",
    "embed",
    "hamiltonian_diagonal",
    "local_hamiltonian",
    "translate",
    "DensityMatrix",
    "PressureFit",
    "ThermoReport",
    "VariationalResult",
    "entropy",
    "gibbs",
    "maximally_mixed",
    "pinsker_check",
    "pressure",
    "pressure_extrapolate",
    "relative_entropy",
    "thermo_report",
    "trace_distance",
    "variational_scan",
    "weak_gibbs_residual",
    "BoundCheck",
    "IntegratorConfig",
    "Propagator",
    "cesaro_average",
    "dephasing_average",
    "derivation_bound_check",
    "dyson_partial_sum",
    "dyson_radius",
    "frozen_evolve",
    "polar_project",
    "propagate",
    "propagate_grid",
    "trotter_product",
    "unitarity_drift",
    "unitary_exp",
    "AdiabaticScan",
    "BalanceCheck",
    "DichotomyReport",
    "GammaCheck",
    "IsothermalRow",
    "MatrixModel",
    "PressureDerivativeCheck",
    "ScanRecord",
    "entropy_balance_check",
    "entropy_dichotomy_report",
    "gamma_factorization_check",
    "gapless_scan",
    "isothermal_equivalence_scan",
    "kato_scan",
    "many_body_scan",
    "pressure_derivative_check",
    "models",
    "__version__",
]
