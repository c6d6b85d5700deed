"""Error taxonomy shared by the library and the command-line front end.

Each class maps to one process exit status so that batch runs can be
triaged without parsing log text: validation problems exit with 2,
numerical-tolerance failures with 3, and resource ceilings with 4.
"""

from __future__ import annotations


class AdialabError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class ValidationError(AdialabError):
    """Malformed input: bad matrices, grids, configs, or model files."""

    exit_code = 2


class NumericalToleranceError(AdialabError):
    """A numerical contract could not be met (gap closed, budget spent)."""

    exit_code = 3


class ResourceLimitError(AdialabError):
    """A requested computation exceeds the configured dense-matrix ceiling."""

    exit_code = 4
