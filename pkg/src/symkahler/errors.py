"""Exception taxonomy shared by all modules.

Errors are split into configuration/input problems (bad arguments, malformed
config) and numerical problems (guard violations, rank ambiguities, failed
enumerations).  The CLI maps the former to exit code 2 and the latter to 3.
"""


class SymkahlerError(Exception):
    """Base class for all package errors."""


class InputError(SymkahlerError):
    """Malformed argument: wrong dimension, element outside required subspace."""


class ConfigError(SymkahlerError):
    """Invalid run configuration."""


class NumericalError(SymkahlerError):
    """Base class for numerical failures."""


class SingularParameterError(NumericalError):
    """A spectral function was requested outside its guarded domain.

    Carries the offending eigenvalue of ad_w and the function tag.
    """

    def __init__(self, tag: str, eigenvalue: complex, radius: float):
        self.tag = tag
        self.eigenvalue = eigenvalue
        self.radius = radius
        super().__init__(
            f"spectral function {tag!r} rejected: eigenvalue {eigenvalue!r} "
            f"of ad_w reaches guard radius {radius:.9g}"
        )


class ChamberError(NumericalError):
    """Evaluation point is not in the open Weyl chamber (some root value <= 0)."""


class DegeneracyError(NumericalError):
    """Eigenvalue clustering could not separate two restricted roots.

    Retry with a different regular element.
    """


class IncompleteEnumerationError(NumericalError):
    """Lattice enumeration bound exhausted before the candidate group closed."""


class BoundaryError(NumericalError):
    """Evaluation at a boundary point where the formula degenerates (x=0 with C1=0)."""


class DomainError(NumericalError):
    """Argument outside the domain of a change of variables (e.g. t <= ell)."""


class ChartError(NumericalError):
    """Coordinates outside the chart validity region or too close to its edge."""


class DiagnosticError(NumericalError):
    """Parameters make a diagnostic quantity undefined (e.g. f_U denominator <= 0)."""
