"""Exception hierarchy for the workbench.

Every failure mode is a subclass of CuspLedgerError so callers (notably the
CLI) can map errors onto exit codes without string matching.
"""


class CuspLedgerError(Exception):
    """Base class for all workbench errors."""


class ExactnessError(CuspLedgerError):
    """A value failed an exactness requirement (float, or fraction where an
    integer is demanded)."""


class TruncationError(CuspLedgerError):
    """A coefficient beyond the known truncation was requested, or an
    operation was attempted with too few known terms."""


class SeriesError(CuspLedgerError):
    """Algebraic misuse of a series (inverting zero, fractional exponents
    where an integer grid is required, bad slicing parameters)."""


class EtaError(CuspLedgerError):
    """Invalid eta-quotient data or an operation outside its preconditions."""


class BasisError(CuspLedgerError):
    """A module basis violates order-completeness or lacks a valid localizer."""


class GapError(CuspLedgerError):
    """Reduction hit a Weierstrass gap: no basis monomial attains the
    required pole order."""

    def __init__(self, pole_order: int, message: str | None = None):
        self.pole_order = pole_order
        super().__init__(message or f"Weierstrass gap hit at pole order {pole_order}")


class ReductionError(CuspLedgerError):
    """The target is not in the span of the basis at this truncation."""


class FamilyError(CuspLedgerError):
    """A congruence-family operation was invoked with inconsistent data."""


class CatalogError(CuspLedgerError):
    """A catalog file failed schema or invariant validation."""


class InternalInconsistencyError(CuspLedgerError):
    """Two code paths that must agree did not; signals a bug, never bad input."""
