"""Exception hierarchy shared across the package.

The split mirrors how failures surface at the command line: usage and
parse problems, structural validation problems, and mathematical
refusals (queries that are well-formed but not answerable).
"""

from __future__ import annotations


class PhysbornError(Exception):
    """Base class for all package-specific errors."""


class ShapeError(PhysbornError, ValueError):
    """Matrix dimensions are incompatible with the requested operation."""


class DomainError(PhysbornError, ValueError):
    """An input fails a mathematical requirement (not Hermitian, not a
    projector, negative eigenvalue, ...)."""


class ValidationError(PhysbornError, ValueError):
    """A scenario or model fails a structural check (non-unitary step,
    broken nesting, malformed file)."""


class NotPhysicallyPossibleError(DomainError):
    """A predicate fails commutation with the physical family or has no
    overlap with it."""


class UnreachableConditionError(DomainError):
    """A condition carries no physical weight at the requested time."""


class UnverifiableSequenceError(DomainError):
    """A sequence query was refused because the intermediate outcome does
    not satisfy the verifiability commutators.

    Attributes
    ----------
    commutator_norm : float
        Max entry magnitude of the failing commutator.
    """

    def __init__(self, message: str, commutator_norm: float):
        super().__init__(message)
        self.commutator_norm = commutator_norm
