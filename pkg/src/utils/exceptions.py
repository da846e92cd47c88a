"""Error hierarchy shared by the algebra modules and the command line."""
from typing import Optional


class AlgebraLabError(Exception):
    """Base error. ``exit_code`` is what the command line returns for it."""

    exit_code = 2


class ParameterError(AlgebraLabError, ValueError):
    """Arguments outside the documented range of an operation."""


class LevelContextError(AlgebraLabError):
    """Objects built over different (p, N) contexts were combined."""


class DomainError(AlgebraLabError, ValueError):
    """An element lies outside the domain an operation is defined on."""


class ContainmentError(AlgebraLabError):
    """A subgroup or element expected to lie inside another one does not."""


class ResourceError(AlgebraLabError):
    """An enumeration or linear-algebra cap would be exceeded."""

    def __init__(self, message: str, required: Optional[int] = None, cap: Optional[int] = None) -> None:
        super().__init__(message)
        self.required = required
        self.cap = cap


class StructuralError(AlgebraLabError):
    """A structure that must hold was found broken by computation."""

    exit_code = 1
