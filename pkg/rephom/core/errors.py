"""
Error Hierarchy Module

Every failure raised by the engine derives from ``RephomError``. The command
line maps the two families onto exit codes:

- ``InputError`` and subclasses: the request itself is wrong (exit 2)
- ``ConventionError`` / ``MismatchError``: the mathematics disagrees (exit 1)
"""

from typing import Any, Dict, List, Optional, Sequence


class RephomError(Exception):
    """Base class for all engine errors."""


class InputError(RephomError, ValueError):
    """Unknown names, malformed files, out-of-range indices, arity mismatches."""


class SchemaError(InputError):
    """
    A model, algebra or job document violates its schema.

    Attributes:
        pointer (str): JSON-pointer location of the first violation
    """

    def __init__(self, message: str, pointer: str = ""):
        self.pointer = pointer
        super().__init__(f"{pointer or '/'}: {message}")


class ModelValidationError(InputError):
    """
    A model failed validation.

    Attributes:
        residues (List[Dict[str, Any]]): one entry per violated generator, with
            the kind of violation and a printable residue
    """

    def __init__(self, message: str, residues: Sequence[Dict[str, Any]]):
        self.residues: List[Dict[str, Any]] = list(residues)
        details = "; ".join(f"{r['generator']}: {r['residue']}" for r in self.residues)
        super().__init__(f"{message} ({details})" if details else message)


class InsufficientCutoffError(InputError):
    """
    A truncation is too small for the requested degree range.

    Attributes:
        required (Any): the smallest cutoff that makes the result valid
    """

    def __init__(self, message: str, required: Any):
        self.required = required
        super().__init__(f"{message}; required cutoff: {required}")


class ConventionError(RephomError):
    """A constructed differential does not square to zero."""


class ChainComplexError(ConventionError):
    """
    d o d != 0 in a bounded chain complex.

    Attributes:
        degree (int): the degree n where d_{n-1} o d_n first fails to vanish
    """

    def __init__(self, degree: int, message: Optional[str] = None):
        self.degree = degree
        super().__init__(message or f"d o d is nonzero starting in degree {degree}")


class MismatchError(RephomError):
    """Two computations that must agree do not."""
