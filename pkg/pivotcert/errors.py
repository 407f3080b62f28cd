"""Exception hierarchy shared by every pivotcert module."""

from __future__ import annotations

from typing import Optional, Sequence


class PivotCertError(Exception):
    """Base class for all pivotcert failures."""


class GraphError(PivotCertError, ValueError):
    """Invalid vertex ids, repeated vertices, empty sets or non-edge pivots."""


class FormatError(PivotCertError, ValueError):
    """Malformed graph6, edge-list or JSON input."""


class ConfigError(PivotCertError):
    """Unreadable or ill-typed settings."""


class SizeCapError(PivotCertError):
    """An exhaustive routine was asked to go past its configured cap."""


class WitnessError(PivotCertError):
    """A witness could not be replayed.

    ``step`` is the index of the failing operation, or ``None`` when the
    witness was rejected before replay (fingerprint mismatch).
    """

    def __init__(self, message: str, step: Optional[int] = None):
        self.step = step
        if step is not None:
            message = f"step {step}: {message}"
        super().__init__(message)


class PreconditionError(PivotCertError, ValueError):
    """One or more named preconditions of a constructive routine failed."""

    def __init__(self, problems: Sequence[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class ConstructionError(PivotCertError, RuntimeError):
    """An extractor produced a step that fails its own re-check."""


class SweepFailure(PivotCertError):
    """A sweep or pipeline stage finished without a certificate."""

    def __init__(self, message: str, trace: Optional[Sequence[str]] = None):
        self.trace = list(trace or [])
        super().__init__(message)
