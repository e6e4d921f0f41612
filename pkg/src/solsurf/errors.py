"""Exception hierarchy.

Every failure the library can diagnose maps to one of these classes so that
callers (and the CLI) can distinguish configuration mistakes from numerical
breakdown without parsing messages.
"""

from __future__ import annotations


class SolsurfError(Exception):
    """Base class for all library errors."""


class ConfigError(SolsurfError):
    """Bad run configuration: unknown key, wrong type, inconsistent values."""


class GridError(SolsurfError):
    """Invalid grid construction or a stencil the grid cannot support."""


class ShapeError(SolsurfError):
    """A field array does not match the grid or contract it claims to satisfy."""


class NonFiniteFieldError(SolsurfError):
    """NaN or Inf appeared in a field or an integration stage."""

    def __init__(self, message: str, stage: str | None = None):
        super().__init__(message)
        self.stage = stage


class SqrtDomainError(SolsurfError):
    """A radicand fell below the clamp slack. Carries the offending grid index."""

    def __init__(self, message: str, index: int | None = None, value: float | None = None):
        super().__init__(message)
        self.index = index
        self.value = value


class DegenerateFrameError(SolsurfError):
    """|S_x| fell below k_min somewhere; the tangent frame is undefined there."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class GramDriftError(SolsurfError):
    """Transported frame lost orthonormality beyond the allowed tolerance."""

    def __init__(self, message: str, deviation: float | None = None):
        super().__init__(message)
        self.deviation = deviation


class DegenerateMetricError(SolsurfError):
    """First fundamental form is singular or indefinite where it must not be."""


class DegenerateTangentPlaneError(SolsurfError):
    """Tangent vectors are parallel; the surface normal is undefined there."""


class MapInconsistentError(SolsurfError):
    """Frame fields and metric roots disagree beyond tolerance in a change of variables."""

    def __init__(self, message: str, deviation: float | None = None):
        super().__init__(message)
        self.deviation = deviation
