"""Exceptions raised by `levy_toolbox`.

Every error derives from `LevyToolboxError`, so callers (the CLI in particular) can
separate module diagnostics from configuration problems and unexpected failures.
"""

from __future__ import annotations


class LevyToolboxError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(LevyToolboxError):
    """A configuration file or command-line value is missing, malformed or out of range."""


class ExpressionError(ConfigurationError):
    """A function-valued model field could not be parsed with the expression grammar."""


class ModelSpecError(LevyToolboxError):
    """A model violates one of its structural invariants (balance condition, index ordering)."""


class QuadratureError(LevyToolboxError):
    """A Levy-measure integral or a quadrature produced a non-finite value."""


class ExponentConsistencyError(LevyToolboxError):
    """Two evaluations of the same characteristic exponent disagree beyond tolerance."""


class InversionAccuracyError(LevyToolboxError):
    """Fourier inversion produced a density value below the negative accuracy gate."""


class IntegratorError(LevyToolboxError):
    """The flow integrator did not reach its endpoint tolerance under step doubling."""


class PreconditionError(LevyToolboxError):
    """An operation was called outside the regime where it is defined."""


class SeriesDivergenceError(LevyToolboxError):
    """Norms of the resolvent series terms grow faster than the Gamma-factorial envelope."""


class PathExplosionError(LevyToolboxError):
    """A simulated path left the finite range during the Euler scheme."""

    def __init__(self, message: str, step: int | None = None) -> None:
        super().__init__(message)
        self.step = step
