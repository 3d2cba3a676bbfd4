"""Exception types raised by the engine.

Every error carries a short machine-readable ``code`` that the command line
front end copies into its diagnostics.
"""

from __future__ import annotations


class EngineError(Exception):
    """Base class for all engine diagnostics."""

    code = "engine-error"


class ZeroIdealError(EngineError, ValueError):
    code = "zero-ideal"


class NotAligned(EngineError):
    code = "not-aligned"


class NotAlignable(EngineError):
    code = "not-alignable"


class PermissibilityViolation(EngineError):
    code = "permissibility-violation"


class NoUnitLinearPart(EngineError):
    code = "no-unit-linear-part"


class StepBudgetExceeded(EngineError):
    code = "step-budget-exceeded"


class NoSmoothRationalPointFound(EngineError):
    code = "no-smooth-rational-point"


class InvalidFiber(EngineError):
    code = "invalid-fiber"


class ComponentCountUndecided(EngineError):
    code = "component-count-undecided"


class CompatibilityBroken(EngineError):
    code = "compatibility-broken"


class FieldExtensionRequired(EngineError):
    """Internal signal: a center component is defined over a larger field."""

    code = "field-extension-required"

    def __init__(self, minimal_polynomial, message: str = ""):
        super().__init__(message or "center component is not defined over the base field")
        self.minimal_polynomial = minimal_polynomial
