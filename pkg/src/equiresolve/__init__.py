"""Constructive resolution of singularities and equiresolution of families.

The engine lives in :mod:`equiresolve.resolution`, families and the tau
invariant in :mod:`equiresolve.family`, and the problem-file front end in
:mod:`equiresolve.cli`.  The most common entry points are re-exported here.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    CompatibilityBroken,
    ComponentCountUndecided,
    EngineError,
    InvalidFiber,
    NoSmoothRationalPointFound,
    NotAlignable,
    PermissibilityViolation,
    StepBudgetExceeded,
    ZeroIdealError,
)
from .family import FamilySpec, check_AE, check_fiber_inequality, check_theorem23, stratify, tau  # noqa: E402
from .resolution import desingularize, make_basic_object, max_g, principalize, resolve  # noqa: E402

_ESTIMATORS = ("Desingularizer", "Principalizer", "ResolutionEstimator", "TauStratifier")


def __getattr__(name):
    # scikit-learn is only imported when an estimator is asked for
    if name in _ESTIMATORS:
        from . import estimators

        return getattr(estimators, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")

__all__ = [
    "CompatibilityBroken",
    "ComponentCountUndecided",
    "Desingularizer",
    "EngineError",
    "FamilySpec",
    "InvalidFiber",
    "NoSmoothRationalPointFound",
    "NotAlignable",
    "PermissibilityViolation",
    "Principalizer",
    "ResolutionEstimator",
    "StepBudgetExceeded",
    "TauStratifier",
    "ZeroIdealError",
    "check_AE",
    "check_fiber_inequality",
    "check_theorem23",
    "desingularize",
    "make_basic_object",
    "max_g",
    "principalize",
    "resolve",
    "stratify",
    "tau",
]
