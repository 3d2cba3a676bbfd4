"""Resolution functions, the resolution loop and its applications."""

from .driver import (
    DesingularizationResult,
    PrincipalizationResult,
    ResolutionTree,
    StepRecord,
    StepState,
    apply_center,
    desingularize,
    find_smooth_point,
    iterate_resolution,
    make_basic_object,
    monomial_certificate,
    principalize,
    rebase,
    resolve,
)
from .engine import (
    BasicObject,
    DescentRecord,
    build_Bdoubleprime,
    build_Bprime,
    coeff_ideal,
    g_at_point,
    gamma,
    max_contact,
    max_g,
    r1_detect,
    split_E,
    t_max_locus,
    transport,
    w_ord_max,
)
from .invariants import GammaHead, InvValue, THead, lambda_embed

__all__ = [
    "BasicObject",
    "DescentRecord",
    "DesingularizationResult",
    "GammaHead",
    "InvValue",
    "PrincipalizationResult",
    "ResolutionTree",
    "StepRecord",
    "StepState",
    "THead",
    "apply_center",
    "build_Bdoubleprime",
    "build_Bprime",
    "coeff_ideal",
    "desingularize",
    "find_smooth_point",
    "g_at_point",
    "gamma",
    "iterate_resolution",
    "lambda_embed",
    "make_basic_object",
    "max_contact",
    "max_g",
    "monomial_certificate",
    "principalize",
    "r1_detect",
    "rebase",
    "resolve",
    "split_E",
    "t_max_locus",
    "transport",
    "w_ord_max",
]
