"""Scikit-learn style wrappers around the resolution engine.

The estimators take batches of ideals (or parameter samples, for
:class:`TauStratifier`) in place of feature matrices.  Hyperparameters are
set in ``__init__`` and never touched by ``fit``, so ``get_params``,
``set_params`` and ``sklearn.base.clone`` behave as usual.

>>> est = ResolutionEstimator(variables="x y", b=2).fit(["x^2 - y^3"])
>>> est.predict(["x^2 - y^3"]).tolist()
[1]
"""

from __future__ import annotations

from typing import Dict, List, Optional, Tuple

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import as_int_array, check_ideals, check_names, check_positive_int, check_samples
from .errors import InvalidFiber
from .family import FamilySpec, StratumReport, TauInvariant, stratify, tau
from .resolution import desingularize, make_basic_object, principalize, resolve
from .resolution.driver import DesingularizationResult, PrincipalizationResult, ResolutionTree

__all__ = ["Desingularizer", "Principalizer", "ResolutionEstimator", "TauStratifier"]


class _IdealEstimator(TransformerMixin, BaseEstimator):
    """Common plumbing: validate, run once per distinct ideal, cache."""

    def _check_params(self) -> Tuple[Tuple[str, ...], Dict[str, str]]:
        names = check_names(self.variables)
        check_positive_int(self.max_steps, "max_steps")
        divisors = dict(self.divisors or {})
        check_names(list(divisors), "divisor labels", allow_empty=True)
        return names, divisors

    def _b(self) -> int:
        return 1

    def _run(self, gens: Tuple[str, ...]):
        raise NotImplementedError

    def _results(self, X) -> list:
        batch = check_ideals(X)
        cache = getattr(self, "results_", {})
        out = []
        for gens in batch:
            if gens not in cache:
                cache[gens] = self._run(gens)
            out.append(cache[gens])
        return out

    def _object(self, gens):
        names, divisors = self._check_params()
        return make_basic_object(names, gens, self._b(), divisors)

    def fit(self, X, y=None):
        """Run the algorithm on every ideal of ``X``; ``y`` is ignored."""
        self._check_params()
        self.results_ = {}
        for gens in check_ideals(X):
            if gens not in self.results_:
                self.results_[gens] = self._run(gens)
        self.n_ideals_ = len(self.results_)
        return self

    def transform(self, X) -> List:
        """The result object of each ideal, in input order."""
        check_is_fitted(self, "results_")
        return self._results(X)

    def predict(self, X) -> np.ndarray:
        """Number of blow-ups used for each ideal."""
        check_is_fitted(self, "results_")
        return as_int_array(self._length(r) for r in self._results(X))

    @staticmethod
    def _length(result) -> int:
        return result.length


class ResolutionEstimator(_IdealEstimator):
    """Resolve basic objects ``(J, b)`` until ``Sing(J, b)`` is empty.

    ``transform`` returns the :class:`ResolutionTree` of each ideal and
    ``predict`` its number of steps.
    """

    def __init__(self, variables=("x", "y"), b: int = 1, divisors: Optional[Dict[str, str]] = None, max_steps: int = 64):
        self.variables = variables
        self.b = b
        self.divisors = divisors
        self.max_steps = max_steps

    def _b(self) -> int:
        return check_positive_int(self.b, "b")

    def _run(self, gens) -> ResolutionTree:
        return resolve(self._object(gens), self.max_steps)

    def max_g_sequence(self, X) -> List[List[str]]:
        """The recorded maximal values of each run, as text."""
        return [[str(v) for v in r.values] for r in self.transform(X)]


class Principalizer(_IdealEstimator):
    """Principalize ideals: at the end ``J`` is a monomial in the divisors.

    ``score`` is the fraction of ideals whose monomial certificate checked.
    """

    def __init__(self, variables=("x", "y"), divisors: Optional[Dict[str, str]] = None, max_steps: int = 64):
        self.variables = variables
        self.divisors = divisors
        self.max_steps = max_steps

    def _run(self, gens) -> PrincipalizationResult:
        return principalize(self._object(gens), self.max_steps)

    @staticmethod
    def _length(result) -> int:
        return result.resolution.length

    def score(self, X, y=None) -> float:
        results = self.transform(X)
        return float(np.mean([r.verified for r in results]))


class Desingularizer(_IdealEstimator):
    """Embedded desingularization of ``V(J)``; ``predict`` gives the resolution index."""

    def __init__(self, variables=("x", "y"), divisors: Optional[Dict[str, str]] = None, max_steps: int = 64, seed: int = 0):
        self.variables = variables
        self.divisors = divisors
        self.max_steps = max_steps
        self.seed = seed

    def _run(self, gens) -> DesingularizationResult:
        return desingularize(self._object(gens), max_steps=self.max_steps, seed=self.seed)

    @staticmethod
    def _length(result) -> int:
        return result.index


class TauStratifier(ClusterMixin, BaseEstimator):
    """Group parameter samples of one family by the tau invariant.

    Labels number the strata by decreasing tau, so label 0 is the most
    special stratum among the fitted samples.  ``predict`` gives -1 to a
    sample whose tau matches no fitted stratum.

    >>> st = TauStratifier("x^2 - y^2*(y + t)", variables="x y", params="t")
    >>> st.fit_predict([0, 1, -1, 2]).tolist()
    [0, 1, 1, 1]
    """

    def __init__(self, ideal="", variables=("x", "y"), params=("t",), divisors=None, b: int = 1, max_steps: int = 64):
        self.ideal = ideal
        self.variables = variables
        self.params = params
        self.divisors = divisors
        self.b = b
        self.max_steps = max_steps

    def _family(self) -> FamilySpec:
        (gens,) = check_ideals([self.ideal])
        return FamilySpec(
            check_names(self.variables),
            check_names(self.params, "params"),
            gens,
            dict(self.divisors or {}),
            check_positive_int(self.b, "b"),
        )

    def fit(self, T, y=None):
        F = self._family()
        check_positive_int(self.max_steps, "max_steps")
        samples = check_samples(T, F.m)
        result = stratify(F, samples, self.max_steps)
        self.family_ = F
        self.strata_: List[StratumReport] = list(result.strata)
        self.invalid_ = list(result.invalid)
        self.taus_: List[TauInvariant] = [s.tau for s in self.strata_]
        self.labels_ = self._label(samples, {})
        return self

    def _label(self, samples, cache) -> np.ndarray:
        index = {t: i for i, t in enumerate(self.taus_)}
        known = {tuple(s[p] for p in self.family_.params): i for i, st in enumerate(self.strata_) for s in st.samples}
        labels = []
        for s in samples:
            if s in known:
                labels.append(known[s])
                continue
            if s not in cache:
                cache[s] = self._tau_or_none(s)
            labels.append(index.get(cache[s], -1))
        return as_int_array(labels)

    def _tau_or_none(self, sample) -> Optional[TauInvariant]:
        try:
            return tau(self.family_, sample, self.max_steps)
        except InvalidFiber:
            return None

    def transform(self, T) -> List[Optional[TauInvariant]]:
        """tau of each sample; ``None`` where the fiber is invalid."""
        check_is_fitted(self, "strata_")
        return [self._tau_or_none(s) for s in check_samples(T, self.family_.m)]

    def predict(self, T) -> np.ndarray:
        check_is_fitted(self, "strata_")
        return self._label(check_samples(T, self.family_.m), {})
