from fractions import Fraction

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from equiresolve import Desingularizer, Principalizer, ResolutionEstimator, TauStratifier
from equiresolve.errors import ZeroIdealError
from equiresolve.family import TauInvariant

NODES = "x^2 - y^2*(y + t)"


def test_params_round_trip():
    est = ResolutionEstimator(variables="x y", b=2, max_steps=10)
    params = est.get_params()
    assert params == {"variables": "x y", "b": 2, "divisors": None, "max_steps": 10}
    other = clone(est).set_params(b=3)
    assert other.b == 3 and est.b == 2


def test_resolution_estimator_predicts_lengths():
    est = ResolutionEstimator(variables=["x", "y"], b=2)
    lengths = est.fit_transform(["x^2 - y^3"])
    assert lengths[0].length == 1
    pred = est.predict(["x^2 - y^3", "x^2 - y^3"])
    assert pred.dtype == np.int64 and pred.tolist() == [1, 1]
    assert est.n_ideals_ == 1
    assert est.max_g_sequence(["x^2 - y^3"])[0][0].startswith("(")


def test_generators_can_be_listed_or_comma_separated():
    est = Principalizer(variables="x y").fit([["x*y"], "x*y"])
    assert est.n_ideals_ == 1
    assert est.predict(["x*y"]).tolist() == [5]
    assert est.score(["x*y"]) == 1.0


def test_desingularizer_predicts_the_index():
    assert Desingularizer(variables="x y").fit(["x^2 - y^3"]).predict(["x^2 - y^3"]).tolist() == [3]


def test_unfitted_estimators_refuse_to_predict():
    with pytest.raises(NotFittedError):
        ResolutionEstimator().predict(["x"])
    with pytest.raises(NotFittedError):
        TauStratifier(NODES).predict([0])


@pytest.mark.parametrize(
    "kwargs, X, error",
    [
        ({"b": 0}, ["x"], ValueError),
        ({"max_steps": 1.5}, ["x"], ValueError),
        ({"variables": "x x"}, ["x"], ValueError),
        ({"variables": ""}, ["x"], ValueError),
        ({}, "x^2 - y^3", TypeError),
        ({}, [], ValueError),
        ({}, ["0"], ZeroIdealError),
    ],
)
def test_validation(kwargs, X, error):
    with pytest.raises(error):
        ResolutionEstimator(**kwargs).fit(X)


def test_stratifier_labels_by_decreasing_tau():
    st = TauStratifier(NODES, variables="x y", params="t")
    labels = st.fit_predict([0, 1, -1, 2])
    assert labels.tolist() == [0, 1, 1, 1]
    assert st.taus_[0] > st.taus_[1]
    assert st.predict(["1/2", 0]).tolist() == [1, 0]


def test_stratifier_transform_and_invalid_fibers():
    st = TauStratifier("t*x", variables="x", params="t").fit([0, 1, Fraction(3)])
    assert [p["t"] for p, _ in st.invalid_] == [0]
    taus = st.transform([0, 1])
    assert taus[0] is None and isinstance(taus[1], TauInvariant)
    # an invalid sample matches no stratum
    assert st.predict([0]).tolist() == [-1]


def test_stratifier_checks_sample_shape():
    st = TauStratifier("x - s*t", variables="x", params="s t")
    with pytest.raises(ValueError):
        st.fit(np.zeros((3, 1)))
    with pytest.raises(TypeError):
        st.fit([(True, 1)])
