import math

import pytest

import oobball


def test_distance_on_the_sphere():
    assert oobball.distance("sphere:2", [1, 0, 0], [0, 1, 0]) == pytest.approx(math.pi / 2)


def test_fit_predict_and_ball():
    data = oobball.simulate("sphere_great_circle", n=60, seed=3)
    forest = oobball.fit(data["x"], data["y"], data["predictors"], data["response"], trees=30, seed=2)
    assert forest.trees == 30
    x = [math.cos(0.1), math.sin(0.1)]
    center = forest.predict(x)
    assert sum(c * c for c in center) == pytest.approx(1.0)
    c10, r10 = forest.ball(x, 0.10)
    c05, r05 = forest.ball(x, 0.05)
    assert c10 == center
    assert 0.0 < r10 <= r05
    assert len(forest.oob_errors()) <= 60


def test_json_round_trip():
    data = oobball.simulate("euclidean_linear", n=40, seed=4)
    forest = oobball.fit(data["x"], data["y"], data["predictors"], data["response"], trees=10, flavor="mrf")
    back = oobball.load_forest(forest.to_json())
    assert back.flavor == "mrf"
    assert back.predict([0.2, 0.1, -0.3]) == forest.predict([0.2, 0.1, -0.3])


def test_invalid_point_raises():
    with pytest.raises(ValueError):
        oobball.fit([[0.0], [1.0]], [[1, 1, 0], [0, 0, 1]], "product[euclidean:1]", "sphere:2", trees=5)


def test_geometry_checks_pass():
    assert all(ok for _, ok in oobball.validate_geometry(triples=200))
