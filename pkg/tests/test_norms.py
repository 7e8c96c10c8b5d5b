"""Norm evaluation, gradients, duality, Wulff shapes, and the axiom audit."""

import math

import numpy as np
import pytest

from torsmink.errors import InvalidInputError, NormDomainError
from torsmink.geometry import body_metrics
from torsmink.norms import (
    check_norm_axioms,
    dual_norm_value,
    euclidean,
    lq,
    norm_from_json,
    norm_gradient,
    norm_to_json,
    norm_value,
    smoothed_l1,
    wulff_shape,
)


def test_euclidean_345():
    assert norm_value(euclidean(), (3.0, 4.0)) == pytest.approx(5.0, abs=1e-14)


def test_lq4_diagonal():
    assert norm_value(lq(4.0), (1.0, 1.0)) == pytest.approx(2.0**0.25, abs=1e-14)


def test_norm_vanishes_only_at_origin():
    for F in (euclidean(), lq(4.0), smoothed_l1()):
        assert norm_value(F, (0.0, 0.0)) == 0.0
        rng = np.random.default_rng(0)
        xi = rng.normal(size=(50, 2))
        assert np.all(norm_value(F, xi) > 0)


def test_gradient_euclidean_345():
    g = norm_gradient(euclidean(), (3.0, 4.0))
    assert np.allclose(g, [0.6, 0.8], atol=1e-14)


def test_gradient_lq4_diagonal():
    g = norm_gradient(lq(4.0), (1.0, 1.0))
    assert np.allclose(g, [2.0**-0.75, 2.0**-0.75], atol=1e-14)


def test_gradient_rejects_origin():
    with pytest.raises(NormDomainError):
        norm_gradient(lq(4.0), (0.0, 0.0))


def test_euler_identity_random():
    # 1-homogeneity forces <grad F(xi), xi> = F(xi)
    rng = np.random.default_rng(1)
    xi = rng.normal(size=(100, 2))
    for F in (euclidean(), lq(4.0), smoothed_l1()):
        g = norm_gradient(F, xi)
        gap = np.abs(np.sum(g * xi, axis=1) - norm_value(F, xi))
        assert np.max(gap) < 1e-10


def test_dual_euclidean_self():
    assert dual_norm_value(euclidean(), (3.0, 4.0)) == pytest.approx(5.0, rel=1e-9)


def test_dual_lq4_is_conjugate_exponent():
    # dual of the q-norm is the q'-norm with 1/q + 1/q' = 1; at q = 4,
    # q' = 4/3 and |(1,1)|_{4/3} = 2^{3/4} (matches a brute-force grid sup)
    assert dual_norm_value(lq(4.0), (1.0, 1.0)) == pytest.approx(2.0**0.75, rel=1e-6)


def test_biduality_random():
    rng = np.random.default_rng(2)
    for F in (euclidean(), lq(4.0)):
        for _ in range(5):
            x = rng.normal(size=2)
            fx = norm_value(F, x)

            def dual_of_dual(y):
                ang = np.linspace(0.0, 2.0 * math.pi, 4096, endpoint=False)
                dirs = np.stack([np.cos(ang), np.sin(ang)], axis=-1)
                duals = np.array([dual_norm_value(F, d) for d in dirs])
                return float(np.max(dirs @ y / duals))

            assert abs(dual_of_dual(x) - fx) / fx < 1e-5


def test_wulff_euclidean_area():
    W = wulff_shape(euclidean(), 256)
    assert body_metrics(W).area == pytest.approx(math.pi, rel=1e-3)


def test_wulff_smoothed_l1_tends_to_square():
    # dual of the 1-norm is the max-norm, whose unit ball is [-1,1]^2
    W = wulff_shape(smoothed_l1(1e-4), 512)
    assert body_metrics(W).area == pytest.approx(4.0, rel=5e-3)


def test_wulff_contains_origin():
    for F in (euclidean(), lq(4.0), smoothed_l1()):
        W = wulff_shape(F, 128)
        assert np.all(W.offsets > 0)


def test_axioms_euclidean():
    rep = check_norm_axioms(euclidean(), 2.0, 1000, seed=3)
    assert rep.homogeneity_max_err < 1e-12
    assert rep.convexity_violations == 0
    assert rep.a_est == pytest.approx(1.0, abs=1e-12)
    assert rep.b_est == pytest.approx(1.0, abs=1e-12)
    assert rep.lipschitz_lemma_max_slack >= 0.0


def test_axioms_lq4_circle_extremes():
    # min of the 4-norm on the circle sits at (1,1)/sqrt(2): 2^{-1/4}
    rep = check_norm_axioms(lq(4.0), 3.0, 1000, seed=4)
    assert rep.a_est == pytest.approx(2.0**-0.25, rel=1e-6)
    assert rep.b_est == pytest.approx(1.0, rel=1e-9)
    assert rep.convexity_violations == 0
    assert rep.lipschitz_lemma_max_slack >= 0.0


def test_growth_slack_identity_case():
    # xi = eta makes both sides of the growth bound vanish
    F = lq(4.0)
    xi = np.array([0.7, -0.2])
    p = 3.0
    lhs = abs(norm_value(F, xi) ** p - norm_value(F, xi) ** p)
    rhs = p * (2.0 * norm_value(F, xi)) ** (p - 1.0) * norm_value(F, xi - xi)
    assert rhs - lhs == 0.0


def test_axioms_rejects_small_sample():
    with pytest.raises(InvalidInputError):
        check_norm_axioms(euclidean(), 2.0, 10)


def test_norm_json_round_trip():
    for F in (euclidean(), lq(3.5), smoothed_l1(0.02)):
        G = norm_from_json(norm_to_json(F))
        xi = np.array([[0.3, -1.2], [2.0, 0.1]])
        assert np.allclose(norm_value(G, xi), norm_value(F, xi), rtol=1e-15)
