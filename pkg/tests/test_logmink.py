"""Cone-measure inverse problem: inner maximizer, descent, discretization."""

import math
import warnings

import numpy as np
import pytest

from torsmink.errors import (
    InvalidExponentError,
    InvalidInputError,
    MassInequalityError,
    MeasureValidationError,
)
from torsmink.fem import SolverConfig, solve_body
from torsmink.geometry import (
    DiscreteMeasure,
    body_metrics,
    box_polytope,
    hausdorff_distance,
    regular_polygon,
    translate_polytope,
)
from torsmink.logmink import (
    DensitySpec,
    cauchy_distances,
    discretize_measure,
    inner_maximizer_eta,
    objective_log,
    solve_log_minkowski,
    solve_log_minkowski_general,
    subspace_mass_check,
)
from torsmink.minkowski import MinkowskiConfig
from torsmink.norms import euclidean
from torsmink.torsion import cone_measure, torsion_volume

E1 = np.array([1.0, 0.0])
E2 = np.array([0.0, 1.0])
AXES = np.array([E1, E2, -E1, -E2])


def axis_measure(weights):
    return DiscreteMeasure(AXES, np.asarray(weights, dtype=float))


def test_inner_maximizer_symmetric_square():
    P = box_polytope(0.5, 0.5)
    eta = inner_maximizer_eta(P, axis_measure(np.ones(4)))
    assert np.allclose(eta, 0.0, atol=1e-10)


def test_inner_maximizer_translation_equivariant():
    P = box_polytope(0.5, 0.5)
    mu = axis_measure([1.0, 2.0, 1.5, 0.7])
    t = np.array([0.12, -0.05])
    eta0 = inner_maximizer_eta(P, mu)
    eta1 = inner_maximizer_eta(translate_polytope(P, t), mu)
    assert np.allclose(eta1, eta0 + t, atol=1e-9)


def test_inner_maximizer_triangle_vs_grid():
    rng = np.random.default_rng(13)
    ang = np.array([0.4, 2.5, 4.4]) + rng.uniform(-0.2, 0.2, 3)
    dirs = np.stack([np.cos(ang), np.sin(ang)], axis=-1)
    P = regular_polygon(3, 1.0, phase=rng.uniform(0, 2))
    mu = DiscreteMeasure(dirs, rng.uniform(0.5, 1.5, 3))
    eta = inner_maximizer_eta(P, mu)
    hvals = np.max(mu.directions @ P.vertices.T, axis=1)
    gaps = hvals - mu.directions @ eta
    assert np.all(gaps > 0)
    grad = (mu.weights / gaps) @ mu.directions
    assert np.linalg.norm(grad) < 1e-8 * mu.total
    best = float(mu.weights @ np.log(gaps))
    lo = np.min(P.vertices, axis=0)
    hi = np.max(P.vertices, axis=0)
    grid_best = -math.inf
    for x in np.linspace(lo[0], hi[0], 120):
        for y in np.linspace(lo[1], hi[1], 120):
            g = hvals - mu.directions @ np.array([x, y])
            if np.all(g > 0):
                grid_best = max(grid_best, float(mu.weights @ np.log(g)))
    assert grid_best <= best + 1e-8


def test_objective_log_dilation_identity():
    P = box_polytope(0.5, 0.5)
    mu = axis_measure([1.0, 2.0, 1.5, 0.7])
    base = objective_log(P, mu)
    for lam in (0.5, 3.0):
        scaled = objective_log(
            box_polytope(0.5 * lam, 0.5 * lam), mu
        )
        assert scaled == pytest.approx(base + math.log(lam) * mu.total, abs=1e-9)


def test_objective_log_square_value():
    # eta = 0 by symmetry, so the value is 4 log(1/2)
    P = box_polytope(0.5, 0.5)
    val = objective_log(P, axis_measure(np.ones(4)))
    assert val == pytest.approx(4.0 * math.log(0.5), abs=1e-10)


def test_objective_log_translation_invariant():
    P = box_polytope(0.5, 0.5)
    mu = axis_measure([1.0, 2.0, 1.5, 0.7])
    val = objective_log(P, mu)
    moved = objective_log(translate_polytope(P, (0.2, 0.1)), mu)
    assert moved == pytest.approx(val, abs=1e-10)


def test_round_trip_square_cone_measure(square_solution):
    square, sol = square_solution
    mu = DiscreteMeasure(square.normals, cone_measure(sol, square))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        run = solve_log_minkowski(mu, euclidean(), 2.0, MinkowskiConfig())
    assert run.converged
    # no centroid alignment: the cone measure pins the origin
    dist = hausdorff_distance(run.solution, square)
    assert dist <= 0.03 * body_metrics(square).diameter
    assert run.stationarity_residual <= 0.05


def test_symmetric_four_atoms_give_centered_square():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        run = solve_log_minkowski(axis_measure(np.ones(4)), euclidean(), 2.0, MinkowskiConfig())
    h = run.solution.offsets
    assert np.max(h) / np.min(h) - 1.0 < 1e-6
    eta = inner_maximizer_eta(run.solution, axis_measure(np.ones(4)))
    assert np.linalg.norm(eta) < 1e-8
    hist = np.asarray(run.objective_history)
    assert np.all(np.diff(hist) <= 1e-12)
    assert np.all(h > 0)


def test_pentagon_symmetry_reduction():
    # equal atoms at 72 degrees force a regular pentagon; its scale follows
    # from tau(s P1) = s^4 tau(P1) = total mass at the stationary point
    ang = 2.0 * math.pi * np.arange(5) / 5.0
    mu = DiscreteMeasure(np.stack([np.cos(ang), np.sin(ang)], axis=-1), np.ones(5))
    run = solve_log_minkowski(mu, euclidean(), 2.0, MinkowskiConfig())
    assert run.converged
    h = run.solution.offsets
    assert np.max(h) / np.min(h) - 1.0 < 1e-6
    P1 = regular_polygon(5, 1.0 / math.cos(math.pi / 5.0))  # unit offsets
    assert np.allclose(P1.offsets, 1.0, atol=1e-12)
    tau1 = torsion_volume(solve_body(P1, euclidean(), 2.0, SolverConfig()))
    s_oracle = (mu.total / tau1) ** 0.25
    assert np.mean(h) == pytest.approx(s_oracle, rel=0.03)
    assert run.stationarity_residual < 0.05


def test_solution_total_mass_consistency():
    ang = np.array([0.15, 1.1, 2.3, 3.1, 4.0, 5.3])
    mu = DiscreteMeasure(
        np.stack([np.cos(ang), np.sin(ang)], axis=-1),
        np.array([1.0, 0.6, 1.4, 0.8, 1.1, 0.9]),
    )
    run = solve_log_minkowski(mu, euclidean(), 2.0, MinkowskiConfig())
    assert run.converged
    tau = torsion_volume(solve_body(run.solution, euclidean(), 2.0, SolverConfig()))
    assert tau == pytest.approx(mu.total, rel=0.05)


def test_duplicate_directions_rejected():
    dirs = np.array([E1, E1, E2, -E1, -E2])
    mu = DiscreteMeasure(dirs, np.ones(5))
    with pytest.raises(MeasureValidationError):
        solve_log_minkowski(mu, euclidean(), 2.0, MinkowskiConfig())


def test_subspace_threshold_p2_exact():
    res = subspace_mass_check(axis_measure(np.ones(4)), 2.0)
    assert res["threshold"] == 0.5
    assert res["worst_ratio"] == 0.5
    assert not res["ok"]


def test_subspace_examples():
    # atom order here is (e1, e2, -e1, -e2); lines pair indices {0,2}, {1,3}
    res = subspace_mass_check(axis_measure([1.0, 1.0, 1.0, 0.9]), 2.0)
    assert res["worst_ratio"] == pytest.approx(2.0 / 3.9, rel=1e-12)
    assert not res["ok"]
    res = subspace_mass_check(axis_measure([1.0, 1.2, 1.0, 1.2]), 2.0)
    assert res["worst_ratio"] == pytest.approx(2.4 / 4.4, rel=1e-12)
    assert not res["ok"]
    res = subspace_mass_check(axis_measure([1.0, 1.0, 1.2, 1.2]), 2.0)
    assert res["worst_ratio"] == pytest.approx(0.5, rel=1e-12)
    assert not res["ok"]
    ang = 2.0 * math.pi * np.arange(3) / 3.0
    tri = DiscreteMeasure(np.stack([np.cos(ang), np.sin(ang)], axis=-1), np.ones(3))
    assert subspace_mass_check(tri, 2.0)["ok"]


def test_subspace_threshold_other_p():
    # threshold = 1 - (3p - 2) / (8 (p - 1))
    res = subspace_mass_check(axis_measure(np.ones(4)), 3.0)
    assert res["threshold"] == pytest.approx(1.0 - 7.0 / 16.0, rel=1e-14)
    with pytest.raises(InvalidExponentError):
        subspace_mass_check(axis_measure(np.ones(4)), 1.5)


def test_discretize_uniform_equal_weights():
    for k in (8, 16):
        mu = discretize_measure(DensitySpec(kind="uniform"), k)
        assert len(mu) == int(math.ceil(2.0 * math.pi * k))
        assert np.ptp(mu.weights) < 1e-12 * np.mean(mu.weights)
        assert mu.total == pytest.approx(2.0 * math.pi, rel=1e-12)


def test_discretize_spike_concentrates():
    spike_angle = 1.234
    spec = DensitySpec(
        kind="atoms_plus_uniform", uniform_mass=0.05, atoms=[(spike_angle, 1.0)]
    )
    errs = []
    for k in (8, 32):
        mu = discretize_measure(spec, k)
        top = int(np.argmax(mu.weights))
        assert mu.weights[top] > 0.9
        errs.append(abs(math.atan2(*mu.directions[top][::-1]) - spike_angle))
    assert errs[1] < errs[0]


def test_discretize_weak_convergence():
    # against density 1 + 0.5 sin t: integral of sin is pi/2, of cos is 0
    spec = DensitySpec(kind="fourier", coeffs=[1.0, 0.0, 0.5])
    gaps = []
    for k in (8, 16, 32):
        mu = discretize_measure(spec, k)
        theta = np.arctan2(mu.directions[:, 1], mu.directions[:, 0])
        sin_gap = abs(float(mu.weights @ np.sin(theta)) - math.pi / 2.0)
        cos_gap = abs(float(mu.weights @ np.cos(theta)))
        gaps.append(sin_gap + cos_gap)
    # measured: 2.6e-2, 1.3e-2, 6.1e-3 (first order in the arc width)
    assert gaps[2] < 0.3 * gaps[0]
    assert gaps[2] < 1e-2


def test_density_spec_validation():
    with pytest.raises(InvalidInputError):
        DensitySpec(kind="fourier", coeffs=[1.0, 0.3])  # even length
    with pytest.raises(InvalidInputError):
        DensitySpec(kind="fourier", coeffs=[0.1, 0.0, 0.5])  # negative part
    with pytest.raises(InvalidInputError):
        DensitySpec(kind="atoms_plus_uniform", uniform_mass=0.1, atoms=[])
    with pytest.raises(InvalidInputError):
        DensitySpec(kind="nope")


def test_density_json_round_trip():
    specs = [
        DensitySpec(kind="uniform"),
        DensitySpec(kind="fourier", coeffs=[1.0, 0.2, -0.3]),
        DensitySpec(kind="atoms_plus_uniform", uniform_mass=0.4, atoms=[(0.3, 1.0)]),
    ]
    for spec in specs:
        back = DensitySpec.from_json(spec.to_json())
        assert back.kind == spec.kind
        assert back.total_mass() == pytest.approx(spec.total_mass(), rel=1e-14)


def test_pipeline_rejects_antipodal_spikes():
    spec = DensitySpec(
        kind="atoms_plus_uniform",
        uniform_mass=1.0,
        atoms=[(0.5, 0.75), (0.5 + math.pi, 0.75)],
    )
    with pytest.raises(MassInequalityError):
        solve_log_minkowski_general(spec, euclidean(), 2.0, [8], MinkowskiConfig())


def test_pipeline_two_levels_uniform():
    runs = solve_log_minkowski_general(
        DensitySpec(kind="uniform"), euclidean(), 2.0, [8, 16], MinkowskiConfig()
    )
    assert len(runs) == 2
    assert all(r.converged for r in runs)
    dists = cauchy_distances(runs)
    assert len(dists) == 1 and dists[0] > 0
    for r in runs:
        eta = inner_maximizer_eta(r.solution, r.input)
        assert np.all(r.solution.offsets > 0)
        assert np.linalg.norm(eta) < body_metrics(r.solution).inradius
