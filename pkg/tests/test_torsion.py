"""Torsion functionals: the three tau routes, boundary measures, identities."""

import math

import numpy as np
import pytest

from torsmink.errors import OriginNotInteriorError
from torsmink.fem import SolverConfig, solve_body, translate_solution
from torsmink.geometry import (
    body_metrics,
    box_polytope,
    regular_polygon,
    translate_polytope,
)
from torsmink.norms import euclidean
from torsmink.torsion import (
    cone_measure,
    cone_measure_terms,
    facet_measure,
    log_variational_check,
    pohozaev_residual,
    saint_venant_check,
    torsion_boundary,
    torsion_report,
    torsion_volume,
    variational_derivative_check,
)

# tau of the centered unit square at p = 2 from the double sine series:
# sum over odd m, n of 64 / (pi^6 m^2 n^2 (m^2 + n^2)), modes up to 2000
SQUARE_TAU_SERIES = 0.03514425373519816


def test_tau_disk_p2():
    disk = regular_polygon(128, 1.0)
    sol = solve_body(disk, euclidean(), 2.0, SolverConfig(h_max=0.02))
    assert torsion_volume(sol) == pytest.approx(math.pi / 8.0, rel=0.015)


def test_tau_square_series(square_solution):
    _, sol = square_solution
    assert torsion_volume(sol) == pytest.approx(SQUARE_TAU_SERIES, rel=0.02)


def test_tau_scaling_lambda4(square_solution):
    # scaling the body and the mesh together multiplies tau by lambda^4
    _, sol = square_solution
    big = solve_body(box_polytope(1.0, 1.0), euclidean(), 2.0, SolverConfig(h_max=0.1))
    ratio = torsion_volume(big) / torsion_volume(sol)
    assert ratio == pytest.approx(16.0, rel=0.005)


def test_three_tau_agreement_square_fine():
    square = box_polytope(0.5, 0.5)
    sol = solve_body(square, euclidean(), 2.0, SolverConfig(h_max=0.02))
    rep = torsion_report(sol, square)
    assert rep.tau_boundary == pytest.approx(rep.tau_volume, rel=0.03)
    assert rep.tau_energy == pytest.approx(rep.tau_volume, rel=1e-5)


def test_boundary_translation_sensitivity(square_solution):
    # tau_boundary is translation invariant in the continuum; a fresh solve
    # on the translated body must stay within discretization error
    square, sol = square_solution
    base = torsion_boundary(sol, square)
    moved = translate_polytope(square, (0.2, 0.1))
    sol_m = solve_body(moved, euclidean(), 2.0, SolverConfig())
    assert torsion_boundary(sol_m, moved) == pytest.approx(base, rel=0.03)


def test_facet_measure_square_symmetry(square_solution):
    # sum h_k S_k = 4 tau and h_k = 1/2 force S_k = 2 tau on the square
    square, sol = square_solution
    s = facet_measure(sol, square)
    tau = torsion_volume(sol)
    assert np.max(s) / np.min(s) - 1.0 < 0.01
    assert np.allclose(s, 2.0 * tau, rtol=0.01)


def test_facet_measure_centroid(square_solution, polygon_suite):
    square, sol = square_solution
    bodies = [(square, sol)]
    for P in polygon_suite[:2]:
        bodies.append((P, solve_body(P, euclidean(), 2.0, SolverConfig())))
    for P, s_sol in bodies:
        s = facet_measure(s_sol, P)
        moment = np.linalg.norm(s @ P.normals)
        assert moment / np.sum(s) < 1e-2


def test_facet_measure_scaling_exponent(square_solution):
    # S_k(lambda K) = lambda^3 S_k(K) at p = 2
    square, sol = square_solution
    big_body = box_polytope(1.0, 1.0)
    big = solve_body(big_body, euclidean(), 2.0, SolverConfig(h_max=0.1))
    ratio = facet_measure(big, big_body) / facet_measure(sol, square)
    assert np.allclose(ratio, 8.0, rtol=0.01)


def test_cone_total_equals_boundary(square_solution):
    square, sol = square_solution
    cone = cone_measure(sol, square)
    assert np.all(cone >= 0)
    assert np.sum(cone) == pytest.approx(torsion_boundary(sol, square), rel=1e-12)


def test_cone_square_quarters(square_solution):
    square, sol = square_solution
    cone = cone_measure(sol, square)
    tau = torsion_volume(sol)
    assert np.allclose(cone, tau / 4.0, rtol=0.01)


def test_cone_requires_interior_origin(square_solution):
    square, sol = square_solution
    shifted = translate_polytope(square, (0.7, 0.0))
    with pytest.raises(OriginNotInteriorError):
        cone_measure(translate_solution(sol, (0.7, 0.0)), shifted)


def test_cone_linear_in_offsets(square_solution):
    # moving the origin rescales each cone term by exactly h_k'/h_k, since
    # the facet measure is unchanged under a joint translation
    square, sol = square_solution
    t = np.array([0.35, -0.2])
    moved = translate_polytope(square, t)
    cone0 = cone_measure_terms(sol, square)
    cone1 = cone_measure_terms(translate_solution(sol, t), moved)
    expect = moved.offsets / square.offsets
    assert np.allclose(cone1 / cone0, expect, rtol=1e-12)


def test_pohozaev_square_and_refinement(square_solution):
    square, sol = square_solution
    coarse = pohozaev_residual(sol, square)
    assert coarse < 0.03
    fine = solve_body(square, euclidean(), 2.0, SolverConfig(h_max=0.03))
    assert pohozaev_residual(fine, square) < coarse


def test_pohozaev_rigid_relabeling(square_solution):
    # translating the body together with its origin relabels coordinates
    # only: offsets stay, gradients stay, residual is reproduced exactly
    square, sol = square_solution
    r0 = pohozaev_residual(sol, square)
    rt = pohozaev_residual(translate_solution(sol, (0.3, -0.4)), square)
    assert abs(rt - r0) < 1e-12


def test_variational_uniform_expansion():
    square = box_polytope(0.5, 0.5)
    f = np.ones(4)
    chk = variational_derivative_check(
        square, f, 1e-3, euclidean(), 2.0, SolverConfig(h_max=0.02)
    )
    # formula value is the total facet measure, about 8 tau on the square
    assert chk["formula_value"] == pytest.approx(8.0 * SQUARE_TAU_SERIES, rel=0.02)
    assert chk["rel_gap"] < 0.02


def test_variational_single_facet(square_solution):
    square, sol = square_solution
    s = facet_measure(sol, square)
    f = np.zeros(4)
    f[1] = 1.0
    chk = variational_derivative_check(square, f, 1e-3, euclidean(), 2.0, SolverConfig())
    assert chk["fd_derivative"] == pytest.approx(s[1], rel=0.03)


def test_variational_zero_perturbation():
    square = box_polytope(0.5, 0.5)
    chk = variational_derivative_check(square, np.zeros(4), 1e-3, euclidean(), 2.0, SolverConfig())
    assert chk["formula_value"] == 0.0
    assert abs(chk["fd_derivative"]) < 1e-12


def test_log_variational_dilation():
    # h -> e^t h dilates the body, so the derivative is 4 tau at n = p = 2
    square = box_polytope(0.5, 0.5)
    chk = log_variational_check(square, np.ones(4), 1e-3, euclidean(), 2.0, SolverConfig())
    base = solve_body(square, euclidean(), 2.0, SolverConfig())
    assert chk["fd_derivative"] == pytest.approx(4.0 * torsion_volume(base), rel=0.02)
    assert chk["rel_gap"] < 0.02


def test_log_variational_random():
    rng = np.random.default_rng(11)
    square = box_polytope(0.5, 0.5)
    f = rng.uniform(-1.0, 1.0, 4)
    chk = log_variational_check(square, f, 1e-3, euclidean(), 2.0, SolverConfig())
    assert chk["rel_gap"] < 0.03


def test_saint_venant_fixed_area_trend():
    # among equal-area bodies the bound is a constant, so the slack factor
    # orders inversely to tau; the disk (Wulff shape) sits closest to 1
    F = euclidean()
    n = 96
    r = math.sqrt(2.0 / (n * math.sin(2.0 * math.pi / n)))
    slabs = {}
    b = math.sqrt(1.0 / 12.0)
    for name, P in (
        ("disk", regular_polygon(n, r)),
        ("square", box_polytope(0.5, 0.5)),
        ("rect3", box_polytope(3.0 * b, b)),
    ):
        sol = solve_body(P, F, 2.0, SolverConfig(h_max=0.03))
        chk = saint_venant_check(P, F, 2.0, torsion_volume(sol))
        assert chk["satisfied"]
        slabs[name] = chk["slack_factor"]
    assert slabs["disk"] < slabs["square"] < slabs["rect3"]
    assert slabs["disk"] == pytest.approx(1.0, rel=0.02)


def test_report_consistency(square_solution):
    square, sol = square_solution
    rep = torsion_report(sol, square)
    taus = [rep.tau_volume, rep.tau_boundary, rep.tau_energy]
    spread = (max(taus) - min(taus)) / rep.tau_volume
    assert spread <= rep.error_estimate
    assert np.all(rep.facet_measure >= 0)
    assert np.all(rep.cone_measure >= 0)
    data = rep.to_json()
    for key in (
        "tau_volume",
        "tau_boundary",
        "tau_energy",
        "facet_measure",
        "cone_measure",
        "pohozaev_residual",
        "centroid_residual",
        "error_estimate",
    ):
        assert key in data
