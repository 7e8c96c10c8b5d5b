"""Shared fixtures: the random convex-polygon suite and cached square solves."""

import math

import numpy as np
import pytest

from torsmink.fem import SolverConfig, solve_body
from torsmink.geometry import body_metrics, box_polytope, polytope_from_halfspaces
from torsmink.norms import euclidean

SUITE_SEED = 20240817


def pytest_configure(config):
    config.acceptance_lines = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


def random_polygon(rng, n_min=4, n_max=8, min_ratio=0.2):
    """One random convex polygon with inradius/diameter >= min_ratio."""
    for _ in range(256):
        n = int(rng.integers(n_min, n_max + 1))
        ang = np.sort(rng.uniform(0.0, 2.0 * math.pi, n))
        gaps = np.diff(np.append(ang, ang[0] + 2.0 * math.pi))
        if np.min(gaps) < 0.2 or np.max(gaps) > math.pi - 0.2:
            continue
        normals = np.stack([np.cos(ang), np.sin(ang)], axis=-1)
        offsets = rng.uniform(0.7, 1.3, n)
        P = polytope_from_halfspaces(normals, offsets)
        if P.n_facets < 3:
            continue
        m = body_metrics(P)
        if m.inradius / m.diameter >= min_ratio:
            return P
    raise RuntimeError("polygon sampling failed")


@pytest.fixture(scope="session")
def polygon_suite():
    """Ten random convex polygons, inradius/diameter >= 0.2, fixed seed."""
    rng = np.random.default_rng(SUITE_SEED)
    return [random_polygon(rng) for _ in range(10)]


@pytest.fixture(scope="session")
def square_solution():
    """Centered unit square [-1/2, 1/2]^2 solved at the default mesh size."""
    square = box_polytope(0.5, 0.5)
    sol = solve_body(square, euclidean(), 2.0, SolverConfig())
    return square, sol
