"""Classical inverse problem: find the convex polygon whose boundary
torsion measure matches a prescribed atomic measure on the circle.

The solver minimizes psi(h) = sum_k alpha_k h_k / tau(h)^beta over support
offsets h for the fixed atom directions, holding tau = 1 by exact rescaling
after every accepted step. At a minimizer the atom weights are proportional
to the facet measures, and one final dilation makes them equal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DirectionMismatchError,
    FacetDeathError,
    InvalidExponentError,
    InvalidInputError,
    MeasureValidationError,
    NonConvergenceError,
)
from .fem import (
    SolverConfig,
    TorsionSolution,
    interpolate_solution,
    scale_solution,
    solve_torsion_pde,
    translate_solution,
    triangulate,
)
from .geometry import (
    DiscreteMeasure,
    Polytope2,
    body_metrics,
    hemisphere_check,
    polytope_from_halfspaces,
    scale_polytope,
    translate_polytope,
)
from .norms import AnisotropicNorm, norm_value
from .torsion import facet_measure, torsion_volume

N_DIM = 2
# computed facet measures have zero centroid only up to discretization error
# (about 2e-4 relative at the default mesh), so the admission gate matches the
# centroid budget the forward solver certifies rather than float precision
CENTROID_TOL = 1e-2
HOMOGENEITY_ASSERT_TOL = 1e-8
TAU_RESCALE_TOL = 1e-6
# target mesh size as a fraction of the median facet length (see _mesh_size_for)
FACET_RESOLUTION = 0.4


def _beta(p: float) -> float:
    return (p - 1.0) / (N_DIM * (p - 1.0) + p)


@dataclass
class MinkowskiConfig:
    """Outer-loop settings; `solver` controls the inner PDE solves."""

    tol: float = 0.01
    max_outer: int = 200
    solver: SolverConfig = field(default_factory=SolverConfig)
    seed: int = 0
    armijo: float = 1e-4
    max_backtracks: int = 30
    # facet measures need a few boundary edges per facet even when facets
    # shrink below h_max, or their relative error floors the outer residual
    min_facet_edges: int = 3

    def __post_init__(self):
        if not (self.tol > 0):
            raise InvalidInputError("tol must be positive", tol=self.tol)
        if self.max_outer < 1:
            raise InvalidInputError("max_outer must be >= 1", max_outer=self.max_outer)
        if self.min_facet_edges < 1:
            raise InvalidInputError(
                "min_facet_edges must be >= 1", min_facet_edges=self.min_facet_edges
            )

    def to_json(self) -> dict:
        return {
            "tol": self.tol,
            "max_outer": self.max_outer,
            "solver": self.solver.to_json(),
            "seed": self.seed,
            "armijo": self.armijo,
            "max_backtracks": self.max_backtracks,
            "min_facet_edges": self.min_facet_edges,
        }

    @staticmethod
    def from_json(data: dict) -> "MinkowskiConfig":
        if not isinstance(data, dict):
            raise InvalidInputError("config JSON must be an object")
        solver = SolverConfig.from_json(data.get("solver", {}))
        return MinkowskiConfig(
            tol=float(data.get("tol", 0.01)),
            max_outer=int(data.get("max_outer", 200)),
            solver=solver,
            seed=int(data.get("seed", 0)),
            armijo=float(data.get("armijo", 1e-4)),
            max_backtracks=int(data.get("max_backtracks", 30)),
            min_facet_edges=int(data.get("min_facet_edges", 3)),
        )


@dataclass
class MeasureValidation:
    ok: bool
    centroid_norm: float
    hemisphere_margin: float

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "centroid_norm": self.centroid_norm,
            "hemisphere_margin": self.hemisphere_margin,
        }


def validate_measure_classical(mu: DiscreteMeasure) -> MeasureValidation:
    """Zero centroid and no closed-hemisphere concentration; diagnostic only."""
    if len(mu) < 3:
        raise InvalidInputError("measure needs at least 3 atoms", atoms=len(mu))
    cen = mu.weights @ mu.directions
    centroid_norm = float(math.hypot(cen[0], cen[1]))
    hemi = hemisphere_check(mu)
    ok = centroid_norm <= CENTROID_TOL * mu.total and not hemi.concentrated
    return MeasureValidation(
        ok=ok, centroid_norm=centroid_norm, hemisphere_margin=float(hemi.margin)
    )


def objective_psi(h, mu: DiscreteMeasure, tau: float, p: float) -> float:
    """psi = sum alpha_k h_k / tau^beta; invariant under dilating the body."""
    if not tau > 0:
        raise InvalidInputError("tau must be positive", tau=tau)
    h = np.asarray(h, dtype=float)
    if h.shape != (len(mu),):
        raise InvalidInputError("offsets must match the atom count", shape=list(h.shape))
    return float(mu.weights @ h) / tau ** _beta(p)


@dataclass
class MinkowskiRun:
    input: DiscreteMeasure
    solution: Polytope2
    psi_history: list
    final_scale: float
    residual: np.ndarray
    converged: bool
    iterations: int

    def to_json(self) -> dict:
        from .geometry import measure_to_json, polytope_to_json

        return {
            "input": measure_to_json(self.input),
            "solution": polytope_to_json(self.solution),
            "psi_history": list(self.psi_history),
            "final_scale": self.final_scale,
            "residual": self.residual.tolist(),
            "converged": self.converged,
            "iterations": self.iterations,
        }


def _body_from_offsets(mu: DiscreteMeasure, h: np.ndarray) -> Polytope2:
    P = polytope_from_halfspaces(mu.directions, h)
    if P.n_facets != len(mu):
        alive = set(int(i) for i in P.source_indices)
        dead = [k for k in range(len(mu)) if k not in alive]
        raise FacetDeathError("offsets lost a facet", dead_facets=dead)
    return P


def _mesh_size_for(P: Polytope2, h_max: float) -> float:
    """Mesh size adapted to facet length.

    The relative error of a recovered facet measure grows like the square of
    (mesh size / facet length), so many-facet bodies need a finer mesh than
    the global h_max to keep per-facet accuracy inside the outer tolerance.
    Refinement is capped at 4x so a single dying facet cannot blow up the
    node count.
    """
    f_med = float(np.median(P.facet_lengths))
    return min(h_max, max(FACET_RESOLUTION * f_med, 0.25 * h_max))


def _solve_state(
    mu: DiscreteMeasure,
    h: np.ndarray,
    F: AnisotropicNorm,
    p: float,
    scfg: SolverConfig,
    warm: TorsionSolution | None,
    min_facet_edges: int = 3,
):
    """One PDE solve at offsets h: returns (P, solution, tau, S in atom order)."""
    P = _body_from_offsets(mu, h)
    mesh = triangulate(P, _mesh_size_for(P, scfg.h_max), min_facet_edges=min_facet_edges)
    u0 = interpolate_solution(warm, mesh, p) if warm is not None else None
    sol = solve_torsion_pde(mesh, F, p, scfg, u0=u0)
    tau = torsion_volume(sol)
    s_facets = facet_measure(sol, P)
    s = np.zeros(len(mu))
    s[P.source_indices] = s_facets
    return P, sol, tau, s


def solve_minkowski(
    mu: DiscreteMeasure,
    F: AnisotropicNorm,
    p: float,
    cfg: MinkowskiConfig | None = None,
) -> MinkowskiRun:
    """Projected descent on support offsets for the prescribed-measure problem.

    Each iterate is recentered to its centroid and rescaled exactly to tau = 1;
    the descent direction is alpha - theta S with theta = beta sum(alpha h),
    and a backtracking line search keeps psi non-increasing (facet death counts
    as step rejection). The converged tau = 1 body is dilated once at the end
    so its facet measure carries the prescribed weights.
    """
    if not p > 1.0:
        raise InvalidExponentError("exponent must satisfy p > 1", p=p)
    cfg = cfg or MinkowskiConfig()
    val = validate_measure_classical(mu)
    if val.centroid_norm > CENTROID_TOL * mu.total:
        raise MeasureValidationError(
            "measure centroid is not zero",
            kind="centroid_nonzero",
            centroid_norm=val.centroid_norm,
        )
    if not val.ok:
        raise MeasureValidationError(
            "measure is concentrated on a closed hemisphere",
            kind="hemisphere_concentrated",
            margin=val.hemisphere_margin,
        )

    alpha = mu.weights
    beta = _beta(p)
    s_exp = (N_DIM * p - N_DIM + 1.0) / (p - 1.0)  # homogeneity degree of S
    rng = np.random.default_rng(cfg.seed)
    last_error: Exception | None = None

    for attempt in range(2):
        h = np.asarray(norm_value(F, mu.directions), dtype=float)
        if attempt > 0:
            h = h * (1.0 + 0.02 * rng.uniform(-1.0, 1.0, size=len(mu)))
        try:
            run = _descend(mu, h, F, p, cfg, alpha, beta, s_exp)
            return run
        except FacetDeathError as err:
            last_error = err
            continue
    raise NonConvergenceError(
        "both descent attempts lost facets",
        iterations=0,
        partial=None,
        cause=str(last_error),
    )


def _descend(mu, h, F, p, cfg, alpha, beta, s_exp) -> MinkowskiRun:
    edges = cfg.min_facet_edges
    P, sol, tau, s = _solve_state(mu, h, F, p, cfg.solver, warm=None, min_facet_edges=edges)
    psi_history: list[float] = []
    residual = np.full(len(mu), np.inf)
    converged = False
    iterations = 0
    theta = 0.0

    for iterations in range(1, cfg.max_outer + 1):
        # recenter to the centroid (psi and tau are translation invariant)
        t = body_metrics(P).centroid
        h = h - mu.directions @ t
        P = translate_polytope(P, -t)
        sol = translate_solution(sol, -t)
        # exact dilation to tau = 1 through the solution homogeneity
        lam = tau ** (-beta)
        h = h * lam
        P = scale_polytope(P, lam)
        sol = scale_solution(sol, lam)
        tau_scaled = torsion_volume(sol)
        if abs(tau_scaled - 1.0) > TAU_RESCALE_TOL:
            raise InvalidInputError(
                "tau rescale drifted", tau_after_rescale=tau_scaled
            )
        s = s * lam ** s_exp
        tau = tau_scaled

        psi = objective_psi(h, mu, tau, p)
        psi_doubled = objective_psi(2.0 * h, mu, tau * 2.0 ** (1.0 / beta), p)
        if abs(psi_doubled - psi) > HOMOGENEITY_ASSERT_TOL * abs(psi):
            raise InvalidInputError(
                "psi lost scale invariance", psi=psi, psi_doubled=psi_doubled
            )
        if psi_history and psi > psi_history[-1] * (1.0 + 1e-10):
            raise InvalidInputError(
                "psi increased across an accepted step",
                psi=psi,
                previous=psi_history[-1],
            )
        if psi_history:
            psi = min(psi, psi_history[-1])
        psi_history.append(psi)

        theta = beta * float(alpha @ h)
        g = alpha - theta * s
        residual = np.abs(g) / alpha
        if float(np.max(residual)) < cfg.tol:
            converged = True
            break

        step = 0.5 * float(np.min(h)) / max(float(np.max(np.abs(g))), 1e-300)
        gg = float(g @ g)
        accepted = False
        for _ in range(cfg.max_backtracks):
            h_try = h - step * g
            if np.any(h_try <= 0):
                step *= 0.5
                continue
            try:
                P_try, sol_try, tau_try, s_try = _solve_state(
                    mu, h_try, F, p, cfg.solver, warm=sol, min_facet_edges=edges
                )
            except FacetDeathError:
                step *= 0.5
                continue
            # evaluate psi where the next iteration will record it: after
            # recentering the trial body (psi is translation invariant only
            # up to the measure's centroid tolerance)
            t_try = body_metrics(P_try).centroid
            psi_try = objective_psi(h_try - mu.directions @ t_try, mu, tau_try, p)
            if psi_try <= psi - cfg.armijo * step * gg:
                h, P, sol, tau, s = h_try, P_try, sol_try, tau_try, s_try
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break

    lam_final = theta ** (1.0 / s_exp) if theta > 0 else 1.0
    solution = scale_polytope(P, lam_final)
    run = MinkowskiRun(
        input=mu,
        solution=solution,
        psi_history=psi_history,
        final_scale=lam_final,
        residual=residual,
        converged=converged,
        iterations=iterations,
    )
    if not converged:
        raise NonConvergenceError(
            "stationarity residual did not reach tolerance",
            iterations=iterations,
            residual_max=float(np.max(residual)),
            partial=run,
        )
    return run


def measure_residual(
    P: Polytope2,
    mu: DiscreteMeasure,
    F: AnisotropicNorm,
    p: float,
    cfg: SolverConfig | None = None,
) -> list:
    """Per-atom relative gap between the polygon's facet measure and mu."""
    if P.n_facets != len(mu):
        raise DirectionMismatchError(
            "facet count differs from atom count",
            facets=P.n_facets,
            atoms=len(mu),
        )
    match = np.full(len(mu), -1, dtype=int)
    for i in range(len(mu)):
        gaps = np.sqrt(np.sum((P.normals - mu.directions[i]) ** 2, axis=1))
        j = int(np.argmin(gaps))
        if gaps[j] > 1e-9:
            raise DirectionMismatchError(
                "atom direction has no matching facet normal",
                atom=i,
                nearest_gap=float(gaps[j]),
            )
        match[i] = j
    if len(set(match.tolist())) != len(mu):
        raise DirectionMismatchError("atom-to-facet matching is not one-to-one")
    cfg = cfg or SolverConfig()
    mesh = triangulate(P, _mesh_size_for(P, cfg.h_max), min_facet_edges=3)
    sol = solve_torsion_pde(mesh, F, p, cfg)
    s = facet_measure(sol, P)
    return [float(abs(s[match[i]] - mu.weights[i]) / mu.weights[i]) for i in range(len(mu))]
