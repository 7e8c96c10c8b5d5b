"""Torsional rigidity, boundary measures, and the identities tying them.

Three routes to the rigidity tau of a converged solution:

  * volume:   tau = int u
  * energy:   tau = -p/(p-1) * J(u)
  * boundary: tau = (p-1)/(n(p-1)+p) * sum_k h_k S_k

with S_k the facet measure (integral of F^p(grad u) over facet k) read from
the boundary gradient trace, n = 2, and h_k the facet offsets about the
body's own origin. The cone measure entries are the boundary-route summands,
so their total equals the boundary tau exactly by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FacetDeathError, InvalidInputError, OriginNotInteriorError
from .fem import (
    SolverConfig,
    TorsionSolution,
    flux_trace_arrays,
    solve_body,
)
from .geometry import Polytope2, body_metrics, polytope_from_halfspaces
from .norms import AnisotropicNorm
from .norms import wulff_shape as _wulff

N_DIM = 2


def _coef(p: float) -> float:
    return (p - 1.0) / (N_DIM * (p - 1.0) + p)


def torsion_volume(sol: TorsionSolution) -> float:
    """tau = int u, exact for P1 fields."""
    if not sol.converged:
        raise InvalidInputError("tau requires a converged solution")
    return float(sol.mesh.load @ sol.nodal_values)


def torsion_energy(sol: TorsionSolution) -> float:
    """tau = -p/(p-1) J(u); matches the volume route at stationarity."""
    if not sol.converged:
        raise InvalidInputError("tau requires a converged solution")
    return -sol.p / (sol.p - 1.0) * sol.energy


def facet_measure(sol: TorsionSolution, P: Polytope2) -> np.ndarray:
    """S_k = sum over facet-k edges of F^p(grad u) * edge length, with the
    boundary values read from the equilibrated flux recovery."""
    facets, lengths, fp = flux_trace_arrays(sol)
    if sol.mesh.n_facets != P.n_facets:
        raise InvalidInputError(
            "solution mesh does not match the polytope facet count",
            mesh_facets=sol.mesh.n_facets,
            polytope_facets=P.n_facets,
        )
    return np.bincount(facets, weights=lengths * fp, minlength=P.n_facets)


def cone_measure_terms(sol: TorsionSolution, P: Polytope2) -> np.ndarray:
    """Signed summands coef * h_k * S_k; the cone measure proper requires
    every offset positive."""
    s = facet_measure(sol, P)
    return _coef(sol.p) * P.offsets * s


def cone_measure(sol: TorsionSolution, P: Polytope2) -> np.ndarray:
    if np.any(P.offsets <= 0):
        raise OriginNotInteriorError(
            "cone measure needs the origin strictly inside",
            min_offset=float(np.min(P.offsets)),
        )
    return cone_measure_terms(sol, P)


def torsion_boundary(sol: TorsionSolution, P: Polytope2) -> float:
    """tau via the boundary route; equals sum(cone_measure_terms) exactly."""
    return float(np.sum(cone_measure_terms(sol, P)))


def pohozaev_residual(sol: TorsionSolution, P: Polytope2) -> float:
    """Relative gap in (n(p-1)+p) int u = (p-1) int_bdry F^p(grad u) <x, nu>."""
    p = sol.p
    lhs = (N_DIM * (p - 1.0) + p) * torsion_volume(sol)
    s = facet_measure(sol, P)
    rhs = (p - 1.0) * float(P.offsets @ s)
    return abs(lhs - rhs) / abs(lhs)


@dataclass
class TorsionReport:
    tau_volume: float
    tau_boundary: float
    tau_energy: float
    facet_measure: np.ndarray
    cone_measure: np.ndarray
    pohozaev_residual: float
    centroid_residual: np.ndarray  # (sum_k S_k u_k) / sum_k S_k
    error_estimate: float          # a priori O(h) relative estimate: h_max / inradius
    p: float
    n: int = N_DIM

    def to_json(self) -> dict:
        return {
            "tau_volume": self.tau_volume,
            "tau_boundary": self.tau_boundary,
            "tau_energy": self.tau_energy,
            "facet_measure": self.facet_measure.tolist(),
            "cone_measure": self.cone_measure.tolist(),
            "pohozaev_residual": self.pohozaev_residual,
            "centroid_residual": self.centroid_residual.tolist(),
            "error_estimate": self.error_estimate,
            "p": self.p,
            "n": self.n,
        }


def torsion_report(sol: TorsionSolution, P: Polytope2) -> TorsionReport:
    s = facet_measure(sol, P)
    cone = cone_measure_terms(sol, P)
    tau_b = float(np.sum(cone))
    centroid = (s @ P.normals) / float(np.sum(s))
    metrics = body_metrics(P)
    return TorsionReport(
        tau_volume=torsion_volume(sol),
        tau_boundary=tau_b,
        tau_energy=torsion_energy(sol),
        facet_measure=s,
        cone_measure=cone,
        pohozaev_residual=pohozaev_residual(sol, P),
        centroid_residual=centroid,
        error_estimate=sol.mesh.h_max / metrics.inradius,
        p=sol.p,
    )


def _perturbed(P: Polytope2, offsets: np.ndarray) -> Polytope2:
    Q = polytope_from_halfspaces(P.normals, offsets)
    if Q.n_facets != P.n_facets:
        survivors = set(int(i) for i in Q.source_indices)
        dead = [k for k in range(P.n_facets) if k not in survivors]
        raise FacetDeathError("perturbation killed a facet", dead_facets=dead)
    return Q


def variational_derivative_check(
    P: Polytope2,
    f: np.ndarray,
    step: float,
    F: AnisotropicNorm,
    p: float,
    cfg: SolverConfig | None = None,
    min_facet_edges: int = 2,
) -> dict:
    """Central finite difference of tau under h + t f against sum f_k S_k."""
    cfg = cfg or SolverConfig()
    f = np.asarray(f, dtype=float)
    if f.shape != (P.n_facets,):
        raise InvalidInputError("perturbation must have one entry per facet", shape=list(f.shape))
    base = solve_body(P, F, p, cfg, min_facet_edges=min_facet_edges)
    s = facet_measure(base, P)
    formula = float(f @ s)
    sol_plus = solve_body(_perturbed(P, P.offsets + step * f), F, p, cfg, min_facet_edges)
    sol_minus = solve_body(_perturbed(P, P.offsets - step * f), F, p, cfg, min_facet_edges)
    fd = (torsion_volume(sol_plus) - torsion_volume(sol_minus)) / (2.0 * step)
    floor = 1e-12 * max(1.0, float(np.abs(f) @ s))
    return {
        "fd_derivative": fd,
        "formula_value": formula,
        "rel_gap": abs(fd - formula) / max(abs(formula), floor),
    }


def log_variational_check(
    P: Polytope2,
    f: np.ndarray,
    step: float,
    F: AnisotropicNorm,
    p: float,
    cfg: SolverConfig | None = None,
    min_facet_edges: int = 2,
) -> dict:
    """Central difference of tau under h * exp(t f) against the cone-measure
    pairing ((n(p-1)+p)/(p-1)) sum f_k tau_log_k."""
    cfg = cfg or SolverConfig()
    f = np.asarray(f, dtype=float)
    if f.shape != (P.n_facets,):
        raise InvalidInputError("perturbation must have one entry per facet", shape=list(f.shape))
    if np.any(P.offsets <= 0):
        raise OriginNotInteriorError("log perturbations need positive offsets")
    base = solve_body(P, F, p, cfg, min_facet_edges=min_facet_edges)
    cone = cone_measure(base, P)
    formula = float((N_DIM * (p - 1.0) + p) / (p - 1.0) * (f @ cone))
    sol_plus = solve_body(_perturbed(P, P.offsets * np.exp(step * f)), F, p, cfg, min_facet_edges)
    sol_minus = solve_body(_perturbed(P, P.offsets * np.exp(-step * f)), F, p, cfg, min_facet_edges)
    fd = (torsion_volume(sol_plus) - torsion_volume(sol_minus)) / (2.0 * step)
    floor = 1e-12 * max(1.0, abs(formula))
    return {
        "fd_derivative": fd,
        "formula_value": formula,
        "rel_gap": abs(fd - formula) / max(abs(formula), floor),
    }


def saint_venant_check(
    P: Polytope2,
    F: AnisotropicNorm,
    p: float,
    tau: float,
    wulff_vertices: int = 4096,
) -> dict:
    """Upper bound tau <= c_p n^{-1/(p-1)} kappa^{-p/(n(p-1))} |K|^{(n(p-1)+p)/(n(p-1))},
    kappa = area of the Wulff shape {F_0 <= 1}. Sharp when K is the Wulff shape."""
    kappa = body_metrics(_wulff(F, wulff_vertices)).area
    area = body_metrics(P).area
    n = float(N_DIM)
    exponent = (n * (p - 1.0) + p) / (n * (p - 1.0))
    bound = (
        _coef(p)
        * n ** (-1.0 / (p - 1.0))
        * kappa ** (-p / (n * (p - 1.0)))
        * area**exponent
    )
    return {
        "bound": bound,
        "kappa": kappa,
        "satisfied": bool(tau <= bound * (1.0 + 1e-9)),
        "slack_factor": bound / tau,
    }
