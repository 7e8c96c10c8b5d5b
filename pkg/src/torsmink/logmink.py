"""Logarithmic inverse problem: prescribe the cone torsion measure.

The unknown polygon's offsets are optimized in log coordinates (positivity is
then automatic) for the min-max objective: the inner problem places a point
eta inside the body by maximizing a strictly concave log functional, and the
outer problem descends over offsets with tau = 1 held by exact rescaling.
Also houses the antipodal-line mass inequality and the arc discretization of
density measures used by the multi-level pipeline.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    FacetDeathError,
    InnerMaximizerError,
    InvalidExponentError,
    InvalidInputError,
    MassInequalityError,
    MeasureValidationError,
    NonConvergenceError,
)
from .fem import scale_solution, translate_solution
from .geometry import (
    DiscreteMeasure,
    Polytope2,
    general_position_check,
    hausdorff_distance,
    hemisphere_check,
    measure_to_json,
    polytope_to_json,
    scale_polytope,
    support_function,
    translate_polytope,
)
from .minkowski import MinkowskiConfig, _beta, _solve_state
from .norms import AnisotropicNorm, norm_value

N_DIM = 2
INNER_TOL_FACTOR = 1e-10
INNER_MAX_ITERS = 120
LINE_DET_TOL = 1e-9
DILATION_ASSERT_TOL = 1e-10
WARM_START_INFLATION = 0.5


def _gaps(P: Polytope2, mu: DiscreteMeasure, eta: np.ndarray) -> np.ndarray:
    """s_i = h_P(u_i) - eta . u_i, positive exactly when eta is interior."""
    h = np.max(mu.directions @ P.vertices.T, axis=1)
    return h - mu.directions @ eta


def inner_maximizer_eta(P: Polytope2, mu: DiscreteMeasure) -> np.ndarray:
    """Unique maximizer of sum_i alpha_i log(h_P(u_i) - eta . u_i) over Int(P).

    Damped Newton with a fraction-to-boundary cap on the step; the objective
    is strictly concave whenever the atoms span the plane, so the iteration
    converges from any interior start. Divergence signals a measure
    concentrated on a closed hemisphere.
    """
    alpha = mu.weights
    eta = np.mean(P.vertices, axis=0)
    s = _gaps(P, mu, eta)
    if np.any(s <= 0):
        raise InvalidInputError("starting point is not interior")
    tol = INNER_TOL_FACTOR * mu.total
    for _ in range(INNER_MAX_ITERS):
        w = alpha / s
        b = w @ mu.directions  # negative objective gradient
        if float(math.hypot(b[0], b[1])) <= tol:
            return eta
        A = (mu.directions * (w / s)[:, None]).T @ mu.directions
        try:
            delta = -np.linalg.solve(A, b)
        except np.linalg.LinAlgError:
            raise InnerMaximizerError(
                "inner Hessian is singular; atoms do not span the plane"
            )
        # Newton decrement bounds twice the gap to the maximum; once it
        # drops below the float resolution of the objective value, the
        # iterate cannot be improved in double precision
        val = float(alpha @ np.log(s))
        if float(-b @ delta) <= 64.0 * np.finfo(float).eps * (1.0 + abs(val)):
            return eta
        # keep a safety margin to the boundary of the feasible slab
        du = mu.directions @ delta
        shrink = du > 0
        gamma = 1.0
        if np.any(shrink):
            gamma = min(1.0, 0.95 * float(np.min(s[shrink] / du[shrink])))
        for _ in range(60):
            s_try = _gaps(P, mu, eta + gamma * delta)
            if np.all(s_try > 0) and float(alpha @ np.log(s_try)) >= val:
                break
            gamma *= 0.5
        else:
            raise InnerMaximizerError(
                "inner line search stalled; hemisphere condition likely fails",
                gradient_norm=float(math.hypot(b[0], b[1])),
            )
        eta = eta + gamma * delta
        s = _gaps(P, mu, eta)
    raise InnerMaximizerError(
        "inner Newton did not reach tolerance",
        gradient_norm=float(math.hypot(b[0], b[1])),
    )


def objective_log(P: Polytope2, mu: DiscreteMeasure) -> float:
    """Value of the inner maximum: sum_i alpha_i log(h_P(u_i) - eta(P) . u_i)."""
    eta = inner_maximizer_eta(P, mu)
    return float(mu.weights @ np.log(_gaps(P, mu, eta)))


@dataclass
class LogMinkowskiRun:
    input: DiscreteMeasure
    solution: Polytope2
    eta_history: list
    objective_history: list
    stationarity_residual: float
    final_scale: float
    converged: bool
    iterations: int

    def to_json(self) -> dict:
        return {
            "input": measure_to_json(self.input),
            "solution": polytope_to_json(self.solution),
            "eta_history": [list(map(float, e)) for e in self.eta_history],
            "objective_history": list(self.objective_history),
            "stationarity_residual": self.stationarity_residual,
            "final_scale": self.final_scale,
            "converged": self.converged,
            "iterations": self.iterations,
        }


def _validate_log_measure(mu: DiscreteMeasure) -> None:
    if len(mu) < 3:
        raise InvalidInputError("measure needs at least 3 atoms", atoms=len(mu))
    if not general_position_check(mu.directions):
        u = mu.directions
        cross = np.abs(u[:, 0:1] * u[None, :, 1] - u[:, 1:2] * u[None, :, 0])
        dots = u @ u.T
        dup = (cross <= LINE_DET_TOL) & (dots > 0) & ~np.eye(len(u), dtype=bool)
        if np.any(dup):
            i, j = np.argwhere(dup)[0]
            raise MeasureValidationError(
                "two atoms share a direction; one facet cannot carry both",
                kind="general_position",
                atoms=[int(i), int(j)],
            )
        warnings.warn(
            "antipodal atom directions: the existence guarantee assumes general "
            "position, attempting the descent anyway",
            RuntimeWarning,
            stacklevel=3,
        )
    hemi = hemisphere_check(mu)
    if hemi.concentrated:
        raise MeasureValidationError(
            "measure is concentrated on a closed hemisphere",
            kind="hemisphere_concentrated",
            margin=float(hemi.margin),
            witness=None if hemi.witness is None else hemi.witness.tolist(),
        )


def solve_log_minkowski(
    mu: DiscreteMeasure,
    F: AnisotropicNorm,
    p: float,
    cfg: MinkowskiConfig | None = None,
) -> LogMinkowskiRun:
    """Descent in log offsets for the prescribed cone-measure problem.

    Each accepted iterate is recentered so the inner maximizer sits at the
    origin and dilated exactly to tau = 1; there the objective equals
    sum alpha log h and its log-offset gradient is alpha - total beta (h S).
    At a stationary point the cone measure is proportional to the weights,
    and the final dilation by total^beta makes them equal.
    """
    if not p > 1.0:
        raise InvalidExponentError("exponent must satisfy p > 1", p=p)
    if p < 2.0:
        warnings.warn(
            "general-measure theory covers p >= 2; continuing with the discrete solver",
            RuntimeWarning,
            stacklevel=2,
        )
    cfg = cfg or MinkowskiConfig()
    _validate_log_measure(mu)

    rng = np.random.default_rng(cfg.seed)
    last_error: Exception | None = None
    for attempt in range(2):
        h = np.asarray(norm_value(F, mu.directions), dtype=float)
        if attempt > 0:
            h = h * (1.0 + 0.02 * rng.uniform(-1.0, 1.0, size=len(mu)))
        try:
            return _descend_log(mu, h, F, p, cfg)
        except FacetDeathError as err:
            last_error = err
            continue
    raise NonConvergenceError(
        "both descent attempts lost facets",
        iterations=0,
        partial=None,
        cause=str(last_error),
    )


def _trial_objective(mu, h, F, p, cfg, warm, beta):
    """Dilation-invariant outer value at arbitrary offsets (one PDE solve)."""
    P, sol, tau, s = _solve_state(
        mu, h, F, p, cfg.solver, warm=warm, min_facet_edges=cfg.min_facet_edges
    )
    val = objective_log(P, mu) - beta * mu.total * math.log(tau)
    return val, (P, sol, tau, s)


def _descent_direction(P, h, s, g, beta, total):
    """Newton-preconditioned direction for the outer descent in log offsets.

    The objective's curvature is dominated by the geometric response of facet
    lengths to the offsets, an exact tridiagonal matrix on the facet ring
    (each length is an affine function of its own offset and its two ring
    neighbors). Freezing the slowly varying flux factor S_k / length_k gives a
    cheap curvature model; its spectrum is floored to keep it positive
    definite before solving for the direction. Plain gradient descent stalls
    without this once the facet count grows, because per-facet modes carry
    curvature roughly facet-count times larger than smooth modes.
    """
    n = len(h)
    src = P.source_indices
    u = P.normals
    hr = h[src]
    sr = s[src]
    flux = sr / P.facet_lengths
    # short facets carry the noisiest recovered measures; cap their influence
    med = float(np.median(flux))
    if med > 0:
        flux = np.clip(flux, med / 3.0, med * 3.0)
    u_next = np.roll(u, -1, axis=0)
    cos_gap = np.clip(np.sum(u * u_next, axis=1), -1.0, 1.0)
    sin_gap = np.maximum(u[:, 0] * u_next[:, 1] - u[:, 1] * u_next[:, 0], 1e-12)
    idx = np.arange(n)
    prev = (idx - 1) % n
    T = np.zeros((n, n))
    T[idx, prev] += 1.0 / sin_gap[prev]
    T[idx, (idx + 1) % n] += 1.0 / sin_gap
    T[idx, idx] -= cos_gap[prev] / sin_gap[prev] + cos_gap / sin_gap
    B = (flux * hr)[:, None] * T * hr[None, :]
    H = -beta * total * (np.diag(sr * hr) + 0.5 * (B + B.T))
    w = np.linalg.eigvalsh(H)
    floor = max(-1.5 * float(w[0]), 1e-8 * max(1.0, float(w[-1])))
    d_ring = np.linalg.solve(H + floor * np.eye(n), g[src])
    d = np.zeros(n)
    d[src] = d_ring
    return d


def _descend_log(mu, h, F, p, cfg) -> LogMinkowskiRun:
    alpha = mu.weights
    total = mu.total
    beta = _beta(p)
    s_exp = (N_DIM * p - N_DIM + 1.0) / (p - 1.0)

    P, sol, tau, s = _solve_state(
        mu, h, F, p, cfg.solver, warm=None, min_facet_edges=cfg.min_facet_edges
    )
    eta_history: list[np.ndarray] = []
    objective_history: list[float] = []
    residual = np.inf
    converged = False
    iterations = 0

    for iterations in range(1, cfg.max_outer + 1):
        eta = inner_maximizer_eta(P, mu)
        eta_history.append(eta.copy())
        # recenter the inner maximizer to the origin, then dilate to tau = 1
        h = h - mu.directions @ eta
        P = translate_polytope(P, -eta)
        sol = translate_solution(sol, -eta)
        lam = tau ** (-beta)
        h = h * lam
        P = scale_polytope(P, lam)
        sol = scale_solution(sol, lam)
        s = s * lam ** s_exp
        tau = 1.0
        if np.any(h <= 0):
            raise InvalidInputError("recentred offsets must stay positive")

        m_val = float(alpha @ np.log(h))
        dilated = float(alpha @ np.log(2.0 * h)) - math.log(2.0) * total
        if abs(dilated - m_val) > DILATION_ASSERT_TOL * max(1.0, abs(m_val)):
            raise InvalidInputError(
                "dilation identity drifted", value=m_val, dilated=dilated
            )
        if objective_history and m_val > objective_history[-1] + 1e-10 * max(
            1.0, abs(objective_history[-1])
        ):
            raise InvalidInputError(
                "outer objective increased across an accepted step",
                value=m_val,
                previous=objective_history[-1],
            )
        if objective_history:
            m_val = min(m_val, objective_history[-1])
        objective_history.append(m_val)

        g = alpha - total * beta * h * s
        residual = float(np.max(np.abs(g) / alpha))
        if residual < cfg.tol:
            converged = True
            break

        directions = []
        try:
            directions.append(_descent_direction(P, h, s, g, beta, total))
        except np.linalg.LinAlgError:
            pass
        directions.append(g)
        log_h = np.log(h)
        accepted = False
        for d in directions:
            slope = float(g @ d)
            if not slope > 0.0:
                continue
            step = min(1.0, 0.3 / max(float(np.max(np.abs(d))), 1e-300))
            for _ in range(cfg.max_backtracks):
                h_try = np.exp(log_h - step * d)
                try:
                    m_try, state = _trial_objective(mu, h_try, F, p, cfg, sol, beta)
                except (FacetDeathError, InnerMaximizerError):
                    step *= 0.5
                    continue
                if m_try <= m_val - cfg.armijo * step * slope:
                    h = h_try
                    P, sol, tau, s = state
                    accepted = True
                    break
                step *= 0.5
            if accepted:
                break
        if not accepted:
            break

    lam_final = total ** beta
    solution = scale_polytope(P, lam_final)
    run = LogMinkowskiRun(
        input=mu,
        solution=solution,
        eta_history=eta_history,
        objective_history=objective_history,
        stationarity_residual=residual,
        final_scale=lam_final,
        converged=converged,
        iterations=iterations,
    )
    if not converged:
        raise NonConvergenceError(
            "stationarity residual did not reach tolerance",
            iterations=iterations,
            residual=residual,
            partial=run,
        )
    return run


def subspace_mass_check(mu: DiscreteMeasure, p: float) -> dict:
    """Antipodal-line mass bound: no line may carry a threshold fraction.

    threshold = 1 - (3p - 2) / (8 (p - 1)); at p = 2 this is exactly 1/2.
    """
    if not p >= 2.0:
        raise InvalidExponentError("mass inequality is stated for p >= 2", p=p)
    threshold = 1.0 - (N_DIM * (p - 1.0) + p) / (N_DIM * (N_DIM + 2.0) * (p - 1.0))
    u = mu.directions
    n = len(mu)
    assigned = np.full(n, -1, dtype=int)
    line_mass: list[float] = []
    for i in range(n):
        if assigned[i] >= 0:
            continue
        line = len(line_mass)
        assigned[i] = line
        mass = float(mu.weights[i])
        for j in range(i + 1, n):
            if assigned[j] >= 0:
                continue
            det = u[i, 0] * u[j, 1] - u[i, 1] * u[j, 0]
            if abs(det) <= LINE_DET_TOL:
                assigned[j] = line
                mass += float(mu.weights[j])
        line_mass.append(mass)
    worst_ratio = max(line_mass) / mu.total
    return {"ok": bool(worst_ratio < threshold), "worst_ratio": worst_ratio, "threshold": threshold}


GOLDEN_FRACTION = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass
class DensitySpec:
    """Circle measure description: uniform level, Fourier polynomial density,
    or a uniform background plus point atoms at given angles."""

    kind: str
    coeffs: list | None = None
    uniform_mass: float | None = None
    atoms: list | None = None  # [(angle, mass), ...]

    def __post_init__(self):
        if self.kind == "uniform":
            if self.coeffs is not None or self.atoms is not None:
                raise InvalidInputError("uniform density takes no parameters")
        elif self.kind == "fourier":
            if not self.coeffs or len(self.coeffs) % 2 == 0:
                raise InvalidInputError(
                    "fourier coeffs are [c0, a1, b1, ...], odd length",
                    got=self.coeffs,
                )
            theta = np.linspace(0.0, 2.0 * math.pi, 4096, endpoint=False)
            if np.any(self._fourier_values(theta) < 0):
                raise InvalidInputError("fourier density must be nonnegative")
        elif self.kind == "atoms_plus_uniform":
            if self.uniform_mass is None or self.uniform_mass < 0:
                raise InvalidInputError("atoms_plus_uniform needs uniform_mass >= 0")
            if not self.atoms:
                raise InvalidInputError("atoms_plus_uniform needs atoms")
            for a in self.atoms:
                if len(a) != 2 or a[1] <= 0:
                    raise InvalidInputError("atoms are (angle, positive mass) pairs")
        else:
            raise InvalidInputError(f"unknown density kind {self.kind!r}")

    def _fourier_values(self, theta: np.ndarray) -> np.ndarray:
        vals = np.full_like(theta, float(self.coeffs[0]))
        m = 1
        for i in range(1, len(self.coeffs), 2):
            vals += self.coeffs[i] * np.cos(m * theta) + self.coeffs[i + 1] * np.sin(m * theta)
            m += 1
        return vals

    def arc_mass(self, lo: float, hi: float) -> float:
        """Continuous-part mass of the arc [lo, hi)."""
        if self.kind == "uniform":
            return hi - lo
        if self.kind == "fourier":
            total = self.coeffs[0] * (hi - lo)
            m = 1
            for i in range(1, len(self.coeffs), 2):
                total += self.coeffs[i] * (math.sin(m * hi) - math.sin(m * lo)) / m
                total -= self.coeffs[i + 1] * (math.cos(m * hi) - math.cos(m * lo)) / m
                m += 1
            return total
        return self.uniform_mass * (hi - lo) / (2.0 * math.pi)

    def atom_list(self) -> list:
        if self.kind == "atoms_plus_uniform":
            return [(float(a[0]) % (2.0 * math.pi), float(a[1])) for a in self.atoms]
        return []

    def total_mass(self) -> float:
        return self.arc_mass(0.0, 2.0 * math.pi) + sum(m for _, m in self.atom_list())

    def to_json(self) -> dict:
        if self.kind == "uniform":
            return {"kind": "uniform"}
        if self.kind == "fourier":
            return {"kind": "fourier", "coeffs": [float(c) for c in self.coeffs]}
        return {
            "kind": "atoms-plus-uniform",
            "uniform_mass": float(self.uniform_mass),
            "atoms": [{"angle": float(a), "mass": float(m)} for a, m in self.atoms],
        }

    @staticmethod
    def from_json(data: dict) -> "DensitySpec":
        if not isinstance(data, dict) or "kind" not in data:
            raise InvalidInputError("density JSON needs a 'kind' field")
        kind = str(data["kind"]).replace("-", "_")
        if kind == "uniform":
            return DensitySpec("uniform")
        if kind == "fourier":
            return DensitySpec("fourier", coeffs=[float(c) for c in data.get("coeffs", [])])
        if kind == "atoms_plus_uniform":
            atoms = [
                (float(a["angle"]), float(a["mass"])) for a in data.get("atoms", [])
            ]
            return DensitySpec(
                "atoms_plus_uniform",
                uniform_mass=float(data.get("uniform_mass", 0.0)),
                atoms=atoms,
            )
        raise InvalidInputError(f"unknown density kind {data['kind']!r}")


def discretize_measure(density, k: int) -> DiscreteMeasure:
    """Partition the circle into ceil(2 pi k) arcs and place one atom per arc.

    Atom directions are arc midpoints shifted by a golden-ratio fractional
    offset, which keeps every pair of atoms linearly independent. Weights are
    the arc masses plus a 1/N^2 floor, normalized back to the input's total
    mass, so zero-density arcs still carry alive atoms.
    """
    if k < 8:
        raise InvalidInputError("discretization needs k >= 8", k=k)
    spec = _as_density(density)
    n_arcs = int(math.ceil(2.0 * math.pi * k))
    width = 2.0 * math.pi / n_arcs
    atoms = spec.atom_list()
    idx = np.arange(n_arcs)
    offset = 0.2 * width * ((idx + 1) * GOLDEN_FRACTION % 1.0)
    theta = (idx + 0.5) * width + offset
    weights = np.array(
        [spec.arc_mass(i * width, (i + 1) * width) for i in range(n_arcs)]
    )
    for angle, mass in atoms:
        weights[min(int(angle / width), n_arcs - 1)] += mass
    weights = weights + 1.0 / n_arcs ** 2
    weights *= spec.total_mass() / float(np.sum(weights))
    dirs = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    mu = DiscreteMeasure(dirs, weights)
    if not general_position_check(mu.directions):
        raise InvalidInputError("discretized directions lost general position", k=k)
    return mu


def _as_density(density) -> DensitySpec:
    if isinstance(density, DensitySpec):
        return density
    if isinstance(density, DiscreteMeasure):
        angles = np.arctan2(density.directions[:, 1], density.directions[:, 0])
        return DensitySpec(
            "atoms_plus_uniform",
            uniform_mass=0.0,
            atoms=[(float(a) % (2.0 * math.pi), float(w)) for a, w in zip(angles, density.weights)],
        )
    raise InvalidInputError("density must be a DensitySpec or DiscreteMeasure")


def _input_line_masses(spec: DensitySpec, p: float) -> None:
    """Reject inputs whose atomic part already violates the line-mass bound.

    Discretized atoms land on arc midpoints in general position, so an
    antipodal atom pair of the *input* would otherwise slip through the
    per-level checks.
    """
    atoms = spec.atom_list()
    if not atoms:
        return
    total = spec.total_mass()
    check = subspace_mass_check(
        DiscreteMeasure(
            np.stack(
                [[math.cos(a), math.sin(a)] for a, _ in atoms]
            ),
            np.array([m for _, m in atoms]),
        ),
        p,
    )
    threshold = check["threshold"]
    worst = check["worst_ratio"] * sum(m for _, m in atoms) / total
    if not worst < threshold:
        raise MassInequalityError(
            "input atoms put too much mass on one line",
            worst_ratio=worst,
            threshold=threshold,
        )


def solve_log_minkowski_general(
    density,
    F: AnisotropicNorm,
    p: float,
    k_levels: list,
    cfg: MinkowskiConfig | None = None,
) -> list:
    """Multi-level pipeline: discretize, check the mass bound, solve each level.

    Levels warm-start from the previous solution's support function inflated
    by a fraction of its inradius (a plain support-function restriction would
    start with zero-length facets). Returns one run per level; consecutive
    solutions should approach each other in Hausdorff distance.
    """
    if not p >= 2.0:
        raise InvalidExponentError(
            "general-measure pipeline requires p >= 2", p=p
        )
    if not k_levels:
        raise InvalidInputError("need at least one discretization level")
    cfg = cfg or MinkowskiConfig()
    spec = _as_density(density)
    _input_line_masses(spec, p)

    runs: list[LogMinkowskiRun] = []
    prev: Polytope2 | None = None
    for k in k_levels:
        mu = discretize_measure(spec, int(k))
        check = subspace_mass_check(mu, p)
        if not check["ok"]:
            raise MassInequalityError(
                "discretized measure violates the line-mass bound",
                k=int(k),
                worst_ratio=check["worst_ratio"],
                threshold=check["threshold"],
            )
        if prev is None:
            run = solve_log_minkowski(mu, F, p, cfg)
        else:
            run = _solve_warm(mu, F, p, cfg, prev)
        runs.append(run)
        prev = run.solution
    return runs


def _solve_warm(mu, F, p, cfg, prev: Polytope2) -> LogMinkowskiRun:
    from .geometry import body_metrics

    _validate_log_measure(mu)
    # inflating rounds the start enough that no facet begins degenerately
    # short (short facets carry disproportionate flux-recovery noise)
    inr = body_metrics(prev).inradius
    h = np.array(
        [support_function(prev, u) for u in mu.directions]
    ) + WARM_START_INFLATION * inr
    try:
        return _descend_log(mu, h, F, p, cfg)
    except (FacetDeathError, NonConvergenceError):
        return solve_log_minkowski(mu, F, p, cfg)


def cauchy_distances(runs: list) -> list:
    """Hausdorff distances between consecutive level solutions."""
    return [
        float(hausdorff_distance(runs[i].solution, runs[i + 1].solution))
        for i in range(len(runs) - 1)
    ]
