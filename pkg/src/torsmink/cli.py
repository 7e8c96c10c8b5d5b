"""Command-line front end: JSON/CSV plumbing around the library solvers.

Subcommands
  solve-pde      solve the Dirichlet problem on one body, dump the solution
  torsion        torsion report for one body, or a CSV sweep over several
  measure        facet and cone measures of a body, with validation fields
  minkowski      recover a body from a prescribed facet measure
  log-minkowski  recover a body from a cone measure or a density spec
  verify         run the invariant suite and write report.json

Exit codes: 0 success, 1 validation failure (error JSON on stderr),
2 solver non-convergence (partial result written when an output path is set).
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidInputError, NonConvergenceError, ToolError
from .fem import SolverConfig, TorsionSolution, solve_body
from .geometry import (
    DiscreteMeasure,
    body_metrics,
    box_polytope,
    hausdorff_distance,
    measure_from_json,
    measure_to_json,
    polytope_from_halfspaces,
    polytope_from_json,
    polytope_from_vertices,
    regular_polygon,
    translate_polytope,
)
from .logmink import (
    DensitySpec,
    cauchy_distances,
    inner_maximizer_eta,
    solve_log_minkowski,
    solve_log_minkowski_general,
    subspace_mass_check,
)
from .minkowski import MinkowskiConfig, solve_minkowski, validate_measure_classical
from .norms import euclidean, norm_from_json, norm_value
from .serialize import _format_float, dump_path, dumps, load_path
from .torsion import (
    cone_measure_terms,
    facet_measure,
    log_variational_check,
    saint_venant_check,
    torsion_report,
    torsion_volume,
    variational_derivative_check,
)

# unit-square torsion (p = 2, Euclidean) from the double sine series
# sum over odd m, n of 64 / (pi^6 m^2 n^2 (m^2 + n^2)), modes up to 2000
SQUARE_TAU_SERIES = 0.03514425373519816
# disk center value for p = 3: (p-1)/p * n^(-1/(p-1)) with n = 2, R = 1
DISK_CENTER_P3 = (2.0 / 3.0) / math.sqrt(2.0)

CSV_COLUMNS = [
    "body",
    "area",
    "tau_volume",
    "tau_boundary",
    "tau_energy",
    "pohozaev_residual",
    "centroid_residual",
    "error_estimate",
]


@dataclass
class RunConfig:
    """Validated bundle of one CLI invocation."""

    command: str
    p: float = 2.0
    norm: object = None
    solver: SolverConfig = field(default_factory=SolverConfig)
    outer: MinkowskiConfig | None = None
    seed: int = 0
    body_paths: list = field(default_factory=list)
    measure_path: str | None = None
    density_path: str | None = None
    out_path: str | None = None
    csv: bool = False
    k_levels: list = field(default_factory=list)
    suite: str = "fast"

    def __post_init__(self):
        if self.command not in (
            "solve-pde",
            "torsion",
            "measure",
            "minkowski",
            "log-minkowski",
            "verify",
        ):
            raise InvalidInputError("unknown command", command=self.command)
        if not self.p > 1.0:
            raise InvalidInputError("p must be > 1", p=self.p)
        for attr in ("h_max", "grad_tol"):
            if not getattr(self.solver, attr) > 0:
                raise InvalidInputError(f"solver {attr} must be positive")
        if self.norm is None:
            self.norm = euclidean()
        for path in list(self.body_paths) + [self.measure_path, self.density_path]:
            if path is not None and not os.access(path, os.R_OK):
                raise InvalidInputError("input path is not readable", path=str(path))
        if self.out_path is not None:
            parent = Path(self.out_path).resolve().parent
            if not os.access(parent, os.W_OK):
                raise InvalidInputError(
                    "output directory is not writable", path=str(parent)
                )


def _load_norm(path: str | None):
    if path is None:
        return euclidean()
    return norm_from_json(load_path(path))


def _load_body(path: str):
    data = load_path(path)
    if isinstance(data, dict) and "vertices" in data and "normals" not in data:
        return polytope_from_vertices(data["vertices"])
    return polytope_from_json(data)


def _load_outer_config(path: str | None) -> MinkowskiConfig:
    if path is None:
        return MinkowskiConfig()
    data = load_path(path)
    if isinstance(data, dict) and set(data) <= {"h_max", "grad_tol", "max_iters", "delta"}:
        # a bare solver config file configures the inner PDE solves only
        return MinkowskiConfig(solver=SolverConfig.from_json(data))
    return MinkowskiConfig.from_json(data)


def _load_solver_config(path: str | None) -> SolverConfig:
    if path is None:
        return SolverConfig()
    return SolverConfig.from_json(load_path(path))


def _emit(payload: dict, out_path: str | None) -> None:
    if out_path is None:
        sys.stdout.write(dumps(payload))
    else:
        dump_path(payload, out_path)


def _solution_payload(sol: TorsionSolution) -> dict:
    # int u computed directly so partial (unconverged) states serialize too
    return {
        "nodes": sol.mesh.nodes.tolist(),
        "triangles": sol.mesh.triangles.tolist(),
        "values": sol.nodal_values.tolist(),
        "tau_volume": float(sol.mesh.load @ sol.nodal_values),
        "energy": sol.energy,
        "converged": sol.converged,
        "iterations": sol.iterations,
        "p": sol.p,
        "delta": sol.delta,
    }


def _cmd_solve_pde(cfg: RunConfig) -> int:
    P = _load_body(cfg.body_paths[0])
    sol = solve_body(P, cfg.norm, cfg.p, cfg.solver)
    _emit(_solution_payload(sol), cfg.out_path)
    return 0


def _csv_line(cells: list) -> str:
    parts = []
    for cell in cells:
        parts.append(cell if isinstance(cell, str) else _format_float(float(cell)))
    return ",".join(parts) + "\n"


def _cmd_torsion(cfg: RunConfig) -> int:
    if cfg.csv:
        lines = [",".join(CSV_COLUMNS) + "\n"]
        for path in cfg.body_paths:
            P = _load_body(path)
            sol = solve_body(P, cfg.norm, cfg.p, cfg.solver)
            rep = torsion_report(sol, P)
            centroid = float(np.sqrt(np.sum(rep.centroid_residual**2)))
            lines.append(
                _csv_line(
                    [
                        Path(path).name,
                        body_metrics(P).area,
                        rep.tau_volume,
                        rep.tau_boundary,
                        rep.tau_energy,
                        rep.pohozaev_residual,
                        centroid,
                        rep.error_estimate,
                    ]
                )
            )
        text = "".join(lines)
        if cfg.out_path is None:
            sys.stdout.write(text)
        else:
            Path(cfg.out_path).write_text(text)
        return 0
    P = _load_body(cfg.body_paths[0])
    sol = solve_body(P, cfg.norm, cfg.p, cfg.solver)
    _emit(torsion_report(sol, P).to_json(), cfg.out_path)
    return 0


def _cmd_measure(cfg: RunConfig) -> int:
    P = _load_body(cfg.body_paths[0])
    sol = solve_body(P, cfg.norm, cfg.p, cfg.solver)
    s = facet_measure(sol, P)
    mu = DiscreteMeasure(P.normals, s)
    val = validate_measure_classical(mu)
    payload = {
        "tau_volume": torsion_volume(sol),
        "facet_measure": measure_to_json(mu),
        "cone_measure": None,
        "validation": {
            "ok": val.ok,
            "centroid_norm": val.centroid_norm,
            "hemisphere_margin": val.hemisphere_margin,
        },
    }
    if np.all(P.offsets > 0):
        cone = cone_measure_terms(sol, P)
        payload["cone_measure"] = measure_to_json(DiscreteMeasure(P.normals, cone))
    _emit(payload, cfg.out_path)
    return 0


def _cmd_minkowski(cfg: RunConfig) -> int:
    mu = measure_from_json(load_path(cfg.measure_path))
    run = solve_minkowski(mu, cfg.norm, cfg.p, cfg.outer)
    _emit(run.to_json(), cfg.out_path)
    return 0


def _cmd_log_minkowski(cfg: RunConfig) -> int:
    if cfg.measure_path is not None:
        mu = measure_from_json(load_path(cfg.measure_path))
        run = solve_log_minkowski(mu, cfg.norm, cfg.p, cfg.outer)
        _emit(run.to_json(), cfg.out_path)
        return 0
    density = DensitySpec.from_json(load_path(cfg.density_path))
    levels = cfg.k_levels or [8, 16, 32]
    runs = solve_log_minkowski_general(density, cfg.norm, cfg.p, levels, cfg.outer)
    payload = {
        "density": density.to_json(),
        "k_levels": [int(k) for k in levels],
        "runs": [r.to_json() for r in runs],
        "cauchy_distances": cauchy_distances(runs),
    }
    _emit(payload, cfg.out_path)
    return 0


def _rayleigh_ratio(sol, trial: np.ndarray) -> float:
    """((int psi)^p / int F^p(grad psi))^(1/(p-1)) / tau for a trial field."""
    mesh = sol.mesh
    g = np.einsum("tab,tb->ta", mesh.grad_mats, trial[mesh.triangles])
    num = float(mesh.load @ trial) ** sol.p
    den = float(mesh.areas @ norm_value(sol.norm, g) ** sol.p)
    lhs = (num / den) ** (1.0 / (sol.p - 1.0))
    return lhs / torsion_volume(sol)


def _random_body(rng: np.random.Generator, n: int):
    for _ in range(64):
        ang = np.sort(rng.uniform(0.0, 2.0 * math.pi, n))
        if np.min(np.diff(ang)) < 0.15:
            continue
        U = np.stack([np.cos(ang), np.sin(ang)], axis=-1)
        h = rng.uniform(0.8, 1.2, n)
        P = polytope_from_halfspaces(U, h)
        if P.n_facets == n:
            return P
    raise InvalidInputError("could not draw a non-degenerate random body")


def _verify_invariants(suite: str, seed: int) -> list:
    rng = np.random.default_rng(seed)
    F = euclidean()
    records = []

    def record(name, observed, tolerance, passed):
        records.append(
            {
                "name": name,
                "status": "pass" if bool(passed) else "fail",
                "observed": None if observed is None else float(observed),
                "tolerance": float(tolerance),
            }
        )

    def guarded(name, tolerance, thunk):
        try:
            observed, passed = thunk()
        except Exception:
            record(name, None, tolerance, False)
        else:
            record(name, observed, tolerance, passed)

    square = box_polytope(0.5, 0.5)
    scfg = SolverConfig()
    sol = solve_body(square, F, 2.0, scfg)
    rep = torsion_report(sol, square)

    guarded(
        "square_tau_vs_series",
        0.02,
        lambda: (
            abs(rep.tau_volume - SQUARE_TAU_SERIES) / SQUARE_TAU_SERIES,
            abs(rep.tau_volume - SQUARE_TAU_SERIES) / SQUARE_TAU_SERIES < 0.02,
        ),
    )
    guarded(
        "tau_energy_identity",
        1e-5,
        lambda: (
            abs(rep.tau_energy - rep.tau_volume) / rep.tau_volume,
            abs(rep.tau_energy - rep.tau_volume) / rep.tau_volume < 1e-5,
        ),
    )
    guarded(
        "tau_boundary_identity",
        0.03,
        lambda: (
            abs(rep.tau_boundary - rep.tau_volume) / rep.tau_volume,
            abs(rep.tau_boundary - rep.tau_volume) / rep.tau_volume < 0.03,
        ),
    )
    guarded(
        "pohozaev_square",
        0.03,
        lambda: (rep.pohozaev_residual, rep.pohozaev_residual < 0.03),
    )

    def _max_principle():
        lo = float(np.min(sol.nodal_values))
        hi = float(np.max(sol.nodal_values))
        return lo / hi, lo >= -1e-8 * hi

    guarded("max_principle", 1e-8, _max_principle)

    def _centroid():
        obs = float(np.sqrt(np.sum(rep.centroid_residual**2)))
        return obs, obs < 1e-2

    guarded("facet_measure_centroid", 1e-2, _centroid)

    def _homogeneity():
        lam = 1.25
        big = solve_body(
            box_polytope(0.5 * lam, 0.5 * lam), F, 2.0, SolverConfig(h_max=0.05 * lam)
        )
        slope = math.log(torsion_volume(big) / rep.tau_volume) / math.log(lam)
        return abs(slope - 4.0), abs(slope - 4.0) < 0.01

    guarded("tau_homogeneity_exponent", 0.01, _homogeneity)

    def _measure_scaling():
        lam = 1.25
        bigP = box_polytope(0.5 * lam, 0.5 * lam)
        big = solve_body(bigP, F, 2.0, SolverConfig(h_max=0.05 * lam))
        ratio = float(np.sum(facet_measure(big, bigP)) / np.sum(rep.facet_measure))
        slope = math.log(ratio) / math.log(lam)
        return abs(slope - 3.0), abs(slope - 3.0) < 0.02

    guarded("measure_scaling_exponent", 0.02, _measure_scaling)

    def _saint_venant():
        chk = saint_venant_check(square, F, 2.0, rep.tau_volume)
        return chk["slack_factor"], chk["satisfied"]

    guarded("saint_venant_bound", 0.0, _saint_venant)

    def _rayleigh():
        trial = np.maximum(sol.nodal_values, 0.0) ** 0.9
        ratio = _rayleigh_ratio(sol, trial)
        return ratio, ratio <= 1.0 + 1e-6

    guarded("rayleigh_bound", 1e-6, _rayleigh)

    def _minkowski_roundtrip():
        mu = DiscreteMeasure(square.normals, rep.facet_measure)
        run = solve_minkowski(mu, F, 2.0, MinkowskiConfig(seed=seed))
        c = body_metrics(run.solution).centroid
        dist = hausdorff_distance(translate_polytope(run.solution, -c), square)
        obs = dist / body_metrics(square).diameter
        return obs, obs < 0.03

    guarded("minkowski_square_roundtrip", 0.03, _minkowski_roundtrip)

    def _logmink_roundtrip():
        cone = cone_measure_terms(sol, square)
        mu = DiscreteMeasure(square.normals, cone)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            run = solve_log_minkowski(mu, F, 2.0, MinkowskiConfig(seed=seed))
        obs = hausdorff_distance(run.solution, square) / body_metrics(square).diameter
        return obs, obs < 0.03

    guarded("logmink_square_roundtrip", 0.03, _logmink_roundtrip)

    def _inner_grid():
        P = _random_body(rng, 5)
        ang = np.sort(rng.uniform(0.0, 2.0 * math.pi, 5))
        mu = DiscreteMeasure(
            np.stack([np.cos(ang), np.sin(ang)], axis=-1),
            rng.uniform(0.5, 1.5, 5),
        )
        eta = inner_maximizer_eta(P, mu)
        hvals = np.max(mu.directions @ P.vertices.T, axis=1)
        best = float(mu.weights @ np.log(hvals - mu.directions @ eta))
        lo = np.min(P.vertices, axis=0)
        hi = np.max(P.vertices, axis=0)
        xs = np.linspace(lo[0], hi[0], 80)
        ys = np.linspace(lo[1], hi[1], 80)
        grid_best = -math.inf
        for x in xs:
            gaps = hvals[None, :] - np.outer(ys, mu.directions[:, 1]) - x * mu.directions[:, 0]
            ok = np.all(gaps > 0, axis=1)
            if np.any(ok):
                vals = np.log(gaps[ok]) @ mu.weights
                grid_best = max(grid_best, float(np.max(vals)))
        obs = grid_best - best
        return obs, obs <= 1e-8

    guarded("inner_maximizer_vs_grid", 1e-8, _inner_grid)

    def _threshold():
        mu = DiscreteMeasure(
            np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]]),
            np.ones(4),
        )
        thr = subspace_mass_check(mu, 2.0)["threshold"]
        return thr, thr == 0.5

    guarded("subspace_threshold_p2", 0.0, _threshold)

    def _disk():
        disk = regular_polygon(64, 1.0)
        dsol = solve_body(disk, F, 2.0, SolverConfig(h_max=0.08))
        obs = abs(torsion_volume(dsol) - math.pi / 8.0) / (math.pi / 8.0)
        return obs, obs < 0.03

    guarded("disk_tau_p2", 0.03, _disk)

    if suite == "full":
        def _disk_fine():
            disk = regular_polygon(128, 1.0)
            dsol = solve_body(disk, F, 2.0, SolverConfig(h_max=0.02))
            obs = abs(torsion_volume(dsol) - math.pi / 8.0) / (math.pi / 8.0)
            return obs, obs < 0.015

        guarded("disk_tau_p2_fine", 0.015, _disk_fine)

        def _disk_p3():
            disk = regular_polygon(96, 1.0)
            dsol = solve_body(disk, F, 3.0, SolverConfig(h_max=0.03))
            center = int(np.argmin(np.sum(dsol.mesh.nodes**2, axis=1)))
            obs = abs(dsol.nodal_values[center] - DISK_CENTER_P3) / DISK_CENTER_P3
            return obs, obs < 0.02

        guarded("disk_center_p3", 0.02, _disk_p3)

        def _variational():
            f = rng.uniform(-1.0, 1.0, square.n_facets)
            chk = variational_derivative_check(square, f, 1e-3, F, 2.0, scfg)
            return chk["rel_gap"], chk["rel_gap"] < 0.03

        guarded("variational_identity", 0.03, _variational)

        def _log_variational():
            f = rng.uniform(-1.0, 1.0, square.n_facets)
            chk = log_variational_check(square, f, 1e-3, F, 2.0, scfg)
            return chk["rel_gap"], chk["rel_gap"] < 0.03

        guarded("log_variational_identity", 0.03, _log_variational)

        def _rect_roundtrip():
            rect = box_polytope(1.0, 0.5)
            rsol = solve_body(rect, F, 2.0, scfg)
            mu = DiscreteMeasure(rect.normals, facet_measure(rsol, rect))
            run = solve_minkowski(mu, F, 2.0, MinkowskiConfig(seed=seed))
            c = body_metrics(run.solution).centroid
            dist = hausdorff_distance(translate_polytope(run.solution, -c), rect)
            obs = dist / body_metrics(rect).diameter
            return obs, obs < 0.03

        guarded("minkowski_rect_roundtrip", 0.03, _rect_roundtrip)

        def _asymmetric():
            ang = np.array([0.15, 1.1, 2.3, 3.1, 4.0, 5.3])
            mu = DiscreteMeasure(
                np.stack([np.cos(ang), np.sin(ang)], axis=-1),
                np.array([1.0, 0.6, 1.4, 0.8, 1.1, 0.9]),
            )
            run = solve_log_minkowski(mu, F, 2.0, MinkowskiConfig(seed=seed))
            return run.stationarity_residual, run.converged

        guarded("logmink_asymmetric_6atom", 0.01, _asymmetric)

        def _refinement():
            disk = regular_polygon(64, 1.0)
            errs = []
            for h in (0.1, 0.05):
                dsol = solve_body(disk, F, 2.0, SolverConfig(h_max=h))
                center = int(np.argmin(np.sum(dsol.mesh.nodes**2, axis=1)))
                errs.append(abs(dsol.nodal_values[center] - 0.25))
            return errs[1] / errs[0], errs[1] < errs[0]

        guarded("disk_center_refinement", 1.0, _refinement)

        def _pipeline():
            runs = solve_log_minkowski_general(
                DensitySpec(kind="uniform"),
                F,
                2.0,
                [8, 16],
                MinkowskiConfig(seed=seed),
            )
            m = body_metrics(runs[-1].solution)
            per = float(np.sum(runs[-1].solution.facet_lengths))
            iso = 4.0 * math.pi * m.area / per**2
            return iso, iso >= 0.99

        guarded("pipeline_uniform_isoperimetric", 0.99, _pipeline)

    return records


def _cmd_verify(cfg: RunConfig) -> int:
    records = _verify_invariants(cfg.suite, cfg.seed)
    report = {
        "suite": cfg.suite,
        "seed": cfg.seed,
        "invariants": records,
        "passed": sum(1 for r in records if r["status"] == "pass"),
        "failed": sum(1 for r in records if r["status"] != "pass"),
    }
    out = cfg.out_path or "report.json"
    dump_path(report, out)
    sys.stdout.write(f"{report['passed']} passed, {report['failed']} failed\n")
    if report["failed"]:
        raise ToolError(
            "invariant suite has failures",
            kind="verify_failed",
            failed=[r["name"] for r in records if r["status"] != "pass"],
        )
    return 0


_HANDLERS = {
    "solve-pde": _cmd_solve_pde,
    "torsion": _cmd_torsion,
    "measure": _cmd_measure,
    "minkowski": _cmd_minkowski,
    "log-minkowski": _cmd_log_minkowski,
    "verify": _cmd_verify,
}


def run(cfg: RunConfig) -> int:
    """Dispatch one validated invocation; returns the process exit code."""
    return _HANDLERS[cfg.command](cfg)


class _Parser(argparse.ArgumentParser):
    """Usage problems become structured validation errors (exit code 1)."""

    def error(self, message):
        raise InvalidInputError(message)


def _parse_args(argv=None) -> argparse.Namespace:
    parser = _Parser(
        prog="torsmink",
        description="anisotropic torsional rigidity and its inverse problems",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp, body=False, many_bodies=False):
        if many_bodies:
            sp.add_argument("--body", action="append", required=True, dest="bodies")
        elif body:
            sp.add_argument("--body", required=True, dest="bodies", action="append")
        sp.add_argument("--norm", default=None, help="norm JSON path (default euclidean)")
        sp.add_argument("--p", type=float, default=2.0)
        sp.add_argument("--cfg", default=None, help="config JSON path")
        sp.add_argument("--out", default=None, help="output path (default stdout)")

    sp = sub.add_parser("solve-pde", help="solve one Dirichlet problem")
    add_common(sp, body=True)

    sp = sub.add_parser("torsion", help="torsion report (JSON) or sweep (CSV)")
    add_common(sp, many_bodies=True)
    sp.add_argument("--csv", action="store_true", help="one CSV row per body")

    sp = sub.add_parser("measure", help="facet and cone measures of a body")
    add_common(sp, body=True)

    sp = sub.add_parser("minkowski", help="solve the prescribed-measure problem")
    sp.add_argument("--measure", required=True)
    sp.add_argument("--norm", default=None)
    sp.add_argument("--p", type=float, default=2.0)
    sp.add_argument("--cfg", default=None)
    sp.add_argument("--out", default=None)

    sp = sub.add_parser("log-minkowski", help="solve the prescribed cone-measure problem")
    group = sp.add_mutually_exclusive_group(required=True)
    group.add_argument("--measure", default=None)
    group.add_argument("--density", default=None)
    sp.add_argument("--k-levels", default=None, help="comma list, e.g. 8,16,32")
    sp.add_argument("--norm", default=None)
    sp.add_argument("--p", type=float, default=2.0)
    sp.add_argument("--cfg", default=None)
    sp.add_argument("--out", default=None)

    sp = sub.add_parser("verify", help="run the invariant suite")
    sp.add_argument("--suite", choices=("fast", "full"), default="fast")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default=None, help="report path (default report.json)")

    return parser.parse_args(argv)


def _build_config(args: argparse.Namespace) -> RunConfig:
    if args.command == "verify":
        return RunConfig(
            command="verify",
            suite=args.suite,
            seed=args.seed,
            out_path=args.out,
        )
    norm = _load_norm(args.norm)
    if args.command in ("minkowski", "log-minkowski"):
        levels = []
        if getattr(args, "k_levels", None):
            if args.command == "log-minkowski" and args.measure is not None:
                raise InvalidInputError("--k-levels applies only with --density")
            levels = [int(tok) for tok in str(args.k_levels).split(",") if tok]
        return RunConfig(
            command=args.command,
            p=args.p,
            norm=norm,
            outer=_load_outer_config(args.cfg),
            measure_path=args.measure,
            density_path=getattr(args, "density", None),
            out_path=args.out,
            k_levels=levels,
        )
    return RunConfig(
        command=args.command,
        p=args.p,
        norm=norm,
        solver=_load_solver_config(args.cfg),
        body_paths=list(args.bodies),
        out_path=args.out,
        csv=bool(getattr(args, "csv", False)),
    )


def main(argv=None) -> int:
    args = None
    try:
        args = _parse_args(argv)
        cfg = _build_config(args)
        return run(cfg)
    except NonConvergenceError as err:
        sys.stderr.write(dumps(err.to_jsonable()))
        out = getattr(args, "out", None)
        if out is not None and err.partial is not None:
            partial = err.partial
            if isinstance(partial, TorsionSolution):
                dump_path(_solution_payload(partial), out)
            else:
                dump_path(partial.to_json(), out)
        return 2
    except ToolError as err:
        sys.stderr.write(dumps(err.to_jsonable()))
        return 1


if __name__ == "__main__":
    sys.exit(main())
