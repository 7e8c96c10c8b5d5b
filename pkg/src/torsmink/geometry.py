"""Convex polygons in halfspace form and discrete measures on the circle.

A polytope is stored as P = {x : <x, u_k> <= h_k} with unit outward normals
u_k sorted counterclockwise by angle, together with the derived vertex ring.
Vertex j sits between facets j and j+1 (cyclically), so facet k's edge runs
from vertex k-1 to vertex k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .errors import (
    EmptyInteriorError,
    InvalidInputError,
    UnboundedRegionError,
)

FACET_TOL = 1e-9  # facet pruned when its edge is shorter than FACET_TOL * diameter
UNIT_TOL = 1e-9  # input normals/directions must be unit to this tolerance
HEMISPHERE_GRID = 8192
GENERAL_POSITION_TOL = 1e-9


def _as_unit_rows(arr, what: str) -> np.ndarray:
    a = np.asarray(arr, dtype=float)
    if a.ndim != 2 or a.shape[1] != 2:
        raise InvalidInputError(f"{what} must be an (N, 2) array", shape=list(a.shape))
    norms = np.sqrt(np.sum(a * a, axis=1))
    if np.any(np.abs(norms - 1.0) > UNIT_TOL):
        raise InvalidInputError(
            f"{what} must be unit vectors",
            worst=float(np.max(np.abs(norms - 1.0))),
            tol=UNIT_TOL,
        )
    return a / norms[:, None]


@dataclass(frozen=True)
class Polytope2:
    """Bounded convex polygon; construct via polytope_from_halfspaces."""

    normals: np.ndarray        # (N, 2) unit, CCW by angle
    offsets: np.ndarray        # (N,)
    vertices: np.ndarray       # (N, 2) CCW; vertex j between facets j, j+1
    facet_lengths: np.ndarray  # (N,)
    source_indices: np.ndarray  # (N,) input halfspace index of each surviving facet

    @property
    def n_facets(self) -> int:
        return len(self.offsets)


def _chebyshev_lp(normals: np.ndarray, offsets: np.ndarray) -> tuple[np.ndarray, float]:
    """Largest inscribed-ball center and radius for {A x <= h}."""
    n = len(offsets)
    a_ub = np.hstack([normals, np.ones((n, 1))])
    res = linprog(
        c=[0.0, 0.0, -1.0],
        A_ub=a_ub,
        b_ub=offsets,
        bounds=[(None, None), (None, None), (None, None)],
        method="highs",
    )
    if not res.success:
        raise EmptyInteriorError("halfspace system has no interior", lp_status=int(res.status))
    return res.x[:2].copy(), float(res.x[2])


def _hull_scan_circular(points: np.ndarray, order: np.ndarray) -> list[int]:
    """Indices (into points) of extreme points, input sorted CCW around an
    interior origin. Non-left turns are dropped; the scan is repeated over
    the cycle until stable."""
    idx = list(order)
    changed = True
    passes = 0
    while changed and passes < len(idx) + 4:
        changed = False
        passes += 1
        keep: list[int] = []
        m = len(idx)
        if m < 3:
            break
        for j in range(m):
            a = points[idx[(j - 1) % m]]
            b = points[idx[j]]
            c = points[idx[(j + 1) % m]]
            cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
            scale = max(np.abs(b - a).max(), np.abs(c - a).max(), 1e-300)
            if cross > 1e-14 * scale * scale:
                keep.append(idx[j])
            else:
                changed = True
        idx = keep
    return idx


def polytope_from_halfspaces(normals, offsets, facet_tol: float = FACET_TOL) -> Polytope2:
    """Intersect halfspaces {<x, u_k> <= h_k} into a bounded convex polygon.

    Normals are sorted by angle; redundant halfspaces are pruned by a convex
    hull scan on the dual points u_k / (h_k - <c, u_k>) around an interior
    point c, and facets whose edges fall below facet_tol * diameter are
    dropped. Raises unbounded-region / empty-interior errors.
    """
    a = _as_unit_rows(normals, "normals")
    h = np.asarray(offsets, dtype=float)
    if h.shape != (len(a),):
        raise InvalidInputError("offsets must match normals", shape=list(h.shape))
    if len(a) < 3:
        raise InvalidInputError("need at least 3 halfspaces", got=len(a))

    # bounded iff the normals positively span the plane
    res = hemisphere_check(DiscreteMeasure(a, np.ones(len(a)), validate=False))
    if res.concentrated:
        raise UnboundedRegionError(
            "normals concentrated on a closed hemisphere",
            witness=res.witness.tolist() if res.witness is not None else None,
        )

    scale = max(1.0, float(np.max(np.abs(h))))
    if np.min(h) > 0:
        center = np.zeros(2)
    else:
        center, radius = _chebyshev_lp(a, h)
        if radius <= 1e-12 * scale:
            raise EmptyInteriorError("intersection has empty interior", radius=radius)
    hc = h - a @ center
    if np.min(hc) <= 0:
        raise EmptyInteriorError("no strictly interior point found", min_offset=float(np.min(hc)))

    dual = a / hc[:, None]
    ang = np.arctan2(a[:, 1], a[:, 0])
    order = np.lexsort((hc, ang))  # ties (duplicate normals): smaller offset wins the scan

    active = _hull_scan_circular(dual, np.asarray(order))
    while True:
        if len(active) < 3:
            raise EmptyInteriorError("fewer than 3 facets survive", survivors=len(active))
        m = len(active)
        verts = np.empty((m, 2))
        ok = True
        for j in range(m):
            k0, k1 = active[j], active[(j + 1) % m]
            u0, u1 = a[k0], a[k1]
            det = u0[0] * u1[1] - u0[1] * u1[0]
            if det <= 1e-15:
                # adjacent active normals parallel or reflex: drop the weaker one
                drop = k0 if hc[k0] >= hc[k1] else k1
                active.remove(drop)
                ok = False
                break
            rhs0, rhs1 = hc[k0], hc[k1]
            verts[j, 0] = (rhs0 * u1[1] - rhs1 * u0[1]) / det
            verts[j, 1] = (rhs1 * u0[0] - rhs0 * u1[0]) / det
        if not ok:
            continue
        diffs = verts[:, None, :] - verts[None, :, :]
        diameter = float(np.sqrt(np.max(np.sum(diffs * diffs, axis=-1))))
        if diameter <= 0:
            raise EmptyInteriorError("degenerate polygon", diameter=diameter)
        # facet k's edge: vertex k-1 -> vertex k
        edge = verts - np.roll(verts, 1, axis=0)
        lens = np.sqrt(np.sum(edge * edge, axis=1))
        dead = np.where(lens <= facet_tol * diameter)[0]
        if len(dead) == 0:
            break
        del active[int(dead[0])]

    verts = verts + center
    area2 = float(np.sum(verts[:, 0] * np.roll(verts[:, 1], -1) - np.roll(verts[:, 0], -1) * verts[:, 1]))
    if area2 / 2.0 < 1e-12 * diameter * diameter:
        raise EmptyInteriorError("intersection area negligible", area=area2 / 2.0)

    active_arr = np.asarray(active, dtype=int)
    return Polytope2(
        normals=a[active_arr],
        offsets=h[active_arr],
        vertices=verts,
        facet_lengths=lens,
        source_indices=active_arr,
    )


def polytope_from_vertices(vertices) -> Polytope2:
    """Convex polygon from a CCW vertex ring (convex position assumed)."""
    v = np.asarray(vertices, dtype=float)
    if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
        raise InvalidInputError("need an (N>=3, 2) vertex array", shape=list(v.shape))
    edges = np.roll(v, -1, axis=0) - v
    normals = np.stack([edges[:, 1], -edges[:, 0]], axis=-1)
    lens = np.sqrt(np.sum(normals * normals, axis=1))
    if np.any(lens < 1e-15):
        raise InvalidInputError("repeated vertices")
    normals /= lens[:, None]
    offsets = np.sum(normals * v, axis=1)
    return polytope_from_halfspaces(normals, offsets)


def polytope_to_json(P: Polytope2) -> dict:
    return {"normals": P.normals.tolist(), "offsets": P.offsets.tolist()}


def polytope_from_json(data: dict) -> Polytope2:
    if not isinstance(data, dict) or "normals" not in data or "offsets" not in data:
        raise InvalidInputError("polytope JSON needs 'normals' and 'offsets'")
    return polytope_from_halfspaces(data["normals"], data["offsets"])


def support_function(P: Polytope2, v) -> float:
    v = np.asarray(v, dtype=float)
    return float(np.max(P.vertices @ v))


def translate_polytope(P: Polytope2, t) -> Polytope2:
    t = np.asarray(t, dtype=float)
    return Polytope2(
        normals=P.normals.copy(),
        offsets=P.offsets + P.normals @ t,
        vertices=P.vertices + t,
        facet_lengths=P.facet_lengths.copy(),
        source_indices=P.source_indices.copy(),
    )


def scale_polytope(P: Polytope2, lam: float) -> Polytope2:
    if not (lam > 0):
        raise InvalidInputError("scale factor must be positive", lam=lam)
    return Polytope2(
        normals=P.normals.copy(),
        offsets=P.offsets * lam,
        vertices=P.vertices * lam,
        facet_lengths=P.facet_lengths * lam,
        source_indices=P.source_indices.copy(),
    )


class DiscreteMeasure:
    """Finite positive measure on the unit circle: atoms (direction, weight)."""

    def __init__(self, directions, weights, validate: bool = True):
        if validate:
            self.directions = _as_unit_rows(directions, "directions")
            w = np.asarray(weights, dtype=float)
            if w.shape != (len(self.directions),):
                raise InvalidInputError("weights must match directions", shape=list(w.shape))
            if np.any(w <= 0) or not np.all(np.isfinite(w)):
                raise InvalidInputError("weights must be positive and finite")
            self.weights = w
        else:
            self.directions = np.asarray(directions, dtype=float)
            self.weights = np.asarray(weights, dtype=float)
        self.total = float(np.sum(self.weights))

    def __len__(self) -> int:
        return len(self.weights)


def measure_to_json(mu: DiscreteMeasure) -> dict:
    return {
        "atoms": [
            {"dir": mu.directions[i].tolist(), "weight": float(mu.weights[i])}
            for i in range(len(mu))
        ]
    }


def measure_from_json(data: dict) -> DiscreteMeasure:
    if not isinstance(data, dict) or "atoms" not in data:
        raise InvalidInputError("measure JSON needs 'atoms'")
    atoms = data["atoms"]
    if not atoms:
        raise InvalidInputError("measure needs at least one atom")
    dirs = [atom["dir"] for atom in atoms]
    weights = [atom["weight"] for atom in atoms]
    return DiscreteMeasure(np.asarray(dirs, float), np.asarray(weights, float))


@dataclass
class HemisphereResult:
    concentrated: bool
    margin: float
    witness: np.ndarray | None


def hemisphere_check(mu: DiscreteMeasure, rel_tol: float = 1e-10) -> HemisphereResult:
    """Minimize m(v) = sum_k w_k <v, u_k>_+ over unit v.

    Margin 0 means all mass sits on a closed hemisphere {<v, u> <= 0};
    the minimizing v is returned as witness in that case.
    """
    theta = np.arange(HEMISPHERE_GRID) * (2.0 * math.pi / HEMISPHERE_GRID)
    v = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    m = np.maximum(v @ mu.directions.T, 0.0) @ mu.weights

    def f(t: float) -> float:
        vt = np.array([math.cos(t), math.sin(t)])
        return float(np.maximum(mu.directions @ vt, 0.0) @ mu.weights)

    step = 2.0 * math.pi / HEMISPHERE_GRID
    # refine the few best local minima; m(theta) is piecewise smooth
    local = np.where((m <= np.roll(m, 1)) & (m <= np.roll(m, -1)))[0]
    best_val = float(np.min(m))
    best_t = float(theta[int(np.argmin(m))])
    for i in local[np.argsort(m[local])][:4]:
        lo, hi = theta[i] - step, theta[i] + step
        from .norms import _golden_max

        t_ref, neg = _golden_max(lambda t: -f(t), lo, hi, 1e-12)
        if -neg < best_val:
            best_val, best_t = -neg, t_ref

    concentrated = best_val <= rel_tol * mu.total
    witness = np.array([math.cos(best_t), math.sin(best_t)]) if concentrated else None
    return HemisphereResult(concentrated=concentrated, margin=best_val, witness=witness)


def general_position_check(directions, det_tol: float = GENERAL_POSITION_TOL) -> bool:
    """True iff no two directions are parallel: |det(u_i, u_j)| > det_tol."""
    u = _as_unit_rows(directions, "directions")
    cross = u[:, 0:1] * u[None, :, 1] - u[:, 1:2] * u[None, :, 0]
    mask = ~np.eye(len(u), dtype=bool)
    return bool(np.all(np.abs(cross[mask]) > det_tol))


def _point_polygon_distance(x: np.ndarray, Q: Polytope2) -> float:
    if np.all(Q.normals @ x - Q.offsets <= 0.0):
        return 0.0
    v0 = Q.vertices
    v1 = np.roll(Q.vertices, -1, axis=0)
    e = v1 - v0
    ee = np.sum(e * e, axis=1)
    t = np.clip(np.sum((x - v0) * e, axis=1) / ee, 0.0, 1.0)
    proj = v0 + t[:, None] * e
    d = x - proj
    return float(np.sqrt(np.min(np.sum(d * d, axis=1))))


def hausdorff_distance(P: Polytope2, Q: Polytope2) -> float:
    """Exact Hausdorff distance between convex polygons (vertex-attained)."""
    d_pq = max(_point_polygon_distance(v, Q) for v in P.vertices)
    d_qp = max(_point_polygon_distance(v, P) for v in Q.vertices)
    return max(d_pq, d_qp)


@dataclass
class BodyMetrics:
    area: float
    perimeter: float
    centroid: np.ndarray
    diameter: float
    inradius: float
    outradius: float


def body_metrics(P: Polytope2) -> BodyMetrics:
    v = P.vertices
    v_next = np.roll(v, -1, axis=0)
    cross = v[:, 0] * v_next[:, 1] - v_next[:, 0] * v[:, 1]
    area = float(np.sum(cross)) / 2.0
    centroid = np.sum((v + v_next) * cross[:, None], axis=0) / (6.0 * area)
    perimeter = float(np.sum(P.facet_lengths))
    diffs = v[:, None, :] - v[None, :, :]
    diameter = float(np.sqrt(np.max(np.sum(diffs * diffs, axis=-1))))
    _, inradius = _chebyshev_lp(P.normals, P.offsets)
    outradius = float(np.max(np.sqrt(np.sum(v * v, axis=1))))
    return BodyMetrics(
        area=area,
        perimeter=perimeter,
        centroid=centroid,
        diameter=diameter,
        inradius=inradius,
        outradius=outradius,
    )


def regular_polygon(n: int, circumradius: float = 1.0, phase: float = 0.0) -> Polytope2:
    theta = phase + np.arange(n) * (2.0 * math.pi / n)
    verts = circumradius * np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    return polytope_from_vertices(verts)


def box_polytope(half_x: float, half_y: float, center=(0.0, 0.0)) -> Polytope2:
    cx, cy = center
    normals = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
    offsets = np.array([half_x + cx, half_y + cy, half_x - cx, half_y - cy])
    return polytope_from_halfspaces(normals, offsets)
