"""Planar anisotropic norms and their duals.

A norm F here is an even, 1-homogeneous, convex function on R^2, positive
away from the origin and smooth away from the origin. Three families are
supported:

  * ``euclidean``      F(xi) = |xi|
  * ``lq``             F(xi) = (|xi_1|^q + |xi_2|^q)^(1/q),  q > 1
  * ``smoothed_l1``    F(xi) = c * sum_k sqrt(xi_k^2 + eps^2 |xi|^2 / 2)

The smoothed_l1 scale c normalizes F(e_1) = sqrt(1 + eps^2/2), which keeps
the family continuous in eps near the plain l1 norm while staying smooth.

All evaluation helpers accept arrays of shape (..., 2) and broadcast.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from .errors import InvalidInputError, NormDomainError

if TYPE_CHECKING:
    from .geometry import Polytope2

GRAD_DOMAIN_TOL = 1e-14
DUAL_GRID = 4096
DUAL_REFINE_TOL = 1e-10
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class AnisotropicNorm:
    kind: str
    q: float | None = None
    eps: float | None = None
    description: str = ""

    def __post_init__(self):
        if self.kind == "euclidean":
            if self.q is not None or self.eps is not None:
                raise InvalidInputError("euclidean norm takes no parameters")
        elif self.kind == "lq":
            if self.q is None or not (self.q > 1.0):
                raise InvalidInputError("lq norm requires q > 1", q=self.q)
            if self.eps is not None:
                raise InvalidInputError("lq norm takes no eps")
        elif self.kind == "smoothed_l1":
            eps = 0.05 if self.eps is None else self.eps
            if not (eps > 0.0):
                raise InvalidInputError("smoothed_l1 requires eps > 0", eps=self.eps)
            object.__setattr__(self, "eps", float(eps))
            if self.q is not None:
                raise InvalidInputError("smoothed_l1 takes no q")
        else:
            raise InvalidInputError(f"unknown norm kind {self.kind!r}")

    # cached normalization constant for smoothed_l1
    @property
    def _c(self) -> float:
        e2 = self.eps * self.eps / 2.0
        return math.sqrt(1.0 + e2) / (math.sqrt(1.0 + e2) + self.eps / math.sqrt(2.0))


def euclidean() -> AnisotropicNorm:
    return AnisotropicNorm("euclidean")


def lq(q: float) -> AnisotropicNorm:
    return AnisotropicNorm("lq", q=float(q))


def smoothed_l1(eps: float = 0.05) -> AnisotropicNorm:
    return AnisotropicNorm("smoothed_l1", eps=float(eps))


def norm_to_json(F: AnisotropicNorm) -> dict:
    if F.kind == "euclidean":
        return {"kind": "euclidean"}
    if F.kind == "lq":
        return {"kind": "lq", "q": F.q}
    return {"kind": "smoothed_l1", "eps": F.eps}


def norm_from_json(data: dict) -> AnisotropicNorm:
    if not isinstance(data, dict) or "kind" not in data:
        raise InvalidInputError("norm JSON needs a 'kind' field", got=repr(data)[:80])
    kind = data["kind"]
    if kind == "euclidean":
        return euclidean()
    if kind == "lq":
        if "q" not in data:
            raise InvalidInputError("lq norm JSON needs 'q'")
        return lq(float(data["q"]))
    if kind == "smoothed_l1":
        return smoothed_l1(float(data.get("eps", 0.05)))
    raise InvalidInputError(f"unknown norm kind {kind!r}")


def norm_value(F: AnisotropicNorm, xi) -> np.ndarray | float:
    """F(xi) for xi of shape (..., 2)."""
    xi = np.asarray(xi, dtype=float)
    if xi.shape[-1] != 2:
        raise InvalidInputError("xi must have last dimension 2", shape=list(xi.shape))
    if F.kind == "euclidean":
        out = np.sqrt(np.sum(xi * xi, axis=-1))
    elif F.kind == "lq":
        out = np.sum(np.abs(xi) ** F.q, axis=-1) ** (1.0 / F.q)
    else:
        e2 = F.eps * F.eps / 2.0
        r2 = np.sum(xi * xi, axis=-1)
        s = np.sqrt(xi[..., 0] ** 2 + e2 * r2) + np.sqrt(xi[..., 1] ** 2 + e2 * r2)
        out = F._c * s
    return float(out) if out.ndim == 0 else out


def _grad_unchecked(F: AnisotropicNorm, xi: np.ndarray) -> np.ndarray:
    """Gradient of F, last axis 2; caller guarantees xi away from 0."""
    if F.kind == "euclidean":
        r = np.sqrt(np.sum(xi * xi, axis=-1, keepdims=True))
        return xi / r
    if F.kind == "lq":
        q = F.q
        a = np.abs(xi)
        s = np.sum(a**q, axis=-1, keepdims=True)
        # |xi_i|^(q-1) sign(xi_i) * s^(1/q - 1); stable for a -> 0 since q > 1
        return np.sign(xi) * a ** (q - 1.0) * s ** (1.0 / q - 1.0)
    e2 = F.eps * F.eps / 2.0
    r2 = np.sum(xi * xi, axis=-1, keepdims=True)
    s0 = np.sqrt(xi[..., 0:1] ** 2 + e2 * r2)
    s1 = np.sqrt(xi[..., 1:2] ** 2 + e2 * r2)
    inv_sum = 1.0 / s0 + 1.0 / s1
    g = np.empty_like(xi)
    g[..., 0:1] = xi[..., 0:1] / s0 + e2 * xi[..., 0:1] * inv_sum
    g[..., 1:2] = xi[..., 1:2] / s1 + e2 * xi[..., 1:2] * inv_sum
    return F._c * g


def norm_gradient(F: AnisotropicNorm, xi) -> np.ndarray:
    """Gradient of F at xi; rejects near-zero inputs where F is not smooth."""
    xi = np.asarray(xi, dtype=float)
    if xi.shape[-1] != 2:
        raise InvalidInputError("xi must have last dimension 2", shape=list(xi.shape))
    mag = np.sqrt(np.sum(xi * xi, axis=-1))
    if np.any(mag < GRAD_DOMAIN_TOL):
        raise NormDomainError(
            "norm gradient requested too close to the origin",
            min_magnitude=float(np.min(mag)),
            tol=GRAD_DOMAIN_TOL,
        )
    return _grad_unchecked(F, xi)


def _angles(n: int) -> np.ndarray:
    return np.arange(n) * (2.0 * math.pi / n)


def _golden_max(fun, lo: float, hi: float, tol: float) -> tuple[float, float]:
    """Golden-section maximization of a scalar function on [lo, hi]."""
    a, b = lo, hi
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = fun(x1), fun(x2)
    while b - a > tol:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = fun(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = fun(x1)
    mid = 0.5 * (a + b)
    return mid, fun(mid)


def _dual_sup(F: AnisotropicNorm, x: np.ndarray) -> float:
    """sup_{theta} <x, u(theta)> / F(u(theta)) by grid plus golden refinement."""
    theta = _angles(DUAL_GRID)
    u = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    vals = (u @ x) / norm_value(F, u)
    i = int(np.argmax(vals))
    step = 2.0 * math.pi / DUAL_GRID

    def fun(t: float) -> float:
        v = np.array([math.cos(t), math.sin(t)])
        return float(x @ v) / norm_value(F, v)

    _, best = _golden_max(fun, theta[i] - step, theta[i] + step, DUAL_REFINE_TOL)
    return max(best, float(vals[i]))


def dual_norm_value(F: AnisotropicNorm, x) -> float:
    """F_0(x) = sup_{xi != 0} <x, xi>/F(xi).

    Closed form for euclidean (self-dual) and lq (conjugate exponent);
    angular supremum with golden-section refinement otherwise.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (2,):
        raise InvalidInputError("dual norm takes a single 2-vector", shape=list(x.shape))
    if F.kind == "euclidean":
        return float(np.sqrt(x @ x))
    if F.kind == "lq":
        qc = F.q / (F.q - 1.0)
        return float(np.sum(np.abs(x) ** qc) ** (1.0 / qc))
    if float(x @ x) == 0.0:
        return 0.0
    return _dual_sup(F, x)


def wulff_shape(F: AnisotropicNorm, vertex_count: int) -> "Polytope2":
    """Inscribed polygon of the dual unit ball {F_0 <= 1}.

    Vertices sit on the boundary at equally spaced angles:
    x_j = u(theta_j) / F_0(u(theta_j)).
    """
    from .geometry import polytope_from_halfspaces

    if vertex_count < 8:
        raise InvalidInputError("wulff_shape needs at least 8 vertices", got=vertex_count)
    theta = _angles(vertex_count)
    u = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    if F.kind == "euclidean":
        r = np.ones(vertex_count)
    elif F.kind == "lq":
        qc = F.q / (F.q - 1.0)
        r = 1.0 / np.sum(np.abs(u) ** qc, axis=-1) ** (1.0 / qc)
    else:
        r = np.array([1.0 / _dual_sup(F, ui) for ui in u])
    verts = u * r[:, None]
    # edges v_j -> v_{j+1}, outward normals for a CCW vertex ring
    edges = np.roll(verts, -1, axis=0) - verts
    normals = np.stack([edges[:, 1], -edges[:, 0]], axis=-1)
    lens = np.sqrt(np.sum(normals * normals, axis=-1))
    if np.any(lens < 1e-15):
        raise InvalidInputError("degenerate wulff edge; vertex_count too large for eps")
    normals /= lens[:, None]
    offsets = np.sum(normals * verts, axis=-1)
    return polytope_from_halfspaces(normals, offsets)


@dataclass
class NormAxiomReport:
    homogeneity_max_err: float
    convexity_violations: int
    a_est: float
    b_est: float
    # Minimum slack over sampled pairs; >= 0 iff the growth bound
    # |F^p(eta) - F^p(xi)| <= p (F(xi)+F(eta))^(p-1) F(eta - xi)
    # held on every sample.
    lipschitz_lemma_max_slack: float
    sample_count: int = 0
    seed: int = 0
    notes: list = field(default_factory=list)


def _circle_extremes(F: AnisotropicNorm) -> tuple[float, float]:
    theta = _angles(8192)
    u = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    vals = norm_value(F, u)
    step = 2.0 * math.pi / 8192

    def f(t: float) -> float:
        return norm_value(F, np.array([math.cos(t), math.sin(t)]))

    i_min = int(np.argmin(vals))
    i_max = int(np.argmax(vals))
    _, neg_min = _golden_max(lambda t: -f(t), theta[i_min] - step, theta[i_min] + step, 1e-12)
    _, vmax = _golden_max(f, theta[i_max] - step, theta[i_max] + step, 1e-12)
    return min(-neg_min, float(vals[i_min])), max(vmax, float(vals[i_max]))


def check_norm_axioms(
    F: AnisotropicNorm, p: float, sample_count: int = 256, seed: int = 0
) -> NormAxiomReport:
    """Sampled audit of the norm axioms and the growth bound used by the solver."""
    if sample_count < 100:
        raise InvalidInputError("sample_count must be at least 100", got=sample_count)
    if not (p > 1.0):
        raise InvalidInputError("p must exceed 1", p=p)
    rng = np.random.default_rng(seed)
    xi = rng.normal(size=(sample_count, 2))
    eta = rng.normal(size=(sample_count, 2))
    f_xi = norm_value(F, xi)
    f_eta = norm_value(F, eta)

    hom_err = 0.0
    for t in (-2.0, -0.5, 0.25, 3.0):
        rel = np.abs(norm_value(F, t * xi) - abs(t) * f_xi) / f_xi
        hom_err = max(hom_err, float(np.max(rel)))

    mid = norm_value(F, 0.5 * (xi + eta))
    viol = int(np.sum(mid > 0.5 * (f_xi + f_eta) + 1e-12 * (f_xi + f_eta)))

    a_est, b_est = _circle_extremes(F)

    diff = norm_value(F, eta - xi)
    bound = p * (f_xi + f_eta) ** (p - 1.0) * diff
    gap = np.abs(f_eta**p - f_xi**p)
    slack = float(np.min(bound - gap))

    return NormAxiomReport(
        homogeneity_max_err=hom_err,
        convexity_violations=viol,
        a_est=a_est,
        b_est=b_est,
        lipschitz_lemma_max_slack=slack,
        sample_count=sample_count,
        seed=seed,
    )
