"""Cutting-plane optimizers driven by a shrinking belief region.

Two flavors: an exact 2-D center-of-gravity iteration whose belief is a
convex polygon (query the centroid, keep the half-plane the subgradient
allows), and a d-dimensional ellipsoid iteration whose belief is the
minimum-volume ellipsoid covering the surviving half-ellipsoid.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import math

import numpy as np

from .errors import GeometryError
from .rng import RngStream

_DEDUP_TOL = 1e-12       # vertex dedup after clipping
_CONVEX_TOL = 1e-10      # cross-product tolerance for convexity checks


@dataclass(frozen=True)
class Polygon2D:
    """Convex polygon with counter-clockwise vertices; may be empty."""

    vertices: np.ndarray

    @classmethod
    def empty(cls) -> "Polygon2D":
        return cls(np.zeros((0, 2)))

    @classmethod
    def box(cls, x0: float, y0: float, x1: float, y1: float) -> "Polygon2D":
        return cls(np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]]))

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float).reshape(-1, 2)
        object.__setattr__(self, "vertices", v)
        n = v.shape[0]
        if n == 0:
            return
        if n < 3:
            raise GeometryError("polygon needs at least 3 vertices")
        e = np.roll(v, -1, axis=0) - v
        cross = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] \
            - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
        scale = max(float(np.abs(e).max()) ** 2, 1.0)
        if np.any(cross < -_CONVEX_TOL * scale):
            raise GeometryError("vertices are not convex in CCW order")

    @property
    def is_empty(self) -> bool:
        return self.vertices.shape[0] == 0

    def area(self) -> float:
        v = self.vertices
        if v.shape[0] < 3:
            return 0.0
        x, y = v[:, 0], v[:, 1]
        xn, yn = np.roll(x, -1), np.roll(y, -1)
        return float(0.5 * np.sum(x * yn - xn * y))

    def contains(self, p, tol: float = 1e-9) -> bool:
        v = self.vertices
        if v.shape[0] < 3:
            return False
        p = np.asarray(p, dtype=float)
        e = np.roll(v, -1, axis=0) - v
        w = p[None, :] - v
        cross = e[:, 0] * w[:, 1] - e[:, 1] * w[:, 0]
        return bool(np.all(cross >= -tol))


def clip_halfplane(poly: Polygon2D, g, x0) -> Polygon2D:
    """Keep the part of the polygon with g . (x - x0) <= 0.

    Sutherland-Hodgman clip against one line; output stays convex and
    CCW, and may be empty.
    """
    if poly.is_empty:
        return poly
    g = np.asarray(g, dtype=float)
    x0 = np.asarray(x0, dtype=float)
    v = poly.vertices
    side = (v - x0[None, :]) @ g
    scale = max(float(np.abs(side).max()), 1.0)
    keep = side <= 1e-14 * scale
    if np.all(keep):
        return poly
    out = []
    n = v.shape[0]
    for i in range(n):
        j = (i + 1) % n
        a, b = v[i], v[j]
        ka, kb = keep[i], keep[j]
        if ka:
            out.append(a)
        if ka != kb:
            t = side[i] / (side[i] - side[j])
            out.append(a + t * (b - a))
    if not out:
        return Polygon2D.empty()
    pts = [out[0]]
    for p in out[1:]:
        if np.max(np.abs(p - pts[-1])) > _DEDUP_TOL:
            pts.append(p)
    while len(pts) > 1 and np.max(np.abs(pts[0] - pts[-1])) <= _DEDUP_TOL:
        pts.pop()
    if len(pts) < 3:
        return Polygon2D.empty()
    return Polygon2D(np.array(pts))


def centroid(poly: Polygon2D) -> np.ndarray:
    """Exact area centroid from the shoelace moment formulas."""
    if poly.is_empty:
        raise GeometryError("empty polygon has no centroid")
    a = poly.area()
    if a <= 0.0:
        raise GeometryError("degenerate polygon has no centroid")
    v = poly.vertices
    vn = np.roll(v, -1, axis=0)
    w = v[:, 0] * vn[:, 1] - vn[:, 0] * v[:, 1]
    cx = np.sum((v[:, 0] + vn[:, 0]) * w) / (6.0 * a)
    cy = np.sum((v[:, 1] + vn[:, 1]) * w) / (6.0 * a)
    return np.array([cx, cy])


def cog_run(oracle: Callable, poly0: Polygon2D, T: int,
            min_area: float = 1e-14) -> list:
    """Center-of-gravity iteration: query the centroid, cut, repeat.

    Returns [(x_t, f(x_t), polygon after the cut)]; stops early on a zero
    subgradient (exact optimum) or when the region's area underflows.
    """
    if poly0.is_empty or poly0.area() <= 0:
        raise GeometryError("initial region must have positive area")
    trace = []
    poly = poly0
    for _ in range(T):
        x = centroid(poly)
        fval, g = oracle(x)
        g = np.asarray(g, dtype=float)
        if np.all(g == 0.0):
            trace.append((x, float(fval), poly))
            break
        poly = clip_halfplane(poly, g, x)
        trace.append((x, float(fval), poly))
        if poly.is_empty or poly.area() < min_area:
            break
    return trace


# ----------------------------------------------------------------------------
# Ellipsoid method
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class Ellipsoid:
    """E = {v : (v - center)^T B^{-1} (v - center) <= 1}, stored via B.

    B is the inverse of the usual shape matrix because the cut update and
    uniform sampling are natural in it; B must be symmetric positive
    definite.
    """

    center: np.ndarray
    shape_inv: np.ndarray        # B = A^{-1}

    @classmethod
    def ball(cls, center, radius: float) -> "Ellipsoid":
        c = np.asarray(center, dtype=float)
        return cls(c, radius**2 * np.eye(c.shape[0]))

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float)
        B = np.asarray(self.shape_inv, dtype=float)
        if B.shape != (c.shape[0], c.shape[0]):
            raise GeometryError("shape matrix does not match the center")
        if np.max(np.abs(B - B.T)) > 1e-12 * max(1.0, np.abs(B).max()):
            raise GeometryError("shape matrix must be symmetric")
        try:
            np.linalg.cholesky(B)
        except np.linalg.LinAlgError:
            raise GeometryError("shape matrix must be positive definite")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "shape_inv", 0.5 * (B + B.T))

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    def volume(self) -> float:
        d = self.dim
        unit = np.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0)
        return float(unit * np.sqrt(np.linalg.det(self.shape_inv)))

    def log_volume(self) -> float:
        d = self.dim
        sign, logdet = np.linalg.slogdet(self.shape_inv)
        return float(np.log(np.pi) * d / 2.0
                     - math.lgamma(d / 2.0 + 1.0) + 0.5 * logdet)

    def contains(self, x, tol: float = 1e-9) -> bool:
        r = np.asarray(x, dtype=float) - self.center
        return bool(r @ np.linalg.solve(self.shape_inv, r) <= 1.0 + tol)


def ellipsoid_kl_update(E: Ellipsoid, g) -> Ellipsoid:
    """Minimum-volume ellipsoid covering {x in E : g . (x - center) <= 0}.

    Closed form with b = Bg / sqrt(g^T B g):
        center' = center - b / (d + 1)
        B'      = d^2/(d^2-1) (B - 2/(d+1) b b^T)
    and the d = 1 interval special case (halve toward the kept side).
    """
    g = np.asarray(g, dtype=float)
    if g.shape != (E.dim,):
        raise GeometryError("subgradient dimension mismatch")
    B = E.shape_inv
    gBg = float(g @ B @ g)
    if gBg <= 1e-300:
        raise GeometryError("cut direction is degenerate for this ellipsoid")
    b = B @ g / np.sqrt(gBg)
    d = E.dim
    if d == 1:
        return Ellipsoid(E.center - b / 2.0, B / 4.0)
    c_new = E.center - b / (d + 1.0)
    B_new = (d**2 / (d**2 - 1.0)) * (B - (2.0 / (d + 1.0)) * np.outer(b, b))
    B_new = 0.5 * (B_new + B_new.T)
    return Ellipsoid(c_new, B_new)


def ellipsoid_run(oracle: Callable, E0: Ellipsoid, T: int) -> list:
    """Ellipsoid iteration: query the center, cut, cover, repeat.

    Returns [(x_t, f(x_t), ellipsoid after the update)]; stops early on a
    zero subgradient.
    """
    trace = []
    E = E0
    for _ in range(T):
        x = E.center.copy()
        fval, g = oracle(x)
        g = np.asarray(g, dtype=float)
        if np.all(g == 0.0):
            trace.append((x, float(fval), E))
            break
        E = ellipsoid_kl_update(E, g)
        trace.append((x, float(fval), E))
    return trace


def sample_in_ellipsoid(E: Ellipsoid, rng: RngStream, n: int) -> np.ndarray:
    """n points uniform in E (d normals + 1 uniform per point)."""
    d = E.dim
    L = np.linalg.cholesky(E.shape_inv)
    z = rng.normal((n, d))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    radii = rng.uniform(n) ** (1.0 / d)
    return E.center[None, :] + (radii[:, None] * z) @ L.T


def halfellipsoid_cover_check(E: Ellipsoid, g, E_new: Ellipsoid,
                              n_samples: int, rng: RngStream,
                              tol: float = 1e-9) -> bool:
    """Monte Carlo check that E_new covers {x in E : g . (x - c) <= 0}.

    Uniform samples from E are filtered to the kept half; all of them must
    lie inside E_new within the boundary tolerance.
    """
    g = np.asarray(g, dtype=float)
    pts = sample_in_ellipsoid(E, rng, n_samples)
    keep = (pts - E.center[None, :]) @ g <= 0.0
    pts = pts[keep]
    if pts.shape[0] == 0:
        return True
    r = pts - E_new.center[None, :]
    quad = np.einsum("ni,ni->n", r, np.linalg.solve(E_new.shape_inv, r.T).T)
    return bool(np.all(quad <= 1.0 + tol))


# ----------------------------------------------------------------------------
# Built-in subgradient oracles
# ----------------------------------------------------------------------------

def quadratic_oracle(center, weights=None) -> Callable:
    """f(x) = sum w_i (x_i - z_i)^2 with its gradient; f* = 0 at z."""
    z = np.asarray(center, dtype=float)
    w = np.ones_like(z) if weights is None else np.asarray(weights, dtype=float)

    def oracle(x):
        x = np.asarray(x, dtype=float)
        return float(w @ (x - z) ** 2), 2.0 * w * (x - z)

    return oracle


def abs_oracle(center, weights=None) -> Callable:
    """f(x) = sum w_i |x_i - z_i|; subgradient sign convention sign(0) = 0."""
    z = np.asarray(center, dtype=float)
    w = np.ones_like(z) if weights is None else np.asarray(weights, dtype=float)

    def oracle(x):
        x = np.asarray(x, dtype=float)
        return float(w @ np.abs(x - z)), w * np.sign(x - z)

    return oracle
