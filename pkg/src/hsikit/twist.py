"""Model Dehn twist on T*S^n.

T*S^n is realised as {(u, v) in R^{n+1} x R^{n+1} : |v| = 1, <u, v> = 0}; the
norm mu(u, v) = |u| generates the circle action sigma_t.  Given an angle
profile R (vanishing for t >= lam, with R(-t) = R(t) - t), the model twist is
sigma_{2 pi R'(|u|)} off the zero section and the antipodal map on it.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicHermiteSpline
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .config import tol
from .errors import InvalidParams, NoSolution, ZeroSection


@dataclass(frozen=True, eq=False)
class CotangentPoint:
    u: np.ndarray
    v: np.ndarray

    @classmethod
    def make(cls, u, v) -> CotangentPoint:
        return cls(np.asarray(u, dtype=float), np.asarray(v, dtype=float))

    @property
    def mu(self) -> float:
        return float(np.linalg.norm(self.u))

    def constraint_residual(self) -> float:
        return max(abs(float(np.linalg.norm(self.v)) - 1.0), abs(float(self.u @ self.v)))

    def dist(self, other: CotangentPoint) -> float:
        return max(float(np.max(np.abs(self.u - other.u))), float(np.max(np.abs(self.v - other.v))))


class AngleProfile:
    """Angle profile R with derivatives, supported in (-inf, lam).

    Subclasses provide R, R', R'' on t >= 0; negative arguments are handled
    through R(t) = R(-t) + t, so the functional equation holds exactly.
    """

    lam: float

    def _R(self, t):
        raise NotImplementedError

    def _dR(self, t):
        raise NotImplementedError

    def _d2R(self, t):
        raise NotImplementedError

    def R(self, t):
        t = np.asarray(t, dtype=float)
        out = np.where(t >= 0, self._R(np.abs(t)), self._R(np.abs(t)) + t)
        return out if out.ndim else float(out)

    def dR(self, t):
        t = np.asarray(t, dtype=float)
        out = np.where(t >= 0, self._dR(np.abs(t)), 1.0 - self._dR(np.abs(t)))
        return out if out.ndim else float(out)

    def d2R(self, t):
        t = np.asarray(t, dtype=float)
        out = np.where(t >= 0, self._d2R(np.abs(t)), self._d2R(np.abs(t)))
        return out if out.ndim else float(out)

    def is_concave(self, samples: int = 2001) -> bool:
        """R' >= 0 and R'' < 0 on a grid of [0, lam)."""
        ts = np.linspace(0.0, self.lam, samples, endpoint=False)
        return bool(np.all(self.dR(ts) >= 0.0) and np.all(self.d2R(ts) < 0.0))

    def angle(self, mu):
        """Rotation angle 2 pi R'(mu) applied by the twist at radius mu."""
        return 2.0 * math.pi * self.dR(mu)


class QuadraticProfile(AngleProfile):
    """R(t) = -(lam - t)^2 / (4 lam) on [0, lam], zero beyond.

    R'(0) = 1/2, R' decreases linearly to 0 at lam and R'' = -1/(2 lam) inside
    the support, so the twist is concave.
    """

    def __init__(self, lam: float = 1.0):
        if lam <= 0:
            raise InvalidParams("support radius must be positive")
        self.lam = float(lam)

    def _R(self, t):
        s = np.clip(self.lam - t, 0.0, None)
        return -(s * s) / (4.0 * self.lam)

    def _dR(self, t):
        return np.clip(self.lam - t, 0.0, None) / (2.0 * self.lam)

    def _d2R(self, t):
        return np.where(t < self.lam, -1.0 / (2.0 * self.lam), 0.0)


class TabulatedProfile(AngleProfile):
    """Profile given by samples (t, R, R') on [0, lam]; cubic Hermite in between."""

    def __init__(self, t, R, dR):
        t = np.asarray(t, dtype=float)
        if t.ndim != 1 or len(t) < 2 or np.any(np.diff(t) <= 0) or t[0] != 0.0:
            raise InvalidParams("table must start at t = 0 and be strictly increasing")
        self.lam = float(t[-1])
        self._spline = CubicHermiteSpline(t, np.asarray(R, dtype=float), np.asarray(dR, dtype=float))
        self._d1 = self._spline.derivative(1)
        self._d2 = self._spline.derivative(2)

    def _inside(self, f, t):
        t = np.asarray(t, dtype=float)
        return np.where(t < self.lam, f(np.clip(t, 0.0, self.lam)), 0.0)

    def _R(self, t):
        return self._inside(self._spline, t)

    def _dR(self, t):
        return self._inside(self._d1, t)

    def _d2R(self, t):
        return self._inside(self._d2, t)

    @classmethod
    def from_json(cls, path_or_data) -> TabulatedProfile:
        data = path_or_data
        if isinstance(path_or_data, (str, Path)):
            data = json.loads(Path(path_or_data).read_text())
        return cls(data["t"], data["R"], data["dR"])


def load_profile(spec) -> AngleProfile:
    """A float gives the built-in quadratic family; a dict or path a table."""
    if isinstance(spec, (int, float)):
        return QuadraticProfile(float(spec))
    if isinstance(spec, dict) and "lam" in spec and "t" not in spec:
        return QuadraticProfile(float(spec["lam"]))
    return TabulatedProfile.from_json(spec)


def sigma(pt: CotangentPoint, t: float) -> CotangentPoint:
    """Circle action generated by |u|."""
    r = pt.mu
    if r == 0.0:
        raise ZeroSection("sigma_t is undefined on the zero section")
    c, s = math.cos(t), math.sin(t)
    return CotangentPoint(c * pt.u - s * r * pt.v, c * pt.v + s * pt.u / r)


def sigma_batch(u: np.ndarray, v: np.ndarray, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised sigma over rows of u, v (all with |u| > 0)."""
    r = np.linalg.norm(u, axis=1, keepdims=True)
    c = np.cos(t)[:, None]
    s = np.sin(t)[:, None]
    return c * u - s * r * v, c * v + s * u / r


def model_twist(pt: CotangentPoint, prof: AngleProfile, inverse: bool = False) -> CotangentPoint:
    r = pt.mu
    if r >= prof.lam:
        return pt
    if r == 0.0:
        return CotangentPoint(np.zeros_like(pt.u), -pt.v)
    t = prof.angle(r)
    return sigma(pt, -t if inverse else t)


def sphere_distance(y0, y1) -> float:
    c = float(np.clip(np.dot(y0, y1), -1.0, 1.0))
    s = float(np.linalg.norm(np.cross(y0, y1))) if len(y0) == 3 else math.sqrt(max(0.0, 1.0 - c * c))
    return math.atan2(s, c)


def _orth_direction(y0: np.ndarray, y1: np.ndarray) -> np.ndarray | None:
    w = y1 - (y1 @ y0) * y0
    n = np.linalg.norm(w)
    return None if n < 1e-15 else w / n


def _any_orthogonal(y: np.ndarray) -> np.ndarray:
    e = np.zeros_like(y)
    e[int(np.argmin(np.abs(y)))] = 1.0
    w = e - (e @ y) * y
    return w / np.linalg.norm(w)


def radius_for_angle(d: float, prof: AngleProfile) -> float:
    """Solve 2 pi R'(r) = d for r in [0, lam] by bisection (R' is decreasing)."""
    if d < -tol().solver or d > prof.angle(0.0) + tol().solver:
        raise NoSolution(f"angle {d} outside [0, 2 pi R'(0)]")
    lo, hi = 0.0, prof.lam
    if d >= prof.angle(0.0):
        return 0.0
    if d <= 0.0:
        return prof.lam
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if prof.angle(mid) > d:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15 * max(1.0, prof.lam):
            break
    return 0.5 * (lo + hi)


def fiber_intersection(y0, y1, prof: AngleProfile) -> CotangentPoint:
    """The point of tau(F_0) meeting F_1, where F_i is the fiber over y_i.

    Its preimage in F_0 is (r w, y0) with w the unit direction from y0 towards
    y1 and 2 pi R'(r) = d(y0, y1).
    """
    y0 = np.asarray(y0, dtype=float)
    y1 = np.asarray(y1, dtype=float)
    y0 = y0 / np.linalg.norm(y0)
    y1 = y1 / np.linalg.norm(y1)
    d = sphere_distance(y0, y1)
    r = radius_for_angle(d, prof)
    w = _orth_direction(y0, y1)
    if w is None:
        w = _any_orthogonal(y0)
    pre = CotangentPoint(r * w, y0)
    z = model_twist(pre, prof)
    resid = abs(prof.angle(r) - d)
    if r < prof.lam and resid > tol().solver:
        raise NoSolution(f"bisection residual {resid:.3e}")
    return z


def fiber_preimage(y0, y1, prof: AngleProfile) -> CotangentPoint:
    """Point of F_0 whose twist is fiber_intersection(y0, y1)."""
    z = fiber_intersection(y0, y1, prof)
    return model_twist(z, prof, inverse=True) if z.mu > 0 else CotangentPoint(z.u, -z.v)


def intersection_clusters(
    y0,
    y1,
    prof: AngleProfile,
    n_radial: int = 120,
    n_dir: int = 600,
    threshold: float | None = None,
) -> int:
    """Count connected clusters of grid points of F_0 whose twist lands near F_1.

    F_0 is sampled on a radial grid times a Fibonacci lattice of directions in
    y0^perp (n = 3 only).  Points with |v(tau x) - y1| below ``threshold`` are
    linked when closer than a few grid spacings.
    """
    y0 = np.asarray(y0, dtype=float) / np.linalg.norm(y0)
    y1 = np.asarray(y1, dtype=float) / np.linalg.norm(y1)
    if len(y0) != 4:
        raise InvalidParams("cluster scan implemented for S^3 fibers only")
    # orthonormal basis of y0^perp
    basis = np.linalg.svd(y0[None, :])[2][1:]
    k = np.arange(n_dir) + 0.5
    phi = np.arccos(1 - 2 * k / n_dir)
    th = math.pi * (1 + 5**0.5) * k
    dirs3 = np.stack([np.cos(th) * np.sin(phi), np.sin(th) * np.sin(phi), np.cos(phi)], axis=1)
    dirs = dirs3 @ basis
    radii = (np.arange(n_radial) + 0.5) * prof.lam / n_radial
    u = (radii[:, None, None] * dirs[None, :, :]).reshape(-1, len(y0))
    v = np.broadcast_to(y0, u.shape)
    t = prof.angle(np.linalg.norm(u, axis=1))
    _, v2 = sigma_batch(u, v, t)
    err = np.linalg.norm(v2 - y1, axis=1)
    dr = prof.lam / n_radial
    dphi = math.sqrt(4 * math.pi / n_dir)
    if threshold is None:
        # angle and direction errors are at most one cell away from the solution
        threshold = 2.0 * (2 * math.pi * dr * float(np.max(np.abs(prof.d2R(radii)))) + dphi)
    sel = np.nonzero(err < threshold)[0]
    if sel.size == 0:
        return 0
    pts = u[sel]
    link = 3.0 * max(dr, prof.lam * dphi)
    pairs = cKDTree(pts).query_pairs(link, output_type="ndarray")
    g = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(len(sel), len(sel)))
    n, _ = connected_components(g, directed=False)
    return int(n)


def area_K(mu: float, prof: AngleProfile) -> float:
    """K(mu) = 2 pi (R'(mu) mu - R(mu))."""
    if mu < 0:
        raise InvalidParams("mu must be non-negative")
    return 2.0 * math.pi * (prof.dR(mu) * mu - prof.R(mu))
