"""SU(2) as unit quaternions and su(2) as real 3-vectors.

The algebra element with components (a, b, c) stands for a*i + b*j + c*k,
viewed as a traceless anti-hermitian 2x2 matrix.  Its norm comes from the
scalar product <x, y> = -Tr(xy), which gives |xi| = sqrt(2) * |(a, b, c)|.
With this convention exp maps the open ball of radius pi*sqrt(2) onto
SU(2) minus {-I}, and |log(-I)| would be pi*sqrt(2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import tol
from .errors import SingularLog

SQRT2 = math.sqrt(2.0)
CUT_RADIUS = math.pi * SQRT2


@dataclass(frozen=True)
class Su2Vector:
    a: float = 0.0
    b: float = 0.0
    c: float = 0.0

    @property
    def euclid(self) -> float:
        return math.sqrt(self.a * self.a + self.b * self.b + self.c * self.c)

    @property
    def norm(self) -> float:
        return SQRT2 * self.euclid

    def dot(self, other: Su2Vector) -> float:
        """The invariant scalar product -Tr(xy)."""
        return 2.0 * (self.a * other.a + self.b * other.b + self.c * other.c)

    def __add__(self, other: Su2Vector) -> Su2Vector:
        return Su2Vector(self.a + other.a, self.b + other.b, self.c + other.c)

    def __sub__(self, other: Su2Vector) -> Su2Vector:
        return Su2Vector(self.a - other.a, self.b - other.b, self.c - other.c)

    def __neg__(self) -> Su2Vector:
        return Su2Vector(-self.a, -self.b, -self.c)

    def __mul__(self, s: float) -> Su2Vector:
        return Su2Vector(s * self.a, s * self.b, s * self.c)

    __rmul__ = __mul__

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.a, self.b, self.c)

    def to_matrix(self) -> np.ndarray:
        return SU2(0.0, self.a, self.b, self.c).to_matrix()


@dataclass(frozen=True)
class SU2:
    """Unit quaternion w + x i + y j + z k."""

    w: float = 1.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def __mul__(self, o: SU2) -> SU2:
        w = self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z
        x = self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y
        y = self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x
        z = self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w
        n = math.sqrt(w * w + x * x + y * y + z * z)
        return SU2(w / n, x / n, y / n, z / n)

    def inv(self) -> SU2:
        return SU2(self.w, -self.x, -self.y, -self.z)

    def __neg__(self) -> SU2:
        return SU2(-self.w, -self.x, -self.y, -self.z)

    def dist(self, o: SU2) -> float:
        """Euclidean distance in R^4 (equals Frobenius distance / sqrt 2)."""
        return math.sqrt((self.w - o.w) ** 2 + (self.x - o.x) ** 2 + (self.y - o.y) ** 2 + (self.z - o.z) ** 2)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.w, self.x, self.y, self.z)

    @property
    def imag(self) -> Su2Vector:
        return Su2Vector(self.x, self.y, self.z)

    def to_matrix(self) -> np.ndarray:
        # k <-> diag(i, -i); debugging aid only.
        return np.array(
            [[complex(self.w, self.z), complex(self.x, self.y)], [complex(-self.x, self.y), complex(self.w, -self.z)]]
        )

    @classmethod
    def from_tuple(cls, q) -> SU2:
        w, x, y, z = (float(t) for t in q)
        n = math.sqrt(w * w + x * x + y * y + z * z)
        if n == 0.0:
            raise ValueError("zero quaternion is not in SU(2)")
        return cls(w / n, x / n, y / n, z / n)


IDENTITY = SU2()
MINUS_IDENTITY = SU2(-1.0, 0.0, 0.0, 0.0)
ZERO = Su2Vector()


def exp(xi: Su2Vector) -> SU2:
    r = xi.euclid
    if r < 1e-8:
        # sin(r)/r to second order
        s = 1.0 - r * r / 6.0
        return SU2.from_tuple((math.cos(r), s * xi.a, s * xi.b, s * xi.c))
    s = math.sin(r) / r
    return SU2.from_tuple((math.cos(r), s * xi.a, s * xi.b, s * xi.c))


def log(g: SU2) -> Su2Vector:
    """Inverse of exp on SU(2) minus {-I}; result has norm < pi*sqrt(2)."""
    if g.dist(MINUS_IDENTITY) < tol().singular:
        raise SingularLog(f"log undefined at -I (distance {g.dist(MINUS_IDENTITY):.3e})")
    v = math.sqrt(g.x * g.x + g.y * g.y + g.z * g.z)
    if v < 1e-300:
        return ZERO
    r = math.atan2(v, g.w)
    s = r / v
    return Su2Vector(s * g.x, s * g.y, s * g.z)


def commutator(a: SU2, b: SU2) -> SU2:
    return a * b * a.inv() * b.inv()


def adjoint(g: SU2, xi: Su2Vector) -> Su2Vector:
    """Ad_g xi = g xi g^-1 (rotation of the imaginary part)."""
    ux, uy, uz = g.x, g.y, g.z
    vx, vy, vz = xi.a, xi.b, xi.c
    # t = 2 u x v;  v' = v + w t + u x t
    tx = 2.0 * (uy * vz - uz * vy)
    ty = 2.0 * (uz * vx - ux * vz)
    tz = 2.0 * (ux * vy - uy * vx)
    return Su2Vector(
        vx + g.w * tx + (uy * tz - uz * ty),
        vy + g.w * ty + (uz * tx - ux * tz),
        vz + g.w * tz + (ux * ty - uy * tx),
    )


def conjugacy_angle(g: SU2) -> float:
    """Angle alpha in [0, pi] with g conjugate to diag(e^{i alpha}, e^{-i alpha})."""
    v = math.sqrt(g.x * g.x + g.y * g.y + g.z * g.z)
    return math.atan2(v, g.w)


def random_su2(rng: np.random.Generator) -> SU2:
    """Haar-distributed element (normalised Gaussian 4-vector)."""
    while True:
        q = rng.standard_normal(4)
        n = float(np.linalg.norm(q))
        if n > 1e-12:
            return SU2(*(q / n).tolist())


def random_su2_vector(rng: np.random.Generator, max_norm: float = CUT_RADIUS) -> Su2Vector:
    """Uniform sample from the ball {|xi| <= max_norm} (invariant norm)."""
    d = rng.standard_normal(3)
    d /= np.linalg.norm(d)
    r = max_norm / SQRT2 * rng.random() ** (1.0 / 3.0)
    return Su2Vector(*(r * d).tolist())
