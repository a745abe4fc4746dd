"""Points of the extended moduli spaces N(Sigma) and N(Sigma_cut).

A point of N(Sigma) of genus h is (theta, A_1, B_1, ..., A_h, B_h) with
exp(theta) = prod [A_i, B_i] and |theta| < pi*sqrt(2).

A point of N(Sigma_cut) is (g, A_1, A_2, b_1, b_2, U_2, V_2, ..., U_h, V_h) with
g, b_1, b_2 in the open ball of radius pi*sqrt(2) and

    exp(g) = A_1 e^{b_1} A_1^-1  A_2^-1 e^{-b_2} A_2  prod_{i>=2} [U_i, V_i].

Both boundary circles created by the cut are oriented like the cut curve, so
the second one enters the boundary loop reversed; this is what makes the
gluing map below land on the relation of N(Sigma) when b_1 = b_2.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import tol
from .errors import InvalidPoint, MomentNotZero, OnComplementC, SingularLog
from .su2 import (
    CUT_RADIUS,
    IDENTITY,
    MINUS_IDENTITY,
    SU2,
    Su2Vector,
    adjoint,
    commutator,
    exp,
    log,
    random_su2,
    random_su2_vector,
)
from .words import HolonomyPoint


def boundary_product(hol: Sequence[SU2]) -> SU2:
    out = IDENTITY
    for i in range(0, len(hol), 2):
        out = out * commutator(hol[i], hol[i + 1])
    return out


def in_extended_moduli(theta: Su2Vector) -> bool:
    return theta.norm < CUT_RADIUS


@dataclass(frozen=True)
class ModuliPoint:
    theta: Su2Vector
    hol: HolonomyPoint

    @property
    def genus(self) -> int:
        return self.hol.genus

    def residual(self) -> float:
        if self.genus == 0:
            return exp(self.theta).dist(IDENTITY)
        return exp(self.theta).dist(boundary_product(self.hol.hol))

    def is_valid(self) -> bool:
        return in_extended_moduli(self.theta) and self.residual() < tol().relation

    def validate(self) -> ModuliPoint:
        if not in_extended_moduli(self.theta):
            raise InvalidPoint(f"|theta| = {self.theta.norm:.6g} is not below pi*sqrt(2)")
        r = self.residual()
        if r >= tol().relation:
            raise InvalidPoint(f"relation residual {r:.3e}")
        return self

    @classmethod
    def from_holonomy(cls, hol: HolonomyPoint) -> ModuliPoint:
        """theta = log of the boundary product; fails on the hypersurface {prod = -I}."""
        if hol.genus == 0:
            return cls(Su2Vector(), hol)
        try:
            theta = log(boundary_product(hol.hol))
        except SingularLog as exc:
            raise InvalidPoint("boundary holonomy is -I; point is not in N") from exc
        return cls(theta, hol)

    @classmethod
    def random(cls, genus: int, rng: np.random.Generator, margin: float = 1e-3) -> ModuliPoint:
        while True:
            hol = HolonomyPoint.random(genus, rng)
            prod = boundary_product(hol.hol)
            if prod.dist(MINUS_IDENTITY) > margin:
                return cls.from_holonomy(hol)

    def dist(self, other: ModuliPoint) -> float:
        if self.genus != other.genus:
            return float("inf")
        d = (self.theta - other.theta).euclid
        return max([d] + [a.dist(b) for a, b in zip(self.hol.hol, other.hol.hol)])

    def to_json(self) -> dict:
        return {"theta": list(self.theta.as_tuple()), "hol": [list(q.as_tuple()) for q in self.hol.hol]}

    @classmethod
    def from_json(cls, data) -> ModuliPoint:
        hol = tuple(SU2.from_tuple(q) for q in data["hol"])
        return cls(Su2Vector(*data["theta"]), HolonomyPoint(len(hol) // 2, hol))


@dataclass(frozen=True)
class CutModuliPoint:
    g: Su2Vector
    A1: SU2
    A2: SU2
    b1: Su2Vector
    b2: Su2Vector
    pairs: tuple[tuple[SU2, SU2], ...] = ()

    @property
    def genus(self) -> int:
        return len(self.pairs) + 1

    def relation_rhs(self) -> SU2:
        out = self.A1 * exp(self.b1) * self.A1.inv() * self.A2.inv() * exp(-self.b2) * self.A2
        for u, v in self.pairs:
            out = out * commutator(u, v)
        return out

    def residual(self) -> float:
        return exp(self.g).dist(self.relation_rhs())

    def is_valid(self) -> bool:
        return (
            max(self.g.norm, self.b1.norm, self.b2.norm) < CUT_RADIUS
            and self.residual() < tol().relation
        )

    def validate(self) -> CutModuliPoint:
        for name in ("g", "b1", "b2"):
            if getattr(self, name).norm >= CUT_RADIUS:
                raise InvalidPoint(f"|{name}| is not below pi*sqrt(2)")
        r = self.residual()
        if r >= tol().relation:
            raise InvalidPoint(f"cut relation residual {r:.3e}")
        return self

    @classmethod
    def random(cls, genus: int, rng: np.random.Generator, equal_b: bool = False, margin: float = 1e-3) -> CutModuliPoint:
        while True:
            b1 = random_su2_vector(rng, 0.99 * CUT_RADIUS)
            b2 = b1 if equal_b else random_su2_vector(rng, 0.99 * CUT_RADIUS)
            pairs = tuple((random_su2(rng), random_su2(rng)) for _ in range(genus - 1))
            pt = cls(Su2Vector(), random_su2(rng), random_su2(rng), b1, b2, pairs)
            rhs = pt.relation_rhs()
            if rhs.dist(MINUS_IDENTITY) > margin:
                return cls(log(rhs), pt.A1, pt.A2, b1, b2, pairs)

    def dist(self, other: CutModuliPoint) -> float:
        ds = [(self.g - other.g).euclid, (self.b1 - other.b1).euclid, (self.b2 - other.b2).euclid]
        ds += [self.A1.dist(other.A1), self.A2.dist(other.A2)]
        for (u, v), (x, y) in zip(self.pairs, other.pairs):
            ds += [u.dist(x), v.dist(y)]
        return max(ds)

    def to_json(self) -> dict:
        return {
            "g": list(self.g.as_tuple()),
            "A1": list(self.A1.as_tuple()),
            "A2": list(self.A2.as_tuple()),
            "b1": list(self.b1.as_tuple()),
            "b2": list(self.b2.as_tuple()),
            "pairs": [[list(u.as_tuple()), list(v.as_tuple())] for u, v in self.pairs],
        }

    @classmethod
    def from_json(cls, data) -> CutModuliPoint:
        return cls(
            Su2Vector(*data["g"]),
            SU2.from_tuple(data["A1"]),
            SU2.from_tuple(data["A2"]),
            Su2Vector(*data["b1"]),
            Su2Vector(*data["b2"]),
            tuple((SU2.from_tuple(u), SU2.from_tuple(v)) for u, v in data.get("pairs", [])),
        )


def moments(pt: CutModuliPoint) -> tuple[Su2Vector, Su2Vector, Su2Vector]:
    """(Phi_gamma, Phi_1, Phi_2) = (g, -b_1, b_2)."""
    return pt.g, -pt.b1, pt.b2


def total_moment(pt: CutModuliPoint) -> Su2Vector:
    """Moment Phi_1 + Phi_2 of the diagonal SU(2) action."""
    return pt.b2 - pt.b1


def su2_action(G: SU2, pt: CutModuliPoint) -> CutModuliPoint:
    """G.(g, A1, A2, b1, b2, ...) = (g, A1 G^-1, G A2, Ad_G b1, Ad_G b2, ...)."""
    return CutModuliPoint(pt.g, pt.A1 * G.inv(), G * pt.A2, adjoint(G, pt.b1), adjoint(G, pt.b2), pt.pairs)


def glue(pt: CutModuliPoint) -> ModuliPoint:
    """Gluing map on the zero level of Phi_1 + Phi_2: A = A1 A2, B~ = A2^-1 e^{b1} A2."""
    if total_moment(pt).norm >= tol().relation:
        raise MomentNotZero(f"|Phi_1 + Phi_2| = {total_moment(pt).norm:.3e}")
    hol = [pt.A1 * pt.A2, pt.A2.inv() * exp(pt.b1) * pt.A2]
    for u, v in pt.pairs:
        hol += [u, v]
    return ModuliPoint(pt.g, HolonomyPoint(pt.genus, tuple(hol)))


def unglue(m: ModuliPoint) -> CutModuliPoint:
    """Canonical preimage with A2 = I, b1 = b2 = log(B~)."""
    if m.genus < 1:
        raise InvalidPoint("cannot cut a genus-0 surface")
    A, Bt = m.hol.hol[0], m.hol.hol[1]
    try:
        b = log(Bt)
    except SingularLog as exc:
        raise OnComplementC("B~ = -I: point lies on C-, outside the image of the reduction") from exc
    pairs = tuple((m.hol.hol[k], m.hol.hol[k + 1]) for k in range(2, 2 * m.genus, 2))
    return CutModuliPoint(m.theta, A, IDENTITY, b, b, pairs)


def flow(pt: CutModuliPoint, t: float) -> CutModuliPoint:
    """Time-t flow of H = |Phi_1|^2 / 2: only A1 moves, to A1 e^{t b1}."""
    return CutModuliPoint(pt.g, pt.A1 * exp(pt.b1 * t), pt.A2, pt.b1, pt.b2, pt.pairs)

