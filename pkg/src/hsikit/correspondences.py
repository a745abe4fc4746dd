"""Symbolic Lagrangian correspondences of elementary cobordisms.

Every correspondence is kept in the normal form

    pre-graph  ->  handle deaths  ->  handle births  ->  post-graph

read left to right (the order in which a point travels through it).

* A graph is X -> s . Ad_{e^{alpha theta'}} (w(X)), theta' = Ad_{c(X)} theta,
  with w a word substitution, s a table of central signs, alpha a boundary
  rotation angle and c a conjugating word (empty except for base-path moves).
* A death on source pair i of type "a" (resp. "b") keeps only points with
  A_i = eps I (resp. B_i = eps I) and forgets the pair; this is the
  correspondence of a 2-handle attached along alpha_i (resp. beta_i).
* A birth at target pair j of type "b" inserts (T, eps I) with T free; type
  "a" inserts (eps I, T).  This is the 1-handle correspondence whose belt
  circle is beta_j (resp. alpha_j).

Geometric composition stays inside this form whenever the graph sandwiched
between two handle layers has no word substitution; anything else raises
NotComposable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .config import tol
from .errors import GenusMismatch, InvalidParams, NotComposable, UnsupportedShape
from .moduli import ModuliPoint, boundary_product
from .su2 import IDENTITY, MINUS_IDENTITY, SU2, Su2Vector, adjoint, exp, log, random_su2
from .words import (
    HolonomyPoint,
    Substitution,
    Word,
    alpha,
    base_path_substitution,
    beta,
    boundary_word,
    evaluate,
    identity_substitution,
    parse_curve,
)


def _scalar(eps: int) -> SU2:
    return IDENTITY if eps > 0 else MINUS_IDENTITY


def class_signs(class_bits: Sequence[int] | None, genus: int) -> tuple[int, ...]:
    """Sign table of the trivial cobordism carrying a Z/2 class.

    Bits are indexed like generators (a_1, b_1, a_2, ...).  Class a_i flips
    B_i and class b_i flips A_i, since alpha_i . beta_i = 1.
    """
    n = 2 * genus
    if class_bits is None:
        return (1,) * n
    bits = [int(b) % 2 for b in class_bits]
    if len(bits) != n:
        raise InvalidParams(f"class vector needs {n} bits for genus {genus}, got {len(bits)}")
    return tuple(-1 if bits[g ^ 1] else 1 for g in range(n))


@dataclass(frozen=True)
class Graph:
    genus: int
    subst: Substitution
    signs: tuple[int, ...]
    angle: float = 0.0
    conj: Word = Word()

    @classmethod
    def identity(cls, genus: int) -> Graph:
        return cls(genus, identity_substitution(genus), (1,) * (2 * genus))

    @classmethod
    def sign_flip(cls, genus: int, class_bits) -> Graph:
        return cls(genus, identity_substitution(genus), class_signs(class_bits, genus))

    @property
    def is_identity(self) -> bool:
        return self.is_diagonal and all(s == 1 for s in self.signs) and self.angle == 0.0

    @property
    def is_diagonal(self) -> bool:
        """No substitution and no conjugation: only signs and rotation."""
        return self.subst.is_identity and not self.conj.letters

    def apply(self, theta: Su2Vector, hol: Sequence[SU2]) -> tuple[Su2Vector, tuple[SU2, ...]]:
        ys = [evaluate(self.subst.image(k), hol) for k in range(2 * self.genus)]
        if self.conj.letters:
            theta = adjoint(evaluate(self.conj, hol), theta)
        if self.angle:
            r = exp(theta * self.angle)
            ri = r.inv()
            ys = [r * y * ri for y in ys]
        return theta, tuple(y if s > 0 else -y for y, s in zip(ys, self.signs))

    def invert(self, theta: Su2Vector, hol: Sequence[SU2]) -> tuple[Su2Vector, tuple[SU2, ...]]:
        ys = [y if s > 0 else -y for y, s in zip(hol, self.signs)]
        if self.angle:
            r = exp(theta * -self.angle)
            ri = r.inv()
            ys = [r * y * ri for y in ys]
        if not self.subst.is_identity:
            inv = self.subst.inverse()
            ys = [evaluate(inv.image(k), ys) for k in range(2 * self.genus)]
        if self.conj.letters:
            theta = adjoint(evaluate(self.conj, ys).inv(), theta)
        return theta, tuple(ys)

    def then(self, other: Graph) -> Graph:
        """Graph of (other after self)."""
        if other.genus != self.genus:
            raise GenusMismatch("graphs on different genera")
        if other.conj.letters and self.angle:
            raise NotComposable("rotation followed by a base-path change leaves the graph fragment")
        signs = []
        for k in range(2 * self.genus):
            img = other.subst.image(k)
            s = other.signs[k]
            for j in range(2 * self.genus):
                if self.signs[j] < 0 and img.occurrences(j) % 2:
                    s = -s
            signs.append(s)
        conj = self.conj
        if other.conj.letters:
            conj = self.subst.apply(other.conj) * self.conj
        return Graph(self.genus, self.subst.then(other.subst), tuple(signs), self.angle + other.angle, conj.reduced())

    def preserves_boundary(self) -> bool:
        if self.genus == 0:
            return True
        bw = boundary_word(self.genus)
        return self.subst.apply(bw).freely_equal(self.conj * bw * self.conj.inverse())

    def restrict(self, keep: Sequence[int]) -> Graph:
        """Diagonal graph restricted to the listed pairs (0-based), in order."""
        assert self.is_diagonal
        signs = []
        for i in keep:
            signs += [self.signs[2 * i], self.signs[2 * i + 1]]
        return Graph(len(keep), identity_substitution(len(keep)), tuple(signs), self.angle)

    def to_json(self) -> dict:
        return {
            "genus": self.genus,
            "subst": self.subst.to_json(),
            "signs": list(self.signs),
            "angle": self.angle,
            "conj": self.conj.to_json(),
        }

    @classmethod
    def from_json(cls, d) -> Graph:
        return cls(int(d["genus"]), Substitution.from_json(d["subst"]), tuple(int(s) for s in d["signs"]), float(d.get("angle", 0.0)), Word.from_json(d.get("conj", [])))


Handle = tuple[int, str, int]  # (pair index, "a" | "b", eps)


@dataclass(frozen=True)
class Correspondence:
    source_genus: int
    target_genus: int
    pre: Graph
    deaths: tuple[Handle, ...] = ()
    births: tuple[Handle, ...] = ()
    post: Graph | None = None

    def __post_init__(self):
        post = self.post if self.post is not None else Graph.identity(self.target_genus)
        object.__setattr__(self, "post", post)
        object.__setattr__(self, "deaths", tuple(sorted(self.deaths)))
        object.__setattr__(self, "births", tuple(sorted(self.births)))
        if self.pre.genus != self.source_genus or post.genus != self.target_genus:
            raise GenusMismatch("graph genus does not match correspondence ends")
        mid = self.source_genus - len(self.deaths)
        if mid + len(self.births) != self.target_genus:
            raise GenusMismatch("deaths/births do not account for the genus change")
        if len({d[0] for d in self.deaths}) != len(self.deaths) or any(not 0 <= d[0] < self.source_genus for d in self.deaths):
            raise InvalidParams("death indices must be distinct source pairs")
        if len({b[0] for b in self.births}) != len(self.births) or any(not 0 <= b[0] < self.target_genus for b in self.births):
            raise InvalidParams("birth indices must be distinct target pairs")

    # -- classification ---------------------------------------------------
    @property
    def kind(self) -> str:
        if not self.deaths and not self.births:
            return "graph"
        if not self.births:
            return "handle2"
        if not self.deaths:
            return "handle1"
        return "mixed"

    def as_graph(self) -> Graph:
        assert self.kind == "graph"
        return self.pre.then(self.post)

    # -- pointwise --------------------------------------------------------
    def _core(self, theta: Su2Vector, hol: Sequence[SU2], check: bool = True) -> tuple[SU2, ...] | None:
        rel = tol().relation if check else math.inf
        dead = {}
        for i, t, eps in self.deaths:
            x = hol[2 * i] if t == "a" else hol[2 * i + 1]
            if x.dist(_scalar(eps)) >= rel:
                return None
            dead[i] = True
        out: list[SU2] = []
        for i in range(self.source_genus):
            if i not in dead:
                out += [hol[2 * i], hol[2 * i + 1]]
        return tuple(out)

    def _insert(self, mid: Sequence[SU2], free: Sequence[SU2]) -> tuple[SU2, ...]:
        born = {b[0]: b for b in self.births}
        out: list[SU2] = []
        k = 0
        f = 0
        for j in range(self.target_genus):
            if j in born:
                _, t, eps = born[j]
                c = _scalar(eps)
                out += [free[f], c] if t == "b" else [c, free[f]]
                f += 1
            else:
                out += [mid[2 * k], mid[2 * k + 1]]
                k += 1
        return tuple(out)

    def apply_with(self, pt: ModuliPoint, free: Sequence[SU2] = (), check: bool = True) -> ModuliPoint | None:
        """Image point for given values of the free born holonomies, or None off the domain.

        With ``check=False`` the handle constraints are not tested, which gives
        the smooth extension used for finite differences.
        """
        if pt.genus != self.source_genus:
            raise GenusMismatch(f"point has genus {pt.genus}, correspondence starts at {self.source_genus}")
        theta, hol = self.pre.apply(pt.theta, pt.hol.hol)
        mid = self._core(theta, hol, check)
        if mid is None:
            return None
        if len(free) != len(self.births):
            raise InvalidParams(f"need {len(self.births)} free holonomies")
        hol2 = self._insert(mid, free)
        theta, hol2 = self.post.apply(theta, hol2)
        return ModuliPoint(theta, HolonomyPoint(self.target_genus, hol2))

    def sample_domain(self, rng: np.random.Generator, margin: float = 1e-3) -> ModuliPoint:
        """Random point of the source space lying in the domain."""
        if not self.deaths:
            return ModuliPoint.random(self.source_genus, rng)
        dead = {d[0]: d for d in self.deaths}
        while True:
            hol: list[SU2] = []
            for i in range(self.source_genus):
                if i in dead:
                    _, t, eps = dead[i]
                    c, r = _scalar(eps), random_su2(rng)
                    hol += [c, r] if t == "a" else [r, c]
                else:
                    hol += [random_su2(rng), random_su2(rng)]
            prod = boundary_product(hol) if hol else IDENTITY
            if prod.dist(MINUS_IDENTITY) > margin:
                break
        theta = log(prod) if hol else Su2Vector()
        theta, hol = self.pre.invert(theta, hol)
        return ModuliPoint(theta, HolonomyPoint(self.source_genus, tuple(hol)))

    # -- serialisation ----------------------------------------------------
    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "source_genus": self.source_genus,
            "target_genus": self.target_genus,
            "pre": self.pre.to_json(),
            "deaths": [list(d) for d in self.deaths],
            "births": [list(b) for b in self.births],
            "post": self.post.to_json(),
        }

    @classmethod
    def from_json(cls, d) -> Correspondence:
        if "pre" not in d:
            return elementary(d["shape"], int(d["genus"]), d.get("class_bits"), **d.get("params", {}))
        return cls(
            int(d["source_genus"]),
            int(d["target_genus"]),
            Graph.from_json(d["pre"]),
            tuple((int(i), str(t), int(e)) for i, t, e in d.get("deaths", [])),
            tuple((int(i), str(t), int(e)) for i, t, e in d.get("births", [])),
            Graph.from_json(d["post"]),
        )


class Family:
    """Image of a point under a correspondence with births: one free SU(2) per birth."""

    def __init__(self, corr: Correspondence, pt: ModuliPoint):
        self.corr = corr
        self.pt = pt
        self.dim = 3 * len(corr.births)

    def point(self, free: Sequence[SU2]) -> ModuliPoint:
        return self.corr.apply_with(self.pt, free)

    def sample(self, rng: np.random.Generator, n: int = 1) -> list[ModuliPoint]:
        return [self.point([random_su2(rng) for _ in self.corr.births]) for _ in range(n)]

    def contains(self, y: ModuliPoint) -> bool:
        c = self.corr
        if y.genus != c.target_genus:
            return False
        theta, hol = c.post.invert(y.theta, y.hol.hol)
        born = {b[0]: b for b in c.births}
        free = []
        for j, (_, t, eps) in sorted(born.items()):
            fixed = hol[2 * j + 1] if t == "b" else hol[2 * j]
            if fixed.dist(_scalar(eps)) >= tol().relation:
                return False
            free.append(hol[2 * j] if t == "b" else hol[2 * j + 1])
        guess = self.point(free)
        return guess is not None and guess.dist(y) < tol().relation


def apply(corr: Correspondence, pt: ModuliPoint):
    """Pointwise image: a list with 0 or 1 points, or a Family when handles are born."""
    if pt.genus != corr.source_genus:
        raise GenusMismatch(f"point has genus {pt.genus}, correspondence starts at {corr.source_genus}")
    if corr.births:
        theta, hol = corr.pre.apply(pt.theta, pt.hol.hol)
        if corr._core(theta, hol) is None:
            return []
        return Family(corr, pt)
    out = corr.apply_with(pt)
    return [] if out is None else [out]


# -- elementary cobordisms --------------------------------------------------

SHAPES = ("cylinder", "reparam", "diffeo", "base_path", "handle2", "handle1")


def elementary(shape: str, genus: int, class_bits=None, **params) -> Correspondence:
    """Correspondence of an elementary cobordism carrying a Z/2 class.

    ``genus`` is the source genus.  The class is pushed into a collar of the
    larger boundary surface, so its bits index that surface's generators.

    shapes and parameters:
      cylinder                      trivial cobordism
      reparam   angle               boundary rotated by ``angle``
      diffeo    subst               mapping cylinder of a substitution
      base_path pair (default 1)    base point dragged around alpha_pair
      handle2   curve ("b1", ...)   2-handle along a standard curve
      handle1   pair, cocurve       1-handle; target pair ``pair`` has belt ``cocurve``
    """
    h = int(genus)
    if shape == "cylinder":
        return Correspondence(h, h, Graph.sign_flip(h, class_bits))
    if shape == "reparam":
        g = replace(Graph.sign_flip(h, class_bits), angle=float(params.get("angle", 0.0)))
        return Correspondence(h, h, g)
    if shape == "diffeo":
        sub = params["subst"]
        if isinstance(sub, dict):
            sub = Substitution.from_json(sub)
        g = Graph(h, sub, (1,) * (2 * h))
        if not g.preserves_boundary():
            raise UnsupportedShape("substitution does not fix the boundary word")
        return Correspondence(h, h, Graph.sign_flip(h, class_bits).then(g))
    if shape == "base_path":
        i = int(params.get("pair", 1))
        g = Graph(h, base_path_substitution(h, i), (1,) * (2 * h), conj=Word.of((alpha(i), -1)))
        if not g.preserves_boundary():
            raise UnsupportedShape("base-path substitution does not conjugate the boundary word")
        return Correspondence(h, h, Graph.sign_flip(h, class_bits).then(g))
    if shape == "handle2":
        t, i = parse_curve(params["curve"])
        if not 1 <= i <= h:
            raise UnsupportedShape(f"curve index {i} outside genus {h}")
        pre = Graph.sign_flip(h, class_bits)
        # fold the sign on the attaching generator into eps, drop it on the forgotten partner
        gid = alpha(i) if t == "a" else beta(i)
        eps = pre.signs[gid]
        signs = list(pre.signs)
        signs[alpha(i)] = signs[beta(i)] = 1
        return Correspondence(h, h - 1, Graph(h, pre.subst, tuple(signs)), deaths=((i - 1, t, eps),))
    if shape == "handle1":
        i = int(params.get("pair", h + 1))
        t = str(params.get("cocurve", "b"))[0]
        if not 1 <= i <= h + 1 or t not in "ab":
            raise UnsupportedShape("handle1 needs pair in 1..genus+1 and cocurve 'a' or 'b'")
        post = Graph.sign_flip(h + 1, class_bits)
        fixed = beta(i) if t == "b" else alpha(i)
        eps = post.signs[fixed]
        signs = list(post.signs)
        signs[alpha(i)] = signs[beta(i)] = 1
        return Correspondence(h, h + 1, Graph.identity(h), births=((i - 1, t, eps),), post=Graph(h + 1, post.subst, tuple(signs)))
    raise UnsupportedShape(f"unknown elementary shape {shape!r}")


def handle2(genus: int, curve: str, eps: int = 1) -> Correspondence:
    t, i = parse_curve(curve)
    return Correspondence(genus, genus - 1, Graph.identity(genus), deaths=((i - 1, t, eps),))


def handle1(genus: int, pair: int, cocurve: str = "b", eps: int = 1) -> Correspondence:
    return Correspondence(genus, genus + 1, Graph.identity(genus), births=((pair - 1, cocurve, eps),))


def graph(g: Graph) -> Correspondence:
    return Correspondence(g.genus, g.genus, g)


# -- composition --------------------------------------------------------------


def compose(c1: Correspondence, c2: Correspondence) -> Correspondence:
    """Geometric composition: travel through c1, then c2."""
    if c1.target_genus != c2.source_genus:
        raise GenusMismatch(f"c1 ends at genus {c1.target_genus}, c2 starts at {c2.source_genus}")
    if c1.kind == "graph":
        g = c1.as_graph().then(c2.pre)
        return Correspondence(c1.source_genus, c2.target_genus, g, c2.deaths, c2.births, c2.post)
    if c2.kind == "graph":
        return Correspondence(c1.source_genus, c2.target_genus, c1.pre, c1.deaths, c1.births, c1.post.then(c2.as_graph()))

    mid = c1.post.then(c2.pre)
    if not mid.is_diagonal:
        raise NotComposable("a word substitution sits between two handle layers")

    # push the diagonal middle graph past c2's deaths: signs on killed generators become eps
    deaths2 = []
    for i, t, eps in c2.deaths:
        gid = 2 * i + (0 if t == "a" else 1)
        deaths2.append((i, t, eps * mid.signs[gid]))
    dead2 = {d[0] for d in c2.deaths}
    survivors = [i for i in range(c1.target_genus) if i not in dead2]
    mid_rest = mid.restrict(survivors)
    # then past c2's births (born values +-I are fixed by rotation, free ones stay free)
    born2 = {b[0] for b in c2.births}
    signs: list[int] = []
    k = 0
    for j in range(c2.target_genus):
        if j in born2:
            signs += [1, 1]
        else:
            signs += [mid_rest.signs[2 * k], mid_rest.signs[2 * k + 1]]
            k += 1
    mid_ext = Graph(c2.target_genus, identity_substitution(c2.target_genus), tuple(signs), mid.angle)
    post = mid_ext.then(c2.post)

    # slot bookkeeping: labels ("s", i) for source pairs, ("b", n) for births
    slots: list[tuple[str, int]] = [("s", i) for i in range(c1.source_genus)]
    deaths: dict[int, Handle] = {}
    info: dict[int, tuple[str, int]] = {}
    for i, t, eps in c1.deaths:
        deaths[i] = (i, t, eps)
    slots = [s for s in slots if s[1] not in deaths]
    counter = 0
    for j, t, eps in c1.births:
        slots.insert(j, ("b", counter))
        info[counter] = (t, eps)
        counter += 1
    removed = set()
    for j, t, eps in deaths2:
        lab = slots[j]
        removed.add(j)
        if lab[0] == "s":
            deaths[lab[1]] = (lab[1], t, eps)
        else:
            bt, _ = info.pop(lab[1])
            if bt == t:
                raise NotComposable(
                    f"2-handle along the same curve type as the belt of a 1-handle ({t}): composition is not embedded"
                )
    slots = [s for n, s in enumerate(slots) if n not in removed]
    for j, t, eps in c2.births:
        slots.insert(j, ("b", counter))
        info[counter] = (t, eps)
        counter += 1
    births = tuple((pos, info[lab[1]][0], info[lab[1]][1]) for pos, lab in enumerate(slots) if lab[0] == "b")
    return Correspondence(c1.source_genus, c2.target_genus, c1.pre, tuple(deaths.values()), births, post)


def compose_all(corrs: Iterable[Correspondence]) -> Correspondence:
    corrs = list(corrs)
    out = corrs[0]
    for c in corrs[1:]:
        out = compose(out, c)
    return out


def agree_on_samples(c1: Correspondence, c2: Correspondence, rng: np.random.Generator, samples: int = 50) -> float:
    """Largest pointwise discrepancy between two correspondences with the same ends.

    Points are drawn from both domains; families are compared by membership of
    samples.  Returns inf when the domains or image sizes disagree.
    """
    if (c1.source_genus, c1.target_genus) != (c2.source_genus, c2.target_genus):
        return math.inf
    worst = 0.0
    for n in range(samples):
        src = c1 if n % 2 == 0 else c2
        try:
            x = src.sample_domain(rng)
        except NotImplementedError:
            x = ModuliPoint.random(src.source_genus, rng)
        a, b = apply(c1, x), apply(c2, x)
        if isinstance(a, Family) or isinstance(b, Family):
            if not (isinstance(a, Family) and isinstance(b, Family)):
                return math.inf
            for y in a.sample(rng, 2):
                if not b.contains(y):
                    return math.inf
            for y in b.sample(rng, 2):
                if not a.contains(y):
                    return math.inf
            continue
        if len(a) != len(b):
            return math.inf
        if a:
            worst = max(worst, a[0].dist(b[0]))
    return worst


# -- embeddedness diagnostics ------------------------------------------------


@dataclass
class EmbeddednessReport:
    passed: bool
    samples: int
    solutions: int
    equations: int
    unknowns: int
    worst_rank_deficit: int
    min_singular_value: float
    injective: bool
    empty: bool
    composite_is_diagonal: bool | None = None
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {k: v for k, v in self.__dict__.items()}


def _flatten(pt: ModuliPoint) -> np.ndarray:
    vals = list(pt.theta.as_tuple())
    for q in pt.hol.hol:
        vals += list(q.as_tuple())
    return np.array(vals)


def embeddedness_check(
    c1: Correspondence,
    c2: Correspondence,
    samples: int = 20,
    rng: np.random.Generator | None = None,
    starts: int = 3,
) -> EmbeddednessReport:
    """Sampled transversality / injectivity diagnostic for c1 followed by c2.

    For each sample x0 the free holonomies born in c1 are solved for so that
    c2's handle constraints hold (Gauss-Newton, finite differences).  The
    Jacobian rank of those equations is compared with their count
    (transversality), and the stacked Jacobian with the projection to the
    outer factors must have full column rank (local injectivity).  This is a
    heuristic, not a certificate.
    """
    rng = rng or np.random.default_rng(0)
    notes: list[str] = []
    try:
        comp = compose(c1, c2)
        notes.append(f"symbolic composition available ({comp.kind})")
    except NotComposable as exc:
        comp = None
        notes.append(f"no symbolic composition: {exc}")
    domain = comp or c1
    nb = len(c1.births)
    n_eq = 4 * len(c2.deaths)
    c2_free = [IDENTITY] * len(c2.births)
    h = 1e-6

    def unpack(base, z):
        return [b * exp(Su2Vector(*z[3 * k : 3 * k + 3])) for k, b in enumerate(base)]

    def residual(x0, base, z):
        x1 = c1.apply_with(x0, unpack(base, z))
        theta, hol = c2.pre.apply(x1.theta, x1.hol.hol)
        r = []
        for i, t, eps in c2.deaths:
            x = hol[2 * i] if t == "a" else hol[2 * i + 1]
            d = x * _scalar(eps)
            r += [d.w - 1.0, d.x, d.y, d.z]
        return np.array(r)

    def outer(x0, base, z):
        x2 = c2.apply_with(c1.apply_with(x0, unpack(base, z)), c2_free, check=False)
        return _flatten(x2)

    def jac(f, x0, base, z, m):
        J = np.zeros((m, 3 * nb))
        f0 = f(x0, base, z)
        for k in range(3 * nb):
            dz = z.copy()
            dz[k] += h
            J[:, k] = (f(x0, base, dz) - f0) / h
        return J

    solved = 0
    deficit = 0
    smin = math.inf
    injective = True
    diag_flags = []
    for _ in range(samples):
        try:
            x0 = domain.sample_domain(rng)
        except NotImplementedError:
            x0 = ModuliPoint.random(c1.source_genus, rng)
        if c1.apply_with(x0, [IDENTITY] * nb) is None:
            continue
        found: list[tuple[list[SU2], np.ndarray]] = []
        for s in range(starts if nb else 1):
            base = [IDENTITY if s == 0 else random_su2(rng) for _ in range(nb)]
            z = np.zeros(3 * nb)
            if n_eq and nb:
                for _it in range(60):
                    r = residual(x0, base, z)
                    if np.linalg.norm(r) < 1e-13:
                        break
                    J = jac(residual, x0, base, z, n_eq)
                    step = np.linalg.lstsq(J, -r, rcond=None)[0]
                    z = z + step
                    if np.linalg.norm(z) > 1.0:
                        base = unpack(base, z)
                        z = np.zeros(3 * nb)
            r = residual(x0, base, z) if n_eq else np.zeros(0)
            if np.linalg.norm(r) > tol().solver:
                continue
            y = outer(x0, base, z)
            found.append((unpack(base, z), y))
            if nb:
                if n_eq:
                    J = jac(residual, x0, base, z, n_eq)
                    sv = np.linalg.svd(J, compute_uv=False)
                    rank = int(np.sum(sv > 1e-6))
                    deficit = max(deficit, 3 * len(c2.deaths) - rank)
                    relevant = sv[: 3 * len(c2.deaths)]
                    if relevant.size:
                        smin = min(smin, float(relevant.min()))
                else:
                    J = np.zeros((0, 3 * nb))
                Jo = jac(outer, x0, base, z, len(y))
                stacked = np.vstack([J, Jo])
                sv2 = np.linalg.svd(stacked, compute_uv=False)
                if int(np.sum(sv2 > 1e-6)) < 3 * nb:
                    injective = False
        if found:
            solved += 1
            # distinct solutions over the same x0 must have distinct images
            for a in range(len(found)):
                for b in range(a + 1, len(found)):
                    same_free = max(p.dist(q) for p, q in zip(found[a][0], found[b][0])) if nb else 0.0
                    same_img = float(np.max(np.abs(found[a][1] - found[b][1])))
                    if same_free > 1e-6 and same_img < 1e-8:
                        injective = False
            if c1.source_genus == c2.target_genus:
                diag_flags.append(float(np.max(np.abs(found[0][1] - _flatten(x0)))) < 1e-8)
    empty = solved == 0
    if empty:
        notes.append("no point of the generalized intersection found on any sample")
    passed = (not empty) and deficit == 0 and injective
    return EmbeddednessReport(
        passed=passed,
        samples=samples,
        solutions=solved,
        equations=3 * len(c2.deaths),
        unknowns=3 * nb,
        worst_rank_deficit=deficit,
        min_singular_value=smin if smin != math.inf else 0.0,
        injective=injective,
        empty=empty,
        composite_is_diagonal=(all(diag_flags) if diag_flags else None),
        notes=notes,
    )


# -- genus-one intersections -----------------------------------------------


@dataclass(frozen=True)
class CleanIntersectionReport:
    n_central: int
    n_spheres: int
    perturbed_count: int
    components: tuple[float, ...] = ()  # conjugacy angles of the components

    def to_json(self) -> dict:
        return {
            "n_central": self.n_central,
            "n_spheres": self.n_spheres,
            "perturbed_count": self.perturbed_count,
            "component_angles": list(self.components),
        }


def lens_intersection(p: int, q: int, eps0: int = 1, eps1: int = 1) -> CleanIntersectionReport:
    """Components of {B = eps0 I} cap {A^p B^-q = eps1 I} in N(T').

    On L_0, B = delta I with delta = eps0, so the second equation reads
    A^p = eta I with eta = eps1 * delta^q.  A is conjugate to
    diag(e^{i t}, e^{-i t}) with t in [0, pi]; solutions are the t with
    p t = arg(eta) mod 2 pi.  t in {0, pi} gives a point, every other t a
    2-sphere (its conjugacy class), which a perturbation splits into 2 points.
    """
    if p < 1 or eps0 not in (1, -1) or eps1 not in (1, -1) or math.gcd(p, q) != 1:
        raise InvalidParams(f"need p >= 1, gcd(p, q) = 1 and signs +-1; got p={p}, q={q}")
    delta = eps0
    eta = eps1 * (delta ** (q % 2))
    central = 0
    spheres = 0
    comps = []
    # p t = 2 pi k (eta = 1) or pi (2k + 1) (eta = -1), t in [0, pi]  <=>  0 <= num <= p
    offset = 0 if eta == 1 else 1
    for num in range(offset, p + 1, 2):
        comps.append(math.pi * num / p)
        if num == 0 or num == p:
            central += 1
        else:
            spheres += 1
    return CleanIntersectionReport(central, spheres, central + 2 * spheres, tuple(comps))


@dataclass(frozen=True)
class S2xS1Report:
    identical: bool
    perturbed_count: int
    description: str

    def to_json(self) -> dict:
        return {"identical": self.identical, "perturbed_count": self.perturbed_count, "description": self.description}


def s2s1_intersection(eps0: int = 1, eps1: int = 1) -> S2xS1Report:
    """L_0 = {B = eps0 I}, L_1 = {B = eps1 I}: equal (clean along S^3) or disjoint.

    A perfect Morse function on S^3 has two critical points, which is the
    count after perturbing a clean S^3 self-intersection.
    """
    if eps0 == eps1:
        return S2xS1Report(True, 2, "clean self-intersection along {B = eps I} ~ S^3")
    return S2xS1Report(False, 0, "disjoint Lagrangians")
