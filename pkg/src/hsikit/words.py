"""Free-group words on the surface generators alpha_1, beta_1, ..., alpha_h, beta_h.

Generator ids are 0-based with alpha_i -> 2(i-1) and beta_i -> 2(i-1)+1, so the
partner of a generator is ``gid ^ 1``.  A letter is stored as a signed
integer ``+(gid+1)`` or ``-(gid+1)``; that is also the JSON encoding.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import InvalidGenus, UnknownGenerator, UnsupportedCurve
from .su2 import IDENTITY, SU2, random_su2


def alpha(i: int) -> int:
    """Generator id of alpha_i (1-based surface index)."""
    return 2 * (i - 1)


def beta(i: int) -> int:
    return 2 * (i - 1) + 1


def gen_name(gid: int) -> str:
    return ("a" if gid % 2 == 0 else "b") + str(gid // 2 + 1)


def _letter(gid: int, exp: int = 1) -> int:
    return (gid + 1) if exp > 0 else -(gid + 1)


def free_reduce(letters: Iterable[int]) -> tuple[int, ...]:
    out: list[int] = []
    for x in letters:
        if x == 0:
            raise UnknownGenerator("letter 0 is not a generator")
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


@dataclass(frozen=True)
class Word:
    letters: tuple[int, ...] = ()

    @classmethod
    def of(cls, *pairs: tuple[int, int]) -> Word:
        """Build from (gid, exponent) pairs."""
        return cls(free_reduce(_letter(g, e) for g, e in pairs))

    @classmethod
    def gen(cls, gid: int) -> Word:
        return cls((gid + 1,))

    @classmethod
    def from_json(cls, data: Sequence[int]) -> Word:
        return cls(tuple(int(x) for x in data))

    def to_json(self) -> list[int]:
        return list(self.letters)

    def reduced(self) -> Word:
        return Word(free_reduce(self.letters))

    def __mul__(self, other: Word) -> Word:
        return Word(self.letters + other.letters)

    def inverse(self) -> Word:
        return Word(tuple(-x for x in reversed(self.letters)))

    def __len__(self) -> int:
        return len(self.letters)

    def generators(self) -> set[int]:
        return {abs(x) - 1 for x in self.letters}

    def exponent_sums(self, n: int) -> list[int]:
        sums = [0] * n
        for x in self.letters:
            g = abs(x) - 1
            if g >= n:
                raise UnknownGenerator(f"generator {gen_name(g)} outside range")
            sums[g] += 1 if x > 0 else -1
        return sums

    def occurrences(self, gid: int) -> int:
        return sum(1 for x in self.letters if abs(x) - 1 == gid)

    def freely_equal(self, other: Word) -> bool:
        return free_reduce(self.letters) == free_reduce(other.letters)

    def __str__(self) -> str:
        if not self.letters:
            return "1"
        return " ".join(gen_name(abs(x) - 1) + ("" if x > 0 else "^-1") for x in self.letters)


@dataclass(frozen=True)
class HolonomyPoint:
    genus: int
    hol: tuple[SU2, ...]

    def __post_init__(self):
        if len(self.hol) != 2 * self.genus:
            raise InvalidGenus(f"expected {2 * self.genus} holonomies, got {len(self.hol)}")

    def A(self, i: int) -> SU2:
        return self.hol[alpha(i)]

    def B(self, i: int) -> SU2:
        return self.hol[beta(i)]

    @classmethod
    def random(cls, genus: int, rng: np.random.Generator) -> HolonomyPoint:
        return cls(genus, tuple(random_su2(rng) for _ in range(2 * genus)))

    def replace(self, gid: int, value: SU2) -> HolonomyPoint:
        hol = list(self.hol)
        hol[gid] = value
        return HolonomyPoint(self.genus, tuple(hol))


def evaluate(w: Word, pt: HolonomyPoint | Sequence[SU2]) -> SU2:
    hol = pt.hol if isinstance(pt, HolonomyPoint) else pt
    out = IDENTITY
    for x in w.letters:
        g = abs(x) - 1
        if g >= len(hol):
            raise UnknownGenerator(f"generator {gen_name(g)} not defined for {len(hol)} holonomies")
        out = out * (hol[g] if x > 0 else hol[g].inv())
    return out


def commutator_word(a: int, b: int) -> Word:
    return Word.of((a, 1), (b, 1), (a, -1), (b, -1))


def boundary_word(h: int) -> Word:
    """prod_i [alpha_i, beta_i], the loop parallel to the boundary."""
    if h < 1:
        raise InvalidGenus("boundary_word needs genus >= 1")
    w = Word()
    for i in range(1, h + 1):
        w = w * commutator_word(alpha(i), beta(i))
    return w


@dataclass(frozen=True)
class Substitution:
    """Endomorphism of the free group given by generator images.

    Generators missing from ``images`` are fixed.  ``inverse`` is optional and
    only known for substitutions built from standard twists.
    """

    genus: int
    images: Mapping[int, Word] = field(default_factory=dict)
    inverse_images: Mapping[int, Word] | None = None

    def image(self, gid: int) -> Word:
        if gid >= 2 * self.genus:
            raise UnknownGenerator(f"generator {gen_name(gid)} outside genus {self.genus}")
        return self.images.get(gid, Word.gen(gid))

    def apply(self, w: Word) -> Word:
        letters: list[int] = []
        for x in w.letters:
            img = self.image(abs(x) - 1)
            letters.extend(img.letters if x > 0 else img.inverse().letters)
        return Word(free_reduce(letters))

    def then(self, other: Substitution) -> Substitution:
        """Substitution for "apply self, then other" on holonomy tuples.

        On holonomies, self sends X to (u_k(X))_k.  Following with other gives
        (v_k(u(X)))_k, i.e. each v_k with generator j replaced by u_j.
        """
        if other.genus != self.genus:
            raise InvalidGenus("genus mismatch in substitution composition")
        imgs = {k: self.apply(other.image(k)) for k in range(2 * self.genus)}
        inv = None
        if self.inverse_images is not None and other.inverse_images is not None:
            si, oi = self.inverse(), other.inverse()
            inv = {k: oi.apply(si.image(k)) for k in range(2 * self.genus)}
        return Substitution(self.genus, _prune(imgs), None if inv is None else _prune(inv))

    def inverse(self) -> Substitution:
        if self.inverse_images is None:
            raise NotImplementedError("inverse not known for this substitution")
        return Substitution(self.genus, dict(self.inverse_images), dict(self.images))

    @property
    def is_identity(self) -> bool:
        return all(self.image(k).freely_equal(Word.gen(k)) for k in range(2 * self.genus))

    def on_point(self, pt: HolonomyPoint) -> HolonomyPoint:
        return HolonomyPoint(pt.genus, tuple(evaluate(self.image(k), pt) for k in range(2 * self.genus)))

    def homology_matrix(self) -> np.ndarray:
        """Integer matrix M with M[k, j] = exponent sum of generator j in image of k."""
        n = 2 * self.genus
        return np.array([self.image(k).exponent_sums(n) for k in range(n)], dtype=np.int64)

    def to_json(self) -> dict:
        out = {"genus": self.genus, "images": {str(k): w.to_json() for k, w in self.images.items()}}
        if self.inverse_images is not None:
            out["inverse_images"] = {str(k): w.to_json() for k, w in self.inverse_images.items()}
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> Substitution:
        imgs = {int(k): Word.from_json(v) for k, v in data.get("images", {}).items()}
        inv = data.get("inverse_images")
        return cls(int(data["genus"]), imgs, None if inv is None else {int(k): Word.from_json(v) for k, v in inv.items()})


def _prune(images: Mapping[int, Word]) -> dict[int, Word]:
    return {k: w for k, w in images.items() if not w.freely_equal(Word.gen(k))}


def identity_substitution(h: int) -> Substitution:
    return Substitution(h, {}, {})


_CURVE = re.compile(r"^(alpha|beta|a|b)_?(\d+)$")


def parse_curve(curve: str) -> tuple[str, int]:
    m = _CURVE.match(curve.strip().lower())
    if not m:
        raise UnsupportedCurve(f"{curve!r} is not a standard curve alpha_i / beta_i")
    return m.group(1)[0], int(m.group(2))


def twist_substitution(curve: str, h: int, power: int = 1) -> Substitution:
    """Holonomy substitution of a Dehn twist along a standard curve.

    beta_i twist: alpha_i -> alpha_i beta_i.  alpha_i twist: beta_i -> beta_i alpha_i.
    Both preserve [alpha_i, beta_i] after free reduction.  ``power`` may be negative.
    """
    kind, i = parse_curve(curve)
    if not 1 <= i <= h:
        raise UnsupportedCurve(f"curve index {i} outside genus {h}")
    if kind == "b":
        moved, along = alpha(i), beta(i)
    else:
        moved, along = beta(i), alpha(i)
    fwd = Word.of((moved, 1), *([(along, 1 if power > 0 else -1)] * abs(power)))
    bwd = Word.of((moved, 1), *([(along, -1 if power > 0 else 1)] * abs(power)))
    if power == 0:
        return identity_substitution(h)
    return Substitution(h, {moved: fwd}, {moved: bwd})


def base_path_substitution(h: int, i: int = 1) -> Substitution:
    """Change of base path along alpha_i: every generator x -> alpha_i^-1 x alpha_i.

    alpha_i itself is fixed; in genus 1 this is beta -> alpha^-1 beta alpha.
    The boundary word goes to its conjugate by alpha_i.
    """
    a = alpha(i)
    imgs, inv = {}, {}
    for k in range(2 * h):
        if k != a:
            imgs[k] = Word.of((a, -1), (k, 1), (a, 1))
            inv[k] = Word.of((a, 1), (k, 1), (a, -1))
    return Substitution(h, imgs, inv)
