"""Words of elementary cobordisms, Cerf moves and the functor to correspondences.

A piece is an ElemCob with a kind, a source genus, Z/2 class bits and kind
parameters.  Class bits index the generators (a_1, b_1, ...) of the larger of
the two boundary surfaces for handle pieces, and of the source surface for
the others.  A CobWord is a start genus plus a list of pieces.

Handle parameters use 1-based pair indices:
  handle1: pair (position of the new pair), cocurve "a" | "b" (belt circle)
  handle2: curve, e.g. "a1" / "beta2"
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .correspondences import (
    Correspondence,
    agree_on_samples,
    compose_all,
    elementary,
    lens_intersection,
)
from .errors import NotComposable, PatternMismatch, UnsupportedFamily, UnsupportedShape
from .words import Substitution, alpha, beta, identity_substitution, parse_curve, twist_substitution

KINDS = ("cylinder", "handle1", "handle2", "diffeo", "reparam", "base_path")


@dataclass(frozen=True)
class ElemCob:
    kind: str
    source_genus: int
    class_bits: tuple[int, ...] = ()
    params: dict = field(default_factory=dict, compare=True, hash=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UnsupportedShape(f"unknown piece kind {self.kind!r}")
        if self.kind == "handle2":
            t, i = parse_curve(self.params["curve"])
            if not 1 <= i <= self.source_genus:
                raise UnsupportedShape(f"curve {self.params['curve']} outside genus {self.source_genus}")
            self.params["curve"] = f"{t}{i}"
        if self.kind == "handle1":
            self.params.setdefault("pair", self.source_genus + 1)
            self.params.setdefault("cocurve", "b")
            if not 1 <= self.params["pair"] <= self.source_genus + 1 or self.params["cocurve"] not in ("a", "b"):
                raise UnsupportedShape("handle1 needs pair in 1..genus+1 and cocurve 'a' or 'b'")
        bits = tuple(int(b) % 2 for b in self.class_bits) if self.class_bits else (0,) * (2 * self.basis_genus)
        if len(bits) != 2 * self.basis_genus:
            raise UnsupportedShape(f"{self.kind} needs {2 * self.basis_genus} class bits, got {len(bits)}")
        object.__setattr__(self, "class_bits", bits)

    @property
    def target_genus(self) -> int:
        return self.source_genus + {"handle1": 1, "handle2": -1}.get(self.kind, 0)

    @property
    def basis_genus(self) -> int:
        return max(self.source_genus, self.target_genus)

    @property
    def zero_class(self) -> bool:
        return not any(self.class_bits)

    def with_bits(self, bits: Sequence[int]) -> ElemCob:
        return ElemCob(self.kind, self.source_genus, tuple(bits), dict(self.params))

    def bounding_generator(self) -> int | None:
        """Generator of the basis surface that bounds in the piece (its bit is inert)."""
        if self.kind == "handle2":
            t, i = parse_curve(self.params["curve"])
            return alpha(i) if t == "a" else beta(i)
        if self.kind == "handle1":
            j = self.params["pair"]
            return beta(j) if self.params["cocurve"] == "b" else alpha(j)
        return None

    def correspondence(self) -> Correspondence:
        params = dict(self.params)
        if self.kind == "handle1":
            return elementary("handle1", self.source_genus, self.class_bits, pair=params["pair"], cocurve=params["cocurve"])
        return elementary(self.kind, self.source_genus, self.class_bits, **params)

    def to_json(self) -> dict:
        params = dict(self.params)
        if isinstance(params.get("subst"), Substitution):
            params["subst"] = params["subst"].to_json()
        return {"kind": self.kind, "genus": self.source_genus, "class": list(self.class_bits), "params": params}

    @classmethod
    def from_json(cls, d) -> ElemCob:
        params = dict(d.get("params", {}))
        if "subst" in params and not isinstance(params["subst"], Substitution):
            params["subst"] = Substitution.from_json(params["subst"])
        return cls(str(d["kind"]), int(d["genus"]), tuple(d.get("class", ())), params)

    def __str__(self) -> str:
        extra = ""
        if self.kind == "handle2":
            extra = self.params["curve"]
        elif self.kind == "handle1":
            extra = f"pair {self.params['pair']}, belt {self.params['cocurve']}"
        elif self.kind == "reparam":
            extra = f"{self.params.get('angle', 0.0):g}"
        cls_ = "" if self.zero_class else " c=" + "".join(map(str, self.class_bits))
        return f"{self.kind}({extra}){cls_} [{self.source_genus}->{self.target_genus}]"


def cylinder(genus: int, bits: Sequence[int] = ()) -> ElemCob:
    return ElemCob("cylinder", genus, tuple(bits))


def handle1_piece(genus: int, pair: int | None = None, cocurve: str = "b", bits: Sequence[int] = ()) -> ElemCob:
    return ElemCob("handle1", genus, tuple(bits), {"pair": genus + 1 if pair is None else pair, "cocurve": cocurve})


def handle2_piece(genus: int, curve: str, bits: Sequence[int] = ()) -> ElemCob:
    return ElemCob("handle2", genus, tuple(bits), {"curve": curve})


def diffeo_piece(subst: Substitution, bits: Sequence[int] = ()) -> ElemCob:
    return ElemCob("diffeo", subst.genus, tuple(bits), {"subst": subst})


@dataclass(frozen=True)
class CobWord:
    genus: int
    pieces: tuple[ElemCob, ...] = ()

    def __post_init__(self):
        g = self.genus
        for n, p in enumerate(self.pieces):
            if p.source_genus != g:
                raise PatternMismatch(f"piece {n} starts at genus {p.source_genus}, expected {g}")
            g = p.target_genus
        object.__setattr__(self, "pieces", tuple(self.pieces))

    @property
    def genera(self) -> list[int]:
        """Genus of every cut level, including both ends."""
        out = [self.genus]
        for p in self.pieces:
            out.append(p.target_genus)
        return out

    @property
    def target_genus(self) -> int:
        return self.genera[-1]

    def __len__(self) -> int:
        return len(self.pieces)

    def replace(self, start: int, stop: int, new: Sequence[ElemCob]) -> CobWord:
        return CobWord(self.genus, self.pieces[:start] + tuple(new) + self.pieces[stop:])

    def to_json(self) -> dict:
        return {"genus": self.genus, "pieces": [p.to_json() for p in self.pieces]}

    @classmethod
    def from_json(cls, d) -> CobWord:
        return cls(int(d["genus"]), tuple(ElemCob.from_json(p) for p in d.get("pieces", [])))

    def __str__(self) -> str:
        return " . ".join(str(p) for p in self.pieces) or f"empty[{self.genus}]"


def to_correspondences(w: CobWord) -> list[Correspondence]:
    return [p.correspondence() for p in w.pieces]


def composite(w: CobWord) -> Correspondence:
    """Symbolic composition of the whole word (NotComposable if it leaves the fragment)."""
    if not w.pieces:
        return cylinder(w.genus).correspondence()
    return compose_all(to_correspondences(w))


# -- class bookkeeping ------------------------------------------------------


def _embed_bits(bits: Sequence[int], pair: int) -> tuple[int, ...]:
    """Bits of a genus-h surface viewed on genus h+1 with a new pair at ``pair`` (1-based)."""
    k = 2 * (pair - 1)
    return tuple(bits[:k]) + (0, 0) + tuple(bits[k:])


def _gf2_solve(M: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Solve M x = t over Z/2 (M invertible mod 2)."""
    n = M.shape[0]
    A = np.concatenate([M % 2, (t % 2)[:, None]], axis=1).astype(np.int64)
    row = 0
    for col in range(n):
        piv = next((r for r in range(row, n) if A[r, col]), None)
        if piv is None:
            raise PatternMismatch("substitution is not invertible over Z/2")
        A[[row, piv]] = A[[piv, row]]
        for r in range(n):
            if r != row and A[r, col]:
                A[r] ^= A[row]
        row += 1
    return A[:, n]


def _signs_to_bits(signs: np.ndarray) -> np.ndarray:
    # sign on generator g is driven by the bit of g ^ 1
    n = len(signs)
    return np.array([signs[g ^ 1] for g in range(n)])


def _pull_back_through_graph(piece: ElemCob, bits: Sequence[int]) -> tuple[int, ...]:
    """Class applied after a graph piece, expressed as a class applied before it."""
    sub = piece.params.get("subst")
    if piece.kind == "base_path":
        from .words import base_path_substitution

        sub = base_path_substitution(piece.source_genus, int(piece.params.get("pair", 1)))
    if sub is None or sub.is_identity:
        return tuple(bits)
    n = 2 * piece.source_genus
    flips_after = _signs_to_bits(np.array(bits))  # flip pattern on outputs
    M = sub.homology_matrix() % 2
    flips_before = _gf2_solve(M, flips_after)
    return tuple(int(x) for x in _signs_to_bits(flips_before)[:n])


def transport(piece: ElemCob, cyl_bits: Sequence[int], cylinder_first: bool) -> tuple[int, ...]:
    """Cylinder class moved into the basis of an adjacent non-cylinder piece."""
    k = piece.kind
    if cylinder_first:
        if k == "handle1":
            return _embed_bits(cyl_bits, piece.params["pair"])
        return tuple(cyl_bits)
    if k == "handle2":
        t, i = parse_curve(piece.params["curve"])
        return _embed_bits(cyl_bits, i)
    if k == "handle1":
        return tuple(cyl_bits)
    return _pull_back_through_graph(piece, cyl_bits)


def _mask(piece: ElemCob, bits: Sequence[int]) -> tuple[int, ...]:
    g = piece.bounding_generator()
    out = list(bits)
    if g is not None:
        out[g] = 0
    return tuple(out)


def total_class(w: CobWord) -> tuple[tuple[int, ...], ...]:
    """Per-level summary used to check that moves keep the class data consistent."""
    return tuple(p.class_bits for p in w.pieces)


# -- moves ------------------------------------------------------------------


@dataclass(frozen=True)
class Relabel:
    """(i) replace a diffeo piece by a freely equal substitution."""

    subst: Substitution


@dataclass(frozen=True)
class CylinderCreate:
    """(ii) insert a zero-class cylinder before ``position``."""


@dataclass(frozen=True)
class CylinderCancel:
    """(ii) remove the zero-class cylinder at ``position``."""


@dataclass(frozen=True)
class CriticalCreate:
    """(iii) insert a cancelling 1-handle / 2-handle pair before ``position``."""

    pair: int | None = None
    cocurve: str = "b"


@dataclass(frozen=True)
class CriticalCancel:
    """(iii) replace the birth-death pair at ``position`` by a zero-class cylinder."""


@dataclass(frozen=True)
class Switch:
    """(iv) swap the disjoint handle pieces at ``position`` and ``position + 1``."""


@dataclass(frozen=True)
class ClassSlide:
    """(v) new class bits (d, d') for the pieces at ``position`` and ``position + 1``."""

    first: tuple[int, ...]
    second: tuple[int, ...]


CerfMove = Relabel | CylinderCreate | CylinderCancel | CriticalCreate | CriticalCancel | Switch | ClassSlide


def _piece(w: CobWord, position: int) -> ElemCob:
    if not 0 <= position < len(w.pieces):
        raise PatternMismatch(f"no piece at position {position}")
    return w.pieces[position]


def _level_genus(w: CobWord, position: int) -> int:
    if not 0 <= position <= len(w.pieces):
        raise PatternMismatch(f"no cut level at position {position}")
    return w.genera[position]


def _other(t: str) -> str:
    return "a" if t == "b" else "b"


def _is_birth_death(p: ElemCob, q: ElemCob) -> bool:
    if p.kind != "handle1" or q.kind != "handle2":
        return False
    t, i = parse_curve(q.params["curve"])
    return i == p.params["pair"] and t == _other(p.params["cocurve"])


def _switch(p: ElemCob, q: ElemCob) -> tuple[ElemCob, ElemCob]:
    """Reindexed swap of two disjoint zero-class handle pieces (0-based pair bookkeeping)."""
    h = p.source_genus
    if p.kind == "handle2" and q.kind == "handle2":
        t1, k = parse_curve(p.params["curve"])
        t2, m = parse_curve(q.params["curve"])
        k, m = k - 1, m - 1
        m0 = m if m < k else m + 1
        k2 = k if k < m0 else k - 1
        return handle2_piece(h, f"{t2}{m0 + 1}"), handle2_piece(h - 1, f"{t1}{k2 + 1}")
    if p.kind == "handle1" and q.kind == "handle1":
        j, l_ = p.params["pair"] - 1, q.params["pair"] - 1
        jf = j if j < l_ else j + 1
        l2 = l_ if l_ < jf else l_ - 1
        return (
            handle1_piece(h, l2 + 1, q.params["cocurve"]),
            handle1_piece(h + 1, jf + 1, p.params["cocurve"]),
        )
    if p.kind == "handle1" and q.kind == "handle2":
        if _is_birth_death(p, q) or parse_curve(q.params["curve"])[1] == p.params["pair"]:
            raise PatternMismatch("switch needs disjoint handles; these share the new pair")
        j = p.params["pair"] - 1
        t, k = parse_curve(q.params["curve"])
        k -= 1
        jf = j if j < k else j - 1
        k0 = k if k < j else k - 1
        return handle2_piece(h, f"{t}{k0 + 1}"), handle1_piece(h - 1, jf + 1, p.params["cocurve"])
    if p.kind == "handle2" and q.kind == "handle1":
        t, k = parse_curve(p.params["curve"])
        k -= 1
        j = q.params["pair"] - 1
        j1 = j if j <= k else j + 1
        k1 = k if k < j1 else k + 1
        return handle1_piece(h, j1 + 1, q.params["cocurve"]), handle2_piece(h + 1, f"{t}{k1 + 1}")
    raise PatternMismatch("switch applies to two adjacent handle pieces")


def apply_move(w: CobWord, move, position: int) -> CobWord:
    if isinstance(move, Relabel):
        p = _piece(w, position)
        if p.kind != "diffeo":
            raise PatternMismatch("relabel needs a diffeo piece")
        old = p.params["subst"]
        new = move.subst
        if new.genus != old.genus or not all(new.image(k).freely_equal(old.image(k)) for k in range(2 * old.genus)):
            raise PatternMismatch("relabel needs freely equal generator images")
        return w.replace(position, position + 1, [ElemCob("diffeo", p.source_genus, p.class_bits, {"subst": new})])
    if isinstance(move, CylinderCreate):
        return w.replace(position, position, [cylinder(_level_genus(w, position))])
    if isinstance(move, CylinderCancel):
        p = _piece(w, position)
        if p.kind != "cylinder":
            raise PatternMismatch(f"cylinder cancellation needs a cylinder, found {p.kind}")
        if not p.zero_class:
            raise PatternMismatch("cylinder cancellation needs a zero class")
        return w.replace(position, position + 1, [])
    if isinstance(move, CriticalCreate):
        h = _level_genus(w, position)
        j = h + 1 if move.pair is None else move.pair
        if move.cocurve not in ("a", "b") or not 1 <= j <= h + 1:
            raise PatternMismatch("critical point creation needs pair in 1..genus+1 and cocurve 'a' or 'b'")
        pair = [handle1_piece(h, j, move.cocurve), handle2_piece(h + 1, f"{_other(move.cocurve)}{j}")]
        return w.replace(position, position, pair)
    if isinstance(move, CriticalCancel):
        p, q = _piece(w, position), _piece(w, position + 1)
        if not _is_birth_death(p, q):
            raise PatternMismatch("critical point cancellation needs a 1-handle followed by a 2-handle dual to its belt circle")
        if not (p.zero_class and q.zero_class):
            raise PatternMismatch("critical point cancellation needs zero classes")
        return w.replace(position, position + 2, [cylinder(p.source_genus)])
    if isinstance(move, Switch):
        p, q = _piece(w, position), _piece(w, position + 1)
        if not (p.zero_class and q.zero_class):
            raise PatternMismatch("critical point switch is supported for zero-class pieces only")
        return w.replace(position, position + 2, list(_switch(p, q)))
    if isinstance(move, ClassSlide):
        p, q = _piece(w, position), _piece(w, position + 1)
        if p.kind == "cylinder":
            cyl, other, cyl_first = p, q, True
            d_cyl, d_other = move.first, move.second
        elif q.kind == "cylinder":
            cyl, other, cyl_first = q, p, False
            d_cyl, d_other = move.second, move.first
        else:
            raise PatternMismatch("class slide needs one of the two pieces to be a cylinder")
        d_cyl = tuple(int(b) % 2 for b in d_cyl)
        d_other = tuple(int(b) % 2 for b in d_other)
        if len(d_cyl) != len(cyl.class_bits) or len(d_other) != len(other.class_bits):
            raise PatternMismatch("class slide bit vectors have the wrong length")
        if other.kind == "cylinder":
            old = tuple(a ^ b for a, b in zip(cyl.class_bits, other.class_bits))
            new = tuple(a ^ b for a, b in zip(d_cyl, d_other))
        else:
            old = _mask(other, [a ^ b for a, b in zip(transport(other, cyl.class_bits, cyl_first), other.class_bits)])
            new = _mask(other, [a ^ b for a, b in zip(transport(other, d_cyl, cyl_first), d_other)])
        if old != new:
            raise PatternMismatch("class slide needs c_i + c_{i+1} = d_i + d_{i+1}")
        first = cyl.with_bits(d_cyl) if cyl_first else other.with_bits(d_other)
        second = other.with_bits(d_other) if cyl_first else cyl.with_bits(d_cyl)
        return w.replace(position, position + 2, [first, second])
    raise PatternMismatch(f"unknown move {move!r}")


def normalize(w: CobWord) -> CobWord:
    """Greedily drop zero-class cylinders and cancel zero-class birth-death pairs."""
    changed = True
    while changed:
        changed = False
        for n, p in enumerate(w.pieces):
            if p.kind == "cylinder" and p.zero_class:
                w = apply_move(w, CylinderCancel(), n)
                changed = True
                break
            if n + 1 < len(w.pieces) and _is_birth_death(p, w.pieces[n + 1]) and p.zero_class and w.pieces[n + 1].zero_class:
                w = apply_move(w, CriticalCancel(), n)
                changed = True
                break
    return w


def move_error(old: CobWord, new: CobWord, rng: np.random.Generator, samples: int = 10) -> float | None:
    """Pointwise discrepancy between the composites of two words; None if either leaves the symbolic fragment."""
    try:
        a, b = composite(old), composite(new)
    except NotComposable:
        return None
    return agree_on_samples(a, b, rng, samples)


# -- Heegaard words for the supported families ------------------------------


def continuant(weights: Sequence[int]) -> int:
    """Determinant of the tridiagonal matrix with ``weights`` on the diagonal and 1 beside it."""
    a, b = 1, 0  # K(empty), K(-1)
    for m in weights:
        a, b = m * a - b, a
    return a


def _sl2_row_word(p: int, q: int) -> tuple[Substitution, np.ndarray]:
    """Genus-1 substitution whose homology matrix has first row (p, -q)."""
    # find r, s with p s + q r = 1 so [[p, -q], [r, s]] is in SL(2, Z)
    g, s, r = _ext_gcd(p, q)
    if g != 1:
        raise UnsupportedFamily(f"gcd({p}, {q}) != 1")
    M = np.array([[p, -q], [r, s]], dtype=object)
    # right-multiply by elementary matrices until the first row is (1, 0)
    ops: list[tuple[str, int]] = []
    a, b = p, -q

    def col2(n):  # col2 += n col1: E = [[1, n], [0, 1]]
        nonlocal a, b
        b += n * a
        ops.append(("U", n))

    def col1(n):  # col1 += n col2: E = [[1, 0], [n, 1]]
        nonlocal a, b
        a += n * b
        ops.append(("L", n))

    while (a, b) != (1, 0):
        if a == 1:
            col2(-b)
        elif b == 0:  # a = -1
            col2(1)
        elif a == 0:  # b = +-1
            col1(b)
        elif abs(a) >= abs(b):
            col1(-(a // b))
        else:
            col2(-(b // a))
    # now M E_1 ... E_k = [[1, 0], [c, 1]]
    E = np.array([[1, 0], [0, 1]], dtype=object)
    for kind, n in ops:
        E = E @ (np.array([[1, n], [0, 1]], dtype=object) if kind == "U" else np.array([[1, 0], [n, 1]], dtype=object))
    Lm = M @ E
    c = int(Lm[1, 0])
    # M = L E_k^-1 ... E_1^-1 ; substitution for a product X_1 ... X_n is s_n.then(...).then(s_1)
    factors: list[Substitution] = [twist_substitution("a1", 1, c)]
    for kind, n in reversed(ops):
        factors.append(twist_substitution("b1" if kind == "U" else "a1", 1, -n))
    sub = identity_substitution(1)
    for f in reversed(factors):
        sub = sub.then(f)
    return sub, M


def _ext_gcd(p: int, q: int) -> tuple[int, int, int]:
    """g, s, r with p s + q r = g = gcd(p, q) >= 0."""
    old_r, rr = p, q
    old_s, ss = 1, 0
    old_t, tt = 0, 1
    while rr:
        k = old_r // rr
        old_r, rr = rr, old_r - k * rr
        old_s, ss = ss, old_s - k * ss
        old_t, tt = tt, old_t - k * tt
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def gluing_substitution(p: int, q: int) -> Substitution:
    """Genus-1 automorphism sending alpha to a word with exponent sums (p, -q) and fixing [alpha, beta]."""
    return _sl2_row_word(p, q)[0]


def _embed_substitution(sub: Substitution, genus: int, pair: int) -> Substitution:
    """Genus-1 substitution acting on pair ``pair`` of a genus-``genus`` surface."""
    from .words import Word

    off = 2 * (pair - 1)

    def shift(w: Word) -> Word:
        return Word(tuple((abs(x) + off) * (1 if x > 0 else -1) for x in w.letters))

    imgs = {k + off: shift(w) for k, w in sub.images.items()}
    inv = None if sub.inverse_images is None else {k + off: shift(w) for k, w in sub.inverse_images.items()}
    return Substitution(genus, imgs, inv)


@dataclass(frozen=True)
class Lens:
    p: int
    q: int
    eps0: int = 1
    eps1: int = 1


@dataclass(frozen=True)
class S2xS1:
    eps0: int = 1
    eps1: int = 1


@dataclass(frozen=True)
class ConnectedSum:
    summands: tuple


@dataclass(frozen=True)
class Plumbing:
    weights: tuple[int, ...]
    edges: tuple[tuple[int, int], ...] = ()


def _bits1(eps: int, slot: int, genus: int = 1, pair: int = 1) -> tuple[int, ...]:
    """Class bits on a genus surface turning the central value at generator ``slot`` of ``pair`` into eps."""
    bits = [0] * (2 * genus)
    if eps < 0:
        # flipping generator g needs the bit of its partner
        bits[(2 * (pair - 1) + slot) ^ 1] = 1
    return tuple(bits)


def _genus1_block(fam) -> tuple[str, str, Substitution, int, int]:
    """(cocurve of the 1-handle, attaching curve type of the 2-handle, gluing map, eps0, eps1)."""
    if isinstance(fam, Lens):
        if fam.p < 1 or math.gcd(fam.p, fam.q) != 1:
            raise UnsupportedFamily(f"lens space needs p >= 1 and gcd(p, q) = 1, got ({fam.p}, {fam.q})")
        return "b", "a", gluing_substitution(fam.p, fam.q), fam.eps0, fam.eps1
    if isinstance(fam, S2xS1):
        return "b", "b", identity_substitution(1), fam.eps0, fam.eps1
    if isinstance(fam, Plumbing):
        p, q = plumbing_lens(fam)
        return _genus1_block(Lens(p, q))
    raise UnsupportedFamily(f"{type(fam).__name__} is not a genus-1 family")


def plumbing_lens(fam: Plumbing) -> tuple[int, int]:
    """(p, q) of the lens space bounded by a linear chain plumbing."""
    n = len(fam.weights)
    edges = {tuple(sorted(e)) for e in fam.edges}
    chain = {(i, i + 1) for i in range(n - 1)}
    if edges != chain:
        raise UnsupportedFamily("only linear chains (edges i -- i+1) have a genus-1 Heegaard word")
    p = continuant(fam.weights)
    q = continuant(fam.weights[1:])
    if p == 0:
        raise UnsupportedFamily("degenerate chain (continuant 0) is S^2 x S^1; use S2xS1")
    if p < 0:
        p, q = -p, -q
    return p, q


def heegaard_word(fam) -> CobWord:
    """CobWord from genus 0 to genus 0 realising a Heegaard splitting of the family.

    A genus-1 block is 1-handle (belt beta, B = eps0 I), the gluing
    diffeomorphism, then a 2-handle (along alpha for lens spaces, along beta
    for S^2 x S^1) with holonomy eps1 I.  Connected sums stack the blocks on
    consecutive pairs.
    """
    if isinstance(fam, ConnectedSum):
        blocks = [_genus1_block(f) for f in fam.summands]
    else:
        blocks = [_genus1_block(fam)]
    g = len(blocks)
    pieces: list[ElemCob] = []
    for i, (co, _, _, e0, _) in enumerate(blocks):
        # belt beta: B is the fixed holonomy (slot 1)
        pieces.append(handle1_piece(i, i + 1, co, _bits1(e0, 1 if co == "b" else 0, i + 1, i + 1)))
    for i, (_, _, sub, _, _) in enumerate(blocks):
        if not sub.is_identity:
            pieces.append(diffeo_piece(_embed_substitution(sub, g, i + 1)))
    for i in reversed(range(g)):
        _, t, _, _, e1 = blocks[i]
        pieces.append(handle2_piece(i + 1, f"{t}{i + 1}", _bits1(e1, 0 if t == "a" else 1, i + 1, i + 1)))
    return CobWord(0, tuple(pieces))


def family_intersection(fam):
    """Generalized-intersection report for genus-1 families."""
    if isinstance(fam, Lens):
        return lens_intersection(fam.p, fam.q, fam.eps0, fam.eps1)
    if isinstance(fam, Plumbing):
        p, q = plumbing_lens(fam)
        return lens_intersection(p, q)
    from .correspondences import s2s1_intersection

    if isinstance(fam, S2xS1):
        return s2s1_intersection(fam.eps0, fam.eps1)
    raise UnsupportedFamily(f"no intersection enumerator for {type(fam).__name__}")


def family_from_json(d):
    kind = str(d.get("family", "")).lower()
    if kind == "lens":
        return Lens(int(d["p"]), int(d["q"]), int(d.get("eps0", 1)), int(d.get("eps1", 1)))
    if kind in ("s2xs1", "s2s1"):
        return S2xS1(int(d.get("eps0", 1)), int(d.get("eps1", 1)))
    if kind in ("connsum", "connected_sum"):
        return ConnectedSum(tuple(family_from_json(s) for s in d["summands"]))
    if kind == "plumbing":
        w = tuple(int(x) for x in d["weights"])
        edges = d.get("edges", [[i, i + 1] for i in range(len(w) - 1)])
        return Plumbing(w, tuple(tuple(e) for e in edges))
    raise UnsupportedFamily(f"unknown family {d.get('family')!r}")
