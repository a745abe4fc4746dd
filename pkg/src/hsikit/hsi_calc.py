"""Integer homological algebra and the HSI determination rules.

All matrix arithmetic uses Python integers, which are unbounded, so there is
no overflow to detect.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .errors import AdditivityFails, InvalidParams, NotATree

INFINITE = math.inf
Matrix = list[list[int]]


def _as_matrix(M) -> Matrix:
    rows = [[int(x) for x in row] for row in M]
    if rows and any(len(r) != len(rows[0]) for r in rows):
        raise InvalidParams("matrix rows have different lengths")
    return rows


def _identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A: Matrix, B: Matrix) -> Matrix:
    if not A:
        return []
    m = len(B[0]) if B else 0
    return [[sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(m)] for i in range(len(A))]


def det(M) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    A = _as_matrix(M)
    n = len(A)
    if n == 0:
        return 1
    if any(len(r) != n for r in A):
        raise InvalidParams("determinant needs a square matrix")
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            piv = next((i for i in range(k + 1, n) if A[i][k] != 0), None)
            if piv is None:
                return 0
            A[k], A[piv] = A[piv], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def smith_normal_form(M) -> tuple[Matrix, Matrix, Matrix]:
    """(D, U, V) with U M V = D diagonal, d_1 | d_2 | ..., d_i >= 0, U and V unimodular."""
    D = _as_matrix(M)
    m = len(D)
    n = len(D[0]) if m else 0
    U, V = _identity(m), _identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for R in D:
            R[i], R[j] = R[j], R[i]
        for R in V:
            R[i], R[j] = R[j], R[i]

    def add_row(src, dst, k):  # row dst += k row src
        D[dst] = [a + k * b for a, b in zip(D[dst], D[src])]
        U[dst] = [a + k * b for a, b in zip(U[dst], U[src])]

    def add_col(src, dst, k):
        for R in D:
            R[dst] += k * R[src]
        for R in V:
            R[dst] += k * R[src]

    for t in range(min(m, n)):
        while True:
            # smallest nonzero entry of the remaining block as pivot (keeps numbers small)
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    if D[i][j] and (best is None or abs(D[i][j]) < abs(D[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                return D, U, V
            swap_rows(t, best[0])
            swap_cols(t, best[1])
            p = D[t][t]
            done = True
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(t, i, -(D[i][t] // p))
                    done = done and D[i][t] == 0
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(t, j, -(D[t][j] // p))
                    done = done and D[t][j] == 0
            if not done:
                continue
            # divisibility: fold any entry not divisible by p into the pivot row
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % p), None)
            if bad is None:
                break
            add_row(bad[0], t, 1)
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
    return D, U, V


def elementary_divisors(M) -> list[int]:
    D, _, _ = smith_normal_form(M)
    k = min(len(D), len(D[0]) if D else 0)
    return [D[i][i] for i in range(k)]


def h1_order(M) -> int | float:
    """|coker M| for a square presentation matrix; INFINITE when it has a free part."""
    M = _as_matrix(M)
    if any(len(r) != len(M) for r in M):
        raise InvalidParams("presentation matrix must be square")
    if not M:
        return 1
    d = elementary_divisors(M)
    if any(x == 0 for x in d):
        return INFINITE
    return math.prod(d)


def euler_hsi(M) -> int:
    """|chi(HSI)|: the order of H_1 when finite, else 0.  The class plays no role."""
    h = h1_order(M)
    return 0 if h == INFINITE else int(h)


def block_diag(*Ms) -> Matrix:
    Ms = [_as_matrix(M) for M in Ms]
    n = sum(len(M) for M in Ms)
    out = [[0] * n for _ in range(n)]
    off = 0
    for M in Ms:
        for i, row in enumerate(M):
            for j, x in enumerate(row):
                out[off + i][off + j] = x
        off += len(M)
    return out


# -- graded groups ---------------------------------------------------------


def _prime_powers(m: int) -> list[int]:
    out, p = [], 2
    while p * p <= m:
        if m % p == 0:
            q = 1
            while m % p == 0:
                m //= p
                q *= p
            out.append(q)
        p += 1
    if m > 1:
        out.append(m)
    return out


def normalize_torsion(coeffs: Sequence[int]) -> tuple[int, ...]:
    """Sorted prime-power decomposition; trivial factors dropped."""
    out: list[int] = []
    for c in coeffs:
        c = abs(int(c))
        if c == 0:
            raise InvalidParams("torsion coefficient 0 is a free summand; use the rank")
        out += _prime_powers(c)
    return tuple(sorted(out))


Part = tuple[int, tuple[int, ...]]


@dataclass(frozen=True)
class GradedGroup:
    """Z/8-graded finitely generated abelian group, compared up to degree shift."""

    parts: tuple[Part, ...] = ((0, ()),) * 8
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        if len(self.parts) != 8:
            raise InvalidParams("a Z/8-graded group needs 8 degrees")
        parts = []
        for r, tors in self.parts:
            if r < 0:
                raise InvalidParams("negative rank")
            parts.append((int(r), normalize_torsion(tors)))
        object.__setattr__(self, "parts", tuple(parts))

    @classmethod
    def from_degrees(cls, ranks: dict | None = None, torsion: dict | None = None, meta: dict | None = None) -> GradedGroup:
        parts = [[0, []] for _ in range(8)]
        for d, r in (ranks or {}).items():
            parts[int(d) % 8][0] += int(r)
        for d, ts in (torsion or {}).items():
            parts[int(d) % 8][1] += list(ts)
        return cls(tuple((r, tuple(t)) for r, t in parts), dict(meta or {}))

    @property
    def total_rank(self) -> int:
        return sum(r for r, _ in self.parts)

    @property
    def torsion(self) -> tuple[int, ...]:
        return tuple(sorted(t for _, ts in self.parts for t in ts))

    @property
    def is_free(self) -> bool:
        return not self.torsion

    @property
    def is_zero(self) -> bool:
        return self.total_rank == 0 and not self.torsion

    def shift(self, k: int) -> GradedGroup:
        k %= 8
        return GradedGroup(tuple(self.parts[(d - k) % 8] for d in range(8)), dict(self.meta))

    def canonical(self) -> tuple[Part, ...]:
        """Lexicographically minimal rotation of the degree sequence."""
        return min(tuple(self.parts[(d + k) % 8] for d in range(8)) for k in range(8))

    def equivalent(self, other: GradedGroup) -> bool:
        return self.canonical() == other.canonical()

    def to_json(self) -> dict:
        return {
            "degrees": {str(d): {"rank": r, "torsion": list(t)} for d, (r, t) in enumerate(self.parts) if r or t},
            "total_rank": self.total_rank,
            "torsion": list(self.torsion),
            "meta": self.meta,
        }

    @classmethod
    def from_json(cls, d) -> GradedGroup:
        ranks = {k: v.get("rank", 0) for k, v in d.get("degrees", {}).items()}
        tors = {k: v.get("torsion", []) for k, v in d.get("degrees", {}).items()}
        return cls.from_degrees(ranks, tors, d.get("meta"))


def _tensor(a: Part, b: Part) -> Part:
    (r1, t1), (r2, t2) = a, b
    tors = [t for t in t1 for _ in range(r2)] + [t for t in t2 for _ in range(r1)]
    tors += [math.gcd(x, y) for x in t1 for y in t2]
    return r1 * r2, tuple(t for t in tors if t > 1)


def _tor(a: Part, b: Part) -> tuple[int, ...]:
    return tuple(g for x in a[1] for y in b[1] if (g := math.gcd(x, y)) > 1)


TOR_SHIFT = 1


def kunneth(G: GradedGroup, H: GradedGroup) -> GradedGroup:
    """Tensor product in degree i + j plus Tor in degree i + j + TOR_SHIFT (mod 8)."""
    parts = [[0, []] for _ in range(8)]
    for i in range(8):
        for j in range(8):
            r, t = _tensor(G.parts[i], H.parts[j])
            parts[(i + j) % 8][0] += r
            parts[(i + j) % 8][1] += list(t)
            parts[(i + j + TOR_SHIFT) % 8][1] += list(_tor(G.parts[i], H.parts[j]))
    return GradedGroup(tuple((r, tuple(t)) for r, t in parts), {"tor_shift": TOR_SHIFT})


def lens_hsi(p: int, q: int, cls: int = 0) -> GradedGroup:
    """Free of rank p.  Degree placement is not determined; all generators sit in degree 0."""
    if p < 1 or math.gcd(p, q) != 1:
        raise InvalidParams(f"lens space needs p >= 1 and gcd(p, q) = 1, got ({p}, {q})")
    meta = {"degrees": "unspecified", "class": cls}
    if cls:
        meta["parity"] = "single"
    return GradedGroup.from_degrees({0: p}, meta=meta)


def s2s1_hsi(cls: int = 0) -> GradedGroup:
    if cls:
        return GradedGroup(meta={"class": cls})
    return GradedGroup.from_degrees({0: 1, 3: 1}, meta={"class": 0})


# -- determination rules ---------------------------------------------------


@dataclass(frozen=True)
class TriadVerdict:
    minimal: bool
    index: int  # which of the three manifolds the verdict is about
    rank: int | None
    reason: str = ""

    def to_json(self) -> dict:
        return {"minimal": self.minimal, "index": self.index, "rank": self.rank, "reason": self.reason}


def triad_propagate(orders: Sequence[int | float | None], minimal_flags: Sequence[bool]) -> TriadVerdict:
    """Minimality of the manifold whose |H_1| is the sum of the other two.

    Infinite orders (None or inf) count as 0.  Returns Unknown (minimal=False)
    when the summands are not both flagged minimal; never asserts non-minimality.
    """
    if len(orders) != 3 or len(minimal_flags) != 3:
        raise InvalidParams("a triad has three manifolds")
    vals = [0 if (o is None or o == INFINITE) else int(o) for o in orders]
    for a in range(3):
        b, c = [k for k in range(3) if k != a]
        if vals[a] == vals[b] + vals[c] and vals[a] > 0:
            if minimal_flags[b] and minimal_flags[c]:
                return TriadVerdict(True, a, vals[a], "additivity holds and both summands are minimal")
            return TriadVerdict(False, a, None, "unknown: a summand is not known to be minimal")
    raise AdditivityFails(f"no arrangement of {tuple(vals)} satisfies |H1(Y_a)| = |H1(Y_b)| + |H1(Y_c)|")


@dataclass(frozen=True)
class PlumbingTree:
    weights: tuple[int, ...]
    edges: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        n = len(self.weights)
        for u, v in self.edges:
            if not (0 <= u < n and 0 <= v < n) or u == v:
                raise NotATree(f"bad edge ({u}, {v})")
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
        object.__setattr__(self, "edges", tuple((int(u), int(v)) for u, v in self.edges))

    @classmethod
    def chain(cls, weights: Sequence[int]) -> PlumbingTree:
        return cls(tuple(weights), tuple((i, i + 1) for i in range(len(weights) - 1)))

    def degrees(self) -> list[int]:
        d = [0] * len(self.weights)
        for u, v in self.edges:
            d[u] += 1
            d[v] += 1
        return d

    def components(self) -> list[list[int]]:
        """Connected components; raises NotATree on a cycle or repeated edge."""
        parent = list(range(len(self.weights)))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v in self.edges:
            ru, rv = find(u), find(v)
            if ru == rv:
                raise NotATree(f"edge ({u}, {v}) closes a cycle")
            parent[ru] = rv
        comps: dict[int, list[int]] = {}
        for v in range(len(self.weights)):
            comps.setdefault(find(v), []).append(v)
        return list(comps.values())

    def matrix(self) -> Matrix:
        n = len(self.weights)
        M = [[0] * n for _ in range(n)]
        for i, w in enumerate(self.weights):
            M[i][i] = w
        for u, v in self.edges:
            M[u][v] = M[v][u] = 1
        return M

    def to_json(self) -> dict:
        return {"weights": list(self.weights), "edges": [list(e) for e in self.edges]}

    @classmethod
    def from_json(cls, d) -> PlumbingTree:
        w = d["weights"]
        if isinstance(w, dict):
            w = [w[str(k)] if str(k) in w else w[k] for k in range(len(w))]
        if "edges" not in d:  # a bare weight list means a linear chain
            return cls.chain([int(x) for x in w])
        return cls(tuple(int(x) for x in w), tuple(tuple(e) for e in d["edges"]))


@dataclass(frozen=True)
class PlumbingVerdict:
    minimal: bool
    h1: int | None
    reason: str = ""

    def to_json(self) -> dict:
        return {"minimal": self.minimal, "h1": self.h1, "reason": self.reason}


def plumbing_minimal(tree: PlumbingTree) -> PlumbingVerdict:
    comps = tree.components()
    deg = tree.degrees()
    for comp in comps:
        low = [v for v in comp if tree.weights[v] < deg[v]]
        if low:
            return PlumbingVerdict(False, None, f"weight below degree at vertex {low[0]}")
        if all(tree.weights[v] == deg[v] for v in comp):
            return PlumbingVerdict(False, None, "S2xS1 degeneration: m(v) = d(v) at every vertex of a component")
    h = h1_order(tree.matrix())
    if h == INFINITE:  # cannot happen under the strict inequality, kept as a guard
        return PlumbingVerdict(False, None, "intersection form is degenerate")
    return PlumbingVerdict(True, int(h), "m(v) >= d(v) with strict inequality in every component")


@dataclass(frozen=True)
class QACert:
    det: int
    children: tuple[QACert, ...] = ()
    leaf: str | None = None  # "unknot" or "known" for leaves
    name: str = ""

    def to_json(self) -> dict:
        d: dict = {"det": self.det}
        if self.name:
            d["name"] = self.name
        if self.leaf:
            d["leaf"] = self.leaf
        if self.children:
            d["children"] = [c.to_json() for c in self.children]
        return d

    @classmethod
    def from_json(cls, d) -> QACert:
        if "det" not in d:
            raise InvalidParams("certificate node without det")
        return cls(int(d["det"]), tuple(cls.from_json(c) for c in d.get("children", [])), d.get("leaf"), str(d.get("name", "")))


@dataclass
class QAResult:
    verified: bool
    reasons: list[str]

    def __bool__(self) -> bool:
        return self.verified

    def to_json(self) -> dict:
        return {"verified": self.verified, "reasons": self.reasons}


def qa_verify(cert: QACert) -> QAResult:
    """Check det additivity at every resolution node down to unknot or known leaves."""
    reasons: list[str] = []

    def walk(node: QACert, path: str):
        label = node.name or path
        if node.det <= 0:
            reasons.append(f"{label}: det must be a nonzero natural, got {node.det}")
        if not node.children:
            if node.leaf == "unknot":
                if node.det != 1:
                    reasons.append(f"{label}: unknot leaf must have det 1, got {node.det}")
            elif node.leaf != "known":
                reasons.append(f"{label}: leaf is neither unknot nor a known quasi-alternating link")
            return
        if len(node.children) != 2:
            reasons.append(f"{label}: a resolution node needs exactly two children")
            return
        s = sum(c.det for c in node.children)
        if node.det != s:
            reasons.append(f"{label}: det L = det L0 + det L1 fails ({node.det} != {' + '.join(str(c.det) for c in node.children)})")
        for k, c in enumerate(node.children):
            walk(c, f"{path}.{k}")

    walk(cert, "root")
    return QAResult(not reasons, reasons)


def unknot() -> QACert:
    return QACert(1, leaf="unknot", name="unknot")


def hopf_certificate() -> QACert:
    return QACert(2, (unknot(), unknot()), name="hopf")


def trefoil_certificate() -> QACert:
    return QACert(3, (hopf_certificate(), unknot()), name="trefoil")


def all_rotations_equal(G: GradedGroup, H: GradedGroup) -> bool:
    return any(G.shift(k).parts == H.parts for k in range(8))
