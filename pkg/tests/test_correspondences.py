import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hsikit.correspondences import (
    Correspondence,
    Family,
    Graph,
    agree_on_samples,
    apply,
    class_signs,
    compose,
    elementary,
    embeddedness_check,
    graph,
    handle1,
    handle2,
    lens_intersection,
    s2s1_intersection,
)
from hsikit.errors import GenusMismatch, InvalidParams, NotComposable, UnsupportedShape
from hsikit.moduli import ModuliPoint
from hsikit.su2 import IDENTITY, MINUS_IDENTITY, random_su2
from hsikit.words import HolonomyPoint, twist_substitution

seeds = st.integers(0, 2**32 - 1)


def point_with(genus, rng, fixed):
    """Random moduli point with some generators pinned, e.g. {1: IDENTITY}."""
    hol = [fixed.get(k, random_su2(rng)) for k in range(2 * genus)]
    return ModuliPoint.from_holonomy(HolonomyPoint(genus, tuple(hol)))


def test_zero_class_cylinder_is_diagonal(rng):
    c = elementary("cylinder", 2)
    x = ModuliPoint.random(2, rng)
    assert apply(c, x)[0].dist(x) < 1e-15


def test_class_a1_flips_B1_only(rng):
    c = elementary("cylinder", 2, [1, 0, 0, 0])
    x = ModuliPoint.random(2, rng)
    y = apply(c, x)[0]
    assert y.hol.hol[1].dist(-x.hol.hol[1]) < 1e-15
    assert all(y.hol.hol[k].dist(x.hol.hol[k]) < 1e-15 for k in (0, 2, 3))
    assert y.residual() < 1e-12


def test_handle2_beta1(rng):
    c = elementary("handle2", 2, curve="b1")
    assert c.deaths == ((0, "b", 1),)
    x = point_with(2, rng, {1: IDENTITY})
    (y,) = apply(c, x)
    assert y.genus == 1 and y.hol.hol == x.hol.hol[2:]
    assert y.theta == x.theta
    assert apply(c, ModuliPoint.random(2, rng)) == []


def test_handle2_class_flips_sign(rng):
    c = elementary("handle2", 1, [0, 1], curve="b1")  # class b1 flips A1 (inert); a1 would flip B1
    assert c.deaths[0][2] == 1
    c = elementary("handle2", 1, [1, 0], curve="b1")
    assert c.deaths[0][2] == -1


def test_handle1_returns_family(rng):
    c = elementary("handle1", 1, pair=2, cocurve="b")
    x = ModuliPoint.random(1, rng)
    fam = apply(c, x)
    assert isinstance(fam, Family) and fam.dim == 3
    for y in fam.sample(rng, 5):
        assert y.residual() < 1e-12
        assert y.hol.hol[3] == IDENTITY
        assert fam.contains(y)


def test_genus_mismatch(rng):
    with pytest.raises(GenusMismatch):
        apply(elementary("cylinder", 2), ModuliPoint.random(1, rng))
    with pytest.raises(GenusMismatch):
        compose(elementary("cylinder", 2), elementary("cylinder", 1))


def test_unsupported_shape():
    with pytest.raises(UnsupportedShape):
        elementary("pants", 1)
    with pytest.raises(UnsupportedShape):
        elementary("handle2", 1, curve="a3")


def test_diffeo_must_fix_boundary():
    from hsikit.words import Substitution, Word

    bad = Substitution(1, {0: Word((2,))}, {0: Word((2,))})
    with pytest.raises(UnsupportedShape):
        elementary("diffeo", 1, subst=bad)


@given(seeds)
def test_graph_outputs_are_valid_points(seed):
    rng = np.random.default_rng(seed)
    x = ModuliPoint.random(2, rng)
    for c in (
        elementary("reparam", 2, angle=0.7),
        elementary("base_path", 2, pair=2),
        elementary("diffeo", 2, subst=twist_substitution("a2", 2, 3)),
    ):
        assert apply(c, x)[0].residual() < 1e-10


@given(seeds)
def test_graph_composition_is_pointwise(seed):
    rng = np.random.default_rng(seed)
    f = elementary("base_path", 2, [0, 1, 1, 0], pair=1)
    g = elementary("diffeo", 2, [1, 0, 0, 1], subst=twist_substitution("b1", 2, 2))
    x = ModuliPoint.random(2, rng)
    stepwise = apply(g, apply(f, x)[0])[0]
    assert apply(compose(f, g), x)[0].dist(stepwise) < 1e-10


def test_graph_inverse(rng):
    g = elementary("base_path", 1, [1, 1]).pre.then(elementary("reparam", 1, angle=0.4).pre)
    x = ModuliPoint.random(1, rng)
    th, hol = g.apply(x.theta, x.hol.hol)
    th2, hol2 = g.invert(th, hol)
    assert (th2 - x.theta).euclid < 1e-12 and max(a.dist(b) for a, b in zip(hol2, x.hol.hol)) < 1e-12


def test_rotation_then_base_path_not_composable():
    with pytest.raises(NotComposable):
        compose(elementary("reparam", 1, angle=0.2), elementary("base_path", 1))


def test_sign_flips_form_z2_group():
    bits = list(itertools.product((0, 1), repeat=4))
    for c in bits[:6]:
        for d in bits[5:]:
            lhs = compose(elementary("cylinder", 2, c), elementary("cylinder", 2, d)).as_graph()
            rhs = elementary("cylinder", 2, [a ^ b for a, b in zip(c, d)]).as_graph()
            assert lhs.signs == rhs.signs
    one = elementary("cylinder", 2, [1, 1, 0, 1])
    assert compose(one, one).as_graph().is_identity


def test_handle2_pairs_commute(rng):
    lhs = compose(handle2(2, "a1"), handle2(1, "a1"))
    rhs = compose(handle2(2, "a2"), handle2(1, "a1"))
    assert lhs == rhs
    hits = 0
    for _ in range(1000):
        x = point_with(2, rng, {0: IDENTITY, 2: IDENTITY})
        a = apply(handle2(1, "a1"), apply(handle2(2, "a1"), x)[0])
        b = apply(handle2(1, "a1"), apply(handle2(2, "a2"), x)[0])
        assert a[0].dist(b[0]) == 0.0
        hits += 1
    assert hits == 1000


def test_birth_death_composes_to_diagonal(rng):
    for pair in (1, 2, 3):
        c = compose(handle1(2, pair, "b"), handle2(3, f"a{pair}"))
        assert c.kind == "graph" and c.as_graph().is_identity
        c = compose(handle1(2, pair, "a"), handle2(3, f"b{pair}"))
        assert c.as_graph().is_identity


def test_birth_death_with_signs(rng):
    # B = -I born, then killed along alpha with eps = -1: A must be -I, which is free -> still diagonal
    c = compose(handle1(1, 1, "b", -1), handle2(2, "a1", -1))
    assert c.as_graph().is_identity


def test_same_type_birth_death_not_composable():
    with pytest.raises(NotComposable):
        compose(handle1(1, 1, "b"), handle2(2, "b1"))


def test_mixed_composition_matches_pointwise(rng):
    c1 = compose(handle2(3, "b2"), elementary("cylinder", 2, [1, 0, 0, 1]))
    c2 = compose(handle1(2, 1, "a"), elementary("reparam", 3, angle=0.3))
    c = compose(c1, c2)
    for _ in range(20):
        x = point_with(3, rng, {3: IDENTITY})
        mid = apply(c1, x)
        fam = apply(c2, mid[0])
        T = [random_su2(rng)]
        assert apply(c, x).point(T).dist(fam.point(T)) < 1e-12


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_associativity(seed):
    rng = np.random.default_rng(seed)
    a = elementary("diffeo", 2, [1, 0, 1, 1], subst=twist_substitution("a1", 2))
    b = handle2(2, "b2", -1)
    c = compose(elementary("cylinder", 1, [0, 1]), handle1(1, 1, "a"))
    lhs, rhs = compose(compose(a, b), c), compose(a, compose(b, c))
    assert agree_on_samples(lhs, rhs, rng, 10) < 1e-10


def test_json_roundtrip():
    c = compose(elementary("base_path", 2, [1, 0, 0, 0]), compose(handle2(2, "a2", -1), handle1(1, 1, "b")))
    assert Correspondence.from_json(c.to_json()) == c
    d = Correspondence.from_json({"shape": "handle2", "genus": 2, "params": {"curve": "b1"}})
    assert d.deaths == ((0, "b", 1),)


def test_class_signs_length_checked():
    with pytest.raises(InvalidParams):
        class_signs([1, 0, 1], 2)


def test_embeddedness_diagonal_and_birth_death(rng):
    rep = embeddedness_check(graph(Graph.identity(1)), graph(Graph.identity(1)), samples=5, rng=rng)
    assert rep.passed and not rep.empty
    rep = embeddedness_check(handle1(1, 1, "b"), handle2(2, "a1"), samples=5, rng=rng)
    assert rep.passed and rep.worst_rank_deficit == 0 and rep.composite_is_diagonal


def test_embeddedness_degenerate_pair_is_empty(rng):
    # the 1-handle forces B = -I, the 2-handle along beta needs B = +I
    rep = embeddedness_check(handle1(1, 1, "b", -1), handle2(2, "b1", 1), samples=5, rng=rng)
    assert not rep.passed and rep.empty


def test_embeddedness_same_type_is_not_transverse(rng):
    rep = embeddedness_check(handle1(1, 1, "b"), handle2(2, "b1"), samples=3, rng=rng)
    assert not rep.passed and rep.worst_rank_deficit > 0


@pytest.mark.parametrize(
    "args, expected",
    [((2, 1, 1, 1), (2, 0, 2)), ((3, 1, 1, 1), (1, 1, 3)), ((2, 1, -1, 1), (0, 1, 2))],
)
def test_lens_intersection_examples(args, expected):
    r = lens_intersection(*args)
    assert (r.n_central, r.n_spheres, r.perturbed_count) == expected


def test_lens_components_solve_equation():
    from hsikit.su2 import Su2Vector, exp

    for p, q, e0, e1 in [(7, 3, 1, -1), (6, 5, -1, 1), (1, 0, 1, 1)]:
        eta = e1 * e0**q
        for t in lens_intersection(p, q, e0, e1).components:
            A = exp(Su2Vector(0, 0, t))
            Ap = IDENTITY
            for _ in range(p):
                Ap = Ap * A
            assert Ap.dist(IDENTITY if eta > 0 else MINUS_IDENTITY) < 1e-12


def test_lens_intersection_invalid():
    with pytest.raises(InvalidParams):
        lens_intersection(4, 2)
    with pytest.raises(InvalidParams):
        lens_intersection(0, 1)


def test_s2s1_reports():
    assert s2s1_intersection(1, 1).perturbed_count == 2
    assert s2s1_intersection(1, -1).perturbed_count == 0


@settings(max_examples=50)
@given(st.integers(1, 60), st.integers(-60, 60), st.sampled_from([1, -1]), st.sampled_from([1, -1]))
def test_lens_count_is_p(p, q, e0, e1):
    if math.gcd(p, q) != 1:
        return
    r = lens_intersection(p, q, e0, e1)
    assert r.perturbed_count == p == r.n_central + 2 * r.n_spheres
