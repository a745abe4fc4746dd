import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hsikit.cerf import (
    ClassSlide,
    CobWord,
    ConnectedSum,
    CriticalCancel,
    CriticalCreate,
    CylinderCancel,
    CylinderCreate,
    ElemCob,
    Lens,
    Plumbing,
    Relabel,
    S2xS1,
    Switch,
    composite,
    continuant,
    cylinder,
    diffeo_piece,
    family_from_json,
    family_intersection,
    gluing_substitution,
    handle1_piece,
    handle2_piece,
    heegaard_word,
    move_error,
    normalize,
    to_correspondences,
)
from hsikit.correspondences import lens_intersection
from hsikit.errors import PatternMismatch, UnsupportedFamily, UnsupportedShape
from hsikit.su2 import IDENTITY, MINUS_IDENTITY, Su2Vector, exp
from hsikit.words import Substitution, Word, boundary_word, evaluate, twist_substitution


def sample_word():
    return CobWord(
        1,
        (
            cylinder(1, [1, 0]),
            handle1_piece(1, 1, "a"),
            handle2_piece(2, "a2"),
            ElemCob("reparam", 1, (), {"angle": 0.4}),
            handle1_piece(1, 2, "b", [0, 0, 1, 0]),
        ),
    )


def test_genus_bookkeeping():
    w = sample_word()
    assert w.genera == [1, 1, 2, 1, 1, 2]
    with pytest.raises(PatternMismatch):
        CobWord(1, (cylinder(2),))
    with pytest.raises(UnsupportedShape):
        cylinder(1, [1, 0, 1])


def test_to_correspondences_shapes():
    w = CobWord(2, (cylinder(2), cylinder(2, [1, 0, 0, 0]), handle2_piece(2, "b1")))
    cs = to_correspondences(w)
    assert len(cs) == 3
    assert cs[0].as_graph().is_identity
    assert cs[1].as_graph().signs == (1, -1, 1, 1)
    assert cs[2].kind == "handle2" and cs[2].deaths == ((0, "b", 1),)


def test_cylinder_insert_cancel(rng):
    w = sample_word()
    w2 = apply_and_check(w, CylinderCreate(), 3, rng)
    assert len(w2) == len(w) + 1
    assert apply_and_check(w2, CylinderCancel(), 3, rng) == w


def test_cylinder_cancel_needs_zero_class():
    with pytest.raises(PatternMismatch, match="zero class"):
        from hsikit.cerf import apply_move

        apply_move(sample_word(), CylinderCancel(), 0)


def apply_and_check(w, move, pos, rng):
    from hsikit.cerf import apply_move

    new = apply_move(w, move, pos)
    err = move_error(w, new, rng, 6)
    assert err is None or err < 1e-10
    return new


@pytest.mark.parametrize("cocurve", ["a", "b"])
@pytest.mark.parametrize("pair", [1, 2])
def test_critical_create_cancel(rng, cocurve, pair):
    w = sample_word()
    w2 = apply_and_check(w, CriticalCreate(pair, cocurve), 1, rng)
    w3 = apply_and_check(w2, CriticalCancel(), 1, rng)
    assert w3.pieces[1] == cylinder(1)
    assert apply_and_check(w3, CylinderCancel(), 1, rng) == w


def test_critical_cancel_rejects_same_type():
    from hsikit.cerf import apply_move

    w = CobWord(1, (handle1_piece(1, 1, "b"), handle2_piece(2, "b1")))
    with pytest.raises(PatternMismatch, match="dual"):
        apply_move(w, CriticalCancel(), 0)


@pytest.mark.parametrize(
    "p, q",
    [
        (handle2_piece(3, "a1"), handle2_piece(2, "b2")),
        (handle2_piece(3, "b3"), handle2_piece(2, "a1")),
        (handle1_piece(1, 1, "a"), handle1_piece(2, 2, "b")),
        (handle1_piece(1, 2, "a"), handle1_piece(2, 1, "b")),
        (handle1_piece(2, 1, "b"), handle2_piece(3, "a3")),
        (handle1_piece(2, 3, "b"), handle2_piece(3, "b1")),
        (handle2_piece(3, "a2"), handle1_piece(2, 3, "b")),
        (handle2_piece(3, "a3"), handle1_piece(2, 1, "a")),
    ],
)
def test_switch_preserves_composite(rng, p, q):
    w = CobWord(p.source_genus, (p, q))
    s = apply_and_check(w, Switch(), 0, rng)
    assert [x.kind for x in s.pieces] == [q.kind, p.kind]
    # switching back returns the original word
    assert apply_and_check(s, Switch(), 0, rng) == w


def test_switch_rejects_shared_pair():
    from hsikit.cerf import apply_move

    with pytest.raises(PatternMismatch):
        apply_move(CobWord(1, (handle1_piece(1, 2, "b"), handle2_piece(2, "a2"))), Switch(), 0)


def test_class_slide_examples(rng):
    from hsikit.cerf import apply_move

    w = CobWord(2, (cylinder(2, [1, 0, 0, 1]), handle2_piece(2, "a1", [0, 0, 1, 0])))
    apply_and_check(w, ClassSlide((0, 0, 0, 0), (1, 0, 1, 1)), 0, rng)
    # the attaching curve a1 bounds, so its bit is inert
    apply_and_check(w, ClassSlide((0, 0, 0, 0), (0, 0, 1, 1)), 0, rng)
    with pytest.raises(PatternMismatch, match="c_i"):
        apply_move(w, ClassSlide((0, 0, 0, 0), (0, 1, 1, 1)), 0)


def test_class_slide_across_cylinders(rng):
    w = CobWord(1, (cylinder(1, [1, 0]), cylinder(1, [1, 1])))
    s = apply_and_check(w, ClassSlide((0, 1), (0, 0)), 0, rng)
    assert s.pieces[1].zero_class


def test_class_slide_through_diffeo(rng):
    from hsikit.cerf import apply_move

    w = CobWord(1, (diffeo_piece(twist_substitution("b1", 1, 3)), cylinder(1, [1, 0])))
    ok = []
    for d in [(0, 0), (1, 0), (0, 1), (1, 1)]:
        try:
            apply_and_check(w, ClassSlide(d, (0, 0)), 0, rng)
            ok.append(d)
        except PatternMismatch:
            pass
    assert len(ok) == 1


def test_class_slide_needs_cylinder():
    from hsikit.cerf import apply_move

    w = CobWord(1, (handle1_piece(1), handle2_piece(2, "a2")))
    with pytest.raises(PatternMismatch, match="cylinder"):
        apply_move(w, ClassSlide((0,) * 4, (0,) * 4), 0)


def test_relabel(rng):
    from hsikit.cerf import apply_move

    s = twist_substitution("a1", 1)
    w = CobWord(1, (diffeo_piece(s),))
    padded = Substitution(1, {1: Word((2, 1, -2, 2))}, s.inverse_images)
    assert apply_and_check(w, Relabel(padded), 0, rng).pieces[0].params["subst"] == padded
    with pytest.raises(PatternMismatch):
        apply_move(w, Relabel(twist_substitution("b1", 1)), 0)


def test_normalize_examples():
    three = CobWord(2, (cylinder(2),) * 3)
    assert normalize(three) == CobWord(2)
    bd = CobWord(0, (handle1_piece(0, 1, "b"), handle2_piece(1, "a1")))
    assert normalize(bd) == CobWord(0)
    w = sample_word()
    assert normalize(normalize(w)) == normalize(w)
    assert normalize(heegaard_word(Lens(5, 2))) == heegaard_word(Lens(5, 2))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.sampled_from(["cyl", "cyl1", "bd", "bd_a", "flip"]), max_size=8))
def test_normalize_idempotent_and_keeps_classes(ops):
    pieces = []
    for op in ops:
        if op == "cyl":
            pieces.append(cylinder(1))
        elif op == "cyl1":
            pieces.append(cylinder(1, [0, 1]))
        elif op == "bd":
            pieces += [handle1_piece(1, 1, "b"), handle2_piece(2, "a1")]
        elif op == "bd_a":
            pieces += [handle1_piece(1, 2, "a"), handle2_piece(2, "b2")]
        else:
            pieces.append(diffeo_piece(twist_substitution("b1", 1)))
    w = CobWord(1, tuple(pieces))
    n = normalize(w)
    assert normalize(n) == n
    nonzero = lambda x: [p.class_bits for p in x.pieces if not p.zero_class]
    assert nonzero(n) == nonzero(w)


def test_continuant():
    assert continuant([]) == 1
    assert continuant([5]) == 5
    assert continuant([2, 2]) == 3
    assert continuant([2, 2, 2]) == 4


@pytest.mark.parametrize("p, q", [(1, 0), (2, 1), (5, 2), (7, -3), (13, 5), (21, 8)])
def test_gluing_substitution(p, q):
    s = gluing_substitution(p, q)
    assert s.homology_matrix()[0].tolist() == [p, -q]
    assert s.apply(boundary_word(1)).freely_equal(boundary_word(1))


@pytest.mark.parametrize("p, q, e0, e1", [(5, 2, 1, 1), (7, 3, -1, 1), (4, 1, 1, -1), (9, 2, -1, -1)])
def test_heegaard_word_endpoints_match_enumerator(p, q, e0, e1):
    w = heegaard_word(Lens(p, q, e0, e1))
    assert w.genus == 0 and w.target_genus == 0
    h1, dif, h2 = to_correspondences(w)
    assert h1.births == ((0, "b", e0),)
    assert h2.deaths == ((0, "a", e1),)
    sub = dif.pre.subst
    B = IDENTITY if e0 > 0 else MINUS_IDENTITY
    target = IDENTITY if e1 > 0 else MINUS_IDENTITY
    for t in lens_intersection(p, q, e0, e1).components:
        A = exp(Su2Vector(0, 0, t))
        assert evaluate(sub.image(0), [A, B]).dist(target) < 1e-12


def test_s2s1_and_connected_sum_words():
    w = heegaard_word(S2xS1())
    assert [p.kind for p in w.pieces] == ["handle1", "handle2"]
    w = heegaard_word(ConnectedSum((Lens(2, 1), Lens(3, 1))))
    assert max(w.genera) == 2 and w.target_genus == 0
    assert [p.kind for p in w.pieces].count("handle2") == 2


def test_plumbing_family():
    fam = Plumbing((2, 3, 2), ((0, 1), (1, 2)))
    assert family_intersection(fam).perturbed_count == continuant([2, 3, 2])
    with pytest.raises(UnsupportedFamily):
        heegaard_word(Plumbing((2, 2, 2, 2), ((0, 1), (0, 2), (0, 3))))


def test_word_json_roundtrip():
    w = heegaard_word(ConnectedSum((Lens(5, 2), S2xS1(1, -1))))
    assert CobWord.from_json(w.to_json()) == w
    assert family_from_json({"family": "lens", "p": 3, "q": 1}) == Lens(3, 1)
    with pytest.raises(UnsupportedFamily):
        family_from_json({"family": "hyperbolic"})


def test_birth_death_word_composite_is_diagonal():
    w = CobWord(1, (handle1_piece(1, 1, "b"), handle2_piece(2, "a1")))
    assert composite(w).as_graph().is_identity
