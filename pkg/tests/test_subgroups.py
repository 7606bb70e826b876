import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from teichforge.linalg import ModSubspace, is_prime, next_prime
from teichforge.subgroups import (CosetAction, NotAMember, conjugacy_equal,
                                  cyclic_class_decomposition, fold, induce_up, is_self_normalizing,
                                  normalizer, random_transitive_action)
from teichforge.surface_atlas import F04, F11, F14B, grade_action
from teichforge.words import commutator, parse_reflection, reduce_free, substitute

A, B = F11.gens()
INDEX4 = [A * A, B * B, (A * B) ** 2, (B * A) ** 2, commutator(A, B)]


def rank_ok(c):
    return len(c.schreier.generators) == 1 + c.degree * (c.mark.rank - 1)


def test_fold_examples():
    g = fold([A], F11)
    assert g.vertices == 1 and not g.complete
    g = fold([A, B], F11)
    assert g.complete and g.action().degree == 1
    g = fold(INDEX4, F11)
    assert g.complete and g.vertices == 4


def test_index_and_rank(atlas):
    assert atlas.F14_in_F04.degree == 2 and atlas.F14_in_F04.rank() == 5
    assert atlas.F14_in_F11.degree == 4 and atlas.F14_in_F11.rank() == 5
    assert CosetAction.whole(F11).rank() == 2
    for c in (atlas.F14_in_F04, atlas.F14_in_F11):
        assert rank_ok(c)


def test_membership_examples():
    pi11 = grade_action((0,))
    assert pi11.contains(parse_reflection("tv"))
    assert not grade_action((0, 1, 2)).contains(parse_reflection("t"))
    assert CosetAction.whole(F11).contains(F11.parse("abAAb"))


def test_pullback_examples(atlas):
    c = atlas.F14_in_F11
    assert c.pullback(F11.gens(), F11).same_subgroup(c)
    # abelianization mod 2 onto (Z/2)^2, trivial subgroup
    klein = CosetAction(F11, ((1, 0, 3, 2), (2, 3, 0, 1)))
    assert klein.pullback(F11.gens(), F11).same_subgroup(fold(INDEX4, F11).action())


def test_pullback_composes(rng):
    c = random_transitive_action(F11, 5, rng)
    f = [F11.parse("ab"), F11.parse("B")]
    g = [F11.parse("aa"), F11.parse("bA")]
    gf = [substitute(w, g) for w in f]
    assert c.pullback(g, F11).pullback(f, F11).same_subgroup(c.pullback(gf, F11))


def test_intersect_examples():
    c2 = CosetAction(F11, ((1, 0), (0, 1)))
    c3 = CosetAction(F11, ((0, 1, 2), (1, 2, 0)))
    whole = CosetAction.whole(F11)
    assert c2.intersect(whole).same_subgroup(c2)
    assert c2.intersect(c2).same_subgroup(c2)
    assert c2.intersect(c3).degree == 6


def test_schreier_and_express(atlas, rng):
    c = atlas.F14_in_F11
    assert c.express_in_basis(A * A).letters == (1,)
    assert c.express_in_basis(F11.identity).is_identity()
    gens = c.schreier.generators
    for _ in range(100):
        w = reduce_free([int(x) for x in rng.choice([1, -1, 2, -2], size=10)], F11)
        if not c.contains(w):
            with pytest.raises(NotAMember):
                c.express_in_basis(w)
            continue
        assert substitute(c.express_in_basis(w), gens) == w


def test_abelianize_mod(atlas):
    c = atlas.F14_in_F11
    assert not c.abelianize_mod(F11.identity, 5).any()
    for i, g in enumerate(c.schreier.generators):
        v = c.abelianize_mod(g, 5)
        assert v[i] == 1 and v.sum() == 1
    g, h = c.schreier.generators[:2]
    assert not c.abelianize_mod(commutator(g, h), 5).any()


def test_conjugate_and_automorphism(rng):
    c = random_transitive_action(F11, 5, rng)
    member = c.schreier.generators[0]
    assert c.conjugate_subgroup(member).same_subgroup(c)
    assert c.image_under_automorphism(F11.gens()).same_subgroup(c)
    g = F11.parse("aB")
    # inner automorphism w -> g^-1 w g has inverse w -> g w g^-1
    inv_imgs = [g * x * g.inverse() for x in F11.gens()]
    assert c.image_under_automorphism(inv_imgs).same_subgroup(c.conjugate_subgroup(g))


def test_conjugacy_equal_examples(rng):
    c = random_transitive_action(F11, 6, rng)
    g = F11.parse("abbA")
    d = c.conjugate_subgroup(g)
    h = conjugacy_equal(c, d)
    assert h is not None and c.contains(h * g.inverse())
    assert conjugacy_equal(c, CosetAction.whole(F11)) is None
    x = CosetAction(F11, ((1, 2, 0), (0, 1, 2)))
    y = CosetAction(F11, ((0, 1, 2), (1, 2, 0)))
    assert conjugacy_equal(x, y) is None


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 7))
def test_conjugacy_is_an_equivalence(seed, n):
    r = np.random.default_rng(seed)
    c = random_transitive_action(F11, n, r)
    assert conjugacy_equal(c, c) is not None
    d = c.conjugate_subgroup(F11.parse("ab"))
    e = d.conjugate_subgroup(F11.parse("Ba"))
    assert conjugacy_equal(d, c) is not None
    assert conjugacy_equal(c, e) is not None


def test_normalizer_examples(atlas):
    assert normalizer(atlas.F14_in_F04).degree == 1
    sn = CosetAction(F11, ((1, 0, 2), (0, 2, 1)))
    assert is_self_normalizing(sn)
    assert normalizer(CosetAction(F11, ((1, 0), (0, 1)))).degree == 1


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 8))
def test_normalizer_contains_and_divides(seed, n):
    c = random_transitive_action(F11, n, np.random.default_rng(seed))
    nc = normalizer(c)
    assert all(nc.contains(g) for g in c.schreier.generators)
    assert c.degree % nc.degree == 0


def test_cyclic_class_decomposition(atlas, rng):
    assert len(cyclic_class_decomposition(CosetAction.whole(F11), A)) == 1
    alpha = atlas.punctures[0].word
    assert len(cyclic_class_decomposition(CosetAction.whole(F14B), alpha)) == 1
    c = random_transitive_action(F11, 7, rng)
    w = F11.parse("abA")
    dec = cyclic_class_decomposition(c, w)
    assert len(dec) == len(c.cycles(w))
    assert all(c.contains(r) for r, _ in dec)


def test_induce_up(atlas, rng):
    inner = atlas.F14_in_F11
    rw = atlas.F11_to_B.rewrite
    same = induce_up(CosetAction.whole(F14B), inner, rw)
    assert same.same_subgroup(inner)
    sub = random_transitive_action(F14B, 2, rng)
    big = induce_up(sub, inner, rw)
    assert big.degree == 8 and rank_ok(big)
    for _ in range(200):
        w = reduce_free([int(x) for x in rng.choice([1, -1, 2, -2], size=8)], F11)
        expected = inner.contains(w) and sub.contains(rw(w))
        assert big.contains(w) == expected


def test_json_roundtrip(rng):
    c = random_transitive_action(F04, 4, rng)
    assert CosetAction.from_json(c.to_json()).same_subgroup(c)


def test_linalg_basics():
    assert [p for p in range(20) if is_prime(p)] == [2, 3, 5, 7, 11, 13, 17, 19]
    assert next_prime(7) == 11 and next_prime(1) == 2
    W = ModSubspace.span(5, 3, [[1, 2, 0], [2, 4, 0]])
    assert W.dim == 1 and W.contains([3, 1, 0]) and not W.contains([0, 0, 1])
    U = ModSubspace.span(5, 3, [[0, 0, 1], [1, 2, 0]])
    assert W.intersect(U) == W and W <= U
    # (v1, v2) -> (v1, 2 v1, v2) lies in W iff v2 = 0
    m = np.array([[1, 0], [2, 0], [0, 1]])
    assert W.preimage(m).dim == 1
    assert ModSubspace.from_json(W.to_json()) == W
