import pytest
from hypothesis import given, strategies as st

from teichforge.surface_atlas import F11, build_atlas
from teichforge.words import (Basis, BasisMismatch, FreeWord, commutator, conjugate_in_free,
                              parse_reflection, phi_grade, reduce_free, reduce_reflection,
                              substitute)

letters_f11 = st.lists(st.sampled_from([1, -1, 2, -2]), max_size=14)
refl = st.lists(st.sampled_from("tuv"), max_size=14)


def test_reduce_free_examples():
    assert reduce_free([1, -1], F11).is_identity()
    assert reduce_free([1, 2, -2, 1], F11) == F11.parse("aa")
    w = reduce_free([-2, 1, 2, -1], F11)
    assert w.letters == (-2, 1, 2, -1)


def test_freeword_rejects_unreduced_and_mixed_bases():
    with pytest.raises(ValueError):
        FreeWord(F11, (1, -1))
    other = Basis("other", ("a", "b"))
    with pytest.raises(BasisMismatch):
        F11.gen(0) * other.gen(0)


def test_reduce_reflection_examples():
    assert reduce_reflection("tt").is_identity()
    assert reduce_reflection("tuuv") == parse_reflection("tv")
    # stuv = 1 forces s = vut
    assert parse_reflection("s") == parse_reflection("vut")
    assert (parse_reflection("s") * parse_reflection("tuv")).is_identity()


def test_phi_grade_examples():
    assert phi_grade(parse_reflection("t")) == (1, 1, 0)
    assert phi_grade(parse_reflection("tv")) == (0, 0, 1)
    assert phi_grade(parse_reflection("s")) == (1, 0, 0)


def test_substitute_examples():
    ab = F11.parse("ab")
    assert substitute(ab, F11.gens()) == ab
    t, u, v = (parse_reflection(c) for c in "tuv")
    img = substitute(ab, [t * v, u * v], identity=parse_reflection(""))
    assert img == parse_reflection("tvuv")
    a, b = F11.gens()
    assert substitute(commutator(a, b), [a, b * a]) == F11.parse("abAB")


def test_conjugate_in_free_examples():
    at = build_atlas()
    r = parse_reflection
    lhs = r("S") * r("tv") * r("s")
    assert conjugate_in_free(at.rewrite(F11, r("vt")), at.rewrite(F11, lhs)) is not None
    lhs = r("t") * r("uv") * r("t")
    assert conjugate_in_free(at.rewrite(F11, r("vu")), at.rewrite(F11, lhs)) is not None
    assert conjugate_in_free(F11.parse("ab"), F11.parse("bA")) is None


@given(letters_f11)
def test_reduce_idempotent_and_inverse(ls):
    w = reduce_free(ls, F11)
    assert reduce_free(w.letters, F11) == w
    assert (w * w.inverse()).is_identity()


@given(refl, refl)
def test_phi_grade_is_a_homomorphism(x, y):
    a, b = reduce_reflection(x), reduce_reflection(y)
    ga, gb, gab = phi_grade(a), phi_grade(b), phi_grade(a * b)
    assert gab == tuple((p + q) % 2 for p, q in zip(ga, gb))


@given(letters_f11, letters_f11)
def test_substitute_distributes(x, y):
    imgs = [F11.parse("ab"), F11.parse("bbA")]
    w1, w2 = reduce_free(x, F11), reduce_free(y, F11)
    assert substitute(w1 * w2, imgs) == substitute(w1, imgs) * substitute(w2, imgs)


@given(letters_f11, letters_f11)
def test_conjugator_is_a_witness(x, g):
    w = reduce_free(x, F11)
    h = reduce_free(g, F11)
    c = conjugate_in_free(w, h * w * h.inverse())
    assert c is not None and c * w * c.inverse() == h * w * h.inverse()
