import pytest

from teichforge import mcg
from teichforge.mcg import G1, G2, IDENTITY, MINUS_I, S, T, Mat2
from teichforge.surface_atlas import F03


def test_mat2_basics():
    assert S @ S == MINUS_I
    assert (S @ T) ** 3 == MINUS_I
    assert G1 == T @ T and G2.is_gamma2() and not S.is_gamma2()
    with pytest.raises(ValueError):
        Mat2(1, 1, 1, 1)


def test_gamma2_word_round_trip(rng):
    for _ in range(200):
        m = mcg.random_gamma2(rng, 10)
        w, sign = mcg.gamma2_word(m)
        e = mcg.evaluate(w)
        assert e == m if sign > 0 else e == -m


def test_gamma2_word_rejects():
    with pytest.raises(mcg.NotInGamma2):
        mcg.gamma2_word(T)


def test_sl2_word_round_trip(rng):
    for _ in range(100):
        m = IDENTITY
        for _ in range(int(rng.integers(0, 10))):
            m = m @ (S if rng.integers(0, 2) else T.inverse())
        w, sign = mcg.sl2_word(m)
        got = IDENTITY
        for x in w.letters:
            g = (S, T)[abs(x) - 1]
            got = got @ (g if x > 0 else g.inverse())
        assert got == (m if sign > 0 else -m)


def test_lifts_abelianize_to_matrix():
    assert (mcg.LIFT_T.abelianization() == T.as_array()).all()
    assert (mcg.LIFT_S.abelianization() == S.as_array()).all()


def test_homology_matrices():
    for m in (G1, G2):
        assert mcg.projectively_equal(mcg.aut_lift(m).homology, m)
    assert mcg.projectively_equal(mcg.push_lift(F03.parse("xb")).homology, G1)
    assert mcg.projectively_equal(mcg.push_lift(F03.parse("yb")).homology, G2)


def test_klein_corrections_fix_punctures():
    for m in (G1, G2, MINUS_I):
        lift = mcg.aut_lift(m)
        assert lift.puncture_perm == (0, 1, 2, 3)
    assert mcg.aut_lift(S).puncture_perm != (0, 1, 2, 3)
    assert mcg.aut_lift(T).puncture_perm != (0, 1, 2, 3)


def test_parabolic_rotation_is_conjugacy_invariant():
    r1, r2 = mcg.parabolic_rotation(G1), mcg.parabolic_rotation(G2)
    assert (r1, r2) == (2, -2)
    for h in (S, T, G1, S @ T @ T, T.inverse() @ S):
        assert mcg.parabolic_rotation(h @ G1 @ h.inverse()) == r1
        assert mcg.parabolic_rotation(h @ G2 @ h.inverse()) == r2
    # G1 and G2 are not conjugate in SL(2,Z); S G1 S^-1 = G2^-1
    assert S @ G1 @ S.inverse() == G2.inverse()
    assert mcg.parabolic_rotation(-G1) == r1


def test_diagram_commutes(rng):
    sample = [mcg.random_gamma2(rng, 8) for _ in range(20)]
    assert all(r.agrees for r in mcg.verify_diagram2(sample))


def test_identity_identities():
    rows = mcg.lemma1_identities()
    assert len(rows) == 9 and all(r["holds"] for r in rows)


def test_free_aut_composition():
    from teichforge.surface_atlas import F11
    f, g = mcg.LIFT_S, mcg.LIFT_T
    x = F11.parse("abAbb")
    assert (f @ g)(x) == f(g(x))
    assert (f @ f.inverse())(x) == x
