import pytest

from teichforge import pipeline as P
from teichforge import veech as V
from teichforge.mcg import G1, G2, IDENTITY, S, T, random_gamma2
from teichforge.subgroups import CosetAction
from teichforge.surface_atlas import F11, F14B


@pytest.fixture(scope="module")
def toy():
    return P.construct(P.DeltaSpec.whole(), toy_primes=(2, 2, 3, 2)).layered


@pytest.fixture(scope="module")
def index2():
    return P.construct(P.DeltaSpec.from_perms((1, 0), (0, 1)), seed=0)


PI14 = P.LayeredSubgroup(CosetAction.whole(F14B), ())


def test_theta_image(index2):
    lam = index2.layered
    im = V.theta_image(lam, IDENTITY)
    assert im.image.key() == lam.key() and not im.signature_moved
    for m in (G1, G2):
        im = V.theta_image(lam, m)
        assert not im.signature_moved and im.beta is not None
    assert V.theta_image(lam, S).signature_moved


def test_layered_equal(index2):
    lam = index2.layered
    assert V.layered_equal(V.theta_image(lam, IDENTITY).image, lam, 2)
    # G1 swaps the two alpha classes, so it moves Lambda
    assert not V.layered_equal(V.theta_image(lam, G1).image, lam, 2)
    assert V.layered_equal(V.theta_image(lam, G2).image, lam, 2)


def test_guard_refusal():
    K = P.pullback_chain(P.delta0_from_delta(P.DeltaSpec.from_perms((1, 0), (0, 1)))).tilde
    lam = P.LayeredSubgroup(K.canonical_form(), (P.ModSubspace.zero(2, K.rank()),))
    with pytest.raises(P.GuardViolation):
        V.stabilizer(lam)


def test_pi14_is_characteristic(rng):
    key = V.class_key(PI14)
    for _ in range(20):
        m = random_gamma2(rng, 6) @ (S if rng.integers(0, 2) else T)
        assert V.class_key(V.theta_image(PI14, m).image) == key
    r = V.stabilizer(PI14)
    assert r.orbit_size == 1 and r.contains(S) and r.contains(T)


def test_degenerate_whole_gamma2():
    d = P.DeltaSpec.whole()
    c = P.construct(d)
    r = V.stabilizer(c.layered, 1)
    rep = V.verify_theorem(r, d, c.layered)
    assert rep.degenerate
    assert rep.ok and r.orbit_size == 6


def test_toy_layered_matches_table(toy):
    res = V.stabilizer(toy, 1)
    table = V.induce_to_pi11(V.materialize(toy))
    tab = V.orbit_stabilizer(table, V.act_on_table, equal=V.table_conjugate)
    assert res.orbit_size == tab.orbit_size
    for g in res.schreier_generators:
        assert tab.contains(g)
    for g in tab.schreier_generators:
        assert res.contains(g)


def test_materialize_bound(index2):
    with pytest.raises(V.DegreeBoundExceeded):
        V.materialize(index2.layered)


def test_origami_invariants(atlas):
    o = V.origami_export(atlas.F14_in_F11)
    assert (o.degree, o.genus, o.punctures) == (4, 1, 4)
    assert o.commutator() == (0, 1, 2, 3)
    triv = V.veech_of_origami(V.Origami((0,), (0,)))
    assert triv.orbit_size == 1 and triv.contains(S) and triv.contains(T)


def test_degree2_origami():
    o = V.Origami((1, 0), (0, 1))
    assert (o.genus, o.punctures) == (1, 2)
    r = V.veech_of_origami(o)
    # SL(2,Z) permutes the three index-2 subgroups of F(a,b) transitively
    index2 = [CosetAction(F11, p) for p in (((1, 0), (0, 1)), ((0, 1), (1, 0)), ((1, 0), (1, 0)))]
    orbit = {V.conjugacy_class_key(V.act_on_table(o.action, m)) for m in (IDENTITY, S, T, S @ T, T @ S)}
    assert orbit == {V.conjugacy_class_key(c) for c in index2}
    assert r.orbit_size == 3
    again = V.veech_of_origami(o)
    assert again.orbit_size == r.orbit_size and again.coset_table == r.coset_table


def test_l_shaped_origami():
    o = V.Origami((1, 0, 2), (2, 1, 0))
    assert (o.degree, o.genus, o.punctures) == (3, 2, 1)
    assert V.veech_of_origami(o).orbit_size == 3


def test_origami_text_and_json():
    o = V.Origami((1, 2, 0), (0, 2, 1))
    assert V.Origami.from_text(o.to_text()) == o
    assert V.Origami.from_json(o.to_json()) == o
    with pytest.raises(ValueError):
        V.Origami.from_text("2\n1 0\n")
    with pytest.raises(ValueError):
        V.Origami((1, 0, 2), (1, 0, 2))  # intransitive
